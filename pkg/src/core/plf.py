# core/plf.py
# 구간 선형 함수 (piecewise linear) 대수
#
# 함수는 x_lo 순으로 정렬된 선분 리스트로 표현한다. 선분 내부는 서로 겹치지
# 않으며, 끝점은 공유할 수 있다. 한 점이 여러 선분에 속하면 가장 작은 값을 쓴다.
# 폭 0인 점 선분도 허용한다 (DP 초기 상태, 합성곱 항등원).

import math
from bisect import bisect_right
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple


EPS = 1e-9


class Segment(NamedTuple):
    """선분 [x_lo, x_hi], x_lo 에서의 값 y_lo, 기울기 slope"""
    x_lo: float
    x_hi: float
    y_lo: float
    slope: float

    def value(self, x: float) -> float:
        return self.y_lo + self.slope * (x - self.x_lo)

    @property
    def y_hi(self) -> float:
        return self.value(self.x_hi)

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def is_point(self) -> bool:
        return self.x_hi - self.x_lo <= EPS

    def contains(self, x: float) -> bool:
        return self.x_lo - EPS <= x <= self.x_hi + EPS


class PiecewiseLinear:
    """불변 구간 선형 함수. len(f) 는 조각 수 Φ(f)"""

    __slots__ = ('segments', '_starts')

    def __init__(self, segments: Iterable[Segment] = ()):
        self.segments: Tuple[Segment, ...] = tuple(segments)
        self._starts = [s.x_lo for s in self.segments]

    # === 생성 ===

    @classmethod
    def point(cls, x: float, y: float) -> 'PiecewiseLinear':
        return cls([Segment(float(x), float(x), float(y), 0.0)])

    @classmethod
    def linear(cls, x_lo: float, x_hi: float, y_lo: float, slope: float) -> 'PiecewiseLinear':
        if x_hi < x_lo:
            raise ValueError(f"잘못된 구간: [{x_lo}, {x_hi}]")
        if x_hi == x_lo:
            slope = 0.0
        return cls([Segment(float(x_lo), float(x_hi), float(y_lo), float(slope))])

    @classmethod
    def from_points(cls, points: Sequence[Tuple[float, float]]) -> 'PiecewiseLinear':
        """연속 꺾은선 (x 오름차순 점 목록)"""
        if len(points) == 1:
            return cls.point(*points[0])
        segments = []
        for (xa, ya), (xb, yb) in zip(points, points[1:]):
            if xb <= xa:
                raise ValueError("x 좌표는 증가해야 합니다")
            segments.append(Segment(float(xa), float(xb), float(ya), (yb - ya) / (xb - xa)))
        return cls(segments)

    # === 조회 ===

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return self.segments == other.segments

    def __hash__(self) -> int:
        return hash(self.segments)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"[{s.x_lo:g},{s.x_hi:g}]:{s.y_lo:g}{s.slope:+g}x" for s in self.segments)
        return f"PiecewiseLinear({parts})"

    @property
    def is_empty(self) -> bool:
        return not self.segments

    def evaluate(self, x: float) -> Optional[float]:
        """f(x), 정의역 밖이면 None"""
        k = bisect_right(self._starts, x + EPS) - 1
        best = None
        while k >= 0:
            s = self.segments[k]
            if s.x_hi < x - EPS:
                break
            v = s.value(x)
            if best is None or v < best:
                best = v
            k -= 1
        return best

    def domain(self) -> List[Tuple[float, float]]:
        """정의역 (서로소 구간 목록)"""
        spans: List[Tuple[float, float]] = []
        for s in self.segments:
            if spans and s.x_lo <= spans[-1][1] + EPS:
                spans[-1] = (spans[-1][0], max(spans[-1][1], s.x_hi))
            else:
                spans.append((s.x_lo, s.x_hi))
        return spans

    def integer_points(self) -> List[int]:
        """정의역 안의 정수 x (오름차순)"""
        result: List[int] = []
        for lo, hi in self.domain():
            start = math.ceil(lo - EPS)
            if result and start <= result[-1]:
                start = result[-1] + 1
            result.extend(range(start, math.floor(hi + EPS) + 1))
        return result

    def minimum(self) -> Optional[Tuple[float, float]]:
        """(argmin x, 최솟값). 동률이면 가장 작은 x"""
        best = None
        for s in self.segments:
            for x, v in ((s.x_lo, s.y_lo), (s.x_hi, s.y_hi)):
                if best is None or v < best[1] - EPS:
                    best = (x, v)
        return best


# === 기본 연산 ===

def evaluate(f: PiecewiseLinear, x: float) -> Optional[float]:
    return f.evaluate(x)


def translate(f: PiecewiseLinear, a: float) -> PiecewiseLinear:
    """g(x) = f(x + a)"""
    if a == 0:
        return f
    return PiecewiseLinear(
        Segment(s.x_lo - a, s.x_hi - a, s.y_lo, s.slope) for s in f.segments)


def add_affine(f: PiecewiseLinear, a: float, b: float = 0.0) -> PiecewiseLinear:
    """g(x) = f(x) + a·x + b"""
    if a == 0 and b == 0:
        return f
    return PiecewiseLinear(
        Segment(s.x_lo, s.x_hi, s.y_lo + a * s.x_lo + b, s.slope + a if not s.is_point else 0.0)
        for s in f.segments)


def lower_envelope(f1: PiecewiseLinear, f2: PiecewiseLinear) -> PiecewiseLinear:
    """g(x) = min(f1(x), f2(x)), 한쪽만 정의되면 그 값. 동률이면 f1 선분 유지"""
    if f2.is_empty:
        return f1
    if f1.is_empty:
        return f2
    return PiecewiseLinear(_envelope(list(f1.segments) + list(f2.segments)))


def infimal_convolution(f1: PiecewiseLinear, f2: PiecewiseLinear) -> PiecewiseLinear:
    """g(x) = min_y f1(x - y) + f2(y)

    선분 쌍마다 평행사변형의 아래 변(기울기가 작은 선분 먼저)을 만들고,
    전체의 하한 포락선을 취한다.
    """
    if f1.is_empty or f2.is_empty:
        return PiecewiseLinear()
    parts: List[Segment] = []
    for s1 in f1.segments:
        for s2 in f2.segments:
            parts.extend(_pair_lower_edge(s1, s2))
    return PiecewiseLinear(_envelope(parts))


def restrict_and_prune(f: PiecewiseLinear, lo: float, hi: float) -> PiecewiseLinear:
    """[lo, hi] 로 자르고 정수를 포함하지 않는 선분 제거

    남은 선분은 포함하는 정수 구간 [ceil, floor] 로 줄인다. 모든 정수 x 에서의
    값은 그대로 유지되고, 끝점이 정수가 되므로 이후 연산의 꺾임점도 정수로 남는다.
    """
    if lo > hi:
        raise ValueError(f"잘못된 구간: [{lo}, {hi}]")
    out: List[Segment] = []
    for s in f.segments:
        a = max(s.x_lo, lo)
        b = min(s.x_hi, hi)
        if a > b + EPS:
            continue
        ia = math.ceil(a - EPS)
        ib = math.floor(b + EPS)
        if ia > ib:
            continue
        if ia == ib:
            out.append(Segment(float(ia), float(ia), s.value(ia), 0.0))
        else:
            out.append(Segment(float(ia), float(ib), s.value(ia), s.slope))
    return PiecewiseLinear(_simplify(out))


# === 내부 구현 ===

def _pair_lower_edge(s1: Segment, s2: Segment) -> List[Segment]:
    """두 선분의 합성곱 = 평행사변형 아래 변 (최대 2조각)"""
    x = s1.x_lo + s2.x_lo
    v = s1.y_lo + s2.y_lo
    first, second = (s1, s2) if s1.slope <= s2.slope else (s2, s1)
    wa = 0.0 if first.is_point else first.width
    wb = 0.0 if second.is_point else second.width
    if wa == 0.0 and wb == 0.0:
        return [Segment(x, x, v, 0.0)]
    out = []
    if wa > 0.0:
        out.append(Segment(x, x + wa, v, first.slope))
        x += wa
        v += first.slope * wa
    if wb > 0.0:
        out.append(Segment(x, x + wb, v, second.slope))
    return out


def _unique_sorted(values: Iterable[float]) -> List[float]:
    result: List[float] = []
    for x in sorted(values):
        if not result or x > result[-1] + EPS:
            result.append(x)
    return result


def _envelope(segments: Sequence[Segment]) -> List[Segment]:
    """임의 선분 집합의 하한 포락선 (앞쪽 선분이 동률 우선)"""
    if not segments:
        return []
    events = _unique_sorted([s.x_lo for s in segments] + [s.x_hi for s in segments])
    order = sorted(range(len(segments)), key=lambda k: (segments[k].x_lo, k))

    active: List[int] = []
    ptr = 0
    pieces: List[Segment] = []
    points: List[Tuple[float, float]] = []

    for e, p in enumerate(events):
        while ptr < len(order) and segments[order[ptr]].x_lo <= p + EPS:
            active.append(order[ptr])
            ptr += 1
        active = [k for k in active if segments[k].x_hi >= p - EPS]
        if not active:
            continue

        points.append((p, min(segments[k].value(p) for k in active)))

        if e + 1 < len(events):
            q = events[e + 1]
            covering = sorted(k for k in active if segments[k].x_hi >= q - EPS)
            if covering:
                pieces.extend(_lower_lines(p, q, [segments[k] for k in covering]))

    return _assemble(pieces, points)


def _lower_lines(p: float, q: float, lines: Sequence[Segment]) -> List[Segment]:
    """[p, q] 위에서 직선들의 최솟값 (교차점에서 분할)"""
    base = [s.value(p) for s in lines]
    slopes = [s.slope for s in lines]

    def at(j: int, x: float) -> float:
        return base[j] + slopes[j] * (x - p)

    v_min = min(base)
    cur = None
    for j in range(len(lines)):
        if base[j] <= v_min + EPS and (cur is None or slopes[j] < slopes[cur] - EPS):
            cur = j

    out: List[Segment] = []
    x = p
    while True:
        v_cur = at(cur, x)
        next_x = q
        nxt = None
        for j in range(len(lines)):
            if slopes[j] >= slopes[cur] - EPS:
                continue
            gap = max(at(j, x) - v_cur, 0.0)
            cx = x + gap / (slopes[cur] - slopes[j])
            if cx < next_x - EPS:
                next_x, nxt = cx, j
            elif nxt is not None and abs(cx - next_x) <= EPS and slopes[j] < slopes[nxt]:
                nxt = j
        if next_x - x > EPS:
            out.append(Segment(x, next_x, v_cur, slopes[cur]))
        if nxt is None:
            break
        x, cur = next_x, nxt
    return out


def _merge_colinear(pieces: Sequence[Segment]) -> List[Segment]:
    merged: List[Segment] = []
    for s in pieces:
        if merged and not s.is_point:
            last = merged[-1]
            if (not last.is_point
                    and abs(last.x_hi - s.x_lo) <= EPS
                    and abs(last.slope - s.slope) <= EPS
                    and abs(last.y_hi - s.y_lo) <= EPS):
                merged[-1] = Segment(last.x_lo, s.x_hi, last.y_lo, last.slope)
                continue
        merged.append(s)
    return merged


def _covered(intervals: Sequence[Segment], starts: Sequence[float], x: float, v: float) -> bool:
    """x 를 포함하는 구간 선분 중 값이 v 이하인 것이 있는지"""
    k = bisect_right(starts, x + EPS) - 1
    while k >= 0:
        s = intervals[k]
        if s.x_hi < x - EPS:
            break
        if s.value(x) <= v + EPS:
            return True
        k -= 1
    return False


def _split_at(intervals: Sequence[Segment], xs: Sequence[float]) -> List[Segment]:
    """점 선분이 구간 내부에 놓이지 않도록 구간을 나눈다"""
    cuts = sorted(xs)
    out: List[Segment] = []
    for s in intervals:
        lo = s.x_lo
        for x in cuts:
            if lo + EPS < x < s.x_hi - EPS:
                out.append(Segment(lo, x, s.value(lo), s.slope))
                lo = x
        out.append(Segment(lo, s.x_hi, s.value(lo), s.slope))
    return out


def _with_points(intervals: List[Segment], extra: List[Segment]) -> List[Segment]:
    if not extra:
        return intervals
    intervals = _split_at(intervals, [p.x_lo for p in extra])
    return sorted(intervals + extra, key=lambda s: (s.x_lo, s.x_hi))


def _assemble(pieces: Sequence[Segment], points: Sequence[Tuple[float, float]]) -> List[Segment]:
    intervals = _merge_colinear(pieces)
    starts = [s.x_lo for s in intervals]
    extra = [Segment(x, x, v, 0.0) for x, v in points if not _covered(intervals, starts, x, v)]
    return _with_points(intervals, extra)


def _simplify(segments: Sequence[Segment]) -> List[Segment]:
    """정렬된 선분 목록에서 동일 직선 병합, 불필요한 점 선분 제거"""
    ordered = sorted(segments, key=lambda s: (s.x_lo, s.x_hi))
    intervals = _merge_colinear([s for s in ordered if not s.is_point])
    starts = [s.x_lo for s in intervals]
    best_points = {}
    for s in ordered:
        if s.is_point:
            if s.x_lo not in best_points or s.y_lo < best_points[s.x_lo]:
                best_points[s.x_lo] = s.y_lo
    return _assemble_points(intervals, starts, best_points)


def _assemble_points(intervals: List[Segment], starts: List[float], points: dict) -> List[Segment]:
    extra = [Segment(x, x, v, 0.0) for x, v in points.items()
             if not _covered(intervals, starts, x, v)]
    return _with_points(intervals, extra)


__all__ = [
    'EPS', 'Segment', 'PiecewiseLinear',
    'evaluate', 'translate', 'add_affine', 'lower_envelope',
    'infimal_convolution', 'restrict_and_prune',
]
