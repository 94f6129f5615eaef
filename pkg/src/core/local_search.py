# core/local_search.py
# 교육(education) 절차: 경로 개선(RI) → 배송 스케줄 개선(DSI) → 경로 개선(RI)

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ds_operator import (
    PieceRecorder, apply_schedule, dp_reinsertion, reinsertion_delta, remove_retailer,
)
from .errors import ContractViolationError
from .instance import Instance
from .solution import Solution, route_distance
from ..utils.log import get_logger


logger = get_logger('ls')

MOVE_THRESHOLD = -1e-7
DEPOT = -1

# 이동 결과: [(경로 번호, 새 경로)], 경로 번호 == len(routes) 는 새 경로
MoveResult = Optional[List[Tuple[int, List[int]]]]
Position = Tuple[int, int]


def granular_neighbors(instance: Instance, size: int) -> List[List[int]]:
    """소매점별 가까운 소매점 목록 (index 0 은 비어 있음)"""
    matrix = instance.cost_matrix
    result: List[List[int]] = [[]]
    for u in range(1, instance.n + 1):
        order = np.argsort(matrix[u, 1:], kind='stable') + 1
        result.append([int(v) for v in order if v != u][:size])
    return result


# === 이동 연산 (u 위치 a=(r1,p1), v 위치 b=(r2,p2), p2 == DEPOT 이면 경로 맨 앞) ===

def _without(route: Sequence[int], start: int, length: int) -> List[int]:
    return list(route[:start]) + list(route[start + length:])


def _insert_after(route: List[int], anchor: Optional[int], segment: List[int]) -> List[int]:
    pos = 0 if anchor is None else route.index(anchor) + 1
    return route[:pos] + segment + route[pos:]


def _relocate(routes, a: Position, b: Position, length: int, reverse: bool) -> MoveResult:
    (r1, p1), (r2, p2) = a, b
    R1 = routes[r1]
    if p1 + length > len(R1):
        return None
    segment = R1[p1:p1 + length]
    if reverse:
        segment = segment[::-1]
    if r1 == r2:
        if p1 <= p2 < p1 + length:
            return None
        if p2 == p1 - 1 and not reverse:
            return None
        anchor = None if p2 == DEPOT else R1[p2]
        return [(r1, _insert_after(_without(R1, p1, length), anchor, segment))]
    R2 = routes[r2] if r2 < len(routes) else []
    return [(r1, _without(R1, p1, length)), (r2, R2[:p2 + 1] + segment + R2[p2 + 1:])]


def relocate1(routes, a, b) -> MoveResult:
    return _relocate(routes, a, b, 1, False)


def relocate2(routes, a, b) -> MoveResult:
    return _relocate(routes, a, b, 2, False)


def relocate2_reversed(routes, a, b) -> MoveResult:
    return _relocate(routes, a, b, 2, True)


def _swap(routes, a: Position, b: Position, la: int, lb: int) -> MoveResult:
    (r1, p1), (r2, p2) = a, b
    if p2 == DEPOT or r2 >= len(routes):
        return None
    R1, R2 = routes[r1], routes[r2]
    if p1 + la > len(R1) or p2 + lb > len(R2):
        return None
    seg_a, seg_b = R1[p1:p1 + la], R2[p2:p2 + lb]
    if r1 != r2:
        return [(r1, R1[:p1] + seg_b + R1[p1 + la:]), (r2, R2[:p2] + seg_a + R2[p2 + lb:])]
    if p1 < p2:
        if p1 + la > p2:
            return None
        return [(r1, R1[:p1] + seg_b + R1[p1 + la:p2] + seg_a + R1[p2 + lb:])]
    if p2 + lb > p1:
        return None
    return [(r1, R1[:p2] + seg_a + R1[p2 + lb:p1] + seg_b + R1[p1 + la:])]


def swap11(routes, a, b) -> MoveResult:
    return _swap(routes, a, b, 1, 1)


def swap21(routes, a, b) -> MoveResult:
    return _swap(routes, a, b, 2, 1)


def swap22(routes, a, b) -> MoveResult:
    return _swap(routes, a, b, 2, 2)


def two_opt(routes, a, b) -> MoveResult:
    """같은 경로에서 u, v 사이 구간 뒤집기"""
    (r1, p1), (r2, p2) = a, b
    if r1 != r2:
        return None
    R = routes[r1]
    lo, hi = (p1, p2) if p1 < p2 else (p2, p1)
    if hi - lo < 2:
        return None
    return [(r1, R[:lo + 1] + R[lo + 1:hi + 1][::-1] + R[hi + 1:])]


def two_opt_star(routes, a, b) -> MoveResult:
    """서로 다른 경로의 꼬리 교환: (H1+T2, H2+T1)"""
    (r1, p1), (r2, p2) = a, b
    if r1 == r2:
        return None
    R1 = routes[r1]
    R2 = routes[r2] if r2 < len(routes) else []
    return [(r1, R1[:p1 + 1] + R2[p2 + 1:]), (r2, R2[:p2 + 1] + R1[p1 + 1:])]


def two_opt_star_reversed(routes, a, b) -> MoveResult:
    """서로 다른 경로의 머리 뒤집어 연결: (H1+rev(H2), rev(T1)+T2)"""
    (r1, p1), (r2, p2) = a, b
    if r1 == r2:
        return None
    R1 = routes[r1]
    R2 = routes[r2] if r2 < len(routes) else []
    return [(r1, R1[:p1 + 1] + R2[:p2 + 1][::-1]), (r2, R1[p1 + 1:][::-1] + R2[p2 + 1:])]


MOVES: Tuple[Tuple[str, Callable], ...] = (
    ('relocate1', relocate1),
    ('relocate2', relocate2),
    ('relocate2_reversed', relocate2_reversed),
    ('swap11', swap11),
    ('swap21', swap21),
    ('swap22', swap22),
    ('two_opt', two_opt),
    ('two_opt_star', two_opt_star),
    ('two_opt_star_reversed', two_opt_star_reversed),
)


class LocalSearch:
    """RI / DSI / 교육

    RI 는 배송량을 고정한 채 하루 안의 경로만 바꾸며, 일자 변경은 DSI 만 담당한다.
    """

    def __init__(self, instance: Instance, rng: np.random.Generator,
                 granularity: int = 20, debug: bool = False,
                 recorder: Optional[PieceRecorder] = None):
        self.instance = instance
        self.rng = rng
        self.debug = debug
        self.recorder = recorder
        self.neighbors = granular_neighbors(instance, granularity)
        self.move_counts: Dict[str, int] = {name: 0 for name, _ in MOVES}

    # === RI ===

    def _route_cost(self, route: Sequence[int], q: Sequence[float], omega: float) -> float:
        cost = route_distance(self.instance.dist, route)
        over = sum(q[i] for i in route) - self.instance.capacity
        if over > 0:
            cost += omega * over
        return cost

    def _day_cost(self, routes, q, omega: float) -> float:
        return sum(self._route_cost(r, q, omega) for r in routes)

    @staticmethod
    def _where(routes) -> Dict[int, Position]:
        return {v: (r, p) for r, route in enumerate(routes) for p, v in enumerate(route)}

    def _targets(self, routes, where, u: int) -> List[Position]:
        targets = [where[v] for v in self.neighbors[u] if v in where]
        targets.extend((r, DEPOT) for r in range(len(routes)))
        if len(routes) < self.instance.vehicles:
            targets.append((len(routes), DEPOT))
        return targets

    def _try_node(self, routes: List[List[int]], q, u: int, omega: float) -> bool:
        where = self._where(routes)
        a = where[u]
        for b in self._targets(routes, where, u):
            for name, move in MOVES:
                result = move(routes, a, b)
                if result is None:
                    continue
                old = sum(self._route_cost(routes[r], q, omega) for r, _ in result if r < len(routes))
                new = sum(self._route_cost(route, q, omega) for _, route in result)
                delta = new - old
                if delta < MOVE_THRESHOLD:
                    before = self._day_cost(routes, q, omega) if self.debug else 0.0
                    for r, route in result:
                        if r == len(routes):
                            routes.append(route)
                        else:
                            routes[r] = route
                    routes[:] = [r for r in routes if r]
                    if self.debug:
                        after = self._day_cost(routes, q, omega)
                        if abs((after - before) - delta) > 1e-6:
                            raise ContractViolationError(
                                f"{name} 증분 불일치: {delta:.6f} vs {after - before:.6f}")
                    self.move_counts[name] += 1
                    return True
        return False

    def _improve_day(self, solution: Solution, t: int, omega: float) -> bool:
        routes = solution.routes[t]
        q = solution.quantities[t]
        changed = False
        improving = True
        while improving:
            improving = False
            nodes = [v for route in routes for v in route]
            for idx in self.rng.permutation(len(nodes)).tolist():
                if self._try_node(routes, q, nodes[idx], omega):
                    improving = changed = True
        return changed

    def route_improvement(self, solution: Solution, omega: float) -> Solution:
        """하루 단위 first-improvement 하강 (배송량 고정)"""
        changed = False
        for t in range(self.instance.horizon):
            if self._improve_day(solution, t, omega):
                changed = True
        if changed:
            solution.touch()
        return solution

    # === DSI ===

    def delivery_schedule_improvement(self, solution: Solution, omega: float) -> Solution:
        """소매점을 무작위 순서로 돌며 DS 연산자 적용, 개선이 없을 때까지 반복"""
        inst = self.instance
        sweeps = 0
        while True:
            sweeps += 1
            improved = False
            for idx in self.rng.permutation(inst.n).tolist():
                i = idx + 1
                reduced = remove_retailer(solution, i)
                schedule = dp_reinsertion(inst, reduced, i, omega, recorder=self.recorder)
                if not schedule.feasible:
                    continue
                current = reinsertion_delta(solution, reduced, i, omega)
                if not _improves(schedule.cost, current):
                    continue
                before = solution.cost(omega).total if self.debug else None
                apply_schedule(reduced, i, schedule, omega, debug=self.debug)
                solution.routes, solution.quantities = reduced.routes, reduced.quantities
                solution.touch()
                if before is not None and math.isfinite(before):
                    after = solution.cost(omega).total
                    if after > before + 1e-6:
                        raise ContractViolationError(
                            f"DS 적용 후 비용 증가: 소매점 {i}, {before:.6f} → {after:.6f}")
                improved = True
            if not improved:
                break
        logger.debug(f"DSI 종료: {sweeps}회 순회")
        return solution

    def educate(self, solution: Solution, omega: float) -> Solution:
        self.route_improvement(solution, omega)
        self.delivery_schedule_improvement(solution, omega)
        self.route_improvement(solution, omega)
        return solution


def _improves(candidate: float, current: float) -> bool:
    if not math.isfinite(current):
        return math.isfinite(candidate)
    return candidate < current - 1e-7 * max(1.0, abs(current))


# === 함수형 진입점 ===

def route_improvement(instance: Instance, solution: Solution, omega: float,
                      rng: np.random.Generator, granularity: int = 20) -> Solution:
    return LocalSearch(instance, rng, granularity).route_improvement(solution, omega)


def delivery_schedule_improvement(instance: Instance, solution: Solution, omega: float,
                                  rng: np.random.Generator) -> Solution:
    return LocalSearch(instance, rng).delivery_schedule_improvement(solution, omega)


def educate(instance: Instance, solution: Solution, omega: float,
            rng: np.random.Generator, granularity: int = 20, debug: bool = False) -> Solution:
    return LocalSearch(instance, rng, granularity, debug).educate(solution, omega)


__all__ = [
    'MOVES', 'LocalSearch', 'granular_neighbors',
    'route_improvement', 'delivery_schedule_improvement', 'educate',
]
