# core/ds_operator.py
# Delivery-Schedule 연산자: 한 소매점의 모든 방문을 제거한 뒤
# 구간 선형 비용함수 위의 동적계획으로 방문일/배송량/삽입 위치를 최적 재배치

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ContractViolationError
from .instance import Instance
from .plf import (
    PiecewiseLinear, Segment, add_affine, infimal_convolution, lower_envelope,
    restrict_and_prune, translate,
)
from .solution import Solution, retailer_cost
from ..utils.log import get_logger


logger = get_logger('ds')

NEW_ROUTE = -1
_TIE = 1e-7


@dataclass(frozen=True)
class DeliveryOption:
    """하루치 삽입 선택지 (잔여 용량 κ, 최소 우회 비용 γ)"""
    residual: int
    detour: float
    route: int          # 경로 번호, NEW_ROUTE 는 새 경로
    position: int       # 경로 내 삽입 위치 (list.insert 기준)

    def cost(self, q: float, omega: float) -> float:
        over = q - self.residual
        return self.detour + omega * over if over > 0 else self.detour


@dataclass
class InsertionOptions:
    """t일 삽입 선택지 목록 (γ 오름차순, 지배된 선택지 제거)과 F_t"""
    day: int
    options: Tuple[DeliveryOption, ...]
    omega: float
    max_quantity: int
    cost_function: PiecewiseLinear = field(repr=False, default=None)

    def delivery_cost(self, q: float) -> Tuple[float, Optional[DeliveryOption]]:
        """F_t(q) 직접 계산, 동률이면 순위가 앞선 선택지"""
        best, chosen = math.inf, None
        for opt in self.options:
            value = opt.cost(q, self.omega)
            if value < best - _TIE:
                best, chosen = value, opt
        return best, chosen


@dataclass(frozen=True)
class Delivery:
    day: int
    quantity: int
    route: int
    position: int


@dataclass
class CostToGo:
    """일별 C_t (t=0..H), Ĉ_t, 배송비 함수 G_t"""
    levels: List[PiecewiseLinear]
    pre_demand: List[PiecewiseLinear] = field(default_factory=list)
    delivery: List[PiecewiseLinear] = field(default_factory=list)


@dataclass
class Schedule:
    """재삽입 결과

    cost 는 완전히 제거된 상태 대비 벌점 목적함수 증분이다
    (우회 + ω 초과 + 공급자 보관 변화 + 소매점 i 의 보관/품절 비용 전체).
    """
    retailer: int
    deliveries: Tuple[Delivery, ...]
    cost: float
    feasible: bool
    stamp: int
    final_level: int = 0
    cost_to_go: Optional[CostToGo] = field(default=None, repr=False)

    @classmethod
    def infeasible(cls, retailer: int, stamp: int) -> 'Schedule':
        return cls(retailer=retailer, deliveries=(), cost=math.inf, feasible=False, stamp=stamp)

    def quantities(self, horizon: int) -> List[int]:
        result = [0] * horizon
        for d in self.deliveries:
            result[d.day] = d.quantity
        return result

    @property
    def visit_count(self) -> int:
        return len(self.deliveries)


# === 제거 ===

def remove_retailer(solution: Solution, i: int) -> Solution:
    """i 의 모든 방문을 제거한 사본 (앞뒤 노드를 바로 연결, 빈 경로 삭제)"""
    reduced = solution.copy()
    for t, day in enumerate(reduced.routes):
        if any(i in route for route in day):
            reduced.routes[t] = [kept for kept in ([v for v in route if v != i] for route in day) if kept]
        reduced.quantities[t][i] = 0
    return reduced


# === 삽입 선택지 ===

def build_insertion_options(instance: Instance, reduced: Solution, i: int,
                            omega: float, t: int) -> InsertionOptions:
    dist = instance.dist
    Q = instance.capacity
    q = reduced.quantities[t]
    candidates: List[DeliveryOption] = []

    day = reduced.routes[t]
    for r, route in enumerate(day):
        load = sum(q[v] for v in route)
        best, best_pos = math.inf, 0
        prev = 0
        for p in range(len(route) + 1):
            nxt = route[p] if p < len(route) else 0
            detour = dist[prev][i] + dist[i][nxt] - dist[prev][nxt]
            if detour < best - 1e-12:
                best, best_pos = detour, p
            prev = nxt
        candidates.append(DeliveryOption(residual=max(0, int(Q - load)), detour=best,
                                         route=r, position=best_pos))

    if len(day) < instance.vehicles:
        candidates.append(DeliveryOption(residual=Q, detour=dist[0][i] + dist[i][0],
                                         route=NEW_ROUTE, position=0))

    # γ 오름차순, 같은 γ 면 κ 큰 것 먼저. κ 가 엄격히 증가하는 것만 남긴다.
    candidates.sort(key=lambda o: (o.detour, -o.residual))
    ranked: List[DeliveryOption] = []
    for opt in candidates:
        if not ranked or opt.residual > ranked[-1].residual:
            ranked.append(opt)

    U = instance.retailer(i).max_level
    options = InsertionOptions(day=t, options=tuple(ranked), omega=omega, max_quantity=U)
    options.cost_function = _delivery_cost_function(ranked, omega, 1, U)
    return options


def _option_function(opt: DeliveryOption, omega: float, lo: int, hi: int) -> PiecewiseLinear:
    """γ + ω·max(0, q − κ) on [lo, hi]"""
    kappa = opt.residual
    if kappa >= hi:
        return PiecewiseLinear.linear(lo, hi, opt.detour, 0.0)
    if kappa <= lo:
        return PiecewiseLinear.linear(lo, hi, opt.cost(lo, omega), omega)
    return PiecewiseLinear([
        Segment(float(lo), float(kappa), opt.detour, 0.0),
        Segment(float(kappa), float(hi), opt.detour, omega),
    ])


def _delivery_cost_function(options: Sequence[DeliveryOption], omega: float,
                            lo: int, hi: int) -> PiecewiseLinear:
    """F_t = 선택지별 함수의 하한 포락선 (순위 순)"""
    if hi < lo or not options:
        return PiecewiseLinear()
    result = PiecewiseLinear()
    for opt in options:
        result = lower_envelope(result, _option_function(opt, omega, lo, hi))
    return result


# === 동적계획 ===

def dp_reinsertion(instance: Instance, reduced: Solution, i: int, omega: float,
                   allow_stockout: Optional[bool] = None,
                   recorder: Optional['PieceRecorder'] = None) -> Schedule:
    """제거된 해에 소매점 i 를 최적 재삽입하는 스케줄"""
    retailer = instance.retailer(i)
    if allow_stockout is None:
        allow_stockout = instance.stockout_allowed
    allow_stockout = allow_stockout and math.isfinite(instance.rho)
    rho = instance.rho
    h = retailer.holding_cost
    U = retailer.max_level

    levels = [PiecewiseLinear.point(retailer.start_level, 0.0)]
    pre_demand: List[PiecewiseLinear] = []
    delivery: List[PiecewiseLinear] = []
    all_options: List[InsertionOptions] = []

    for t in range(instance.horizon):
        d = retailer.demand[t]
        lo = -d if allow_stockout else 0
        hi = U - d
        if hi < lo:
            logger.debug(f"소매점 {i}: {t + 1}일 수요 {d} > 최대 재고 {U}, 품절 불가 모드에서 불능")
            return Schedule.infeasible(i, reduced.stamp)

        options = build_insertion_options(instance, reduced, i, omega, t)
        if U >= 1:
            G = restrict_and_prune(add_affine(options.cost_function, -instance.supplier_credit[t]), 1, U)
        else:
            G = PiecewiseLinear()

        shifted = translate(levels[-1], d)
        no_visit = add_affine(shifted, h)
        if G.is_empty:
            combined = no_visit
        else:
            combined = lower_envelope(no_visit, add_affine(infimal_convolution(shifted, G), h))
        c_hat = restrict_and_prune(combined, lo, hi)

        if allow_stockout:
            # hi < 0 이면 일말 재고는 항상 0
            core = restrict_and_prune(c_hat, 0, hi) if hi >= 0 else PiecewiseLinear()
            shortage = restrict_and_prune(add_affine(c_hat, -(rho + 1.0) * h), lo, 0)
            best = shortage.minimum()
            current = core if best is None else lower_envelope(core, PiecewiseLinear.point(0, best[1]))
        else:
            current = c_hat

        if current.is_empty:
            logger.debug(f"소매점 {i}: {t + 1}일 도달 가능한 재고 없음")
            return Schedule.infeasible(i, reduced.stamp)

        levels.append(current)
        pre_demand.append(c_hat)
        delivery.append(G)
        all_options.append(options)

    cost_to_go = CostToGo(levels=levels, pre_demand=pre_demand, delivery=delivery)
    if recorder is not None:
        recorder.record(i, cost_to_go)

    final_level, cost = levels[-1].minimum()
    deliveries = _backtrack(instance, i, int(round(final_level)), cost_to_go, all_options,
                            allow_stockout)
    return Schedule(retailer=i, deliveries=tuple(deliveries), cost=cost, feasible=True,
                    stamp=reduced.stamp, final_level=int(round(final_level)),
                    cost_to_go=cost_to_go)


def _close(value: Optional[float], target: float) -> bool:
    return value is not None and value <= target + _TIE * max(1.0, abs(target))


def _backtrack(instance: Instance, i: int, final_level: int, ctg: CostToGo,
               all_options: List[InsertionOptions], allow_stockout: bool) -> List[Delivery]:
    """정수 재평가로 역추적

    동률이면 배송 없음, 품절 없음(Î = 0), 작은 q, 순위가 앞선 선택지를 택한다.
    """
    retailer = instance.retailer(i)
    h = retailer.holding_cost
    rho = instance.rho
    deliveries: List[Delivery] = []
    level = final_level

    for t in range(instance.horizon - 1, -1, -1):
        d = retailer.demand[t]
        c_hat = ctg.pre_demand[t]
        previous = ctg.levels[t]
        G = ctg.delivery[t]

        # Î 결정
        if level > 0 or not allow_stockout:
            pre = level
        else:
            target = ctg.levels[t + 1].evaluate(0)
            pre = None
            for x in range(0, -d - 1, -1):
                v = c_hat.evaluate(x)
                if v is not None and _close(v - (rho + 1.0) * h * x, target):
                    pre = x
                    break
            if pre is None:
                raise ContractViolationError(f"역추적 실패: 소매점 {i}, {t + 1}일 I=0")

        target = c_hat.evaluate(pre)
        if target is None:
            raise ContractViolationError(f"역추적 실패: 소매점 {i}, {t + 1}일 Î={pre}")

        carried = previous.evaluate(pre + d)
        if _close(None if carried is None else carried + h * pre, target):
            level = pre + d
            continue

        found = None
        for q in range(1, retailer.max_level + 1):
            before = previous.evaluate(pre - q + d)
            if before is None:
                continue
            g = G.evaluate(q)
            if g is None:
                continue
            if _close(before + g + h * pre, target):
                found = q
                break
        if found is None:
            raise ContractViolationError(f"역추적 실패: 소매점 {i}, {t + 1}일 배송량 없음")

        _, opt = all_options[t].delivery_cost(found)
        deliveries.append(Delivery(day=t, quantity=found, route=opt.route, position=opt.position))
        level = pre - found + d

    deliveries.reverse()
    return deliveries


# === 적용 ===

def apply_schedule(reduced: Solution, i: int, schedule: Schedule,
                   omega: Optional[float] = None, debug: bool = False) -> Solution:
    """스케줄을 제거된 해에 반영 (제자리 변경 후 반환)"""
    if schedule.stamp != reduced.stamp:
        raise ContractViolationError("오래된 스케줄: 해가 스케줄 계산 이후 변경되었습니다")
    if schedule.retailer != i:
        raise ContractViolationError(f"다른 소매점의 스케줄: {schedule.retailer} ≠ {i}")
    if not schedule.feasible:
        raise ContractViolationError("불능 스케줄은 적용할 수 없습니다")

    instance = reduced.instance
    before = reduced.cost(omega) if debug and omega is not None else None

    for dl in schedule.deliveries:
        day = reduced.routes[dl.day]
        if any(i in route for route in day):
            raise ContractViolationError(f"{dl.day + 1}일에 소매점 {i} 가 이미 방문됩니다")
        if dl.route == NEW_ROUTE:
            if len(day) >= instance.vehicles:
                raise ContractViolationError(
                    f"{dl.day + 1}일 경로가 이미 {instance.vehicles}개: 새 경로 불가")
            day.append([i])
        else:
            day[dl.route].insert(dl.position, i)
        reduced.quantities[dl.day][i] = dl.quantity
    reduced.touch()

    if before is not None:
        after = reduced.cost(omega)
        predicted = after.network - before.network + retailer_cost(instance, reduced, i)
        if not math.isclose(predicted, schedule.cost, rel_tol=1e-9, abs_tol=1e-6):
            raise ContractViolationError(
                f"스케줄 비용 불일치: 예측 {schedule.cost:.6f}, 재평가 {predicted:.6f}")
    return reduced


def reinsertion_delta(before: Solution, reduced: Solution, i: int, omega: float) -> float:
    """현재 해에서 소매점 i 가 차지하는 비용 (제거 상태 대비)"""
    return (before.cost(omega).network - reduced.cost(omega).network
            + retailer_cost(before.instance, before, i))


# === 조각 수 계측 ===

def piece_counts_by_day(cost_to_go: CostToGo) -> List[int]:
    """Φ(C_t), t = 1..H"""
    return [len(f) for f in cost_to_go.levels[1:]]


class PieceRecorder:
    """DS 평가마다 (일, 소매점, Φ(C_t)) 기록"""

    def __init__(self):
        self.rows: List[Tuple[int, int, int]] = []

    def record(self, retailer: int, cost_to_go: CostToGo):
        for t, pieces in enumerate(piece_counts_by_day(cost_to_go), start=1):
            self.rows.append((t, retailer, pieces))

    def __len__(self) -> int:
        return len(self.rows)

    def median_by_day(self) -> Dict[int, float]:
        by_day: Dict[int, List[int]] = {}
        for day, _, pieces in self.rows:
            by_day.setdefault(day, []).append(pieces)
        return {day: float(np.median(values)) for day, values in sorted(by_day.items())}

    def summary(self) -> str:
        if not self.rows:
            return "조각 수 기록 없음"
        medians = self.median_by_day()
        parts = ", ".join(f"{day}일 {m:g}" for day, m in medians.items())
        return f"Φ(C_t) 중앙값: {parts} (평가 {len(self.rows)}건)"


__all__ = [
    'NEW_ROUTE', 'DeliveryOption', 'InsertionOptions', 'Delivery', 'CostToGo', 'Schedule',
    'remove_retailer', 'build_insertion_options', 'dp_reinsertion', 'apply_schedule',
    'reinsertion_delta', 'piece_counts_by_day', 'PieceRecorder',
]
