# core/oracle.py
# 완전 탐색 기준 구현 (DS 동적계획 / 전체 해 검증용)

import itertools
import math
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .ds_operator import NEW_ROUTE, Delivery, Schedule, apply_schedule, reinsertion_delta
from .errors import OracleBudgetExceeded
from .instance import Instance
from .solution import Solution, evaluate, route_distance


@dataclass(frozen=True)
class EnumerationBudget:
    """열거 한도 (열거 시작 전에 검사)"""
    max_day_subsets: int = 4096
    max_quantity_grid: int = 100000
    max_states: int = 200000
    time_cap: float = 30.0

    def __post_init__(self):
        for name in ('max_day_subsets', 'max_quantity_grid', 'max_states'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name}: 양수여야 합니다")
        if self.time_cap <= 0:
            raise ValueError("time_cap: 양수여야 합니다")


class _Deadline:
    def __init__(self, seconds: float):
        self.limit = time.monotonic() + seconds

    def check(self):
        if time.monotonic() > self.limit:
            raise OracleBudgetExceeded("열거 시간 한도 초과")


def insertion_candidates(instance: Instance, reduced: Solution, i: int, t: int) -> List[Tuple[int, int]]:
    """t일 삽입 후보 (경로, 위치), 지배 관계로 거르지 않는다

    기존 경로마다 삽입 후 경로 길이가 가장 짧은 위치 하나, 경로가 K 개 미만이면 새 경로.
    """
    dist = instance.dist
    candidates = []
    for r, route in enumerate(reduced.routes[t]):
        lengths = [route_distance(dist, route[:p] + [i] + route[p:]) for p in range(len(route) + 1)]
        candidates.append((r, lengths.index(min(lengths))))
    if len(reduced.routes[t]) < instance.vehicles:
        candidates.append((NEW_ROUTE, 0))
    return candidates


def brute_force_reinsertion(instance: Instance, reduced: Solution, i: int, omega: float,
                            allow_stockout: Optional[bool] = None,
                            budget: Optional[EnumerationBudget] = None,
                            stats: Optional[dict] = None) -> Schedule:
    """모든 방문일 × 정수 배송량 × 삽입 선택지를 실제 해로 만들어 평가

    stats 가 주어지면 평가한 상태 수를 stats["states"] 에 기록한다.
    """
    budget = budget or EnumerationBudget()
    retailer = instance.retailer(i)
    H, U = instance.horizon, retailer.max_level
    if allow_stockout is None:
        allow_stockout = instance.stockout_allowed
    allow_stockout = allow_stockout and math.isfinite(instance.rho)

    day_options = [insertion_candidates(instance, reduced, i, t) for t in range(H)]
    subsets = 2 ** H
    grid = (U + 1) ** H
    states = 1
    for opts in day_options:
        states *= 1 + len(opts) * U
    if subsets > budget.max_day_subsets:
        raise OracleBudgetExceeded(f"방문일 부분집합 {subsets} > {budget.max_day_subsets}")
    if grid > budget.max_quantity_grid:
        raise OracleBudgetExceeded(f"배송량 격자 {grid} > {budget.max_quantity_grid}")
    if states > budget.max_states:
        raise OracleBudgetExceeded(f"상태 수 {states} > {budget.max_states}")

    deadline = _Deadline(budget.time_cap)
    best: Optional[Tuple[float, Tuple[Delivery, ...]]] = None
    chosen: List[Delivery] = []
    evaluated = 0

    def recurse(t: int, level: int):
        nonlocal best, evaluated
        if t == H:
            deadline.check()
            evaluated += 1
            candidate = reduced.copy()
            schedule = Schedule(retailer=i, deliveries=tuple(chosen), cost=0.0,
                                feasible=True, stamp=candidate.stamp)
            apply_schedule(candidate, i, schedule)
            cost = reinsertion_delta(candidate, reduced, i, omega)
            if best is None or cost < best[0] - 1e-9:
                best = (cost, tuple(chosen))
            return
        d = retailer.demand[t]
        choices = [(0, None)]
        for q in range(1, U - level + 1):
            for slot in day_options[t]:
                choices.append((q, slot))
        for q, slot in choices:
            net = level + q - d
            if net < 0 and not allow_stockout:
                continue
            if slot is not None:
                chosen.append(Delivery(day=t, quantity=q, route=slot[0], position=slot[1]))
            recurse(t + 1, max(0, net))
            if slot is not None:
                chosen.pop()

    recurse(0, retailer.start_level)
    if stats is not None:
        stats["states"] = evaluated
    if best is None:
        return Schedule.infeasible(i, reduced.stamp)
    return Schedule(retailer=i, deliveries=best[1], cost=best[0], feasible=True, stamp=reduced.stamp)


def count_reinsertion_states(instance: Instance, reduced: Solution, i: int, omega: float,
                             allow_stockout: Optional[bool] = None) -> int:
    """brute_force_reinsertion 이 평가하는 상태 수 (열거 없이 계산)"""
    retailer = instance.retailer(i)
    if allow_stockout is None:
        allow_stockout = instance.stockout_allowed
    allow_stockout = allow_stockout and math.isfinite(instance.rho)
    counts: Dict[int, int] = {retailer.start_level: 1}
    for t in range(instance.horizon):
        m = len(insertion_candidates(instance, reduced, i, t))
        d = retailer.demand[t]
        nxt: Dict[int, int] = {}
        for level, ways in counts.items():
            for q in range(0, retailer.max_level - level + 1):
                net = level + q - d
                if net < 0 and not allow_stockout:
                    continue
                mult = 1 if q == 0 else m
                nxt[max(0, net)] = nxt.get(max(0, net), 0) + ways * mult
        counts = nxt
    return sum(counts.values())


# === 작은 인스턴스 전체 최적해 ===

def _check_exhaustive_scope(instance: Instance):
    if instance.n > 3 or instance.horizon > 2 or instance.vehicles != 1:
        raise OracleBudgetExceeded(
            f"완전 탐색 범위 밖: n={instance.n}, H={instance.horizon}, K={instance.vehicles}")
    if any(r.max_level > 5 for r in instance.retailers):
        raise OracleBudgetExceeded("완전 탐색 범위 밖: 최대 재고 > 5")


def exhaustive_solve(instance: Instance, budget: Optional[EnumerationBudget] = None
                     ) -> Tuple[Optional[Solution], float]:
    """n ≤ 3, H ≤ 2, U ≤ 5, K = 1 인스턴스의 전역 최적해 (용량 초과 금지)

    반환: (최적해, 비용). 가능해가 없으면 (None, inf).
    """
    _check_exhaustive_scope(instance)
    budget = budget or EnumerationBudget()
    deadline = _Deadline(budget.time_cap)
    n, H = instance.n, instance.horizon
    dist = instance.dist
    Q = instance.capacity
    rho = instance.rho

    route_cache: Dict[FrozenSet[int], Tuple[float, Tuple[int, ...]]] = {}

    def best_route(visited: FrozenSet[int]) -> Tuple[float, Tuple[int, ...]]:
        if visited not in route_cache:
            best = (math.inf, ())
            for perm in itertools.permutations(sorted(visited)):
                cost = route_distance(dist, perm)
                if cost < best[0] - 1e-12:
                    best = (cost, perm)
            route_cache[visited] = best
        return route_cache[visited]

    best: Tuple[float, Optional[List[List[int]]]] = (math.inf, None)
    plan: List[List[int]] = []

    def recurse(t: int, levels: Tuple[int, ...], supplier: float, acc: float):
        nonlocal best
        deadline.check()
        if t == H:
            if acc < best[0] - 1e-9:
                best = (acc, [list(q) for q in plan])
            return
        ranges = [range(0, instance.retailers[k].max_level - levels[k] + 1) for k in range(n)]
        for combo in itertools.product(*ranges):
            load = sum(combo)
            if load > Q:
                continue
            visited = frozenset(k + 1 for k in range(n) if combo[k] > 0)
            cost = best_route(visited)[0] if visited else 0.0
            new_levels = []
            feasible = True
            for k in range(n):
                r = instance.retailers[k]
                net = levels[k] + combo[k] - r.demand[t]
                if net < 0:
                    if not instance.stockout_allowed:
                        feasible = False
                        break
                    cost += rho * r.holding_cost * (-net)
                new_levels.append(max(0, net))
                cost += r.holding_cost * max(0, net)
            if not feasible:
                continue
            level0 = supplier + instance.supplier.production[t] - load
            cost += instance.supplier.holding_cost[t] * level0
            plan.append([0] + list(combo))
            recurse(t + 1, tuple(new_levels), level0, acc + cost)
            plan.pop()

    recurse(0, tuple(r.start_level for r in instance.retailers),
            float(instance.supplier.start_level), 0.0)

    if best[1] is None:
        return None, math.inf
    quantities = best[1]
    routes = []
    for t in range(H):
        visited = frozenset(i for i in range(1, n + 1) if quantities[t][i] > 0)
        routes.append([list(best_route(visited)[1])] if visited else [])
    solution = Solution(instance, routes, quantities)
    return solution, evaluate(instance, solution, 0.0).total


__all__ = [
    'EnumerationBudget', 'insertion_candidates', 'brute_force_reinsertion', 'count_reinsertion_states',
    'exhaustive_solve',
]
