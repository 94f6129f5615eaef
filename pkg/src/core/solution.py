# core/solution.py
# 해 표현, 재고 시뮬레이션, 비용 평가, split 디코딩

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import StructuralError
from .instance import Instance


_STAMPS = itertools.count(1)


@dataclass(frozen=True)
class CostBreakdown:
    """목적함수 구성요소"""
    supplier_holding: float = 0.0
    retailer_holding: float = 0.0
    stockout_penalty: float = 0.0
    routing: float = 0.0
    capacity_excess_penalty: float = 0.0
    # 보고용 수량
    stockout_quantity: int = 0
    delivered_quantity: int = 0
    capacity_excess: int = 0

    @property
    def total(self) -> float:
        return (self.supplier_holding + self.retailer_holding + self.stockout_penalty
                + self.routing + self.capacity_excess_penalty)

    @property
    def network(self) -> float:
        """소매점 재고 항을 제외한 부분 (공급자 보관 + 경로 + 용량 초과), 항상 유한"""
        return self.supplier_holding + self.routing + self.capacity_excess_penalty

    @property
    def inventory(self) -> float:
        return self.supplier_holding + self.retailer_holding

    @property
    def is_capacity_feasible(self) -> bool:
        return self.capacity_excess == 0

    def to_dict(self) -> dict:
        return {
            'supplier_holding': self.supplier_holding,
            'retailer_holding': self.retailer_holding,
            'stockout_penalty': self.stockout_penalty,
            'routing': self.routing,
            'capacity_excess_penalty': self.capacity_excess_penalty,
            'total': self.total,
        }


@dataclass
class InventoryTrace:
    """일말 재고. I[i][t], B[i][t] 는 소매점 1..n (I[0] 은 비어 있음)"""
    I: List[List[int]]
    B: List[List[int]]
    I0: List[int]

    def stockout_total(self) -> int:
        return sum(sum(row) for row in self.B)


class Solution:
    """일별 경로 목록 + 일별 배송량

    routes[t] 는 t일(0-based)의 차량 경로 목록이며 빈 경로는 두지 않는다.
    quantities[t][i] 는 소매점 i(1..n)의 배송량이고 [t][0] 은 사용하지 않는다.
    내용을 바꾼 뒤에는 touch() 로 스탬프를 갱신해 캐시와 스케줄을 무효화한다.
    """

    __slots__ = ('instance', 'routes', 'quantities', 'stamp', '_cost_cache')

    def __init__(self, instance: Instance,
                 routes: Optional[List[List[List[int]]]] = None,
                 quantities: Optional[List[List[float]]] = None):
        self.instance = instance
        H, n = instance.horizon, instance.n
        self.routes = routes if routes is not None else [[] for _ in range(H)]
        self.quantities = quantities if quantities is not None else [[0] * (n + 1) for _ in range(H)]
        self.stamp = next(_STAMPS)
        self._cost_cache: Optional[Tuple[int, float, float, CostBreakdown]] = None

    @classmethod
    def from_tours(cls, instance: Instance, tours: Sequence[Sequence[int]],
                   quantities: List[List[float]], omega: float) -> 'Solution':
        """일별 giant tour 를 split 하여 해 생성"""
        routes = [split_day(instance, tour, quantities[t], instance.vehicles, omega)
                  for t, tour in enumerate(tours)]
        return cls(instance, routes, quantities)

    def copy(self) -> 'Solution':
        clone = Solution(
            self.instance,
            [[list(r) for r in day] for day in self.routes],
            [list(q) for q in self.quantities],
        )
        return clone

    def touch(self):
        """변경 표시"""
        self.stamp = next(_STAMPS)
        self._cost_cache = None

    # === 조회 ===

    @property
    def tours(self) -> List[List[int]]:
        """일별 giant tour (경로 구분자 없음)"""
        return [[i for route in day for i in route] for day in self.routes]

    def route_load(self, t: int, route: Sequence[int]) -> float:
        q = self.quantities[t]
        return sum(q[i] for i in route)

    def visit_days(self, i: int) -> List[int]:
        return [t for t, day in enumerate(self.routes) if any(i in r for r in day)]

    def day_pattern(self) -> Tuple[frozenset, ...]:
        """소매점별 방문일 집합 (index 0 은 비어 있음)"""
        sets = [set() for _ in range(self.instance.n + 1)]
        for t, day in enumerate(self.routes):
            for route in day:
                for i in route:
                    sets[i].add(t)
        return tuple(frozenset(s) for s in sets)

    def locate(self, t: int, i: int) -> Optional[Tuple[int, int]]:
        """t일 경로에서 i 의 (경로 번호, 위치)"""
        for r, route in enumerate(self.routes[t]):
            if i in route:
                return r, route.index(i)
        return None

    def route_count(self) -> int:
        return sum(len(day) for day in self.routes)

    def cost(self, omega: float, rho: Optional[float] = None) -> CostBreakdown:
        """평가 결과 (스탬프, ω, ρ 기준 캐시)"""
        rho_key = self.instance.rho if rho is None else rho
        cached = self._cost_cache
        if cached is not None and cached[0] == self.stamp and cached[1] == omega and cached[2] == rho_key:
            return cached[3]
        breakdown = evaluate(self.instance, self, omega, rho)
        self._cost_cache = (self.stamp, omega, rho_key, breakdown)
        return breakdown

    def is_feasible(self) -> bool:
        """용량 초과 없음 + 유한 비용 (품절 불허 모드에서 품절 없음)"""
        c = self.cost(0.0)
        return c.is_capacity_feasible and math.isfinite(c.total)

    def __repr__(self) -> str:
        return f"Solution({self.instance.name}, routes={self.route_count()})"


# === 재고 시뮬레이션 ===

def simulate_inventory(instance: Instance, quantities: Sequence[Sequence[float]]) -> InventoryTrace:
    """손실 판매(lost sales) 재고 추적"""
    H, n = instance.horizon, instance.n
    I: List[List[int]] = [[]]
    B: List[List[int]] = [[]]
    for i in range(1, n + 1):
        r = instance.retailers[i - 1]
        level = r.start_level
        levels, shortages = [], []
        for t in range(H):
            net = level - r.demand[t] + quantities[t][i]
            level = max(0, net)
            levels.append(level)
            shortages.append(max(0, -net))
        I.append(levels)
        B.append(shortages)

    I0 = []
    level0 = instance.supplier.start_level
    for t in range(H):
        level0 = level0 + instance.supplier.production[t] - sum(quantities[t][1:n + 1])
        I0.append(level0)
    return InventoryTrace(I=I, B=B, I0=I0)


def retailer_inventory_cost(instance: Instance, i: int, quantities: Sequence[Sequence[float]],
                            rho: Optional[float] = None) -> Tuple[float, float, int]:
    """소매점 i 한 곳의 (보관비, 품절 벌점, 품절량)"""
    r = instance.retailer(i)
    rho = instance.rho if rho is None else rho
    level = r.start_level
    holding = 0.0
    shortage = 0
    for t in range(instance.horizon):
        net = level - r.demand[t] + quantities[t][i]
        level = max(0, net)
        holding += r.holding_cost * level
        shortage += max(0, -net)
    penalty = rho * r.holding_cost * shortage if shortage else 0.0
    return holding, penalty, shortage


def retailer_cost(instance: Instance, solution: Solution, i: int,
                  rho: Optional[float] = None) -> float:
    holding, penalty, _ = retailer_inventory_cost(instance, i, solution.quantities, rho)
    return holding + penalty


def route_distance(dist: List[List[float]], route: Sequence[int]) -> float:
    if not route:
        return 0.0
    total = dist[0][route[0]] + dist[route[-1]][0]
    for a, b in zip(route, route[1:]):
        total += dist[a][b]
    return total


# === 평가 ===

def evaluate(instance: Instance, solution: Solution, omega: float,
             rho: Optional[float] = None) -> CostBreakdown:
    """벌점 포함 목적함수 (처음부터 재계산)"""
    rho = instance.rho if rho is None else rho
    quantities = solution.quantities
    trace = simulate_inventory(instance, quantities)

    supplier_holding = sum(h * level for h, level in zip(instance.supplier.holding_cost, trace.I0))

    retailer_holding = 0.0
    stockout_penalty = 0.0
    stockout_quantity = 0
    for i in range(1, instance.n + 1):
        h = instance.retailers[i - 1].holding_cost
        retailer_holding += h * sum(trace.I[i])
        shortage = sum(trace.B[i])
        if shortage:
            stockout_quantity += shortage
            stockout_penalty += rho * h * shortage

    dist = instance.dist
    Q = instance.capacity
    routing = 0.0
    excess = 0
    for t, day in enumerate(solution.routes):
        q = quantities[t]
        for route in day:
            routing += route_distance(dist, route)
            excess += max(0, sum(q[i] for i in route) - Q)

    delivered = sum(sum(q[1:]) for q in quantities)
    return CostBreakdown(
        supplier_holding=supplier_holding,
        retailer_holding=retailer_holding,
        stockout_penalty=stockout_penalty,
        routing=routing,
        capacity_excess_penalty=omega * excess if excess else 0.0,
        stockout_quantity=stockout_quantity,
        delivered_quantity=delivered,
        capacity_excess=excess,
    )


# === split ===

def split_day(instance: Instance, tour: Sequence[int], quantities: Sequence[float],
              K: int, omega: float) -> List[List[int]]:
    """giant tour 를 최대 K 개의 연속 경로로 분할 (경로비 + ω·초과량 최소)

    (경로 수, 위치) 위의 Bellman 재귀. 동률이면 경로 수가 적은 쪽을 택한다.
    """
    n = instance.n
    for i in tour:
        if not 1 <= i <= n:
            raise StructuralError(f"존재하지 않는 소매점: {i}")
    m = len(tour)
    if m == 0:
        return []

    dist = instance.dist
    Q = instance.capacity
    load = [0.0] * (m + 1)
    inner = [0.0] * (m + 1)      # inner[j] = tour[0..j-1] 연속 이동 거리
    for j in range(1, m + 1):
        load[j] = load[j - 1] + quantities[tour[j - 1]]
        if j >= 2:
            inner[j] = inner[j - 1] + dist[tour[j - 2]][tour[j - 1]]

    def segment_cost(a: int, b: int) -> float:
        # tour[a..b-1] 를 한 경로로
        cost = dist[0][tour[a]] + inner[b] - inner[a + 1] + dist[tour[b - 1]][0]
        over = load[b] - load[a] - Q
        if over > 0:
            cost += omega * over
        return cost

    INF = math.inf
    max_routes = min(K, m)
    best = [[INF] * (m + 1) for _ in range(max_routes + 1)]
    pred = [[-1] * (m + 1) for _ in range(max_routes + 1)]
    best[0][0] = 0.0
    for k in range(1, max_routes + 1):
        prev, cur, back = best[k - 1], best[k], pred[k]
        for a in range(m):
            if prev[a] == INF:
                continue
            base = prev[a]
            for b in range(a + 1, m + 1):
                value = base + segment_cost(a, b)
                if value < cur[b] - 1e-12:
                    cur[b] = value
                    back[b] = a

    k_best = min(range(1, max_routes + 1), key=lambda k: (best[k][m], k))
    routes: List[List[int]] = []
    b = m
    for k in range(k_best, 0, -1):
        a = pred[k][b]
        routes.append(list(tour[a:b]))
        b = a
    routes.reverse()
    return routes


__all__ = [
    'CostBreakdown', 'InventoryTrace', 'Solution',
    'simulate_inventory', 'retailer_inventory_cost', 'retailer_cost',
    'route_distance', 'evaluate', 'split_day',
]
