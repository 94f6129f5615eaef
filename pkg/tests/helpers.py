# tests/helpers.py
# 테스트용 인스턴스/해 생성

import math
from typing import List, Optional, Sequence

import numpy as np

from src.core.instance import (
    ROUNDING_EXACT, Instance, Retailer, Supplier, build_cost_matrix,
)
from src.core.solution import Solution


def build_instance(demand: Sequence[Sequence[int]], max_level: Sequence[int],
                   start_level: Optional[Sequence[int]] = None,
                   holding: Optional[Sequence[float]] = None,
                   capacity: int = 100, vehicles: int = 1,
                   coords: Optional[Sequence[Sequence[float]]] = None,
                   cost: Optional[Sequence[Sequence[float]]] = None,
                   rho: float = math.inf, supplier_holding=0.0,
                   production: Optional[Sequence[int]] = None,
                   supplier_start: int = 0, name: str = 'test') -> Instance:
    """직접 구성한 인스턴스 (좌표 기본값: 소매점 k 는 (k, 0))"""
    n = len(demand)
    H = len(demand[0]) if n else 1
    start_level = list(start_level) if start_level is not None else [0] * n
    holding = list(holding) if holding is not None else [1.0] * n
    if coords is None:
        coords = [(0.0, 0.0)] + [(float(k), 0.0) for k in range(1, n + 1)]
    if cost is None:
        cost = build_cost_matrix(coords, ROUNDING_EXACT).tolist()
    if isinstance(supplier_holding, (int, float)):
        supplier_holding = [float(supplier_holding)] * H
    production = list(production) if production is not None else [0] * H

    return Instance(
        name=name,
        horizon=H,
        vehicles=vehicles,
        capacity=capacity,
        coords=tuple((float(x), float(y)) for x, y in coords),
        supplier=Supplier(
            start_level=supplier_start,
            production=tuple(production),
            holding_cost=tuple(float(h) for h in supplier_holding),
        ),
        retailers=tuple(
            Retailer(start_level=start_level[k], max_level=max_level[k],
                     demand=tuple(demand[k]), holding_cost=float(holding[k]))
            for k in range(n)
        ),
        cost=tuple(tuple(float(c) for c in row) for row in cost),
        rho=rho,
        fleet_capacity=capacity * vehicles,
        rounding=ROUNDING_EXACT,
    )


def empty_quantities(instance: Instance) -> List[List[int]]:
    return [[0] * (instance.n + 1) for _ in range(instance.horizon)]


def random_case(seed: int, rho_factor: Optional[float] = None):
    """작은 무작위 재삽입 사례: (인스턴스, 해, 소매점, ω)

    n ≤ 4, H ≤ 3, U ≤ 8, K ≤ 2 이므로 하루 선택지는 최대 2개.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    H = int(rng.integers(1, 4))
    K = int(rng.integers(1, 3))
    max_level = [int(rng.integers(1, 9)) for _ in range(n)]
    demand = [[int(rng.integers(0, U + 1)) for _ in range(H)] for U in max_level]
    start = [int(rng.integers(0, U + 1)) for U in max_level]
    holding = [float(rng.integers(1, 6)) / 10 for _ in range(n)]
    coords = rng.integers(0, 30, size=(n + 1, 2)).tolist()
    if rho_factor is None:
        rho_factor = [5.0, 50.0, math.inf][int(rng.integers(3))]
    instance = build_instance(
        demand, max_level, start_level=start, holding=holding,
        capacity=int(rng.integers(3, 15)), vehicles=K, coords=coords, rho=rho_factor,
        supplier_holding=float(rng.integers(0, 4)) / 10,
        production=[int(rng.integers(0, 20)) for _ in range(H)], supplier_start=10,
    )

    quantities = empty_quantities(instance)
    tours = []
    for t in range(H):
        tour = []
        for i in range(1, n + 1):
            if rng.random() < 0.5:
                tour.append(i)
                quantities[t][i] = int(rng.integers(1, max_level[i - 1] + 1))
        tours.append([tour[k] for k in rng.permutation(len(tour)).tolist()])
    omega = [0.5, 2.0, 10.0][int(rng.integers(3))]
    solution = Solution.from_tours(instance, tours, quantities, omega)
    retailer = int(rng.integers(1, n + 1))
    return instance, solution, retailer, omega


def random_tiny_instance(seed: int) -> Instance:
    """전수 탐색 가능한 무작위 인스턴스 (n ≤ 3, H ≤ 2, K = 1, U ≤ 5)

    용량은 최대 재고 합이라 품절 없는 가능해가 항상 있다.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    H = int(rng.integers(1, 3))
    max_level = [int(rng.integers(1, 6)) for _ in range(n)]
    demand = [[int(rng.integers(0, U + 1)) for _ in range(H)] for U in max_level]
    start = [int(rng.integers(0, U + 1)) for U in max_level]
    holding = [float(rng.integers(1, 6)) / 10 for _ in range(n)]
    coords = rng.integers(0, 20, size=(n + 1, 2)).tolist()
    rho = [math.inf, 5.0, 50.0][int(rng.integers(3))]
    return build_instance(
        demand, max_level, start_level=start, holding=holding,
        capacity=sum(max_level), vehicles=1, coords=coords, rho=rho,
        supplier_holding=float(rng.integers(0, 3)) / 10,
        production=[int(rng.integers(0, 10)) for _ in range(H)], supplier_start=10,
        name=f'tiny_{seed}',
    )
