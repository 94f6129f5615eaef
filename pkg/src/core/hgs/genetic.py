# core/hgs/genetic.py
# 초기 개체 생성과 다일(multi-day) 교차

from typing import List, Optional

import numpy as np

from ..instance import Instance
from ..local_search import LocalSearch
from ..solution import Solution


def initial_quantities(instance: Instance, rng: np.random.Generator,
                       extra_visit_probability: float = 0.3) -> List[List[int]]:
    """JIT 규칙 + 확률적 추가 방문, 배송량은 최대 재고까지 채움 (OU)

    (t, i) 마다 난수를 한 번씩 뽑는다.
    """
    H, n = instance.horizon, instance.n
    quantities = [[0] * (n + 1) for _ in range(H)]
    levels = [r.start_level for r in instance.retailers]
    for t in range(H):
        for i in range(1, n + 1):
            r = instance.retailers[i - 1]
            level = levels[i - 1]
            draw = rng.random()
            if level < r.demand[t] or draw < extra_visit_probability:
                quantities[t][i] = r.max_level - level
            levels[i - 1] = max(0, level + quantities[t][i] - r.demand[t])
    return quantities


def initialize_individual(instance: Instance, rng: np.random.Generator,
                          local_search: Optional[LocalSearch], omega: float,
                          extra_visit_probability: float = 0.3) -> Solution:
    """초기 개체: 배송량 결정 → 일별 방문 순서 무작위 → split → 교육"""
    quantities = initial_quantities(instance, rng, extra_visit_probability)
    tours = []
    for t in range(instance.horizon):
        visited = [i for i in range(1, instance.n + 1) if quantities[t][i] > 0]
        tours.append([visited[k] for k in rng.permutation(len(visited)).tolist()])
    solution = Solution.from_tours(instance, tours, quantities, omega)
    if local_search is not None:
        local_search.educate(solution, omega)
    return solution


def _segment(tour: List[int], rng: np.random.Generator) -> List[int]:
    """원형으로 이어진 무작위 연속 구간"""
    if not tour:
        return []
    start = int(rng.integers(len(tour)))
    length = int(rng.integers(len(tour) + 1))
    return [tour[(start + k) % len(tour)] for k in range(length)]


def crossover(instance: Instance, p1: Solution, p2: Solution,
              rng: np.random.Generator, omega: float) -> Solution:
    """일자를 섞은 뒤 j1 < j2 로 세 구역을 나눈다

    순서 < j1: P1 의 그날 순서 중 일부 구간, [j1, j2): 상속 없음, ≥ j2: P1 의 그날 전체.
    j2 미만 구역의 날에는 P2 의 방문을 뒤에 덧붙이며, 모든 날의 배송량은
    전날 재고 기준 최대 가능량(U − I)으로 제한한다.
    """
    H, n = instance.horizon, instance.n
    order = rng.permutation(H).tolist()
    j1, j2 = sorted(rng.choice(H + 1, size=2, replace=False).tolist())
    position = [0] * H
    for pos, t in enumerate(order):
        position[t] = pos

    p1_tours, p2_tours = p1.tours, p2.tours
    inherited: List[List[int]] = [[] for _ in range(H)]
    for t in order:
        pos = position[t]
        if pos < j1:
            inherited[t] = _segment(p1_tours[t], rng)
        elif pos >= j2:
            inherited[t] = list(p1_tours[t])

    tours: List[List[int]] = []
    quantities = [[0] * (n + 1) for _ in range(H)]
    levels = [r.start_level for r in instance.retailers]
    for t in range(H):
        tour: List[int] = []
        wanted = [(i, p1.quantities[t][i]) for i in inherited[t]]
        if position[t] < j2:
            present = set(inherited[t])
            wanted.extend((i, p2.quantities[t][i]) for i in p2_tours[t] if i not in present)
        for i, q in wanted:
            cap = instance.retailers[i - 1].max_level - levels[i - 1]
            q = min(q, cap)
            if q > 0:
                tour.append(i)
                quantities[t][i] = q
        for i in range(1, n + 1):
            r = instance.retailers[i - 1]
            levels[i - 1] = max(0, levels[i - 1] + quantities[t][i] - r.demand[t])
        tours.append(tour)

    return Solution.from_tours(instance, tours, quantities, omega)


__all__ = ['initial_quantities', 'initialize_individual', 'crossover']
