# core/hgs/population.py
# 가능/불능 부분 개체군, 편향 적합도, 생존자 선택

import itertools
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..errors import ContractViolationError
from ..solution import CostBreakdown, Solution
from .params import SearchParams


_UIDS = itertools.count(1)


def distance(p1: Solution, p2: Solution) -> float:
    """방문일 집합이 다른 소매점의 비율 (0..1)"""
    n = p1.instance.n
    if n == 0:
        return 0.0
    a, b = p1.day_pattern(), p2.day_pattern()
    return sum(1 for i in range(1, n + 1) if a[i] != b[i]) / n


class Individual:
    """개체군 구성원: 해 + 비용 + 다른 구성원과의 거리"""

    __slots__ = ('uid', 'solution', 'pattern', 'cost', 'penalized', 'feasible',
                 'fitness', 'proximity')

    def __init__(self, solution: Solution, omega: float):
        self.uid = next(_UIDS)
        self.solution = solution
        self.pattern = solution.day_pattern()
        self.proximity: Dict[int, float] = {}
        self.fitness = 0.0
        self.refresh(omega)

    def refresh(self, omega: float):
        self.cost: CostBreakdown = self.solution.cost(omega)
        self.penalized = self.cost.total
        self.feasible = self.cost.is_capacity_feasible and math.isfinite(self.penalized)

    def distance_to(self, other: 'Individual') -> float:
        n = len(self.pattern) - 1
        if n <= 0:
            return 0.0
        return sum(1 for i in range(1, n + 1) if self.pattern[i] != other.pattern[i]) / n

    def diversity(self, n_closest: int) -> float:
        """가장 가까운 n_closest 개와의 평균 거리"""
        if not self.proximity:
            return 0.0
        closest = sorted(self.proximity.values())[:n_closest]
        return sum(closest) / len(closest)

    @property
    def is_clone(self) -> bool:
        return any(d == 0.0 for d in self.proximity.values())

    def __repr__(self) -> str:
        return f"Individual(#{self.uid}, cost={self.penalized:.2f}, fit={self.fitness:.3f})"


class Population:
    """가능해 / 불능해 부분 개체군"""

    def __init__(self, params: SearchParams):
        self.params = params
        self.feasible: List[Individual] = []
        self.infeasible: List[Individual] = []

    def __len__(self) -> int:
        return len(self.feasible) + len(self.infeasible)

    @property
    def members(self) -> List[Individual]:
        return self.feasible + self.infeasible

    # === 삽입 ===

    def add(self, solution: Solution, omega: float) -> Individual:
        """알맞은 부분 개체군에 삽입, μ+λ 에 도달하면 생존자 선택"""
        ind = Individual(solution, omega)
        sub = self.feasible if ind.feasible else self.infeasible
        for other in sub:
            d = ind.distance_to(other)
            ind.proximity[other.uid] = d
            other.proximity[ind.uid] = d
        sub.append(ind)
        if len(sub) >= self.params.mu + self.params.lambda_:
            self.survivor_selection(sub)
        else:
            self.update_fitness(sub)
        return ind

    def _remove(self, sub: List[Individual], ind: Individual):
        sub.remove(ind)
        for other in sub:
            other.proximity.pop(ind.uid, None)

    # === 적합도 ===

    def update_fitness(self, sub: List[Individual]):
        """편향 적합도 = 비용 순위 + (1 − elite/N)·다양성 순위 (낮을수록 좋음)"""
        size = len(sub)
        if size == 0:
            return
        if size == 1:
            sub[0].fitness = 0.0
            return
        n_closest = self.params.n_closest
        by_cost = sorted(range(size), key=lambda k: (sub[k].penalized, sub[k].uid))
        by_diversity = sorted(range(size), key=lambda k: (-sub[k].diversity(n_closest), sub[k].uid))
        cost_rank = [0.0] * size
        div_rank = [0.0] * size
        for rank, k in enumerate(by_cost):
            cost_rank[k] = rank / (size - 1)
        for rank, k in enumerate(by_diversity):
            div_rank[k] = rank / (size - 1)
        weight = max(0.0, 1.0 - self.params.nb_elite / size)
        for k, ind in enumerate(sub):
            ind.fitness = cost_rank[k] + weight * div_rank[k]

    @staticmethod
    def _best_cost(sub: List[Individual]) -> Individual:
        return min(sub, key=lambda ind: (ind.penalized, ind.uid))

    def _worst(self, sub: List[Individual], prefer_clones: bool) -> Optional[Individual]:
        self.update_fitness(sub)
        protected = self._best_cost(sub)
        candidates = [ind for ind in sub if ind is not protected]
        if prefer_clones:
            clones = [ind for ind in candidates if ind.is_clone]
            if clones:
                candidates = clones
        if not candidates:
            return None
        return max(candidates, key=lambda ind: (ind.fitness, ind.uid))

    def survivor_selection(self, sub: List[Individual]):
        """μ 개가 남을 때까지 복제 개체, 그다음 최악 적합도 개체 제거 (최저 비용 개체는 보존)"""
        while len(sub) > self.params.mu:
            worst = self._worst(sub, prefer_clones=True)
            if worst is None:
                break
            self._remove(sub, worst)
        self.update_fitness(sub)

    # === 선택 ===

    def select_parents(self, rng: np.random.Generator) -> Tuple[Solution, Solution]:
        """합집합에서 이진 토너먼트 두 번"""
        union = self.members
        if not union:
            raise ContractViolationError("빈 개체군에서 부모를 선택할 수 없습니다")
        self.update_fitness(self.feasible)
        self.update_fitness(self.infeasible)

        def tournament() -> Individual:
            a = union[int(rng.integers(len(union)))]
            b = union[int(rng.integers(len(union)))]
            return b if b.fitness < a.fitness else a

        return tournament().solution, tournament().solution

    # === 유지 관리 ===

    def refresh(self, omega: float):
        """ω 변경 후 불능해 비용 재계산"""
        for ind in self.infeasible:
            ind.refresh(omega)
        self.update_fitness(self.infeasible)

    def diversify(self, make_solution: Callable[[], Solution], omega: float) -> int:
        """각 부분 개체군의 최악 비율을 새 초기 개체로 교체, 교체 수 반환"""
        removed = 0
        for sub in (self.feasible, self.infeasible):
            keep = len(sub) - int(len(sub) * self.params.diversify_fraction)
            while len(sub) > max(1, keep):
                worst = self._worst(sub, prefer_clones=False)
                if worst is None:
                    break
                self._remove(sub, worst)
                removed += 1
        for _ in range(removed):
            self.add(make_solution(), omega)
        return removed

    def best_feasible(self) -> Optional[Individual]:
        return self._best_cost(self.feasible) if self.feasible else None

    def feasible_share(self) -> float:
        return len(self.feasible) / len(self) if len(self) else 0.0


__all__ = ['distance', 'Individual', 'Population']
