# core/hgs/engine.py
# HGS 주 루프: 선택 → 교차 → 교육 → 삽입(→ 수리) → 생존자 선택 → 벌점 조정 → 다양화

import math
from collections import deque
from typing import Optional

import numpy as np

from ..ds_operator import PieceRecorder
from ..instance import Instance
from ..local_search import LocalSearch
from ..solution import Solution
from ...utils.log import get_logger
from ...utils.timing import Stopwatch
from .genetic import crossover, initialize_individual
from .params import (
    STOP_ITERATIONS, STOP_STAGNATION, STOP_TIME, SearchParams, SearchResult,
)
from .population import Population


logger = get_logger('hgs')


def adapt_penalty(omega: float, feasible_fraction: float, params: SearchParams) -> float:
    """최근 자연 가능해 비율에 따라 ω 조정 (범위 내로)"""
    if not 0.0 <= feasible_fraction <= 1.0:
        raise ValueError(f"비율은 0..1 범위여야 합니다: {feasible_fraction}")
    if feasible_fraction < params.target_feasible_low:
        omega *= params.penalty_increase
    elif feasible_fraction > params.target_feasible_high:
        omega *= params.penalty_decrease
    return min(params.omega_max, max(params.omega_min, omega))


class HGSEngine:
    """한 번의 시드 고정 탐색 (개체군 상태는 엔진 안에만 존재)"""

    def __init__(self, instance: Instance, params: SearchParams,
                 recorder: Optional[PieceRecorder] = None, verbose: bool = False):
        self.instance = instance
        self.params = params
        self.verbose = verbose
        self.rng = np.random.default_rng(params.seed)
        self.local_search = LocalSearch(instance, self.rng, params.granularity,
                                        debug=params.debug, recorder=recorder)
        self.population = Population(params)
        self.omega = params.resolve_omega(instance)
        self.best: Optional[Solution] = None
        self.best_total = math.inf
        self.best_infeasible: Optional[Solution] = None
        self.best_infeasible_total = math.inf
        self.history = []
        self.recent = deque(maxlen=params.adapt_interval)
        self.iterations = 0
        self.stopwatch = Stopwatch(params.resolve_time_limit(instance))

    # === 개체 생성/삽입 ===

    def _new_individual(self) -> Solution:
        return initialize_individual(self.instance, self.rng, self.local_search, self.omega,
                                     self.params.extra_visit_probability)

    def _insert(self, solution: Solution) -> bool:
        """개체군 삽입 + 최선해 갱신, 가능해 최선이 개선되면 True"""
        ind = self.population.add(solution, self.omega)
        if ind.feasible:
            total = ind.cost.total
            if total < self.best_total - 1e-9:
                self.best_total = total
                self.best = solution.copy()
                self.history.append((self.iterations, self.stopwatch.elapsed, total))
                return True
        elif ind.penalized < self.best_infeasible_total:
            self.best_infeasible_total = ind.penalized
            self.best_infeasible = solution.copy()
        return False

    def _repair(self, solution: Solution) -> Optional[Solution]:
        """ω 를 키워 재교육 (×10, ×100), 가능해가 되면 반환"""
        candidate = solution.copy()
        for multiplier in self.params.repair_multipliers:
            self.local_search.educate(candidate, self.omega * multiplier)
            if candidate.is_feasible():
                return candidate
        return None

    def _stop_reason(self, stagnation: int) -> Optional[str]:
        if self.iterations >= self.params.max_iterations:
            return STOP_ITERATIONS
        if stagnation >= self.params.max_stagnation:
            return STOP_STAGNATION
        if self.stopwatch.expired():
            return STOP_TIME
        return None

    # === 주 루프 ===

    def run(self) -> SearchResult:
        params = self.params
        logger.info(f"{self.instance.name}: n={self.instance.n}, H={self.instance.horizon}, "
                    f"K={self.instance.vehicles}, seed={params.seed}, ω={self.omega:.3f}")

        for _ in range(params.initial_population_factor * params.mu):
            if self.stopwatch.expired():
                break
            solution = self._new_individual()
            self._insert(solution)
            if not solution.is_feasible() and self.rng.random() < params.repair_probability:
                repaired = self._repair(solution)
                if repaired is not None:
                    self._insert(repaired)

        stagnation = 0
        reason = None
        while len(self.population) > 0:
            reason = self._stop_reason(stagnation)
            if reason is not None:
                break
            self.iterations += 1

            p1, p2 = self.population.select_parents(self.rng)
            child = crossover(self.instance, p1, p2, self.rng, self.omega)
            self.local_search.educate(child, self.omega)

            naturally_feasible = child.is_feasible()
            self.recent.append(naturally_feasible)
            improved = self._insert(child)
            if not naturally_feasible and self.rng.random() < params.repair_probability:
                repaired = self._repair(child)
                if repaired is not None:
                    improved = self._insert(repaired) or improved

            stagnation = 0 if improved else stagnation + 1

            if self.iterations % params.adapt_interval == 0 and self.recent:
                fraction = sum(self.recent) / len(self.recent)
                self.omega = adapt_penalty(self.omega, fraction, params)
                self.population.refresh(self.omega)

            if stagnation > 0 and stagnation % params.diversify_interval == 0:
                replaced = self.population.diversify(self._new_individual, self.omega)
                logger.debug(f"다양화: {replaced}개 교체 (정체 {stagnation})")

            if self.verbose and self.iterations % params.log_interval == 0:
                best = f"{self.best_total:.2f}" if self.best is not None else "-"
                logger.info(f"반복 {self.iterations}: 최선 {best}, ω={self.omega:.3f}, "
                            f"가능해 비율 {self.population.feasible_share():.2f}")
        if reason is None:
            reason = self._stop_reason(stagnation) or STOP_TIME

        result = SearchResult(
            best=self.best,
            best_cost=self.best.cost(0.0) if self.best is not None else None,
            best_infeasible=self.best_infeasible,
            iterations=self.iterations,
            elapsed=self.stopwatch.elapsed,
            stop_reason=reason,
            omega=self.omega,
            feasible_fraction=(sum(self.recent) / len(self.recent)) if self.recent else
            self.population.feasible_share(),
            seed=params.seed,
            history=list(self.history),
        )
        logger.info(result.summary())
        return result


def run(instance: Instance, params: SearchParams,
        recorder: Optional[PieceRecorder] = None, verbose: bool = False) -> SearchResult:
    return HGSEngine(instance, params, recorder, verbose).run()


__all__ = ['adapt_penalty', 'HGSEngine', 'run']
