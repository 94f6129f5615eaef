# tests/test_hgs.py

import math

import numpy as np
import pytest

from src.core.errors import ContractViolationError
from src.core.hgs import (
    HGSEngine, Population, SearchParams, adapt_penalty, crossover, distance,
    initial_quantities, initialize_individual,
)
from src.core.hgs.params import STOP_ITERATIONS, STOP_STAGNATION
from src.core.oracle import exhaustive_solve
from src.core.solution import Solution, simulate_inventory
from src.core.validation import validate
from tests.helpers import build_instance, random_tiny_instance


def quick_params(**overrides) -> SearchParams:
    values = dict(max_iterations=30, max_stagnation=30, mu=4, lambda_=4,
                  initial_population_factor=1, time_limit=120.0, adapt_interval=10, seed=1)
    values.update(overrides)
    return SearchParams(**values)


def steady(instance, extra=0):
    quantities = [[0, 4, 3, 5] for _ in range(instance.horizon)]
    quantities[0][1] += extra
    return Solution(instance, [[[1, 2, 3]] for _ in range(instance.horizon)], quantities)


def within_max_level(instance, solution) -> bool:
    trace = simulate_inventory(instance, solution.quantities)
    for i, r in enumerate(instance.retailers, 1):
        prev = r.start_level
        for t in range(instance.horizon):
            if prev + solution.quantities[t][i] > r.max_level:
                return False
            prev = trace.I[i][t]
    return True


class TestParams:
    def test_stagnation_above_iterations_rejected(self):
        with pytest.raises(ValueError):
            SearchParams(max_iterations=10, max_stagnation=20)

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            SearchParams(mu=0)

    def test_from_config(self):
        params = SearchParams.from_config({'lambda': 7, 'mu': 5, 'unknown': 1}, seed=3, mu=None)
        assert (params.lambda_, params.mu, params.seed) == (7, 5, 3)

    def test_initial_omega(self, tiny_instance):
        # 최대 간선 비용 9 / 평균 최대 재고 10
        assert SearchParams().resolve_omega(tiny_instance) == pytest.approx(0.9)
        assert SearchParams(omega_initial=5.0).resolve_omega(tiny_instance) == 5.0

    def test_diversify_interval(self):
        assert SearchParams(max_iterations=100, max_stagnation=30).diversify_interval == 10


class TestAdaptPenalty:
    def test_too_few_feasible_raises_omega(self):
        assert adapt_penalty(10.0, 0.1, SearchParams()) == pytest.approx(12.0)

    def test_too_many_feasible_lowers_omega(self):
        assert adapt_penalty(10.0, 0.5, SearchParams()) == pytest.approx(8.5)

    def test_inside_target_band_unchanged(self):
        assert adapt_penalty(10.0, 0.22, SearchParams()) == 10.0

    def test_clamped(self):
        params = SearchParams(omega_max=11.0)
        assert adapt_penalty(10.0, 0.0, params) == 11.0

    def test_invalid_fraction(self):
        with pytest.raises(ValueError):
            adapt_penalty(1.0, 1.5, SearchParams())


class TestPopulation:
    def test_distance(self, tiny_instance):
        a = steady(tiny_instance)
        b = steady(tiny_instance)
        assert distance(a, b) == 0.0
        b.routes[0] = [[1, 2]]
        b.quantities[0][3] = 0
        assert distance(a, b) == pytest.approx(1 / 3)

    def test_survivors_keep_best(self, tiny_instance):
        population = Population(SearchParams(mu=2, lambda_=1))
        for extra in (1, 0, 2):
            population.add(steady(tiny_instance, extra), omega=1.0)
        assert len(population.feasible) == 2
        assert population.best_feasible().penalized == pytest.approx(104.1)

    def test_infeasible_goes_to_own_subpopulation(self, tiny_instance):
        population = Population(SearchParams())
        population.add(Solution(tiny_instance), omega=1.0)
        assert len(population.infeasible) == 1
        assert population.feasible_share() == 0.0

    def test_select_from_empty_population(self):
        with pytest.raises(ContractViolationError):
            Population(SearchParams()).select_parents(np.random.default_rng(0))

    def test_diversify_replaces_members(self, tiny_instance):
        population = Population(SearchParams(mu=5, lambda_=5))
        for extra in range(4):
            population.add(steady(tiny_instance, extra), omega=1.0)
        replaced = population.diversify(lambda: steady(tiny_instance, 5), omega=1.0)
        assert replaced > 0
        assert len(population) == 4


class TestGenetic:
    def test_jit_quantities_avoid_stockout(self, tiny_instance):
        q = initial_quantities(tiny_instance, np.random.default_rng(0), extra_visit_probability=0.0)
        trace = simulate_inventory(tiny_instance, q)
        assert trace.stockout_total() == 0
        # 2일 이하 재고인 소매점 2 만 첫날 방문
        assert q[0][1:] == [0, 6, 0]

    def test_extra_visit_frequency(self):
        # 수요 0, 시작 재고 0 이라 방문은 모두 확률적 추가 방문
        inst = build_instance([[0]] * 10, [5] * 10)
        rng = np.random.default_rng(7)
        visits = 0
        for _ in range(1000):
            q = initial_quantities(inst, rng, extra_visit_probability=0.3)
            visits += sum(1 for i in range(1, 11) if q[0][i] > 0)
        assert visits / 10000 == pytest.approx(0.30, abs=0.03)

    def test_order_up_to_every_day(self, tiny_instance):
        q = initial_quantities(tiny_instance, np.random.default_rng(0), extra_visit_probability=1.0)
        assert q[0][1:] == [5, 6, 6]
        assert within_max_level(tiny_instance, Solution(tiny_instance, quantities=q))

    def test_crossover_respects_max_level(self, small_instance):
        rng = np.random.default_rng(5)
        parents = [initialize_individual(small_instance, rng, None, 1.0) for _ in range(2)]
        for _ in range(20):
            child = crossover(small_instance, parents[0], parents[1], rng, 1.0)
            assert within_max_level(small_instance, child)
            assert all(len(day) <= small_instance.vehicles for day in child.routes)


class TestEngine:
    def test_finds_valid_solution(self, tiny_instance):
        result = HGSEngine(tiny_instance, quick_params()).run()
        assert result.feasible_found
        assert result.stop_reason in (STOP_ITERATIONS, STOP_STAGNATION)
        assert result.iterations <= 30
        assert validate(tiny_instance, result.best).is_valid
        assert result.best_cost.total == pytest.approx(result.best.cost(0.0).total)
        assert result.history and result.history[-1][2] == pytest.approx(result.best_cost.total)

    def test_same_seed_same_result(self, tiny_instance):
        a = HGSEngine(tiny_instance, quick_params(seed=4)).run()
        b = HGSEngine(tiny_instance, quick_params(seed=4)).run()
        assert a.best.routes == b.best.routes
        assert a.best.quantities == b.best.quantities
        assert a.iterations == b.iterations

    def test_single_retailer_optimum(self):
        inst = build_instance([[3, 3]], [5], capacity=10, coords=[(0, 0), (2, 0)])
        _, optimum = exhaustive_solve(inst)
        result = HGSEngine(inst, quick_params(max_iterations=5, max_stagnation=5)).run()
        assert result.best_cost.total == pytest.approx(optimum)

    def test_never_beats_exhaustive(self):
        inst = build_instance([[2, 3], [3, 1]], [4, 5], start_level=[1, 0], capacity=6,
                              coords=[(0, 0), (3, 0), (0, 4)], supplier_holding=0.1,
                              production=[5, 5], supplier_start=5)
        _, optimum = exhaustive_solve(inst)
        result = HGSEngine(inst, quick_params()).run()
        assert result.feasible_found
        assert result.best_cost.total >= optimum - 1e-6

    def test_huge_rho_ends_without_stockout(self, tiny_instance):
        inst = tiny_instance.with_overrides(rho=1e6)
        result = HGSEngine(inst, quick_params()).run()
        assert result.feasible_found
        assert result.best_cost.stockout_quantity == 0
        assert simulate_inventory(inst, result.best.quantities).stockout_total() == 0

    def test_matches_exhaustive_on_random_tiny_instances(self):
        matched, compared = 0, 0
        for seed in range(50):
            inst = random_tiny_instance(seed)
            _, optimum = exhaustive_solve(inst)
            best = math.inf
            for run_seed in range(3):
                params = quick_params(max_iterations=100, max_stagnation=40, mu=8, lambda_=8,
                                      initial_population_factor=2, seed=run_seed)
                result = HGSEngine(inst, params).run()
                if result.feasible_found:
                    best = min(best, result.best_cost.total)
            assert best >= optimum - 1e-6, inst.name
            compared += 1
            if best <= optimum + 1e-6:
                matched += 1
        assert compared == 50
        assert matched >= 0.95 * compared

    def test_debug_mode(self, tiny_instance):
        result = HGSEngine(tiny_instance, quick_params(max_iterations=5, max_stagnation=5,
                                                       debug=True)).run()
        assert result.feasible_found
