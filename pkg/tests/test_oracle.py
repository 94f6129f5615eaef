# tests/test_oracle.py

import math

import pytest

from src.core.ds_operator import build_insertion_options, dp_reinsertion, remove_retailer
from src.core.errors import OracleBudgetExceeded
from src.core.oracle import (
    EnumerationBudget, brute_force_reinsertion, count_reinsertion_states, exhaustive_solve,
    insertion_candidates,
)
from src.core.solution import Solution
from src.core.validation import validate
from tests.helpers import build_instance, random_case


class TestExhaustiveSolve:
    def test_single_retailer(self):
        # U = 5 < 6 이므로 이틀 모두 방문: 경로 4 × 2
        inst = build_instance([[3, 3]], [5], capacity=10, coords=[(0, 0), (2, 0)])
        solution, cost = exhaustive_solve(inst)
        assert cost == pytest.approx(8)
        assert solution.routes == [[[1]], [[1]]]
        assert validate(inst, solution).is_valid

    def test_shared_route(self):
        inst = build_instance([[2], [2]], [3, 3], capacity=10, coords=[(0, 0), (2, 0), (2, 1)])
        solution, cost = exhaustive_solve(inst)
        # 0 → 1 → 2 → 0: 2 + 1 + sqrt(5)
        assert cost == pytest.approx(3 + math.sqrt(5))
        assert len(solution.routes[0]) == 1

    def test_stockout_when_cheaper(self):
        inst = build_instance([[1]], [5], coords=[(0, 0), (50, 0)], rho=3.0)
        solution, cost = exhaustive_solve(inst)
        assert cost == pytest.approx(3.0)
        assert solution.routes == [[]]

    def test_no_feasible_solution(self):
        inst = build_instance([[2], [2]], [3, 3], capacity=3)
        solution, cost = exhaustive_solve(inst)
        assert solution is None
        assert math.isinf(cost)

    def test_scope_refused(self):
        inst = build_instance([[1]] * 4, [2] * 4)
        with pytest.raises(OracleBudgetExceeded):
            exhaustive_solve(inst)

    def test_large_max_level_refused(self):
        with pytest.raises(OracleBudgetExceeded):
            exhaustive_solve(build_instance([[1]], [6]))


class TestBruteForceReinsertion:
    @pytest.mark.parametrize('seed', range(15))
    def test_state_count_matches_enumeration(self, seed):
        inst, solution, i, omega = random_case(seed)
        reduced = remove_retailer(solution, i)
        stats = {}
        brute_force_reinsertion(inst, reduced, i, omega, stats=stats)
        assert count_reinsertion_states(inst, reduced, i, omega) == stats["states"]

    def test_budget_checked_before_enumeration(self):
        inst = build_instance([[1, 1, 1]], [8])
        with pytest.raises(OracleBudgetExceeded):
            brute_force_reinsertion(inst, Solution(inst), 1, 1.0,
                                    budget=EnumerationBudget(max_quantity_grid=10))

    def test_invalid_budget(self):
        with pytest.raises(ValueError):
            EnumerationBudget(max_states=0)


class TestInsertionCandidates:
    @pytest.fixture
    def two_routes(self):
        # 경로 [2] 가 우회 2, 잔여 9 로 경로 [1] (우회 4, 잔여 5) 을 지배한다
        inst = build_instance([[2], [1], [3]], [5, 5, 5], capacity=10, vehicles=2)
        solution = Solution(inst, [[[1], [2]]], [[0, 5, 1, 0]])
        return inst, remove_retailer(solution, 3)

    def test_dominated_route_kept(self, two_routes):
        inst, reduced = two_routes
        assert insertion_candidates(inst, reduced, 3, 0) == [(0, 0), (1, 0)]
        assert len(build_insertion_options(inst, reduced, 3, 1.0, 0).options) == 1

    def test_new_route_only_below_fleet_size(self, two_routes):
        inst, reduced = two_routes
        wider = build_instance([[2], [1], [3]], [5, 5, 5], capacity=10, vehicles=3)
        assert insertion_candidates(wider, reduced, 3, 0)[-1] == (-1, 0)
        assert len(insertion_candidates(inst, reduced, 3, 0)) == 2

    def test_dp_agrees_with_unfiltered_enumeration(self, two_routes):
        inst, reduced = two_routes
        dp = dp_reinsertion(inst, reduced, 3, 1.0)
        brute = brute_force_reinsertion(inst, reduced, 3, 1.0)
        assert dp.feasible and brute.feasible
        assert dp.cost == pytest.approx(brute.cost)
