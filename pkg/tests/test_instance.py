# tests/test_instance.py

import json
import math

import pytest

from src.core.errors import InstanceParseError, InstanceValidationError
from src.core.instance import (
    FORMAT_NATIVE, ROUNDING_EXACT, build_cost_matrix, parse_instance, serialize_instance,
)

TINY = """4 3 30
0 0 0 50 20 0.1
1 3 4 5 10 0 4 0.2
2 -3 4 2 8 0 3 0.3
3 0 -5 6 12 0 5 0.25
"""

NATIVE = """{
  "name": "bad_fields", "horizon": 2, "vehicles": 1, "capacity": 20,
  "supplier": {"x": 0, "y": 0, "start_level": 30, "production": [10, 10], "holding_cost": 0.1},
  "retailers": [
    {"x": 3, "y": 4, "start_level": 2, "max_level": 8, "demand": [3, 4], "holding_cost": 0.2},
    {"x": 6, "y": 8, "start_level": 0, "max_level": 6, "demand": [2, 2], "holding_cost": 0.3}
  ]
}"""


class TestClassicFormat:
    def test_fields(self, tiny_instance):
        inst = tiny_instance
        assert (inst.n, inst.horizon, inst.vehicles, inst.capacity) == (3, 3, 1, 30)
        assert inst.supplier.production == (20, 20, 20)
        assert inst.supplier.holding_cost == (0.1, 0.1, 0.1)
        assert inst.retailer(2).max_level == 8
        assert inst.retailer(3).demand == (5, 5, 5)
        assert not inst.stockout_allowed

    def test_nearest_integer_costs(self, tiny_instance):
        c = tiny_instance.cost
        assert c[0][1] == 5 and c[1][2] == 6
        # sqrt(90) = 9.49 → 9
        assert c[1][3] == 9
        assert all(c[i][i] == 0 for i in range(4))
        assert all(c[i][j] == c[j][i] for i in range(4) for j in range(4))

    def test_vehicles_split_fleet_capacity(self):
        inst = parse_instance(TINY, vehicles=4)
        assert inst.capacity == 7
        assert inst.fleet_capacity == 30

    def test_retailer_index_range(self, tiny_instance):
        with pytest.raises(IndexError):
            tiny_instance.retailer(0)

    def test_supplier_credit_suffix_sums(self, tiny_instance):
        assert tiny_instance.supplier_credit == pytest.approx((0.3, 0.2, 0.1))

    def test_rho_option(self):
        inst = parse_instance(TINY, rho=10)
        assert inst.stockout_allowed and inst.rho == 10


class TestParseErrors:
    def test_short_header(self):
        with pytest.raises(InstanceParseError) as exc:
            parse_instance("4 3\n")
        assert exc.value.line == 1

    def test_non_numeric_field_reports_line(self):
        text = TINY.replace("2 -3 4 2 8 0 3 0.3", "2 -3 4 two 8 0 3 0.3")
        with pytest.raises(InstanceParseError) as exc:
            parse_instance(text)
        assert exc.value.line == 4

    def test_missing_retailer_row(self):
        text = "\n".join(TINY.splitlines()[:-1])
        with pytest.raises(InstanceParseError):
            parse_instance(text)

    def test_empty_file(self):
        with pytest.raises(InstanceParseError):
            parse_instance("")

    def test_nonzero_min_level(self):
        text = TINY.replace("1 3 4 5 10 0 4 0.2", "1 3 4 5 10 1 4 0.2")
        with pytest.raises(InstanceValidationError) as exc:
            parse_instance(text)
        assert exc.value.field == 'retailers[1].min_level'

    def test_start_above_max(self):
        text = TINY.replace("1 3 4 5 10 0 4 0.2", "1 3 4 11 10 0 4 0.2")
        with pytest.raises(InstanceValidationError) as exc:
            parse_instance(text)
        assert exc.value.field == 'retailers[1].start_level'

    def test_rho_must_exceed_one(self):
        with pytest.raises(InstanceValidationError) as exc:
            parse_instance(TINY, rho=1.0)
        assert exc.value.field == 'rho'

    def test_bad_json(self):
        with pytest.raises(InstanceParseError):
            parse_instance("{not json", fmt=FORMAT_NATIVE)


class TestNativeFormat:
    def test_fields(self, native_instance):
        inst = native_instance
        assert inst.name == 'tiny_native'
        assert inst.supplier.holding_cost == (0.1, 0.05)
        assert inst.supplier_credit == pytest.approx((0.15, 0.05))
        assert inst.cost[0][2] == 10 and inst.cost[1][2] == 5

    def test_serialize_round_trip(self, tiny_instance, native_instance):
        for inst in (tiny_instance, native_instance, tiny_instance.with_overrides(rho=5.0)):
            assert parse_instance(serialize_instance(inst), fmt=FORMAT_NATIVE) == inst

    def test_per_day_length_checked(self):
        text = '{"horizon": 2, "capacity": 5, "supplier": {"production": [1]}, "retailers": []}'
        with pytest.raises(InstanceValidationError):
            parse_instance(text, fmt=FORMAT_NATIVE)

    @pytest.mark.parametrize('path, value, field', [
        (('horizon',), 'x', 'horizon'),
        (('vehicles',), None, 'vehicles'),
        (('capacity',), [5], 'capacity'),
        (('supplier', 'holding_cost'), 'cheap', 'supplier.holding_cost'),
        (('retailers', 0, 'x'), None, 'retailers[1].x'),
        (('retailers', 1, 'holding_cost'), {}, 'retailers[2].holding_cost'),
    ])
    def test_bad_field_value_names_field(self, path, value, field):
        data = json.loads(NATIVE)
        target = data
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = value
        with pytest.raises(InstanceParseError) as exc:
            parse_instance(json.dumps(data), fmt=FORMAT_NATIVE)
        assert field in str(exc.value)

    def test_retailers_must_be_list(self):
        data = json.loads(NATIVE)
        data['retailers'] = 3
        with pytest.raises(InstanceParseError):
            parse_instance(json.dumps(data), fmt=FORMAT_NATIVE)


class TestOverrides:
    def test_vehicles_recompute_capacity(self, tiny_instance):
        inst = tiny_instance.with_overrides(vehicles=4)
        assert (inst.vehicles, inst.capacity) == (4, 7)
        assert tiny_instance.capacity == 30

    def test_same_values_return_self(self, tiny_instance):
        assert tiny_instance.with_overrides(vehicles=1) is tiny_instance

    def test_rho(self, tiny_instance):
        inst = tiny_instance.with_overrides(rho=math.inf)
        assert not inst.stockout_allowed
        assert tiny_instance.with_overrides(rho=3.0).rho == 3.0

    def test_invalid_vehicles(self, tiny_instance):
        with pytest.raises(InstanceValidationError):
            tiny_instance.with_overrides(vehicles=0)


def test_exact_cost_matrix():
    matrix = build_cost_matrix([(0, 0), (1, 1)], ROUNDING_EXACT)
    assert matrix[0][1] == pytest.approx(math.sqrt(2))


def test_nearest_integer_cost_matrix():
    matrix = build_cost_matrix([(0, 0), (3, 4), (1, 1)])
    assert matrix[0][1] == 5
    assert matrix[0][2] == 1
    assert (matrix == matrix.T).all()


def test_single_node_matrix():
    matrix = build_cost_matrix([(2, 7)])
    assert matrix.shape == (1, 1)
    assert matrix[0][0] == 0
