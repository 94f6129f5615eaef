# core/instance.py
# 벤치마크 인스턴스 파싱 및 비용 행렬 생성

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InstanceParseError, InstanceValidationError


FORMAT_CLASSIC = 'classic'
FORMAT_NATIVE = 'native'
FORMATS = (FORMAT_CLASSIC, FORMAT_NATIVE)

ROUNDING_NEAREST = 'nearest-integer'
ROUNDING_EXACT = 'exact'
ROUNDINGS = (ROUNDING_NEAREST, ROUNDING_EXACT)


@dataclass(frozen=True)
class Supplier:
    """공급자 (depot, 노드 0)"""
    start_level: int                   # I_0^0
    production: Tuple[int, ...]        # d_0^t, 일별 생산량
    holding_cost: Tuple[float, ...]    # h_0^t, 일별 보관비 (classic 형식은 상수 복제)


@dataclass(frozen=True)
class Retailer:
    """소매점 (노드 1..n)"""
    start_level: int                   # I_i^0
    max_level: int                     # U_i
    demand: Tuple[int, ...]            # d_i^t
    holding_cost: float                # h_i


@dataclass(frozen=True)
class Instance:
    """IRP 인스턴스 (생성 후 불변, 여러 탐색에서 공유 가능)"""
    name: str
    horizon: int                                  # H
    vehicles: int                                 # K
    capacity: int                                 # Q, 차량당 용량
    coords: Tuple[Tuple[float, float], ...]       # 노드 0 = 공급자
    supplier: Supplier
    retailers: Tuple[Retailer, ...]               # retailers[i - 1] = 소매점 i
    cost: Tuple[Tuple[float, ...], ...]           # c_{i,j}
    rho: float = math.inf                         # inf = 품절 불허 (NSO)
    fleet_capacity: int = 0                       # classic 헤더의 전체 용량
    rounding: str = ROUNDING_NEAREST

    def __post_init__(self):
        _check_instance(self)

    # === 기본 조회 ===

    @property
    def n(self) -> int:
        return len(self.retailers)

    @property
    def stockout_allowed(self) -> bool:
        return math.isfinite(self.rho)

    def retailer(self, i: int) -> Retailer:
        """소매점 i (1..n)"""
        if not 1 <= i <= self.n:
            raise IndexError(f"소매점 번호 범위 밖: {i}")
        return self.retailers[i - 1]

    @cached_property
    def dist(self) -> List[List[float]]:
        """탐색 루프용 비용 행렬 (list of lists)"""
        return [list(row) for row in self.cost]

    @cached_property
    def cost_matrix(self) -> np.ndarray:
        matrix = np.array(self.cost, dtype=float)
        matrix.flags.writeable = False
        return matrix

    @cached_property
    def supplier_credit(self) -> Tuple[float, ...]:
        """day t(0-based)에 1단위 배송 시 줄어드는 공급자 보관비 Σ_{s≥t} h_0^s"""
        credits = [0.0] * self.horizon
        acc = 0.0
        for t in range(self.horizon - 1, -1, -1):
            acc += self.supplier.holding_cost[t]
            credits[t] = acc
        return tuple(credits)

    @cached_property
    def total_demand(self) -> int:
        return sum(sum(r.demand) for r in self.retailers)

    @property
    def is_large(self) -> bool:
        """대규모 인스턴스 여부 (기본 시간 제한 선택용)"""
        return self.n >= 50 and self.horizon >= 6

    def with_overrides(self, vehicles: Optional[int] = None,
                       rho: Optional[float] = None) -> 'Instance':
        """차량 수 / 품절 벌점 변경 인스턴스 (Q = floor(전체 용량 / K))"""
        changes = {}
        if vehicles is not None and vehicles != self.vehicles:
            if vehicles < 1:
                raise InstanceValidationError('vehicles', f"1 이상이어야 합니다: {vehicles}")
            total = self.fleet_capacity or self.capacity * self.vehicles
            changes['vehicles'] = vehicles
            changes['capacity'] = total // vehicles
            changes['fleet_capacity'] = total
        if rho is not None:
            changes['rho'] = rho
        return replace(self, **changes) if changes else self


def _is_integral(value) -> bool:
    return float(value).is_integer()


def _check_instance(inst: Instance):
    """Instance 불변식 검사"""
    if inst.horizon < 1:
        raise InstanceValidationError('horizon', f"1 이상이어야 합니다: {inst.horizon}")
    if inst.vehicles < 1:
        raise InstanceValidationError('vehicles', f"1 이상이어야 합니다: {inst.vehicles}")
    if inst.capacity <= 0 or not _is_integral(inst.capacity):
        raise InstanceValidationError('capacity', f"양의 정수여야 합니다: {inst.capacity}")
    if not (inst.rho > 1):
        raise InstanceValidationError('rho', f"1보다 커야 합니다: {inst.rho}")
    if inst.rounding not in ROUNDINGS:
        raise InstanceValidationError('rounding', f"알 수 없는 반올림 방식: {inst.rounding}")
    if len(inst.coords) != inst.n + 1:
        raise InstanceValidationError('coords', f"노드 수 불일치: {len(inst.coords)} != {inst.n + 1}")

    sup = inst.supplier
    if len(sup.production) != inst.horizon:
        raise InstanceValidationError('supplier.production', "길이가 H와 다릅니다")
    if len(sup.holding_cost) != inst.horizon:
        raise InstanceValidationError('supplier.holding_cost', "길이가 H와 다릅니다")
    if any(h < 0 for h in sup.holding_cost):
        raise InstanceValidationError('supplier.holding_cost', "음수가 될 수 없습니다")
    if not _is_integral(sup.start_level) or any(not _is_integral(p) for p in sup.production):
        raise InstanceValidationError('supplier', "재고/생산량은 정수여야 합니다")

    for idx, r in enumerate(inst.retailers, 1):
        prefix = f"retailers[{idx}]"
        for name, value in (('start_level', r.start_level), ('max_level', r.max_level)):
            if not _is_integral(value):
                raise InstanceValidationError(f"{prefix}.{name}", f"정수여야 합니다: {value}")
        if r.start_level < 0:
            raise InstanceValidationError(f"{prefix}.start_level", "음수가 될 수 없습니다")
        if r.start_level > r.max_level:
            raise InstanceValidationError(
                f"{prefix}.start_level",
                f"초기 재고 {r.start_level}가 최대 재고 {r.max_level}를 초과합니다")
        if len(r.demand) != inst.horizon:
            raise InstanceValidationError(f"{prefix}.demand", "길이가 H와 다릅니다")
        if any(d < 0 or not _is_integral(d) for d in r.demand):
            raise InstanceValidationError(f"{prefix}.demand", "음이 아닌 정수여야 합니다")
        if not r.holding_cost > 0:
            raise InstanceValidationError(f"{prefix}.holding_cost", "양수여야 합니다")

    size = inst.n + 1
    if len(inst.cost) != size or any(len(row) != size for row in inst.cost):
        raise InstanceValidationError('cost', f"{size}x{size} 행렬이 아닙니다")
    for i, row in enumerate(inst.cost):
        if row[i] != 0:
            raise InstanceValidationError('cost', f"대각 원소가 0이 아닙니다: c[{i}][{i}]")
        if any(c < 0 or not math.isfinite(c) for c in row):
            raise InstanceValidationError('cost', "음수 또는 무한대 비용")


def build_cost_matrix(coords: Sequence[Sequence[float]],
                      rounding: str = ROUNDING_NEAREST) -> np.ndarray:
    """유클리드 거리 비용 행렬

    Args:
        coords: 노드별 (x, y)
        rounding: 'nearest-integer' (벤치마크 관례, floor(d + 0.5)) 또는 'exact'

    Returns:
        대칭, 대각 0 인 (m, m) 배열
    """
    points = np.asarray(coords, dtype=float).reshape(-1, 2)
    diff = points[:, None, :] - points[None, :, :]
    matrix = np.hypot(diff[..., 0], diff[..., 1])
    if rounding == ROUNDING_NEAREST:
        matrix = np.floor(matrix + 0.5)
    elif rounding != ROUNDING_EXACT:
        raise ValueError(f"알 수 없는 반올림 방식: {rounding}")
    np.fill_diagonal(matrix, 0.0)
    return matrix


def _matrix_to_tuple(matrix) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(c) for c in row) for row in np.asarray(matrix, dtype=float).tolist())


class InstanceParser:
    """인스턴스 파일 파서 (classic .dat / native JSON)"""

    def __init__(self, fmt: str = FORMAT_CLASSIC, vehicles: int = 1,
                 rounding: str = ROUNDING_NEAREST, rho: Optional[float] = None):
        if fmt not in FORMATS:
            raise ValueError(f"알 수 없는 형식: {fmt}")
        self.fmt = fmt
        self.vehicles = vehicles
        self.rounding = rounding
        self.rho = rho
        self.filepath: Optional[str] = None
        self.instance: Optional[Instance] = None

    def parse(self, filepath: str) -> Instance:
        """인스턴스 파일 파싱"""
        self.filepath = filepath

        # 여러 인코딩 시도
        encodings = ['utf-8', 'utf-8-sig', 'latin-1']
        content = None
        for encoding in encodings:
            try:
                with open(filepath, 'r', encoding=encoding) as f:
                    content = f.read()
                break
            except UnicodeDecodeError:
                continue

        if content is None:
            raise InstanceParseError(f"파일을 읽을 수 없습니다: {filepath}")

        name = filepath.replace('\\', '/').rsplit('/', 1)[-1].rsplit('.', 1)[0]
        return self.parse_text(content, name=name)

    def parse_text(self, content: str, name: str = '') -> Instance:
        """인스턴스 텍스트 파싱"""
        if self.fmt == FORMAT_CLASSIC:
            self.instance = self._parse_classic(content, name)
        else:
            self.instance = self._parse_native(content, name)
        return self.instance

    # === classic (Archetti .dat) ===

    def _parse_classic(self, content: str, name: str) -> Instance:
        rows = []
        for lineno, line in enumerate(content.splitlines(), 1):
            tokens = line.split()
            if tokens:
                rows.append((lineno, tokens))
        if not rows:
            raise InstanceParseError("빈 파일입니다", line=1)

        lineno, header = rows[0]
        values = self._numbers(header, 3, lineno, "헤더(nodeCount H fleetCapacity)")
        node_count, horizon, fleet_capacity = (self._integer(v, lineno) for v in values)
        n = node_count - 1
        if n < 0:
            raise InstanceParseError(f"노드 수가 잘못되었습니다: {node_count}", line=lineno)
        if len(rows) < 2:
            raise InstanceParseError("공급자 줄이 없습니다", line=lineno + 1)

        lineno, tokens = rows[1]
        _, x0, y0, start0, prod0, h0 = self._numbers(
            tokens, 6, lineno, "공급자(id x y startLevel dailyProduction holdingCost)")
        coords = [(x0, y0)]
        supplier = Supplier(
            start_level=self._integer(start0, lineno),
            production=(self._integer(prod0, lineno),) * horizon,
            holding_cost=(float(h0),) * horizon,
        )

        retailer_rows = rows[2:]
        if len(retailer_rows) != n:
            last = rows[-1][0]
            raise InstanceParseError(
                f"소매점 줄 수 {len(retailer_rows)}가 헤더의 {n}과 다릅니다", line=last)

        retailers = []
        for idx, (lineno, tokens) in enumerate(retailer_rows, 1):
            _, x, y, start, max_level, min_level, demand, h = self._numbers(
                tokens, 8, lineno,
                "소매점(id x y startLevel maxLevel minLevel dailyDemand holdingCost)")
            if min_level != 0:
                raise InstanceValidationError(
                    f"retailers[{idx}].min_level", f"0이어야 합니다 (줄 {lineno}): {min_level}")
            coords.append((x, y))
            retailers.append(Retailer(
                start_level=self._integer(start, lineno),
                max_level=self._integer(max_level, lineno),
                demand=(self._integer(demand, lineno),) * horizon,
                holding_cost=float(h),
            ))

        vehicles = max(1, int(self.vehicles))
        cost = build_cost_matrix(coords, self.rounding)
        return Instance(
            name=name,
            horizon=horizon,
            vehicles=vehicles,
            capacity=fleet_capacity // vehicles,
            coords=tuple(coords),
            supplier=supplier,
            retailers=tuple(retailers),
            cost=_matrix_to_tuple(cost),
            rho=math.inf if self.rho is None else float(self.rho),
            fleet_capacity=fleet_capacity,
            rounding=self.rounding,
        )

    @staticmethod
    def _numbers(tokens: List[str], expected: int, lineno: int, what: str) -> List[float]:
        if len(tokens) != expected:
            raise InstanceParseError(
                f"{what}: 필드 {expected}개가 필요하지만 {len(tokens)}개입니다", line=lineno)
        try:
            return [float(tok) for tok in tokens]
        except ValueError:
            raise InstanceParseError(f"{what}: 숫자가 아닌 값이 있습니다", line=lineno)

    @staticmethod
    def _integer(value: float, lineno: int) -> int:
        if not float(value).is_integer():
            raise InstanceParseError(f"정수가 아닌 값: {value}", line=lineno)
        return int(value)

    # === native (JSON) ===

    def _parse_native(self, content: str, name: str) -> Instance:
        try:
            data = json.loads(content)
        except json.JSONDecodeError as e:
            raise InstanceParseError(f"JSON 오류: {e.msg}", line=e.lineno)
        if not isinstance(data, dict):
            raise InstanceParseError("최상위 값은 객체여야 합니다", line=1)

        try:
            horizon = data['horizon']
            sup = data['supplier']
            retailer_items = data['retailers']
            capacity = data['capacity']
        except KeyError as e:
            raise InstanceParseError(f"필수 키가 없습니다: {e}")
        if not isinstance(sup, dict):
            raise InstanceParseError("supplier 는 객체여야 합니다")
        if not isinstance(retailer_items, list):
            raise InstanceParseError("retailers 는 목록이어야 합니다")
        horizon = self._native_int(horizon, 'horizon')

        vehicles = self._native_int(data.get('vehicles', self.vehicles), 'vehicles')
        rounding = data.get('rounding', self.rounding)
        rho = data.get('rho')
        if self.rho is not None:
            rho = self.rho

        coords = [(self._native_float(sup.get('x', 0.0), 'supplier.x'),
                   self._native_float(sup.get('y', 0.0), 'supplier.y'))]
        supplier = Supplier(
            start_level=self._native_int(sup.get('start_level', 0), 'supplier.start_level'),
            production=tuple(self._native_int(v, 'supplier.production')
                             for v in self._per_day(sup.get('production', 0), horizon,
                                                    'supplier.production')),
            holding_cost=tuple(self._native_float(v, 'supplier.holding_cost') for v in self._per_day(
                sup.get('holding_cost', 0.0), horizon, 'supplier.holding_cost')),
        )

        retailers = []
        for idx, item in enumerate(retailer_items, 1):
            field_name = f"retailers[{idx}]"
            if not isinstance(item, dict):
                raise InstanceParseError(f"{field_name}: 객체여야 합니다")
            try:
                coords.append((self._native_float(item['x'], f"{field_name}.x"),
                               self._native_float(item['y'], f"{field_name}.y")))
                retailers.append(Retailer(
                    start_level=self._native_int(item['start_level'], f"{field_name}.start_level"),
                    max_level=self._native_int(item['max_level'], f"{field_name}.max_level"),
                    demand=tuple(self._native_int(v, f"{field_name}.demand")
                                 for v in self._per_day(item['demand'], horizon,
                                                        f"{field_name}.demand")),
                    holding_cost=self._native_float(item['holding_cost'], f"{field_name}.holding_cost"),
                ))
            except KeyError as e:
                raise InstanceParseError(f"{field_name}: 필수 키가 없습니다: {e}")

        if 'cost' in data:
            try:
                cost = _matrix_to_tuple(data['cost'])
            except (TypeError, ValueError):
                raise InstanceParseError("cost: 숫자 행렬이어야 합니다")
        else:
            cost = _matrix_to_tuple(build_cost_matrix(coords, rounding))

        return Instance(
            name=data.get('name', name),
            horizon=horizon,
            vehicles=vehicles,
            capacity=self._native_int(capacity, 'capacity'),
            coords=tuple(coords),
            supplier=supplier,
            retailers=tuple(retailers),
            cost=cost,
            rho=math.inf if rho is None else self._native_float(rho, 'rho'),
            fleet_capacity=self._native_int(data.get('fleet_capacity', 0), 'fleet_capacity'),
            rounding=rounding,
        )

    @staticmethod
    def _per_day(value, horizon: int, field_name: str) -> list:
        if isinstance(value, list):
            if len(value) != horizon:
                raise InstanceValidationError(field_name, f"길이 {len(value)}가 H={horizon}와 다릅니다")
            return value
        return [value] * horizon

    @staticmethod
    def _native_float(value, field_name: str) -> float:
        if isinstance(value, bool):
            raise InstanceParseError(f"{field_name}: 숫자가 필요합니다: {value!r}")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise InstanceParseError(f"{field_name}: 숫자가 필요합니다: {value!r}")

    @classmethod
    def _native_int(cls, value, field_name: str) -> int:
        number = cls._native_float(value, field_name)
        if not _is_integral(number):
            raise InstanceValidationError(field_name, f"정수여야 합니다: {value}")
        return int(number)


def parse_instance(text: str, fmt: str = FORMAT_CLASSIC, vehicles: int = 1,
                   rounding: str = ROUNDING_NEAREST, rho: Optional[float] = None,
                   name: str = '') -> Instance:
    """텍스트에서 인스턴스 생성"""
    return InstanceParser(fmt, vehicles, rounding, rho).parse_text(text, name=name)


def load_instance(filepath: str, fmt: str = FORMAT_CLASSIC, vehicles: int = 1,
                  rounding: str = ROUNDING_NEAREST, rho: Optional[float] = None) -> Instance:
    """파일에서 인스턴스 생성"""
    return InstanceParser(fmt, vehicles, rounding, rho).parse(filepath)


def serialize_instance(inst: Instance) -> str:
    """native JSON 문서로 직렬화 (parse_instance(..., 'native')로 복원 가능)"""
    data = {
        'name': inst.name,
        'horizon': inst.horizon,
        'vehicles': inst.vehicles,
        'capacity': inst.capacity,
        'fleet_capacity': inst.fleet_capacity,
        'rho': inst.rho if inst.stockout_allowed else None,
        'rounding': inst.rounding,
        'supplier': {
            'x': inst.coords[0][0],
            'y': inst.coords[0][1],
            'start_level': inst.supplier.start_level,
            'production': list(inst.supplier.production),
            'holding_cost': list(inst.supplier.holding_cost),
        },
        'retailers': [
            {
                'x': inst.coords[i][0],
                'y': inst.coords[i][1],
                'start_level': r.start_level,
                'max_level': r.max_level,
                'demand': list(r.demand),
                'holding_cost': r.holding_cost,
            }
            for i, r in enumerate(inst.retailers, 1)
        ],
        'cost': [list(row) for row in inst.cost],
    }
    return json.dumps(data, indent=2, ensure_ascii=False)


__all__ = [
    'Instance', 'Supplier', 'Retailer', 'InstanceParser',
    'parse_instance', 'load_instance', 'serialize_instance', 'build_cost_matrix',
    'FORMAT_CLASSIC', 'FORMAT_NATIVE', 'ROUNDING_NEAREST', 'ROUNDING_EXACT',
]
