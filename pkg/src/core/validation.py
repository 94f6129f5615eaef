# core/validation.py
# 해 검증 모듈 (제약 계열별 통과/실패 + 첫 반례)

import math
import numbers
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .instance import Instance
from .solution import CostBreakdown, Solution, evaluate, simulate_inventory


TOLERANCE = 1e-6

INVENTORY_BALANCE = 'inventory_balance'
MAX_LEVEL = 'max_level'
VISIT_DELIVERY = 'visit_delivery'
CAPACITY = 'capacity'
SINGLE_VISIT = 'single_visit'
ROUTE_FLOW = 'route_flow'
LOAD_CONSISTENCY = 'load_consistency'
SUBTOUR = 'subtour'
NONNEGATIVITY = 'nonnegativity'
INTEGRALITY = 'integrality'
NO_STOCKOUT = 'no_stockout'

FAMILIES = (
    ROUTE_FLOW, SUBTOUR, SINGLE_VISIT, VISIT_DELIVERY, CAPACITY, LOAD_CONSISTENCY,
    INVENTORY_BALANCE, MAX_LEVEL, NONNEGATIVITY, INTEGRALITY, NO_STOCKOUT,
)

FAMILY_TITLES = {
    INVENTORY_BALANCE: '재고 균형',
    MAX_LEVEL: '최대 재고',
    VISIT_DELIVERY: '방문-배송 연결',
    CAPACITY: '차량 용량',
    SINGLE_VISIT: '일 1회 방문',
    ROUTE_FLOW: '경로 흐름',
    LOAD_CONSISTENCY: '적재량 일치',
    SUBTOUR: '부분 순회',
    NONNEGATIVITY: '비음수',
    INTEGRALITY: '정수성',
    NO_STOCKOUT: '품절 없음',
}


@dataclass
class DeclaredState:
    """해 파일에 기록된 값 (검증 대상)"""
    route_loads: Dict[Tuple[int, int], float] = field(default_factory=dict)        # (t, r) → 적재량
    inventory: Dict[Tuple[int, int], Tuple[float, float]] = field(default_factory=dict)  # (t, i) → (I, B)
    supplier: Dict[int, float] = field(default_factory=dict)                       # t → I0
    cost: Dict[str, float] = field(default_factory=dict)
    rho: Optional[float] = None                                                    # RHO 줄 (inf = 품절 불허)


@dataclass
class FamilyResult:
    """제약 계열 하나의 결과"""
    family: str
    passed: bool
    counterexample: Optional[str] = None
    applicable: bool = True

    @property
    def title(self) -> str:
        return FAMILY_TITLES.get(self.family, self.family)


@dataclass
class ValidationReport:
    """검증 결과"""
    families: List[FamilyResult]
    warnings: List[str] = field(default_factory=list)
    cost: Optional[CostBreakdown] = None

    @property
    def is_valid(self) -> bool:
        return all(f.passed for f in self.families)

    def failed(self) -> List[str]:
        return [f.family for f in self.families if not f.passed]

    def family(self, name: str) -> FamilyResult:
        for f in self.families:
            if f.family == name:
                return f
        raise KeyError(name)

    def get_summary_text(self) -> str:
        """한 줄 요약"""
        passed = sum(1 for f in self.families if f.passed)
        icon = "✓" if self.is_valid else "⚠️"
        text = f"[검증] 제약 계열 {passed}/{len(self.families)} 통과 {icon}"
        if not self.is_valid:
            text += f" | 실패: {', '.join(self.failed())}"
        return text


class Validator:
    """해의 모든 제약 계열 검사

    declared 가 주어지면 파일에 기록된 적재량/재고/품절량을 균형식에 대입해 확인하고,
    없으면 배송량으로부터 시뮬레이션한 재고를 기준으로 삼는다.
    """

    def __init__(self):
        self.result: Optional[ValidationReport] = None
        self.instance_path: Optional[str] = None
        self.solution_path: Optional[str] = None

    def validate(self, instance: Instance, solution: Solution,
                 declared: Optional[DeclaredState] = None,
                 omega: float = 0.0,
                 instance_path: str = None,
                 solution_path: str = None) -> ValidationReport:
        self.instance_path = instance_path
        self.solution_path = solution_path
        self._instance = instance
        self._solution = solution
        self._declared = declared

        families = [
            self._check_route_flow(),
            self._check_subtour(),
            self._check_single_visit(),
            self._check_visit_delivery(),
            self._check_capacity(),
            self._check_load_consistency(),
            self._check_inventory_balance(),
            self._check_max_level(),
            self._check_nonnegativity(),
            self._check_integrality(),
            self._check_no_stockout(),
        ]

        warnings = []
        trace = simulate_inventory(instance, solution.quantities)
        for t, level in enumerate(trace.I0):
            if level < 0:
                warnings.append(f"공급자 재고 음수: {t + 1}일 I0={level:g}")
                break

        cost = None
        if families[0].passed:
            cost = evaluate(instance, solution, omega)

        self.result = ValidationReport(families=families, warnings=warnings, cost=cost)
        return self.result

    # === 계열별 검사 ===

    def _nodes(self):
        """(t, r, 위치, 노드) 순회"""
        for t, day in enumerate(self._solution.routes):
            for r, route in enumerate(day):
                for p, i in enumerate(route):
                    yield t, r, p, i

    def _valid_node(self, i) -> bool:
        return isinstance(i, numbers.Integral) and 1 <= i <= self._instance.n

    def _check_route_flow(self) -> FamilyResult:
        K = self._instance.vehicles
        for t, day in enumerate(self._solution.routes):
            used = sum(1 for route in day if route)
            if used > K:
                return FamilyResult(ROUTE_FLOW, False, f"{t + 1}일 경로 {used}개 > 차량 {K}대")
        for t, r, _, i in self._nodes():
            if not self._valid_node(i):
                return FamilyResult(ROUTE_FLOW, False, f"{t + 1}일 경로 {r + 1}: 알 수 없는 노드 {i}")
        return FamilyResult(ROUTE_FLOW, True)

    def _check_subtour(self) -> FamilyResult:
        for t, day in enumerate(self._solution.routes):
            for r, route in enumerate(day):
                seen = set()
                for i in route:
                    if i in seen:
                        return FamilyResult(SUBTOUR, False, f"{t + 1}일 경로 {r + 1}: 노드 {i} 반복 방문")
                    seen.add(i)
        return FamilyResult(SUBTOUR, True)

    def _check_single_visit(self) -> FamilyResult:
        for t, day in enumerate(self._solution.routes):
            owner: Dict[int, int] = {}
            for r, route in enumerate(day):
                for i in set(route):
                    if i in owner:
                        return FamilyResult(
                            SINGLE_VISIT, False,
                            f"{t + 1}일 소매점 {i}: 경로 {owner[i] + 1}, {r + 1} 중복 방문")
                    owner[i] = r
        return FamilyResult(SINGLE_VISIT, True)

    def _check_visit_delivery(self) -> FamilyResult:
        inst, sol = self._instance, self._solution
        for t in range(inst.horizon):
            visited = {i for route in sol.routes[t] for i in route}
            for i in range(1, inst.n + 1):
                if sol.quantities[t][i] > TOLERANCE and i not in visited:
                    return FamilyResult(
                        VISIT_DELIVERY, False,
                        f"{t + 1}일 소매점 {i}: 방문 없이 배송량 {sol.quantities[t][i]:g}")
        return FamilyResult(VISIT_DELIVERY, True)

    def _check_capacity(self) -> FamilyResult:
        inst, sol = self._instance, self._solution
        for t, day in enumerate(sol.routes):
            for r, route in enumerate(day):
                load = sum(sol.quantities[t][i] for i in route if self._valid_node(i))
                if load > inst.capacity + TOLERANCE:
                    return FamilyResult(
                        CAPACITY, False,
                        f"{t + 1}일 경로 {r + 1}: 적재량 {load:g} > 용량 {inst.capacity}")
        return FamilyResult(CAPACITY, True)

    def _check_load_consistency(self) -> FamilyResult:
        declared = self._declared
        if declared is None or not declared.route_loads:
            return FamilyResult(LOAD_CONSISTENCY, True, applicable=declared is not None)
        sol = self._solution
        for (t, r), value in sorted(declared.route_loads.items()):
            if t >= len(sol.routes) or r >= len(sol.routes[t]):
                return FamilyResult(LOAD_CONSISTENCY, False, f"{t + 1}일 경로 {r + 1}: 존재하지 않는 경로")
            actual = sum(sol.quantities[t][i] for i in sol.routes[t][r] if self._valid_node(i))
            if abs(actual - value) > TOLERANCE:
                return FamilyResult(
                    LOAD_CONSISTENCY, False,
                    f"{t + 1}일 경로 {r + 1}: 기록 적재량 {value:g} ≠ 배송량 합 {actual:g}")
        return FamilyResult(LOAD_CONSISTENCY, True)

    def _check_inventory_balance(self) -> FamilyResult:
        declared = self._declared
        if declared is None or (not declared.inventory and not declared.supplier):
            return FamilyResult(INVENTORY_BALANCE, True)
        inst, sol = self._instance, self._solution

        for i in range(1, inst.n + 1):
            r = inst.retailers[i - 1]
            prev = r.start_level
            for t in range(inst.horizon):
                if (t, i) not in declared.inventory:
                    return FamilyResult(INVENTORY_BALANCE, False, f"{t + 1}일 소매점 {i}: 재고 기록 누락")
                level, short = declared.inventory[(t, i)]
                d = r.demand[t]
                expected = prev - d + sol.quantities[t][i]
                if abs((level - short) - expected) > TOLERANCE:
                    return FamilyResult(
                        INVENTORY_BALANCE, False,
                        f"{t + 1}일 소매점 {i}: I={level:g}, B={short:g} 이지만 "
                        f"전일 재고 {prev:g} - 수요 {d} + 배송 {sol.quantities[t][i]:g} = {expected:g}")
                if short > d + TOLERANCE:
                    return FamilyResult(INVENTORY_BALANCE, False, f"{t + 1}일 소매점 {i}: 품절량 {short:g} > 수요 {d}")
                if short > TOLERANCE and level > TOLERANCE:
                    return FamilyResult(INVENTORY_BALANCE, False, f"{t + 1}일 소매점 {i}: 재고와 품절이 동시에 양수")
                prev = level

        prev0 = inst.supplier.start_level
        for t in range(inst.horizon):
            if t not in declared.supplier:
                continue
            expected = prev0 + inst.supplier.production[t] - sum(sol.quantities[t][1:inst.n + 1])
            if abs(declared.supplier[t] - expected) > TOLERANCE:
                return FamilyResult(
                    INVENTORY_BALANCE, False,
                    f"{t + 1}일 공급자: I0={declared.supplier[t]:g} ≠ {expected:g}")
            prev0 = declared.supplier[t]
        return FamilyResult(INVENTORY_BALANCE, True)

    def _levels(self) -> Tuple[List[List[float]], List[List[float]]]:
        """검사 기준 재고/품절 (기록값 우선)"""
        inst = self._instance
        trace = simulate_inventory(inst, self._solution.quantities)
        levels = [list(row) for row in trace.I]
        shorts = [list(row) for row in trace.B]
        declared = self._declared
        if declared is not None and declared.inventory:
            for (t, i), (level, short) in declared.inventory.items():
                if 1 <= i <= inst.n and 0 <= t < inst.horizon:
                    levels[i][t] = level
                    shorts[i][t] = short
        return levels, shorts

    def _check_max_level(self) -> FamilyResult:
        inst, sol = self._instance, self._solution
        levels, _ = self._levels()
        for i in range(1, inst.n + 1):
            r = inst.retailers[i - 1]
            for t in range(inst.horizon):
                prev = r.start_level if t == 0 else levels[i][t - 1]
                q = sol.quantities[t][i]
                if prev + q > r.max_level + TOLERANCE:
                    return FamilyResult(
                        MAX_LEVEL, False,
                        f"{t + 1}일 소매점 {i}: 전일 재고 {prev:g} + 배송 {q:g} > 최대 재고 {r.max_level}")
        return FamilyResult(MAX_LEVEL, True)

    def _check_nonnegativity(self) -> FamilyResult:
        inst, sol = self._instance, self._solution
        for t in range(inst.horizon):
            for i in range(1, inst.n + 1):
                if sol.quantities[t][i] < -TOLERANCE:
                    return FamilyResult(NONNEGATIVITY, False, f"{t + 1}일 소매점 {i}: 배송량 {sol.quantities[t][i]:g} < 0")
        if self._declared is not None:
            for (t, i), (level, short) in sorted(self._declared.inventory.items()):
                if level < -TOLERANCE or short < -TOLERANCE:
                    return FamilyResult(NONNEGATIVITY, False, f"{t + 1}일 소매점 {i}: I={level:g}, B={short:g}")
        return FamilyResult(NONNEGATIVITY, True)

    def _check_integrality(self) -> FamilyResult:
        inst, sol = self._instance, self._solution

        def integral(x) -> bool:
            return math.isfinite(x) and abs(x - round(x)) <= TOLERANCE

        for t in range(inst.horizon):
            for i in range(1, inst.n + 1):
                if not integral(sol.quantities[t][i]):
                    return FamilyResult(INTEGRALITY, False, f"{t + 1}일 소매점 {i}: 배송량 {sol.quantities[t][i]:g}")
        if self._declared is not None:
            for (t, i), (level, short) in sorted(self._declared.inventory.items()):
                if not (integral(level) and integral(short)):
                    return FamilyResult(INTEGRALITY, False, f"{t + 1}일 소매점 {i}: I={level:g}, B={short:g}")
        return FamilyResult(INTEGRALITY, True)

    def _check_no_stockout(self) -> FamilyResult:
        inst = self._instance
        if inst.stockout_allowed:
            return FamilyResult(NO_STOCKOUT, True, applicable=False)
        _, shorts = self._levels()
        for i in range(1, inst.n + 1):
            for t in range(inst.horizon):
                if shorts[i][t] > TOLERANCE:
                    return FamilyResult(NO_STOCKOUT, False, f"{t + 1}일 소매점 {i}: 품절량 {shorts[i][t]:g}")
        return FamilyResult(NO_STOCKOUT, True)

    # === 보고서 ===

    def generate_report(self) -> str:
        """검증 보고서 생성"""
        if not self.result:
            return "검증 결과가 없습니다."

        r = self.result
        lines = [
            "=" * 50,
            "IRPFlow 검증 리포트",
            "=" * 50,
            "",
        ]
        if self.instance_path:
            lines.append(f"인스턴스: {os.path.basename(self.instance_path)}")
        if self.solution_path:
            lines.append(f"해 파일: {os.path.basename(self.solution_path)}")
        lines.extend(["", "-" * 50, ""])

        for f in r.families:
            if not f.applicable:
                status = "- 해당 없음"
            elif f.passed:
                status = "✓ 통과"
            else:
                status = "⚠️ 실패"
            lines.append(f"[{f.family}] {f.title}: {status}")
            if f.counterexample:
                lines.append(f"  반례: {f.counterexample}")

        if r.warnings:
            lines.append("")
            for w in r.warnings:
                lines.append(f"경고: {w}")

        if r.cost is not None:
            c = r.cost
            lines.extend([
                "",
                "[비용]",
                f"  공급자 보관: {c.supplier_holding:.6f}",
                f"  소매점 보관: {c.retailer_holding:.6f}",
                f"  품절 벌점: {c.stockout_penalty:.6f}",
                f"  경로: {c.routing:.6f}",
                f"  용량 초과 벌점: {c.capacity_excess_penalty:.6f}",
                f"  합계: {c.total:.6f}",
            ])

        lines.extend([
            "",
            "-" * 50,
            "",
            f"전체 결과: {'✓ 검증 통과' if r.is_valid else '⚠️ 검증 실패'}",
            "",
            "=" * 50,
        ])
        return "\n".join(lines)

    def save_report(self, filepath: str):
        """검증 보고서 저장"""
        report = self.generate_report()
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(report)


def validate(instance: Instance, solution: Solution,
             declared: Optional[DeclaredState] = None, omega: float = 0.0) -> ValidationReport:
    return Validator().validate(instance, solution, declared, omega)


__all__ = [
    'Validator', 'ValidationReport', 'FamilyResult', 'DeclaredState', 'validate',
    'FAMILIES', 'INVENTORY_BALANCE', 'MAX_LEVEL', 'VISIT_DELIVERY', 'CAPACITY',
    'SINGLE_VISIT', 'ROUTE_FLOW', 'LOAD_CONSISTENCY', 'SUBTOUR', 'NONNEGATIVITY',
    'INTEGRALITY', 'NO_STOCKOUT',
]
