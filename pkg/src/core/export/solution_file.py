# core/export/solution_file.py
# 해 텍스트 파일 쓰기/읽기
#
# SOLUTION <이름>
# DAYS <H>
# OMEGA <ω>
# RHO <ρ>  (inf = 품절 불허)
# DAY <t>
# ROUTE <k> LOAD <L> : <i>(<q>) <i>(<q>) ...
# INVENTORY <i> I <재고> B <품절>
# SUPPLIER <I0>
# COST supplier_holding=... retailer_holding=... ... total=...
#
# 일/경로 번호는 1부터. 시각 등 실행마다 달라지는 값은 쓰지 않는다.

import re
from typing import List, Tuple

from ..errors import SolutionParseError
from ..instance import Instance
from ..solution import Solution, evaluate, simulate_inventory
from ..validation import DeclaredState


_VISIT = re.compile(r'^(-?\d+)\((-?[0-9.eE+-]+)\)$')


def _num(value: float) -> str:
    """정수면 정수로, 아니면 소수 6자리"""
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.6f}"


class SolutionWriter:
    """해 파일 생성기"""

    def __init__(self, omega: float = 0.0):
        self.omega = omega

    def format(self, instance: Instance, solution: Solution) -> str:
        trace = simulate_inventory(instance, solution.quantities)
        cost = evaluate(instance, solution, self.omega)
        lines = [
            f"SOLUTION {instance.name}",
            f"DAYS {instance.horizon}",
            f"OMEGA {_num(self.omega)}",
            f"RHO {_num(instance.rho) if instance.stockout_allowed else 'inf'}",
        ]
        for t in range(instance.horizon):
            lines.append(f"DAY {t + 1}")
            for k, route in enumerate(solution.routes[t], start=1):
                load = solution.route_load(t, route)
                visits = " ".join(f"{i}({_num(solution.quantities[t][i])})" for i in route)
                lines.append(f"ROUTE {k} LOAD {_num(load)} : {visits}")
            for i in range(1, instance.n + 1):
                lines.append(f"INVENTORY {i} I {_num(trace.I[i][t])} B {_num(trace.B[i][t])}")
            lines.append(f"SUPPLIER {_num(trace.I0[t])}")
        parts = " ".join(f"{key}={value:.6f}" for key, value in cost.to_dict().items())
        lines.append(f"COST {parts}")
        return "\n".join(lines) + "\n"

    def export(self, instance: Instance, solution: Solution, output_path: str):
        """해 파일 저장 (UTF-8)"""
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write(self.format(instance, solution))


class SolutionReader:
    """해 파일 파서 → (Solution, DeclaredState)

    소매점 번호가 범위를 벗어나도 경로에는 그대로 남겨 검증기가 보고하도록 한다.
    """

    def parse(self, filepath: str, instance: Instance) -> Tuple[Solution, DeclaredState]:
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                content = f.read()
        except UnicodeDecodeError as e:
            raise SolutionParseError(f"UTF-8 이 아닌 파일: {e}")
        return self.parse_text(content, instance)

    def parse_text(self, content: str, instance: Instance) -> Tuple[Solution, DeclaredState]:
        H, n = instance.horizon, instance.n
        routes: List[List[List[int]]] = [[] for _ in range(H)]
        quantities = [[0] * (n + 1) for _ in range(H)]
        declared = DeclaredState()
        day = None
        seen_header = False

        for lineno, raw in enumerate(content.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            tokens = line.split()
            key = tokens[0].upper()

            if key == 'SOLUTION':
                seen_header = True
            elif key == 'DAYS':
                days = self._int(tokens, 1, lineno)
                if days != H:
                    raise SolutionParseError(f"일수 불일치: 파일 {days}, 인스턴스 {H}", lineno)
            elif key == 'OMEGA':
                self._float(tokens, 1, lineno)
            elif key == 'RHO':
                rho = self._float(tokens, 1, lineno)
                if not (rho > 1):
                    raise SolutionParseError(f"ρ 는 1보다 커야 합니다: {tokens[1]}", lineno)
                declared.rho = rho
            elif key == 'DAY':
                day = self._int(tokens, 1, lineno) - 1
                if not 0 <= day < H:
                    raise SolutionParseError(f"일 번호 범위 밖: {day + 1}", lineno)
            elif key == 'ROUTE':
                t = self._require_day(day, lineno)
                if len(tokens) < 5 or tokens[2].upper() != 'LOAD' or tokens[4] != ':':
                    raise SolutionParseError("ROUTE 형식: ROUTE k LOAD L : i(q) ...", lineno)
                route = []
                for token in tokens[5:]:
                    m = _VISIT.match(token)
                    if not m:
                        raise SolutionParseError(f"방문 형식 오류: {token}", lineno)
                    i, q = int(m.group(1)), float(m.group(2))
                    q = int(q) if q.is_integer() else q
                    route.append(i)
                    if 1 <= i <= n and quantities[t][i] == 0:
                        quantities[t][i] = q
                declared.route_loads[(t, len(routes[t]))] = self._float(tokens, 3, lineno)
                routes[t].append(route)
            elif key == 'INVENTORY':
                t = self._require_day(day, lineno)
                if len(tokens) != 6 or tokens[2].upper() != 'I' or tokens[4].upper() != 'B':
                    raise SolutionParseError("INVENTORY 형식: INVENTORY i I 재고 B 품절", lineno)
                i = self._int(tokens, 1, lineno)
                declared.inventory[(t, i)] = (self._float(tokens, 3, lineno), self._float(tokens, 5, lineno))
            elif key == 'SUPPLIER':
                t = self._require_day(day, lineno)
                declared.supplier[t] = self._float(tokens, 1, lineno)
            elif key == 'COST':
                for part in tokens[1:]:
                    name, _, value = part.partition('=')
                    try:
                        declared.cost[name] = float(value)
                    except ValueError:
                        raise SolutionParseError(f"비용 형식 오류: {part}", lineno)
            else:
                raise SolutionParseError(f"알 수 없는 항목: {tokens[0]}", lineno)

        if not seen_header:
            raise SolutionParseError("SOLUTION 헤더가 없습니다")
        return Solution(instance, routes, quantities), declared

    @staticmethod
    def _require_day(day, lineno: int) -> int:
        if day is None:
            raise SolutionParseError("DAY 보다 먼저 나온 항목", lineno)
        return day

    @staticmethod
    def _int(tokens: List[str], k: int, lineno: int) -> int:
        try:
            return int(tokens[k])
        except (IndexError, ValueError):
            raise SolutionParseError(f"정수가 필요합니다: {' '.join(tokens)}", lineno)

    @staticmethod
    def _float(tokens: List[str], k: int, lineno: int) -> float:
        try:
            return float(tokens[k])
        except (IndexError, ValueError):
            raise SolutionParseError(f"숫자가 필요합니다: {' '.join(tokens)}", lineno)


def write_solution(instance: Instance, solution: Solution, output_path: str, omega: float = 0.0):
    SolutionWriter(omega).export(instance, solution, output_path)


def format_solution(instance: Instance, solution: Solution, omega: float = 0.0) -> str:
    return SolutionWriter(omega).format(instance, solution)


def read_solution(filepath: str, instance: Instance) -> Tuple[Solution, DeclaredState]:
    return SolutionReader().parse(filepath, instance)


def parse_solution(content: str, instance: Instance) -> Tuple[Solution, DeclaredState]:
    return SolutionReader().parse_text(content, instance)


__all__ = [
    'SolutionWriter', 'SolutionReader',
    'write_solution', 'format_solution', 'read_solution', 'parse_solution',
]
