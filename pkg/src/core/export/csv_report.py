# core/export/csv_report.py
# 벤치마크/ρ 스윕/조각 수 CSV (UTF-8, 헤더 행, 소수점은 '.')

import csv
import math
from typing import Dict, Iterable, List, Optional, Sequence

from ..ds_operator import PieceRecorder


RUN_LOG_COLUMNS = (
    'instance', 'path', 'format', 'seed', 'n', 'horizon', 'vehicles', 'cost_class', 'rho',
    'bks', 'cost', 'routing', 'inventory', 'stockout_quantity', 'time', 'iterations',
    'stop_reason', 'solution_file',
)
INSTANCE_COLUMNS = (
    'instance', 'n', 'horizon', 'vehicles', 'cost_class', 'runs', 'feasible_runs', 'bks',
    'best', 'average', 'gap', 'best_gap', 'time',
)
GROUP_COLUMNS = (
    'n', 'horizon', 'cost_class', 'instances', 'best', 'average', 'gap', 'best_gap', 'time',
)
RHO_COLUMNS = ('rho', 'total', 'routing', 'inventory', 'stockout_quantity', 'delivered')
PIECE_COLUMNS = ('day', 'retailer', 'pieces')


def format_value(value, digits: int = 6) -> str:
    """CSV 셀 문자열: None → 빈 칸, 정수 → 그대로, 실수 → 고정 소수"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return f"{value:.{digits}f}"
    return str(value)


def parse_optional_float(text: str) -> Optional[float]:
    text = (text or '').strip()
    return float(text) if text else None


class CSVReportWriter:
    """CSV 리포트 작성기"""

    def __init__(self, delimiter: str = ','):
        self.delimiter = delimiter

    def write(self, output_path: str, columns: Sequence[str], rows: Iterable[Dict]):
        with open(output_path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, delimiter=self.delimiter, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(col)) for col in columns])

    def write_runs(self, output_path: str, records: Iterable):
        self.write(output_path, RUN_LOG_COLUMNS, (r.to_row() for r in records))

    def write_instances(self, output_path: str, summaries: Iterable):
        self.write(output_path, INSTANCE_COLUMNS, (s.to_row() for s in summaries))

    def write_groups(self, output_path: str, groups: Iterable):
        self.write(output_path, GROUP_COLUMNS, (g.to_row() for g in groups))

    def write_rho_sweep(self, output_path: str, rows: Iterable):
        self.write(output_path, RHO_COLUMNS, (r.to_row() for r in rows))

    def write_pieces(self, output_path: str, recorder: PieceRecorder):
        """DS 동적계획 조각 수 기록 (일/소매점 번호는 1부터)"""
        rows = ({'day': day, 'retailer': retailer, 'pieces': pieces}
                for day, retailer, pieces in recorder.rows)
        self.write(output_path, PIECE_COLUMNS, rows)

    def read(self, input_path: str) -> List[Dict[str, str]]:
        with open(input_path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f, delimiter=self.delimiter))


__all__ = [
    'RUN_LOG_COLUMNS', 'INSTANCE_COLUMNS', 'GROUP_COLUMNS', 'RHO_COLUMNS', 'PIECE_COLUMNS',
    'format_value', 'parse_optional_float', 'CSVReportWriter',
]
