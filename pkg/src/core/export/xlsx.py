# core/export/xlsx.py
# 벤치마크 리포트 스프레드시트 내보내기

from typing import List, Sequence

try:
    from openpyxl import Workbook
    from openpyxl.styles import Font, Alignment, Border, Side, PatternFill
    from openpyxl.utils import get_column_letter
    HAS_OPENPYXL = True
except ImportError:
    HAS_OPENPYXL = False

from .csv_report import GROUP_COLUMNS, INSTANCE_COLUMNS, RHO_COLUMNS, RUN_LOG_COLUMNS


class BenchmarkWorkbook:
    """XLSX 벤치마크 리포트 (실행 / 인스턴스 / 그룹 시트)"""

    def __init__(self):
        if not HAS_OPENPYXL:
            raise ImportError("openpyxl 패키지가 필요합니다: pip install openpyxl")

        self.header_font = Font(bold=True, size=11, color="FFFFFF")
        self.header_fill = PatternFill(start_color="4F46E5", end_color="4F46E5", fill_type="solid")
        self.header_alignment = Alignment(horizontal="center", vertical="center")
        self.number_alignment = Alignment(horizontal="right", vertical="center")
        self.text_alignment = Alignment(horizontal="left", vertical="center")
        self.thin_border = Border(
            left=Side(style='thin', color='E5E5E5'),
            right=Side(style='thin', color='E5E5E5'),
            top=Side(style='thin', color='E5E5E5'),
            bottom=Side(style='thin', color='E5E5E5')
        )
        # 음수 gap(BKS 개선) 강조
        self.improved_fill = PatternFill(start_color="D1FAE5", end_color="D1FAE5", fill_type="solid")
        self.missing_fill = PatternFill(start_color="FECACA", end_color="FECACA", fill_type="solid")

    def _write_sheet(self, ws, columns: Sequence[str], rows: List[dict]):
        for col, header in enumerate(columns, 1):
            cell = ws.cell(row=1, column=col, value=header)
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.alignment = self.header_alignment
            cell.border = self.thin_border
            ws.column_dimensions[get_column_letter(col)].width = max(10, len(header) + 4)

        for row, data in enumerate(rows, 2):
            for col, key in enumerate(columns, 1):
                value = data.get(key)
                if isinstance(value, float) and value in (float('inf'), float('-inf')):
                    value = str(value)
                cell = ws.cell(row=row, column=col, value=value)
                cell.border = self.thin_border
                if isinstance(value, (int, float)):
                    cell.alignment = self.number_alignment
                    if isinstance(value, float):
                        cell.number_format = '0.00'
                else:
                    cell.alignment = self.text_alignment
                if key in ('gap', 'best_gap') and isinstance(value, float) and value < 0:
                    cell.fill = self.improved_fill
                if key in ('cost', 'best') and value is None:
                    cell.fill = self.missing_fill

        # 첫 행 고정
        ws.freeze_panes = 'A2'

    def export(self, report, output_path: str):
        """BenchmarkReport → XLSX"""
        wb = Workbook()
        ws = wb.active
        ws.title = "인스턴스"
        self._write_sheet(ws, INSTANCE_COLUMNS, [s.to_row() for s in report.instances()])
        self._write_sheet(wb.create_sheet("그룹"), GROUP_COLUMNS,
                          [g.to_row() for g in report.groups()])
        self._write_sheet(wb.create_sheet("실행"), RUN_LOG_COLUMNS,
                          [r.to_row() for r in report.records])
        wb.save(output_path)

    def export_rho_sweep(self, rows: Sequence, output_path: str):
        """ρ 스윕 결과 → XLSX"""
        wb = Workbook()
        ws = wb.active
        ws.title = "ρ 스윕"
        self._write_sheet(ws, RHO_COLUMNS, [r.to_row() for r in rows])
        wb.save(output_path)


__all__ = ['HAS_OPENPYXL', 'BenchmarkWorkbook']
