# core/export/__init__.py
from .solution_file import SolutionWriter, SolutionReader, write_solution, read_solution
from .csv_report import CSVReportWriter
from .xlsx import BenchmarkWorkbook, HAS_OPENPYXL
