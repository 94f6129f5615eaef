#!/usr/bin/env python3
# main.py
# IRPFlow - 재고 경로 문제 솔버 명령행 진입점

import sys
import os

# 패키지 경로 추가
if getattr(sys, 'frozen', False):
    # PyInstaller로 빌드된 경우
    app_path = os.path.dirname(sys.executable)
    sys.path.insert(0, app_path)
else:
    # 개발 모드 - src의 상위 폴더를 경로에 추가
    app_path = os.path.dirname(os.path.abspath(__file__))
    parent_path = os.path.dirname(app_path)
    sys.path.insert(0, parent_path)

import argparse
from typing import List, Optional

from src.core.bench import (
    BenchmarkReport, BenchmarkRunner, load_manifest, parse_rho_list, parse_rho_range,
    prepare_instance, rho_sweep,
)
from src.core.ds_operator import PieceRecorder
from src.core.errors import (
    InstanceParseError, InstanceValidationError, IRPFlowError, SolutionParseError,
)
from src.core.export.csv_report import CSVReportWriter
from src.core.export.solution_file import read_solution, write_solution
from src.core.export.xlsx import BenchmarkWorkbook
from src.core.hgs import SearchParams, run
from src.core.instance import FORMATS, ROUNDINGS
from src.core.solution import Solution
from src.core.validation import Validator
from src.utils import (
    config, format_cost, format_duration, get_logger, parse_seconds, setup_logging,
)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

logger = get_logger('cli')


class _UsageError(Exception):
    """명령 인자 조합 오류 (종료 코드 1)"""
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """사용법 오류는 종료 코드 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: 오류: {message}\n")


def _search_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('탐색')
    group.add_argument('--seed', type=int, default=0, help='난수 시드 (기본 0)')
    group.add_argument('--time-limit', type=parse_seconds, default=None,
                       help='실행당 시간 제한 (예: 90, 90s, 2m. 기본: 소규모 2400초, 대규모 7200초)')
    group.add_argument('--max-iters', type=int, default=None, help='최대 반복 수')
    group.add_argument('--max-stagnation', type=int, default=None, help='개선 없는 최대 반복 수')
    group.add_argument('--omega', type=float, default=None, help='초기 용량 초과 벌점 ω')
    group.add_argument('--debug', action='store_true', help='증분 비용 검사 켜기')

    inst = parent.add_argument_group('인스턴스')
    inst.add_argument('--format', choices=FORMATS, default=None, help='인스턴스 형식')
    inst.add_argument('--rounding', choices=ROUNDINGS, default=None, help='간선 비용 반올림')
    inst.add_argument('--vehicles', type=int, default=None, help='차량 수 K (Q = 전체 용량 / K)')
    stockout = inst.add_mutually_exclusive_group()
    stockout.add_argument('--rho', type=float, default=None, help='품절 벌점 계수 ρ (> 1)')
    stockout.add_argument('--no-stockout', action='store_true', help='품절 금지 (기본)')

    parent.add_argument('--verbose', '-v', action='store_true', help='진행 로그 출력')
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='irpflow', description='IRPFlow - 재고 경로 문제 솔버')
    commands = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    commands.required = True
    search = _search_options()

    solve = commands.add_parser('solve', parents=[search], help='인스턴스 하나 풀기')
    solve.add_argument('instance', help='인스턴스 파일')
    solve.add_argument('-o', '--output', default=None, help='해 파일 경로')
    solve.add_argument('--instrument-pieces', action='store_true',
                       help='DS 동적계획 조각 수 CSV 기록 (day,retailer,pieces)')

    bench = commands.add_parser('bench', parents=[search], help='벤치마크 실행')
    bench.add_argument('manifest', nargs='?', default=None, help='벤치마크 매니페스트 (JSON)')
    bench.add_argument('--runs', type=int, default=1, help='인스턴스당 실행 수 (시드 seed..seed+runs-1)')
    bench.add_argument('--workers', type=int, default=None, help='동시 작업자 수')
    bench.add_argument('-o', '--output', default='bench_out', help='결과 폴더')
    bench.add_argument('--xlsx', default=None, help='XLSX 리포트 경로')
    bench.add_argument('--report-only', default=None, metavar='RUN_LOG',
                       help='실행 없이 실행 로그와 해 파일로 리포트 재생성')

    sweep = commands.add_parser('rho-sweep', parents=[search], help='ρ 값별 품절/비용 절충')
    sweep.add_argument('instance', help='인스턴스 파일')
    values = sweep.add_mutually_exclusive_group(required=True)
    values.add_argument('--rho-list', default=None, help='쉼표 구분 목록 (예: 50,100,300,1000000)')
    values.add_argument('--rho-range', default=None, help='start:stop:step (끝 포함)')
    sweep.add_argument('-o', '--output', default='rho_sweep.csv', help='CSV 경로')
    sweep.add_argument('--xlsx', default=None, help='XLSX 경로')

    check = commands.add_parser('validate', help='해 파일 검증')
    check.add_argument('instance', help='인스턴스 파일')
    check.add_argument('solution', help='해 파일')
    check.add_argument('--format', choices=FORMATS, default=None, help='인스턴스 형식')
    check.add_argument('--rounding', choices=ROUNDINGS, default=None, help='간선 비용 반올림')
    check.add_argument('--vehicles', type=int, default=None, help='차량 수 K')
    check.add_argument('--rho', type=float, default=None, help='품절 벌점 계수 ρ')
    check.add_argument('--omega', type=float, default=0.0, help='용량 초과 벌점 ω (비용 표시용)')
    check.add_argument('--report', default=None, help='검증 리포트 저장 경로')
    check.add_argument('--verbose', '-v', action='store_true', help='상세 로그')
    return parser


# === 설정 → 파라미터 ===

def build_params(args) -> SearchParams:
    """설정 파일 search 섹션 위에 명령행 값을 덮어쓴다"""
    section = dict(config.search)
    max_stagnation = args.max_stagnation
    if args.max_iters is not None and max_stagnation is None:
        max_stagnation = min(args.max_iters, int(section.get('max_stagnation', 10000)))
    return SearchParams.from_config(
        section,
        seed=args.seed,
        time_limit=args.time_limit,
        max_iterations=args.max_iters,
        max_stagnation=max_stagnation,
        omega_initial=args.omega,
        debug=args.debug or config.debug,
    )


def _instance_options(args):
    fmt = args.format or config.instance_format
    rounding = args.rounding or config.rounding
    rho = None if getattr(args, 'no_stockout', False) else args.rho
    return fmt, rounding, args.vehicles, rho


def _load(args, path: str):
    fmt, rounding, vehicles, rho = _instance_options(args)
    return prepare_instance(path, fmt, rounding, vehicles, rho)


def _csv_delimiter() -> str:
    return config.get('output', 'csv_delimiter') or ','


# === 명령 ===

def cmd_solve(args) -> int:
    instance = _load(args, args.instance)
    params = build_params(args)
    recorder = PieceRecorder() if args.instrument_pieces else None

    result = run(instance, params, recorder=recorder, verbose=args.verbose)
    print(f"{instance.name}: {result.summary()}")

    if recorder is not None:
        pieces_path = os.path.splitext(args.output or instance.name)[0] + '_pieces.csv'
        CSVReportWriter(_csv_delimiter()).write_pieces(pieces_path, recorder)
        print(recorder.summary())
        print(f"조각 수 CSV: {pieces_path}")

    if not result.feasible_found:
        print("가능해를 찾지 못했습니다", file=sys.stderr)
        return EXIT_INFEASIBLE

    cost = result.best_cost
    print(f"  공급자 보관: {format_cost(cost.supplier_holding)}")
    print(f"  소매점 보관: {format_cost(cost.retailer_holding)}")
    print(f"  품절 벌점: {format_cost(cost.stockout_penalty)} (품절량 {cost.stockout_quantity})")
    print(f"  경로: {format_cost(cost.routing)}")
    print(f"  합계: {format_cost(cost.total)}")
    print(f"  반복 {result.iterations}, 소요 {format_duration(result.elapsed)}")

    output = args.output
    if output is None:
        solution_dir = config.get('output', 'solution_dir') or 'solutions'
        os.makedirs(solution_dir, exist_ok=True)
        output = os.path.join(solution_dir, f"{instance.name}.sol")
    write_solution(instance, result.best, output)
    print(f"해 파일: {output}")
    return EXIT_OK


def cmd_bench(args) -> int:
    delimiter = _csv_delimiter()
    if args.report_only:
        report = BenchmarkReport.from_run_log(args.report_only, rounding=args.rounding or
                                              config.rounding, delimiter=delimiter)
    else:
        if args.manifest is None:
            raise _UsageError("manifest 또는 --report-only 가 필요합니다")
        if args.runs < 1:
            raise _UsageError(f"--runs 는 1 이상이어야 합니다: {args.runs}")
        entries = load_manifest(args.manifest)
        fmt, rounding, vehicles, rho = _instance_options(args)
        workers = args.workers or int(config.get('app', 'workers') or 1)
        runner = BenchmarkRunner(
            build_params(args), seeds=range(args.seed, args.seed + args.runs),
            fmt=fmt, rounding=rounding, vehicles=vehicles, rho=rho, workers=workers,
            solution_dir=os.path.join(args.output, 'solutions'))
        report = runner.run(entries)

    os.makedirs(args.output, exist_ok=True)
    report.save_csv(args.output, delimiter)
    logger.info(f"결과 폴더: {args.output}")
    report.save_report(os.path.join(args.output, 'bench_report.txt'))
    if args.xlsx:
        BenchmarkWorkbook().export(report, args.xlsx)
    print(report.generate_report(), end='')

    summary = report.get_summary()
    if summary['no_feasible']:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_rho_sweep(args) -> int:
    try:
        rhos = parse_rho_list(args.rho_list) if args.rho_list else parse_rho_range(args.rho_range)
    except ValueError as e:
        raise _UsageError(str(e))
    fmt, rounding, vehicles, _ = _instance_options(args)
    instance = prepare_instance(args.instance, fmt, rounding, vehicles, None)
    rows = rho_sweep(instance, rhos, build_params(args))

    CSVReportWriter(_csv_delimiter()).write_rho_sweep(args.output, rows)
    if args.xlsx:
        BenchmarkWorkbook().export_rho_sweep(rows, args.xlsx)
    for row in rows:
        total = format_cost(row.total) if row.total is not None else '-'
        print(f"ρ={row.rho:g}: 합계 {total}, 품절량 {row.stockout_quantity}, 배송량 {row.delivered}")
    print(f"CSV: {args.output}")
    return EXIT_OK


def cmd_validate(args) -> int:
    instance = _load(args, args.instance)
    solution, declared = read_solution(args.solution, instance)
    if args.rho is None and declared.rho is not None and declared.rho != instance.rho:
        # 해 파일에 기록된 ρ 로 검증 (--rho 가 우선)
        instance = instance.with_overrides(rho=declared.rho)
        solution = Solution(instance, solution.routes, solution.quantities)
    validator = Validator()
    result = validator.validate(instance, solution, declared, omega=args.omega,
                                instance_path=args.instance, solution_path=args.solution)
    print(validator.generate_report())
    if args.report:
        validator.save_report(args.report)
    return EXIT_OK if result.is_valid else EXIT_INFEASIBLE


COMMANDS = {
    'solve': cmd_solve,
    'bench': cmd_bench,
    'rho-sweep': cmd_rho_sweep,
    'validate': cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, level=None if args.verbose else config.log_level)

    try:
        return COMMANDS[args.command](args)
    except _UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"오류: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceParseError as e:
        print(f"인스턴스 파싱 오류: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InstanceValidationError as e:
        print(f"인스턴스 검증 오류: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SolutionParseError as e:
        print(f"해 파일 파싱 오류: {e}", file=sys.stderr)
        return EXIT_INPUT
    except IRPFlowError as e:
        print(f"오류: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"파일 오류: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        # 파라미터 값 오류
        print(f"오류: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
