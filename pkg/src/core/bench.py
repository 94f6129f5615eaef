# core/bench.py
# 벤치마크 실행/집계, BKS 대비 gap, ρ 스윕

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InstanceParseError
from .export.csv_report import CSVReportWriter, parse_optional_float
from .export.solution_file import read_solution, write_solution
from .hgs import SearchParams, run
from .instance import FORMAT_CLASSIC, ROUNDING_NEAREST, Instance, load_instance
from .solution import evaluate
from ..utils.log import get_logger


logger = get_logger('bench')


def gap(cost: Optional[float], bks: Optional[float]) -> Optional[float]:
    """(Sol / BKS − 1) · 100, 개선이면 음수. BKS 나 해가 없으면 None"""
    if cost is None or bks is None or not math.isfinite(cost):
        return None
    if bks <= 0:
        raise ValueError(f"BKS 는 양수여야 합니다: {bks}")
    return (cost / bks - 1.0) * 100.0


def _mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


# === 매니페스트 ===

@dataclass(frozen=True)
class ManifestEntry:
    """벤치마크 인스턴스 한 줄"""
    path: str
    bks: Optional[float] = None
    cost_class: str = ''
    vehicles: Optional[int] = None
    format: Optional[str] = None

    @property
    def name(self) -> str:
        return os.path.splitext(os.path.basename(self.path))[0]


def load_manifest(filepath: str) -> List[ManifestEntry]:
    """{"instances": [{"path", "bks", "cost_class", "vehicles", "format"}]}

    상대 경로는 매니페스트 파일 위치 기준.
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"매니페스트 JSON 오류: {e.msg}", line=e.lineno)
    items = data.get('instances') if isinstance(data, dict) else None
    if not isinstance(items, list):
        raise InstanceParseError("매니페스트에 instances 목록이 없습니다")

    base = os.path.dirname(os.path.abspath(filepath))
    entries = []
    for k, item in enumerate(items, 1):
        if not isinstance(item, dict) or 'path' not in item:
            raise InstanceParseError(f"매니페스트 {k}번째 항목에 path 가 없습니다")
        path = item['path']
        if not os.path.isabs(path):
            path = os.path.normpath(os.path.join(base, path))
        bks = item.get('bks')
        vehicles = item.get('vehicles')
        entries.append(ManifestEntry(
            path=path,
            bks=None if bks is None else float(bks),
            cost_class=str(item.get('cost_class', '')),
            vehicles=None if vehicles is None else int(vehicles),
            format=item.get('format'),
        ))
    return entries


# === 실행 단위 ===

@dataclass
class RunRecord:
    """인스턴스 × 시드 한 번의 실행 결과 (실행 로그 한 줄)"""
    instance: str
    path: str
    format: str
    seed: int
    n: int
    horizon: int
    vehicles: int
    cost_class: str = ''
    rho: Optional[float] = None          # None: 품절 금지
    bks: Optional[float] = None
    cost: Optional[float] = None         # None: 가능해 없음
    routing: Optional[float] = None
    inventory: Optional[float] = None
    stockout_quantity: Optional[float] = None
    time: float = 0.0
    iterations: int = 0
    stop_reason: str = ''
    solution_file: str = ''

    @property
    def feasible(self) -> bool:
        return self.cost is not None

    @property
    def gap(self) -> Optional[float]:
        return gap(self.cost, self.bks)

    @property
    def key(self) -> Tuple[str, int]:
        return (self.path, self.vehicles)

    def to_row(self) -> dict:
        return {
            'instance': self.instance, 'path': self.path, 'format': self.format,
            'seed': self.seed, 'n': self.n, 'horizon': self.horizon,
            'vehicles': self.vehicles, 'cost_class': self.cost_class, 'rho': self.rho,
            'bks': self.bks, 'cost': self.cost, 'routing': self.routing,
            'inventory': self.inventory, 'stockout_quantity': self.stockout_quantity,
            'time': self.time, 'iterations': self.iterations,
            'stop_reason': self.stop_reason, 'solution_file': self.solution_file,
        }

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> 'RunRecord':
        return cls(
            instance=row['instance'], path=row['path'],
            format=row.get('format') or FORMAT_CLASSIC,
            seed=int(row['seed']), n=int(row['n']), horizon=int(row['horizon']),
            vehicles=int(row['vehicles']), cost_class=row.get('cost_class', ''),
            rho=parse_optional_float(row.get('rho')),
            bks=parse_optional_float(row.get('bks')),
            cost=parse_optional_float(row.get('cost')),
            routing=parse_optional_float(row.get('routing')),
            inventory=parse_optional_float(row.get('inventory')),
            stockout_quantity=parse_optional_float(row.get('stockout_quantity')),
            time=float(row.get('time') or 0.0),
            iterations=int(row.get('iterations') or 0),
            stop_reason=row.get('stop_reason', ''),
            solution_file=row.get('solution_file', ''),
        )


@dataclass
class BenchJob:
    """작업자 프로세스로 넘기는 실행 단위 (피클 가능)"""
    entry: ManifestEntry
    seed: int
    params: SearchParams
    fmt: str = FORMAT_CLASSIC
    rounding: str = ROUNDING_NEAREST
    vehicles: Optional[int] = None
    rho: Optional[float] = None
    solution_dir: Optional[str] = None


def prepare_instance(path: str, fmt: str, rounding: str, vehicles: Optional[int],
                     rho: Optional[float]) -> Instance:
    """인스턴스 로드 + 차량 수/ρ 적용 (vehicles None 이면 파일 값, ρ None 이면 품절 금지)"""
    instance = load_instance(path, fmt, vehicles=vehicles or 1, rounding=rounding)
    return instance.with_overrides(vehicles=vehicles,
                                   rho=math.inf if rho is None else rho)


def run_job(job: BenchJob) -> RunRecord:
    """한 번의 시드 고정 탐색. 탐색 상태는 이 호출 안에만 존재한다"""
    entry = job.entry
    fmt = entry.format or job.fmt
    vehicles = entry.vehicles or job.vehicles
    instance = prepare_instance(entry.path, fmt, job.rounding, vehicles, job.rho)
    result = run(instance, job.params.with_seed(job.seed))

    record = RunRecord(
        instance=instance.name, path=entry.path, format=fmt, seed=job.seed,
        n=instance.n, horizon=instance.horizon, vehicles=instance.vehicles,
        cost_class=entry.cost_class, rho=job.rho, bks=entry.bks,
        time=result.elapsed, iterations=result.iterations, stop_reason=result.stop_reason,
    )
    if result.best is not None:
        _fill_costs(record, instance, result.best)
        if job.solution_dir:
            os.makedirs(job.solution_dir, exist_ok=True)
            filename = f"{instance.name}_K{instance.vehicles}_s{job.seed}.sol"
            record.solution_file = os.path.join(job.solution_dir, filename)
            write_solution(instance, result.best, record.solution_file)
    return record


def _fill_costs(record: RunRecord, instance: Instance, solution):
    cost = evaluate(instance, solution, 0.0)
    record.cost = cost.total
    record.routing = cost.routing
    record.inventory = cost.inventory
    record.stockout_quantity = float(cost.stockout_quantity)


# === 집계 ===

@dataclass
class InstanceSummary:
    """인스턴스별 Best / Avg / Gap / T(s)"""
    instance: str
    n: int
    horizon: int
    vehicles: int
    cost_class: str
    bks: Optional[float]
    costs: List[float] = field(default_factory=list)
    times: List[float] = field(default_factory=list)
    runs: int = 0

    @property
    def best(self) -> Optional[float]:
        return min(self.costs) if self.costs else None

    @property
    def average(self) -> Optional[float]:
        return _mean(self.costs)

    @property
    def time(self) -> Optional[float]:
        return _mean(self.times)

    @property
    def gap(self) -> Optional[float]:
        return gap(self.average, self.bks)

    @property
    def best_gap(self) -> Optional[float]:
        return gap(self.best, self.bks)

    @property
    def group_key(self) -> Tuple[int, int, str]:
        return (self.n, self.horizon, self.cost_class)

    def to_row(self) -> dict:
        return {
            'instance': self.instance, 'n': self.n, 'horizon': self.horizon,
            'vehicles': self.vehicles, 'cost_class': self.cost_class, 'runs': self.runs,
            'feasible_runs': len(self.costs), 'bks': self.bks, 'best': self.best,
            'average': self.average, 'gap': self.gap, 'best_gap': self.best_gap,
            'time': self.time,
        }


@dataclass
class GroupSummary:
    """(n, H, 비용 등급) 그룹 평균"""
    n: int
    horizon: int
    cost_class: str
    members: List[InstanceSummary] = field(default_factory=list)

    def _average(self, attr: str) -> Optional[float]:
        values = [getattr(m, attr) for m in self.members]
        return _mean([v for v in values if v is not None])

    @property
    def best(self) -> Optional[float]:
        return self._average('best')

    @property
    def average(self) -> Optional[float]:
        return self._average('average')

    @property
    def gap(self) -> Optional[float]:
        return self._average('gap')

    @property
    def best_gap(self) -> Optional[float]:
        return self._average('best_gap')

    @property
    def time(self) -> Optional[float]:
        return self._average('time')

    def to_row(self) -> dict:
        return {
            'n': self.n, 'horizon': self.horizon, 'cost_class': self.cost_class,
            'instances': len(self.members), 'best': self.best, 'average': self.average,
            'gap': self.gap, 'best_gap': self.best_gap, 'time': self.time,
        }


def _cell(value: Optional[float], digits: int = 2) -> str:
    return '-' if value is None else f"{value:.{digits}f}"


class BenchmarkReport:
    """실행 기록 → 인스턴스/그룹 집계와 텍스트 리포트

    집계 값은 실행 기록만의 함수이다.
    """

    def __init__(self, records: List[RunRecord]):
        self.records = list(records)

    def instances(self) -> List[InstanceSummary]:
        summaries: Dict[Tuple[str, int], InstanceSummary] = {}
        for r in self.records:
            s = summaries.get(r.key)
            if s is None:
                s = summaries[r.key] = InstanceSummary(
                    instance=r.instance, n=r.n, horizon=r.horizon, vehicles=r.vehicles,
                    cost_class=r.cost_class, bks=r.bks)
            s.runs += 1
            s.times.append(r.time)
            if r.cost is not None:
                s.costs.append(r.cost)
        return list(summaries.values())

    def groups(self) -> List[GroupSummary]:
        groups: Dict[Tuple[int, int, str], GroupSummary] = {}
        for s in self.instances():
            key = s.group_key
            if key not in groups:
                groups[key] = GroupSummary(n=key[0], horizon=key[1], cost_class=key[2])
            groups[key].members.append(s)
        return [groups[k] for k in sorted(groups)]

    def get_summary(self) -> dict:
        """리포트 요약"""
        summaries = self.instances()
        return {
            'runs': len(self.records),
            'feasible_runs': sum(1 for r in self.records if r.feasible),
            'instances': len(summaries),
            'no_feasible': [s.instance for s in summaries if not s.costs],
            'has_issues': any(not r.feasible for r in self.records),
        }

    def generate_report(self) -> str:
        """텍스트 리포트 생성 (열 정렬 표)"""
        summary = self.get_summary()
        lines = [
            "=" * 78,
            "IRPFlow 벤치마크 리포트",
            "=" * 78,
            "",
            "[인스턴스]",
            f"{'이름':<24}{'n':>4}{'H':>3}{'K':>3}{'C':>4}{'BKS':>11}"
            f"{'Best':>11}{'Avg':>11}{'Gap(%)':>8}{'T(s)':>9}",
        ]
        for s in self.instances():
            lines.append(
                f"{s.instance:<24}{s.n:>4}{s.horizon:>3}{s.vehicles:>3}{s.cost_class:>4}"
                f"{_cell(s.bks):>11}{_cell(s.best):>11}{_cell(s.average):>11}"
                f"{_cell(s.gap):>8}{_cell(s.time, 1):>9}")

        lines.append("")
        lines.append("[그룹 (n, H, C)]")
        lines.append(f"{'n':>4}{'H':>3}{'C':>4}{'개수':>6}{'Best':>11}{'Avg':>11}"
                     f"{'Gap(%)':>8}{'T(s)':>9}")
        for g in self.groups():
            lines.append(
                f"{g.n:>4}{g.horizon:>3}{g.cost_class:>4}{len(g.members):>6}"
                f"{_cell(g.best):>11}{_cell(g.average):>11}{_cell(g.gap):>8}"
                f"{_cell(g.time, 1):>9}")

        lines.append("")
        lines.append("-" * 78)
        lines.append(f"총 {summary['runs']}회 실행, 가능해 {summary['feasible_runs']}회, "
                     f"인스턴스 {summary['instances']}개")
        if summary['no_feasible']:
            lines.append(f"  - 가능해 없음: {', '.join(summary['no_feasible'])}")
        lines.append("=" * 78)
        return "\n".join(lines) + "\n"

    def save_report(self, filepath: str):
        """리포트를 파일로 저장"""
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.generate_report())

    def save_csv(self, output_dir: str, delimiter: str = ','):
        """bench_runs.csv, bench_instances.csv, bench_groups.csv"""
        os.makedirs(output_dir, exist_ok=True)
        writer = CSVReportWriter(delimiter)
        writer.write_runs(os.path.join(output_dir, 'bench_runs.csv'), self.records)
        writer.write_instances(os.path.join(output_dir, 'bench_instances.csv'), self.instances())
        writer.write_groups(os.path.join(output_dir, 'bench_groups.csv'), self.groups())

    @classmethod
    def from_run_log(cls, run_log_path: str, rounding: str = ROUNDING_NEAREST,
                     delimiter: str = ',') -> 'BenchmarkReport':
        """실행 로그 + 저장된 해 파일로 리포트 재생성

        비용 열은 해 파일을 다시 평가해 채운다. 해 파일이 없는 행은 로그 값을 쓴다.
        """
        records = []
        for row in CSVReportWriter(delimiter).read(run_log_path):
            record = RunRecord.from_row(row)
            if record.solution_file and os.path.exists(record.solution_file):
                instance = prepare_instance(record.path, record.format, rounding,
                                            record.vehicles, record.rho)
                solution, _ = read_solution(record.solution_file, instance)
                if solution.is_feasible():
                    _fill_costs(record, instance, solution)
                else:
                    logger.warning(f"{record.solution_file}: 불가능해, 비용 제외")
                    record.cost = record.routing = record.inventory = None
                    record.stockout_quantity = None
            records.append(record)
        return cls(records)


class BenchmarkRunner:
    """매니페스트 × 시드 실행 (작업자 수 제한, 집계는 순서대로)"""

    def __init__(self, params: SearchParams, seeds: Sequence[int],
                 fmt: str = FORMAT_CLASSIC, rounding: str = ROUNDING_NEAREST,
                 vehicles: Optional[int] = None, rho: Optional[float] = None,
                 workers: int = 1, solution_dir: Optional[str] = None):
        if not seeds:
            raise ValueError("시드가 하나 이상 필요합니다")
        if workers < 1:
            raise ValueError(f"workers: 1 이상이어야 합니다 ({workers})")
        self.params = params
        self.seeds = list(seeds)
        self.fmt = fmt
        self.rounding = rounding
        self.vehicles = vehicles
        self.rho = rho
        self.workers = workers
        self.solution_dir = solution_dir

    def jobs(self, entries: Sequence[ManifestEntry]) -> List[BenchJob]:
        return [
            BenchJob(entry=entry, seed=seed, params=self.params, fmt=self.fmt,
                     rounding=self.rounding, vehicles=self.vehicles, rho=self.rho,
                     solution_dir=self.solution_dir)
            for entry in entries for seed in self.seeds
        ]

    def run(self, entries: Sequence[ManifestEntry]) -> BenchmarkReport:
        jobs = self.jobs(entries)
        logger.info(f"{len(entries)}개 인스턴스 × {len(self.seeds)}개 시드, 작업자 {self.workers}")
        if self.workers == 1:
            records = []
            for job in jobs:
                records.append(run_job(job))
                self._log_record(records[-1])
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                records = list(executor.map(run_job, jobs))
            for record in records:
                self._log_record(record)
        return BenchmarkReport(records)

    @staticmethod
    def _log_record(record: RunRecord):
        cost = f"{record.cost:.2f}" if record.cost is not None else "가능해 없음"
        g = record.gap
        gap_text = f", gap {g:.2f}%" if g is not None else ""
        logger.info(f"{record.instance} (K={record.vehicles}, seed={record.seed}): "
                    f"{cost}{gap_text}, {record.time:.1f}초")


# === ρ 스윕 ===

@dataclass
class RhoSweepRow:
    """ρ 값 하나에 대한 최선해 요약"""
    rho: float
    total: Optional[float] = None
    routing: Optional[float] = None
    inventory: Optional[float] = None
    stockout_quantity: Optional[int] = None
    delivered: Optional[int] = None

    def to_row(self) -> dict:
        return {
            'rho': self.rho, 'total': self.total, 'routing': self.routing,
            'inventory': self.inventory, 'stockout_quantity': self.stockout_quantity,
            'delivered': self.delivered,
        }


def parse_rho_list(text: str) -> List[float]:
    """'50,100,300,1000000' → [50.0, 100.0, 300.0, 1000000.0]"""
    try:
        values = [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ValueError(f"ρ 목록 형식 오류: {text}")
    if not values:
        raise ValueError("ρ 목록이 비어 있습니다")
    return values


def parse_rho_range(text: str) -> List[float]:
    """'a:b:step' → a, a+step, ..., b 이하 (끝 포함)"""
    parts = text.split(':')
    if len(parts) != 3:
        raise ValueError(f"ρ 범위 형식은 start:stop:step 입니다: {text}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"ρ 범위 형식 오류: {text}")
    if step <= 0 or stop < start:
        raise ValueError(f"ρ 범위가 잘못되었습니다: {text}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def usable_rhos(values: Sequence[float]) -> List[float]:
    """ρ ≤ 1 은 품절 벌점이 보관비보다 싸서 제외 (경고)"""
    kept = []
    for rho in values:
        if rho > 1:
            kept.append(rho)
        else:
            logger.warning(f"ρ={rho:g} 제외: 1보다 커야 합니다")
    return kept


def rho_sweep(instance: Instance, rhos: Sequence[float], params: SearchParams) -> List[RhoSweepRow]:
    """ρ 값마다 같은 시드로 탐색해 비용/품절량/배송량을 기록"""
    rows = []
    for rho in usable_rhos(rhos):
        result = run(instance.with_overrides(rho=rho), params)
        row = RhoSweepRow(rho=rho)
        if result.best_cost is not None:
            c = result.best_cost
            row.total = c.total
            row.routing = c.routing
            row.inventory = c.inventory
            row.stockout_quantity = c.stockout_quantity
            row.delivered = c.delivered_quantity
        logger.info(f"ρ={rho:g}: {result.summary()}")
        rows.append(row)
    return rows


__all__ = [
    'gap', 'ManifestEntry', 'load_manifest', 'RunRecord', 'BenchJob', 'prepare_instance',
    'run_job', 'InstanceSummary', 'GroupSummary', 'BenchmarkReport', 'BenchmarkRunner',
    'RhoSweepRow', 'parse_rho_list', 'parse_rho_range', 'usable_rhos', 'rho_sweep',
]
