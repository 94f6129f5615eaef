# tests/test_bench.py

import json
import os

import pytest

from src.core.bench import (
    BenchJob, BenchmarkReport, BenchmarkRunner, ManifestEntry, RunRecord, gap, load_manifest,
    parse_rho_list, parse_rho_range, rho_sweep, run_job, usable_rhos,
)
from src.core.errors import InstanceParseError
from src.core.export.csv_report import (
    INSTANCE_COLUMNS, RUN_LOG_COLUMNS, CSVReportWriter, format_value,
)
from src.core.hgs import SearchParams


def quick_params(**overrides) -> SearchParams:
    values = dict(max_iterations=3, max_stagnation=3, mu=4, lambda_=4,
                  initial_population_factor=1, time_limit=120.0)
    values.update(overrides)
    return SearchParams(**values)


def record(name, cost, n=5, cost_class='HC', bks=100.0, seed=0, time=1.0):
    return RunRecord(instance=name, path=f"/data/{name}.dat", format='classic', seed=seed,
                     n=n, horizon=3, vehicles=1, cost_class=cost_class, bks=bks, cost=cost,
                     routing=None if cost is None else cost / 2,
                     inventory=None if cost is None else cost / 2,
                     stockout_quantity=None if cost is None else 0.0, time=time)


class TestGap:
    def test_equal_to_bks(self):
        assert gap(100.0, 100.0) == 0.0

    def test_one_percent(self):
        assert gap(101.0, 100.0) == pytest.approx(1.0)

    def test_improvement_is_negative(self):
        assert gap(99.0, 100.0) == pytest.approx(-1.0)

    def test_missing_values(self):
        assert gap(None, 100.0) is None
        assert gap(100.0, None) is None
        assert gap(float('inf'), 100.0) is None

    def test_non_positive_bks(self):
        with pytest.raises(ValueError):
            gap(10.0, 0.0)


class TestRhoValues:
    def test_list(self):
        assert parse_rho_list("50,100,300,1000000") == [50.0, 100.0, 300.0, 1000000.0]

    def test_bad_list(self):
        with pytest.raises(ValueError):
            parse_rho_list("50,abc")
        with pytest.raises(ValueError):
            parse_rho_list("")

    def test_range_inclusive(self):
        assert parse_rho_range("2:4:1") == [2.0, 3.0, 4.0]
        assert parse_rho_range("2:3:0.5") == [2.0, 2.5, 3.0]
        assert parse_rho_range("2:3.9:1") == [2.0, 3.0]

    @pytest.mark.parametrize('text', ["2:4", "4:2:1", "2:4:0", "a:b:c"])
    def test_bad_range(self, text):
        with pytest.raises(ValueError):
            parse_rho_range(text)

    def test_values_up_to_one_dropped(self):
        assert usable_rhos([0.5, 1.0, 1.5, 50.0]) == [1.5, 50.0]


class TestManifest:
    def test_bundled_manifest(self, resource_path):
        entries = load_manifest(resource_path('manifest.json'))
        assert [e.name for e in entries] == ['small_n5_h3_hc', 'small_n5_h3_lc', 'tiny_n3_h3']
        assert all(os.path.isabs(e.path) and os.path.exists(e.path) for e in entries)
        assert entries[0].cost_class == 'HC'
        assert entries[0].bks is None and entries[0].vehicles == 1

    def test_bad_json(self, tmp_path):
        path = tmp_path / 'manifest.json'
        path.write_text('{"instances": [', encoding='utf-8')
        with pytest.raises(InstanceParseError):
            load_manifest(str(path))

    def test_missing_path(self, tmp_path):
        path = tmp_path / 'manifest.json'
        path.write_text(json.dumps({'instances': [{'bks': 1.0}]}), encoding='utf-8')
        with pytest.raises(InstanceParseError):
            load_manifest(str(path))


class TestReport:
    def setup_method(self):
        self.report = BenchmarkReport([
            record('a', 101.0, seed=0),
            record('a', 103.0, seed=1),
            record('b', 99.0, seed=0, bks=100.0),
            record('c', None, n=10),
        ])

    def test_instance_summaries(self):
        a, b, c = self.report.instances()
        assert (a.best, a.average, a.runs) == (101.0, 102.0, 2)
        assert a.gap == pytest.approx(2.0)
        assert a.best_gap == pytest.approx(1.0)
        assert b.gap == pytest.approx(-1.0)
        assert c.best is None and c.gap is None

    def test_groups_average_members(self):
        groups = self.report.groups()
        assert [(g.n, g.cost_class) for g in groups] == [(5, 'HC'), (10, 'HC')]
        assert groups[0].average == pytest.approx((102.0 + 99.0) / 2)
        assert groups[0].gap == pytest.approx(0.5)
        assert groups[1].average is None

    def test_summary(self):
        summary = self.report.get_summary()
        assert summary['runs'] == 4 and summary['feasible_runs'] == 3
        assert summary['no_feasible'] == ['c']
        assert summary['has_issues']

    def test_text_report(self, tmp_path):
        text = self.report.generate_report()
        assert "IRPFlow 벤치마크 리포트" in text
        assert "가능해 없음: c" in text
        path = tmp_path / 'report.txt'
        self.report.save_report(str(path))
        assert path.read_text(encoding='utf-8') == text

    def test_csv_files(self, tmp_path):
        self.report.save_csv(str(tmp_path))
        reader = CSVReportWriter()
        runs = reader.read(str(tmp_path / 'bench_runs.csv'))
        assert list(runs[0].keys()) == list(RUN_LOG_COLUMNS)
        assert runs[3]['cost'] == ''
        instances = reader.read(str(tmp_path / 'bench_instances.csv'))
        assert list(instances[0].keys()) == list(INSTANCE_COLUMNS)
        assert instances[0]['average'] == '102.000000'
        assert (tmp_path / 'bench_groups.csv').exists()

    def test_regenerated_from_run_log(self, tmp_path):
        path = tmp_path / 'runs.csv'
        CSVReportWriter().write_runs(str(path), self.report.records)
        again = BenchmarkReport.from_run_log(str(path))
        assert [s.to_row() for s in again.instances()] == [s.to_row() for s in self.report.instances()]


def test_format_value():
    assert format_value(None) == ''
    assert format_value(3) == '3'
    assert format_value(1.5) == '1.500000'
    assert format_value(float('inf')) == 'inf'


class TestRuns:
    def test_run_job_writes_solution(self, tmp_path, resource_path):
        entry = ManifestEntry(path=resource_path('tiny_n3_h3.dat'), bks=100.0, cost_class='HC')
        job = BenchJob(entry=entry, seed=2, params=quick_params(), solution_dir=str(tmp_path))
        rec = run_job(job)
        assert rec.feasible
        assert rec.seed == 2 and rec.vehicles == 1
        assert rec.solution_file.endswith('tiny_n3_h3_K1_s2.sol')
        assert os.path.exists(rec.solution_file)
        assert rec.cost == pytest.approx(rec.routing + rec.inventory)

        log = tmp_path / 'runs.csv'
        CSVReportWriter().write_runs(str(log), [rec])
        again = BenchmarkReport.from_run_log(str(log))
        assert again.records[0].cost == pytest.approx(rec.cost, abs=1e-9)

    def test_runner_sequential(self, resource_path):
        entry = ManifestEntry(path=resource_path('tiny_n3_h3.dat'), cost_class='HC')
        runner = BenchmarkRunner(quick_params(), seeds=[0, 1])
        report = runner.run([entry])
        assert len(report.records) == 2
        assert [r.seed for r in report.records] == [0, 1]
        assert report.instances()[0].runs == 2

    def test_vehicle_override(self, resource_path):
        entry = ManifestEntry(path=resource_path('tiny_n3_h3.dat'))
        rec = run_job(BenchJob(entry=entry, seed=0, params=quick_params(), vehicles=2))
        assert rec.vehicles == 2

    def test_runner_arguments_checked(self):
        with pytest.raises(ValueError):
            BenchmarkRunner(quick_params(), seeds=[])
        with pytest.raises(ValueError):
            BenchmarkRunner(quick_params(), seeds=[0], workers=0)


def test_rho_sweep_rows(tiny_instance):
    rows = rho_sweep(tiny_instance, [0.5, 2.0, 1000.0], quick_params())
    assert [r.rho for r in rows] == [2.0, 1000.0]
    assert all(r.total is not None for r in rows)
    assert all(r.delivered is not None for r in rows)
