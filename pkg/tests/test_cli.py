# tests/test_cli.py

import json

import pytest

from src.core.export.csv_report import CSVReportWriter
from src.core.export.solution_file import write_solution
from src.core.solution import Solution
from src.main import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main

QUICK = ['--max-iters', '3', '--time-limit', '60s']


@pytest.fixture
def tiny_path(resource_path):
    return resource_path('tiny_n3_h3.dat')


@pytest.fixture
def steady_file(tmp_path, tiny_instance):
    quantities = [[0, 4, 3, 5] for _ in range(tiny_instance.horizon)]
    solution = Solution(tiny_instance, [[[1, 2, 3]] for _ in range(tiny_instance.horizon)], quantities)
    path = tmp_path / 'steady.sol'
    write_solution(tiny_instance, solution, str(path))
    return path


class TestValidate:
    def test_valid_file(self, tiny_path, steady_file, capsys):
        assert main(['validate', tiny_path, str(steady_file)]) == EXIT_OK
        assert "검증 통과" in capsys.readouterr().out

    def test_corrupted_load(self, tiny_path, steady_file):
        text = steady_file.read_text(encoding='utf-8').replace("LOAD 12", "LOAD 13", 1)
        steady_file.write_text(text, encoding='utf-8')
        assert main(['validate', tiny_path, str(steady_file)]) == EXIT_INFEASIBLE

    def test_capacity_uses_vehicle_override(self, tiny_path, steady_file, tmp_path):
        report = tmp_path / 'report.txt'
        code = main(['validate', tiny_path, str(steady_file), '--vehicles', '3',
                     '--report', str(report)])
        assert code == EXIT_INFEASIBLE
        assert "capacity" in report.read_text(encoding='utf-8')

    def test_unreadable_solution(self, tiny_path, tmp_path):
        bad = tmp_path / 'bad.sol'
        bad.write_text("DAY 1\nROUTE x\n", encoding='utf-8')
        assert main(['validate', tiny_path, str(bad)]) == EXIT_INPUT

    def test_missing_file(self, tiny_path, tmp_path):
        assert main(['validate', tiny_path, str(tmp_path / 'nope.sol')]) == EXIT_INPUT


class TestSolve:
    def test_writes_valid_solution(self, tiny_path, tmp_path):
        out = tmp_path / 'tiny.sol'
        assert main(['solve', tiny_path, '-o', str(out)] + QUICK) == EXIT_OK
        assert main(['validate', tiny_path, str(out)]) == EXIT_OK

    def test_same_seed_same_file(self, tiny_path, tmp_path):
        a, b = tmp_path / 'a.sol', tmp_path / 'b.sol'
        main(['solve', tiny_path, '-o', str(a), '--seed', '5'] + QUICK)
        main(['solve', tiny_path, '-o', str(b), '--seed', '5'] + QUICK)
        assert a.read_text(encoding='utf-8') == b.read_text(encoding='utf-8')

    def test_piece_instrumentation(self, tiny_path, tmp_path):
        out = tmp_path / 'tiny.sol'
        assert main(['solve', tiny_path, '-o', str(out), '--instrument-pieces'] + QUICK) == EXIT_OK
        rows = CSVReportWriter().read(str(tmp_path / 'tiny_pieces.csv'))
        assert rows and set(rows[0]) == {'day', 'retailer', 'pieces'}
        assert {int(r['day']) for r in rows} == {1, 2, 3}

    def test_native_format(self, resource_path, tmp_path):
        out = tmp_path / 'native.sol'
        code = main(['solve', resource_path('tiny_native.json'), '--format', 'native',
                     '-o', str(out)] + QUICK)
        assert code == EXIT_OK
        assert "SOLUTION tiny_native" in out.read_text(encoding='utf-8')

    def test_bad_instance(self, tmp_path):
        bad = tmp_path / 'bad.dat'
        bad.write_text("4 3\n", encoding='utf-8')
        assert main(['solve', str(bad)] + QUICK) == EXIT_INPUT

    def test_bad_native_field(self, resource_path, tmp_path):
        data = json.loads(open(resource_path('tiny_native.json'), encoding='utf-8').read())
        data['horizon'] = 'x'
        bad = tmp_path / 'bad.json'
        bad.write_text(json.dumps(data), encoding='utf-8')
        assert main(['solve', str(bad), '--format', 'native'] + QUICK) == EXIT_INPUT

    def test_rho_run_validates_with_recorded_rho(self, tiny_path, tmp_path):
        out = tmp_path / 'rho.sol'
        code = main(['solve', tiny_path, '--rho', '1.01', '-o', str(out),
                     '--max-iters', '20', '--time-limit', '60s'])
        assert code == EXIT_OK
        assert 'RHO 1.010000' in out.read_text(encoding='utf-8')
        assert main(['validate', tiny_path, str(out)]) == EXIT_OK

    def test_rho_not_above_one(self, tiny_path):
        assert main(['solve', tiny_path, '--rho', '1'] + QUICK) == EXIT_INPUT

    def test_stagnation_above_iterations(self, tiny_path):
        assert main(['solve', tiny_path, '--max-iters', '3', '--max-stagnation', '10']) == EXIT_USAGE


class TestUsage:
    @pytest.mark.parametrize('argv', [
        [],
        ['frobnicate'],
        ['solve'],
        ['rho-sweep', 'x.dat'],
        ['solve', 'x.dat', '--rho', '5', '--no-stockout'],
        ['solve', 'x.dat', '--time-limit', 'soon'],
    ])
    def test_parser_errors_exit_one(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE

    def test_bench_without_manifest(self):
        assert main(['bench']) == EXIT_USAGE

    def test_bad_rho_range(self, tiny_path):
        assert main(['rho-sweep', tiny_path, '--rho-range', '5:1:1']) == EXIT_USAGE


class TestRhoSweep:
    def test_four_rows(self, tiny_path, tmp_path):
        out = tmp_path / 'sweep.csv'
        code = main(['rho-sweep', tiny_path, '--rho-list', '50,100,300,1000000',
                     '-o', str(out)] + QUICK)
        assert code == EXIT_OK
        rows = CSVReportWriter().read(str(out))
        assert [float(r['rho']) for r in rows] == [50.0, 100.0, 300.0, 1000000.0]


class TestBench:
    def test_run_and_regenerate(self, tiny_path, tmp_path):
        manifest = tmp_path / 'manifest.json'
        manifest.write_text(json.dumps({'instances': [
            {'path': tiny_path, 'bks': 100.0, 'cost_class': 'HC'},
        ]}), encoding='utf-8')
        out = tmp_path / 'out'
        code = main(['bench', str(manifest), '--runs', '2', '-o', str(out)] + QUICK)
        assert code == EXIT_OK
        for name in ('bench_runs.csv', 'bench_instances.csv', 'bench_groups.csv', 'bench_report.txt'):
            assert (out / name).exists()
        assert len(list((out / 'solutions').iterdir())) == 2

        again = tmp_path / 'again'
        code = main(['bench', '--report-only', str(out / 'bench_runs.csv'), '-o', str(again)])
        assert code == EXIT_OK
        reader = CSVReportWriter()
        before = reader.read(str(out / 'bench_instances.csv'))
        after = reader.read(str(again / 'bench_instances.csv'))
        # 시간 열은 실행 로그의 반올림 값에서 다시 평균한다
        for row in before + after:
            row.pop('time')
        assert after == before

    def test_zero_runs(self, tmp_path, resource_path):
        assert main(['bench', resource_path('manifest.json'), '--runs', '0',
                     '-o', str(tmp_path)]) == EXIT_USAGE
