import numpy as np
import pytest

from weakhyp.cli import main
from weakhyp.pipeline import Report, emit_report, run_scenario
from weakhyp.scenario import load_scenario
from weakhyp.utils.globals import EXIT_OK, EXIT_SCHEMA, EXIT_VIOLATION, STATUS_OK, SWEEP_COLUMNS
from weakhyp.utils.load import load_json
from weakhyp.utils.save import dump_json, load_csv, open_traces


@pytest.fixture(scope='module')
def strict_report():
    return run_scenario('strict_const', n_jobs=1)


def test_strict_constant_pipeline(strict_report):
    report = strict_report
    assert report.hyperbolicity['verdict'] == 'strict'
    assert report.exit_code == EXIT_OK
    assert not report.violations
    assert len(report.sweep) == 9
    for row in report.rows():
        assert row.status == STATUS_OK
        assert row.amplification == pytest.approx(1.0, abs=1e-4)
    assert report.fit['model'] == 'polynomial'
    assert -0.05 <= report.fit['kappa'] <= 0.05
    assert report.certificates['bounded']
    assert report.reduction['residual'] < 1e-8


def test_analyze_and_reduce_jt():
    report = run_scenario('jt_example', stages=['analyze', 'reduce'], xi_max=64)
    assert report.hyperbolicity['verdict'] == 'weak(2)'
    assert report.conditions['C_GR1m'] == 0.0
    assert np.isfinite(report.conditions['C_GRLevi'])
    assert report.reduction['size'] == 4
    assert report.reduction['max_order_C'] <= 1
    assert report.sweep == [] and report.fit is None
    assert report.exit_code == EXIT_OK


def test_vanishing_delta_is_a_violation():
    report = run_scenario('double_root', stages=['analyze'], xi_max=16)
    assert report.hyperbolicity['verdict'] == 'weak(1)'
    assert report.exit_code == EXIT_VIOLATION
    assert any('vanishes identically' in v for v in report.violations)
    assert all(report.conditions['delta_vanishes'])


def test_double_root_growth_is_gevrey():
    report = run_scenario('double_root', n_jobs=1)
    assert report.exit_code == EXIT_VIOLATION
    assert all(row['status'] == STATUS_OK for row in report.sweep)
    assert report.fit['model'] == 'gevrey'
    assert 0.35 <= report.fit['theta'] <= 0.65


def test_jt_growth_is_polynomial_and_stable_in_tolerance():
    fits = [run_scenario('jt_example', stages=['sweep', 'fit'], n_jobs=1, tol=tol).fit for tol in (1e-8, 5e-9)]
    for result in fits:
        assert result['model'] == 'polynomial'
        assert result['r2_polynomial'] >= 0.98
    assert fits[1]['kappa'] == pytest.approx(fits[0]['kappa'], abs=0.05)


def test_overrides_shrink_the_sweep():
    sc = load_scenario('strict_const')
    report = run_scenario(sc, stages=['sweep'], xi_max=8, directions=2, n_jobs=1)
    assert len(report.sweep) == 8
    assert report.settings['directions'] == 2
    assert report.settings['xi_magnitudes'] == [1.0, 2.0, 4.0, 8.0]


def test_empty_sweep_table_has_header_only(tmp_path):
    report = run_scenario('strict_const', stages=['analyze'])
    (path,) = emit_report(report, ['csv'], str(tmp_path))
    with open(path) as f:
        assert f.read() == ','.join(SWEEP_COLUMNS) + '\n'


def test_sweep_table(tmp_path):
    report = run_scenario('strict_const', stages=['sweep'], xi_max=128, n_jobs=1, out=str(tmp_path),
                          formats=['csv'])
    path = tmp_path / 'strict_const_sweep.csv'
    lines = path.read_text().splitlines()
    assert len(lines) == 9
    assert lines[0].split(',') == SWEEP_COLUMNS
    rows = load_csv(str(path))
    assert [r['xi_mag'] for r in rows] == [row['xi_mag'] for row in report.sweep]
    assert rows[0]['direction_index'] == 0
    assert not (tmp_path / 'strict_const_traces.h5').exists()


def test_sweep_traces_follow_the_scenario_flag(tmp_path):
    sc = load_scenario('strict_const')
    sc.output.traces = True
    report = run_scenario(sc, stages=['sweep'], xi_max=4, n_jobs=1, out=str(tmp_path), formats=['json'])
    traces = open_traces(str(tmp_path / 'strict_const_traces.h5'))
    assert len(traces) == len(report.sweep) == 3
    for trace, row in zip(traces, report.rows()):
        assert trace.xi == tuple(row.xi)
        assert trace.amplification == pytest.approx(row.amplification)
        assert trace.status == STATUS_OK


def test_json_report_round_trip(strict_report, tmp_path):
    (path,) = emit_report(strict_report, ['json'], str(tmp_path))
    saved = load_json(path)
    assert set(saved) >= {'scenario', 'hyperbolicity', 'conditions', 'reduction', 'sweep', 'fit', 'exit_code'}
    with open(path) as f:
        assert dump_json(Report.from_dict(saved).to_dict()) == f.read()


def test_reports_are_deterministic(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / str(k)
        run_scenario('strict_const', stages=['analyze', 'sweep', 'fit'], n_jobs=1, out=str(out))
        texts.append((out / 'strict_const_report.json').read_text())
        texts.append((out / 'strict_const_sweep.csv').read_text())
    assert texts[0] == texts[2]
    assert texts[1] == texts[3]


def test_cli_analyze(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(['analyze', '--scenario', 'jt_example', '--xi-max', '16']) == EXIT_OK
    assert 'verdict: weak(2)' in capsys.readouterr().out
    # without --out the reports go to the scenario's output dir
    saved = load_json(str(tmp_path / 'results' / 'jt_example' / 'jt_example_report.json'))
    assert saved['hyperbolicity']['verdict'] == 'weak(2)'


def test_cli_missing_scenario(tmp_path, capsys):
    assert main(['analyze', '--scenario', str(tmp_path / 'missing.json')]) == EXIT_SCHEMA
    assert 'scenario error' in capsys.readouterr().out


def test_cli_schema_error(tmp_path, capsys):
    path = tmp_path / 'bad.json'
    path.write_text('{"name": "bad", "system": {"m": 0, "n": 1, "entry": {}}, "T": 1, "grids": {"xi_magnitudes": [1]}}')
    assert main(['analyze', '--scenario', str(path)]) == EXIT_SCHEMA
    assert 'system.m' in capsys.readouterr().out


def test_cli_pipeline_reports_violation(tmp_path):
    code = main(['pipeline', '--scenario', 'double_root', '--xi-max', '64', '--out', str(tmp_path),
                 '--jobs', '1'])
    assert code == EXIT_VIOLATION
    assert (tmp_path / 'double_root_report.json').is_file()
    assert (tmp_path / 'double_root_sweep.csv').is_file()


def test_cli_fit_from_table(strict_report, tmp_path, capsys):
    (path,) = emit_report(strict_report, ['csv'], str(tmp_path))
    assert main(['fit', '--table', path]) == EXIT_OK
    assert 'growth model: polynomial' in capsys.readouterr().out


def test_cli_report_re_emits(strict_report, tmp_path):
    (path,) = emit_report(strict_report, ['json'], str(tmp_path / 'first'))
    out = tmp_path / 'second'
    assert main(['report', '--report', path, '--out', str(out), '--format', 'json']) == EXIT_OK
    with open(path) as f:
        assert (out / 'strict_const_report.json').read_text() == f.read()


def test_cli_evolve_saves_traces(tmp_path, capsys):
    path = str(tmp_path / 'traces.h5')
    assert main(['evolve', '--scenario', 'jt_example', '--xi', '4', '--save-traces', path]) == EXIT_OK
    assert 'amplification' in capsys.readouterr().out
    (trace,) = open_traces(path)
    assert trace.xi == (4.0,)
    assert trace.status == STATUS_OK
    assert trace.V.shape[1] == 4
    assert np.isfinite(trace.amplification)
