"""
Unit tests for the command-line front end.

Tests:
- Exit codes (answered, input error, budget exceeded)
- JSON report on stdout, summary on stderr
- Gadget files and the reduction check
- Loading and re-verifying saved reports
"""
import json

import pytest

from nashgraph.cli import load_report, render_report, run, verify_report
from nashgraph.errors import ReportFormatError
from nashgraph.graph_io import format_graph, parse_graph, parse_sidecar
from nashgraph.models import Report
from tests.unit.oracles import complete, path, star


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    for name in ('ENUMERATE_VERTEX_CAP', 'OSTAR_CAP', 'SAT_VARIABLE_CAP', 'TIMEOUT_SECONDS', 'JOBS', 'LOG_LEVEL'):
        monkeypatch.delenv(f'NASHGRAPH_{name}', raising=False)
    (tmp_path / "k3.g").write_text(format_graph(complete(3, 2)))
    (tmp_path / "p4.g").write_text(format_graph(path(4, 1)))
    (tmp_path / "star.g").write_text(format_graph(star(3)))
    (tmp_path / "one.cnf").write_text("c one clause\np cnf 4 1\n1 -2 3 0\n")
    return tmp_path


def _run(capsys, *argv):
    code = run([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, json.loads(captured.out), captured.err


class TestExitCodes:
    """Test the exit code contract."""

    def test_answered(self, workdir, capsys):
        code, report, err = _run(capsys, 'enumerate', workdir / "k3.g")
        assert code == 0
        assert report['command'] == 'enumerate'
        assert report['result']['count'] == 3
        assert report['result']['dsets'] == [[0], [1], [2]]
        assert report['error'] is None
        assert err.strip().endswith("complete=True, count=3, explored=" + str(report['result']['explored']))

    def test_missing_file(self, workdir, capsys):
        code, report, _ = _run(capsys, 'partition', workdir / "absent.g")
        assert code == 1
        assert report['error']['type'] == 'FileNotFoundError'

    def test_malformed_graph(self, workdir, capsys):
        bad = workdir / "bad.g"
        bad.write_text("capgraph 2 0\nk 0 0\n")
        code, report, _ = _run(capsys, 'construct', bad)
        assert code == 1
        assert report['error']['type'] == 'GraphFormatError'

    def test_usage_error(self, capsys):
        code, report, _ = _run(capsys, 'enumerate')
        assert code == 1
        assert report['error']['type'] == 'UsageError'

    def test_unknown_subcommand(self, capsys):
        code, report, _ = _run(capsys, 'colour')
        assert code == 1
        assert report['command'] == 'nashgraph'

    def test_no_subcommand(self, capsys):
        code, report, _ = _run(capsys)
        assert code == 1
        assert "subcommand" in report['error']['message']

    def test_invalid_jobs(self, workdir, capsys):
        code, report, _ = _run(capsys, '--jobs', '0', 'enumerate', workdir / "k3.g")
        assert code == 1
        assert report['error']['type'] == 'ValidationError'

    def test_ostar_budget(self, workdir, capsys):
        code, report, _ = _run(capsys, 'unique-dset', workdir / "star.g", '--method', 'ostar', '--budget', '0')
        assert code == 2
        assert report['budget_exceeded']
        assert report['error']['budget'] == 'ostar'

    def test_enumeration_cap_from_environment(self, workdir, capsys, monkeypatch):
        monkeypatch.setenv('NASHGRAPH_ENUMERATE_VERTEX_CAP', '2')
        code, report, _ = _run(capsys, 'enumerate', workdir / "k3.g")
        assert code == 2
        assert report['budgets']['enumerate_vertex_cap'] == 2

    def test_config_file(self, workdir, capsys):
        config = workdir / "settings.yml"
        config.write_text("enumerate_vertex_cap: 2\n")
        code, _, _ = _run(capsys, '--config', config, 'enumerate', workdir / "k3.g")
        assert code == 2


class TestCommands:
    """Test individual subcommands."""

    def test_normalize_writes_output(self, workdir, capsys):
        target = workdir / "normalized.g"
        code, report, _ = _run(capsys, 'normalize', workdir / "p4.g", '-o', target)
        assert code == 0
        assert parse_graph(target.read_text()) == path(4, 1)
        assert report['result']['removed_edges'] == 0

    def test_partition(self, workdir, capsys):
        _, report, _ = _run(capsys, 'partition', workdir / "p4.g")
        assert report['result'] == {'x': [0, 3], 'y': [1, 2], 'z': []}

    def test_construct(self, workdir, capsys):
        _, report, _ = _run(capsys, 'construct', workdir / "star.g")
        assert report['result']['valid']
        assert report['witnesses'][0]['role'] == 'construct'

    def test_unique_nash(self, workdir, capsys):
        _, report, _ = _run(capsys, 'unique-nash', workdir / "p4.g")
        assert report['result']['unique'] is False
        assert {w['role'] for w in report['witnesses']} == {'reference', 'witness'}

    def test_unique_dset(self, workdir, capsys):
        _, report, _ = _run(capsys, 'unique-dset', workdir / "star.g")
        assert report['result']['unique'] is True
        assert report['result']['method'] == 'kappa-one'

    def test_enumerate_limit(self, workdir, capsys):
        _, report, _ = _run(capsys, 'enumerate', workdir / "k3.g", '--limit', '2')
        assert report['result']['count'] == 2
        assert report['result']['complete'] is False

    def test_enumerate_pruned(self, workdir, capsys):
        _, report, _ = _run(capsys, 'enumerate', workdir / "p4.g", '--pruned', '--timeout', '10')
        assert report['result']['dsets'] == [[0, 2], [0, 3], [1, 2], [1, 3]]

    def test_is_dset(self, workdir, capsys):
        _, report, _ = _run(capsys, 'is-dset', workdir / "p4.g", '--set', '1,2')
        assert report['result'] == {'set': [1, 2], 'is_dset': True}
        _, report, _ = _run(capsys, 'is-dset', workdir / "p4.g", '--set', '0,1')
        assert report['result']['is_dset'] is False
        assert report['witnesses'] == []

    def test_is_dset_rejects_unknown_vertex(self, workdir, capsys):
        code, report, _ = _run(capsys, 'is-dset', workdir / "p4.g", '--set', '9')
        assert code == 1
        assert report['error']['type'] == 'UsageError'

    def test_gadget_writes_graph_and_sidecar(self, workdir, capsys):
        target = workdir / "gadget.g"
        code, report, _ = _run(capsys, 'gadget', '--k', '2', '--cnf', workdir / "one.cnf", '-o', target)
        assert code == 0
        g = parse_graph(target.read_text())
        assert g.vertex_count == report['result']['vertex_count'] == 58
        sidecar = parse_sidecar((workdir / "gadget.g.map").read_text())
        assert sorted(sidecar['var']) == [1, 2, 3, 4]
        assert list(sidecar['clause']) == [1]

    def test_gadget_rejects_small_k(self, workdir, capsys):
        code, _, _ = _run(capsys, 'gadget', '--k', '1', '--cnf', workdir / "one.cnf", '-o', workdir / "g.g")
        assert code == 1

    def test_gadget_rejects_bad_cnf(self, workdir, capsys):
        bad = workdir / "bad.cnf"
        bad.write_text("p cnf 2 1\n1 2 3 0\n")
        code, report, _ = _run(capsys, 'gadget', '--k', '2', '--cnf', bad, '-o', workdir / "g.g")
        assert code == 1
        assert report['error']['type'] == 'CnfFormatError'

    @pytest.mark.parametrize("k", [2, 3])
    def test_verify_reduction(self, workdir, capsys, k):
        code, report, _ = _run(capsys, 'verify-reduction', '--k', k, '--cnf', workdir / "one.cnf", '--timeout', '2')
        result = report['result']
        assert code == 0
        assert result['canonical_valid']
        assert result['canonical_matches_construction']
        assert result['partition_matches_construction']
        assert result['satisfiable']
        assert result['witness_valid']
        assert result['witness_differs']
        assert result['consistent']


class TestReportFiles:
    """Test saved reports."""

    def test_report_file_matches_stdout(self, workdir, capsys):
        target = workdir / "report.json"
        code = run(['--report-file', str(target), 'construct', str(workdir / "k3.g")])
        out = capsys.readouterr().out
        assert code == 0
        assert target.read_text() == out

    def test_render_is_deterministic(self):
        report = Report(command='partition', result={'z': [], 'x': [0]})
        assert render_report(report) == render_report(Report(**json.loads(render_report(report))))
        assert render_report(report).index('"x"') < render_report(report).index('"z"')

    def test_verify_saved_report(self, workdir, capsys):
        _, report_data, _ = _run(capsys, 'construct', workdir / "k3.g")
        report = load_report(json.dumps(report_data))
        assert verify_report(report, complete(3, 2))

    def test_verify_saved_dsets(self, workdir, capsys):
        _, report_data, _ = _run(capsys, 'enumerate', workdir / "p4.g")
        assert verify_report(load_report(json.dumps(report_data)), path(4, 1))

    def test_tampered_witness_rejected(self, workdir, capsys):
        _, report_data, _ = _run(capsys, 'construct', workdir / "k3.g")
        report_data['witnesses'][0]['edges'] = []
        assert not verify_report(load_report(json.dumps(report_data)), complete(3, 2))

    def test_tampered_dset_rejected(self):
        report = Report(command='enumerate', witnesses=[{'role': 'dset', 'd_set': [0, 1]}])
        assert not verify_report(report, path(4, 1))

    @pytest.mark.parametrize("text", ["not json", "[1, 2]", '{"result": {}}'])
    def test_load_rejects_bad_reports(self, text):
        with pytest.raises(ReportFormatError):
            load_report(text)
