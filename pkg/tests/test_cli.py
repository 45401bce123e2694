import copy
import json

import pytest

from lproth import cli
from lproth.cli import (
    Check,
    ConfigError,
    ExperimentConfig,
    emit_csv,
    lint_report,
    parse_config,
    read_config_file,
    run_suite,
    write_report_atomic,
)


class TestConfigParsing:
    def test_basic_flags(self):
        cmd, cfg = parse_config(["run", "--suite", "kernels", "--p", "1.5", "--d", "2",
                                 "--epsilon", "0.05", "--seed", "7"])
        assert cmd == "run"
        assert cfg.suite == "kernels" and cfg.p == 1.5 and cfg.d == 2
        assert cfg.epsilon == 0.05 and cfg.seed == 7

    def test_missing_suite(self):
        with pytest.raises(ConfigError):
            parse_config(["run", "--p", "1.5"])

    def test_degenerate_p_rejected_by_search(self):
        with pytest.raises(ConfigError):
            parse_config(["run", "--suite", "search", "--p", "2"])

    def test_degenerate_p_allowed_by_oscillatory(self):
        _, cfg = parse_config(["run", "--suite", "oscillatory", "--p", "2"])
        assert cfg.p == 2.0

    def test_config_file_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("# comment\np = 3.0\nseed = 11\n")
        _, cfg = parse_config(["run", "--suite", "forms", "--config", str(path)])
        assert cfg.p == 3.0 and cfg.seed == 11

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("p = 3.0\n")
        _, cfg = parse_config(["run", "--suite", "forms", "--config", str(path),
                               "--p", "1.25"])
        assert cfg.p == 1.25

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("banana = 2\n")
        with pytest.raises(ConfigError):
            read_config_file(str(path))

    def test_out_of_range_values(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(suite="forms", epsilon=2.0).validate()
        with pytest.raises(ConfigError):
            ExperimentConfig(suite="forms", d=11).validate()
        with pytest.raises(ConfigError):
            ExperimentConfig(suite="nope").validate()

    def test_usage_exit_code(self, capsys):
        assert cli.main(["run"]) == 1
        assert cli.main(["bogus"]) == 1


class TestListAndSchema:
    def test_list(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out.split()
        assert "verify-all" in out and "kernels" in out

    def test_schema_is_json(self, capsys):
        assert cli.main(["schema"]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert schema["properties"]["format"]["const"] == 1


def tiny_config(suite="counterexamples", **kw):
    base = dict(suite=suite, p=1.5, d=1, seed=7, spectrum_hits=400,
                search_budget=3 * 10**4, trials=4, quad_nodes=512)
    base.update(kw)
    return ExperimentConfig(**base)


class TestRunSuite:
    def test_counterexample_suite_passes(self, tmp_path):
        cfg = tiny_config(out_dir=str(tmp_path / "out"))
        report, curves, code = run_suite(cfg)
        assert code == 0
        assert report["summary"]["n_fail"] == 0
        assert report["summary"]["n_records"] >= 6
        lint_report(json.loads(json.dumps(report, default=cli._json_default)))

    def test_report_written_and_csv_emitted(self, tmp_path):
        cfg = tiny_config(out_dir=str(tmp_path / "out"))
        report, curves, _ = run_suite(cfg)
        path = write_report_atomic(report, cfg.out_dir)
        files = emit_csv(curves, cfg.out_dir)
        assert json.load(open(path))["format"] == 1
        assert files
        text = open(files[0], "rb").read().decode()
        assert "\r" not in text
        header, first = text.splitlines()[:2]
        assert "," in header
        assert "e" in first.split(",")[0]  # full-precision scientific notation

    def test_determinism_modulo_timing(self, tmp_path):
        cfg1 = tiny_config(out_dir=str(tmp_path / "a"))
        cfg2 = tiny_config(out_dir=str(tmp_path / "b"))
        r1, _, _ = run_suite(cfg1)
        r2, _, _ = run_suite(cfg2)
        m1, m2 = copy.deepcopy(r1), copy.deepcopy(r2)
        m1.pop("timing"), m2.pop("timing")
        m1["config"].pop("out_dir"), m2["config"].pop("out_dir")
        s1 = json.dumps(m1, sort_keys=True, default=cli._json_default)
        s2 = json.dumps(m2, sort_keys=True, default=cli._json_default)
        assert s1 == s2

    def test_failing_check_gives_exit_2(self, monkeypatch, tmp_path):
        def bad_suite(ctx):
            return [Check("always fails", "synthetic-failure", {}, None, False)]

        monkeypatch.setitem(cli._SUITE_FNS, "counterexamples", bad_suite)
        cfg = tiny_config(out_dir=str(tmp_path / "out"))
        report, _, code = run_suite(cfg)
        assert code == 2
        assert report["summary"]["n_fail"] == 1

    def test_degenerate_oscillatory_suite_passes(self, tmp_path):
        cfg = ExperimentConfig(suite="oscillatory", p=2.0, kl_nodes=8, seed=7,
                               out_dir=str(tmp_path / "out"))
        cfg.validate()
        report, _, code = run_suite(cfg)
        assert code == 0
        rec = next(r for r in report["records"] if r["anchor"] == "decay-envelope")
        assert rec["passed"]  # no-decay branch of the dichotomy

    def test_csv_report_format(self, tmp_path):
        cfg = tiny_config(out_dir=str(tmp_path / "out"), fmt="csv")
        report, _, _ = run_suite(cfg)
        path = write_report_atomic(report, cfg.out_dir, fmt="csv")
        lines = open(path).read().splitlines()
        assert lines[0] == "name,anchor,passed,bound,values"
        assert len(lines) == 1 + report["summary"]["n_records"]

    def test_lint_rejects_anchorless_records(self):
        report = {
            "format": 1, "config": {},
            "timing": {"timestamp": "x", "runtimes_s": {}},
            "records": [{"name": "a", "anchor": " ", "values": {}, "bound": None,
                         "passed": True}],
            "summary": {"n_records": 1, "n_pass": 1, "n_fail": 0, "worst_margin": None},
        }
        with pytest.raises(ValueError):
            lint_report(report)
