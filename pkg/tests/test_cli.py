"""Command-line entry points."""

import json
import os

import pytest

from subnetsim import cli
from subnetsim import link_adaptation as la
from subnetsim.config import parse_config

TINY_INI = """
[run]
seed = 7
n_ttis = 40
warmup_ttis = 10

[cqi]
sinr_min_db = -10.0
"""


@pytest.fixture
def tiny_ini(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(TINY_INI)
    return str(path)


class TestDefaults:
    def test_emits_parseable_ini(self, capsys):
        assert cli.main(["defaults"]) == cli.EXIT_OK
        text = capsys.readouterr().out
        cfg = parse_config(text, from_text=True)
        cfg.validate()


class TestRun:
    def test_tiny_run_writes_outputs(self, tiny_ini, tmp_path, capsys):
        out = str(tmp_path / "out")
        code = cli.main(["run", "--config", tiny_ini, "--out", out])
        assert code == cli.EXIT_OK
        assert "wrote records" in capsys.readouterr().out
        for name in ("records.csv", "summary.json", "mcs_table.csv",
                     "config.ini", "ecdf_rae.csv", "ecdf_bler.csv"):
            assert os.path.exists(os.path.join(out, name))

    def test_overrides_applied(self, tiny_ini, tmp_path):
        out = str(tmp_path / "out")
        code = cli.main(["run", "--config", tiny_ini, "--out", out,
                         "--ttis", "30", "--predictors", "genie"])
        assert code == cli.EXIT_OK
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert list(summary["predictors"]) == ["genie"]
        assert summary["n_records"] == 16 * 20
        stored = parse_config(os.path.join(out, "config.ini"))
        assert stored.n_ttis == 30
        assert stored.predictors == ("genie",)

    def test_bad_config_exits_config_code(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[run]\nn_ttis = -5\n")
        out = str(tmp_path / "out")
        assert cli.main(["run", "--config", str(path), "--out", out]) == cli.EXIT_CONFIG

    def test_missing_config_file_exits_config_code(self, tmp_path):
        out = str(tmp_path / "out")
        assert cli.main(["run", "--config", str(tmp_path / "nope.ini"),
                         "--out", out]) == cli.EXIT_CONFIG

    def test_flag_overrides_on_minimal_config(self, tmp_path):
        # Only warmup and the fixed anchor come from the file; everything
        # else is library defaults plus command-line overrides.
        path = tmp_path / "minimal.ini"
        path.write_text("[run]\nwarmup_ttis = 5\n[cqi]\nsinr_min_db = -10.0\n")
        out = str(tmp_path / "out")
        code = cli.main(["run", "--config", str(path), "--out", out,
                         "--ttis", "25", "--seed", "3", "--predictors", "genie"])
        assert code == cli.EXIT_OK
        stored = parse_config(os.path.join(out, "config.ini"))
        assert stored.seed == 3 and stored.n_ttis == 25


class TestTable:
    def test_analytic_table_round_trips(self, tmp_path, capsys):
        out = str(tmp_path / "table.csv")
        assert cli.main(["table", "--analytic", "--out", out]) == cli.EXIT_OK
        table = la.load_mcs_table(out)
        assert len(table) == 29

    def test_load_validates_and_rewrites(self, tmp_path):
        first = str(tmp_path / "a.csv")
        second = str(tmp_path / "b.csv")
        assert cli.main(["table", "--analytic", "--out", first]) == cli.EXIT_OK
        assert cli.main(["table", "--load", first, "--out", second]) == cli.EXIT_OK
        import numpy as np
        a = la.load_mcs_table(first)
        b = la.load_mcs_table(second)
        assert np.array_equal(a.curves, b.curves)

    def test_corrupt_table_exits_config_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("mcs_id,spectral_efficiency,sinr_db,bler\n0,1.0,0.0,0.1\n0,1.0,1.0,0.9\n")
        out = str(tmp_path / "out.csv")
        assert cli.main(["table", "--load", str(bad), "--out", out]) == cli.EXIT_CONFIG

    def test_source_flags_mutually_exclusive(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["table", "--analytic", "--load", "x.csv",
                      "--out", str(tmp_path / "t.csv")])


class TestSummarize:
    def test_recomputes_from_records(self, tiny_ini, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert cli.main(["run", "--config", tiny_ini, "--out", out]) == cli.EXIT_OK
        with open(os.path.join(out, "summary.json")) as fh:
            before = json.load(fh)
        os.remove(os.path.join(out, "summary.json"))
        assert cli.main(["summarize", "--in", out]) == cli.EXIT_OK
        with open(os.path.join(out, "summary.json")) as fh:
            after = json.load(fh)
        assert after["n_records"] == before["n_records"]
        assert after["predictors"].keys() == before["predictors"].keys()

    def test_missing_directory_exits_runtime_code(self, tmp_path):
        code = cli.main(["summarize", "--in", str(tmp_path / "void")])
        assert code in (cli.EXIT_CONFIG, cli.EXIT_RUNTIME)
