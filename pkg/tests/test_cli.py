"""Tests for the command-line interface: exit codes, overrides, and the
report rendering path."""

import json
import os

import pytest

from elaasim.cli import apply_override, main
from elaasim.presets import get_preset
from elaasim.scenario import ConfigError

TINY = [
    "--override", "geometry.m_antennas=96",
    "--override", "layout.n_ue=1",
]


class TestOverrides:
    def test_scenario_block_override(self):
        spec = apply_override(get_preset("table1-case1-1m"), "geometry.m_antennas", "512")
        assert spec.scenario.geometry.m_antennas == 512

    def test_propagation_override(self):
        spec = apply_override(get_preset("table1-case1-1m"), "propagation.d_los", "100.0")
        assert spec.scenario.propagation.d_los == 100.0

    def test_sequence_override(self):
        spec = apply_override(get_preset("table1-case1-1m"), "layout.ut_x", "-1,0,1")
        assert spec.scenario.layout.ut_x == (-1.0, 0.0, 1.0)

    def test_extras_override(self):
        spec = apply_override(get_preset("fig4-hardening"), "extras.m_grid", "100,200")
        assert spec.extras["m_grid"] == (100, 200)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown override"):
            apply_override(get_preset("table1-case1-1m"), "geometry.bogus", "1")
        with pytest.raises(ConfigError, match="unknown override"):
            apply_override(get_preset("table1-case1-1m"), "bogus", "1")


class TestExitCodes:
    def test_list_presets_ok(self, capsys):
        assert main(["list-presets"]) == 0
        out = capsys.readouterr().out
        assert "table1-case3-50m" in out

    def test_list_presets_json(self, capsys):
        assert main(["list-presets", "--json"]) == 0
        table = json.loads(capsys.readouterr().out)
        assert any(row["name"] == "fig9-ser" for row in table)

    def test_unknown_preset_is_config_error(self, capsys):
        assert main(["run", "--preset", "nope", "--out", "/tmp/x"]) == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_bad_override_is_config_error(self, tmp_path):
        rc = main(["run", "--preset", "table1-case1-1m", "--out", str(tmp_path),
                   "--override", "geometry.m_antennas"])
        assert rc == 2

    def test_missing_input_is_runtime_error(self, tmp_path, capsys):
        rc = main(["fit", "--input", str(tmp_path / "absent.csv")])
        assert rc == 3


class TestRunAndFit:
    def test_run_writes_bundle(self, tmp_path, capsys):
        out = tmp_path / "bundle"
        rc = main(["run", "--preset", "table1-case1-1m", "--trials", "5",
                   "--out", str(out), *TINY])
        assert rc == 0
        assert (out / "trials.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["trials"] == 5

    def test_run_report_renders_figures(self, tmp_path, capsys):
        out = tmp_path / "bundle"
        rc = main(["run", "--preset", "table1-case1-1m", "--trials", "5",
                   "--out", str(out), "--report", *TINY])
        assert rc == 0
        assert (out / "trials.png").exists()

    def test_fit_on_generated_csv(self, tmp_path, capsys):
        out = tmp_path / "bundle"
        main(["run", "--preset", "table1-case1-1m", "--trials", "30",
              "--out", str(out), *TINY])
        capsys.readouterr()
        rc = main(["fit", "--input", str(out / "trials.csv"), "--family", "gaussian"])
        assert rc == 0
        recs = json.loads(capsys.readouterr().out)
        assert recs and all(r["family"] == "gaussian" for r in recs)
        assert all(len(r["theta"]) == 2 for r in recs)

    def test_fit_rejects_missing_columns(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        rc = main(["fit", "--input", str(bad)])
        assert rc == 2
        assert "capacity" in capsys.readouterr().err

    def test_dump_channel(self, tmp_path, capsys):
        path = tmp_path / "dump.csv"
        rc = main(["dump-channel", "--preset", "fig2-casestudy1", "--trial", "0",
                   "--out", str(path)])
        assert rc == 0
        header = json.loads(path.read_text().splitlines()[0])
        assert header["n_streams"] == 10
