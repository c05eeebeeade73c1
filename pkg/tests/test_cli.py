import json
import math

import numpy as np
import pytest

from raman_lattice import __version__
from raman_lattice.cli import ENV_OUT, read_csv, run
from raman_lattice.specfun import chi


def sidecar(path):
    return json.loads(path.with_suffix(".json").read_text())


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUT, str(tmp_path / "env"))
    return tmp_path


def call(*argv):
    return run(["-q", *map(str, argv)])


class TestEigen:
    def test_symmetric_point(self, out):
        f = out / "e.csv"
        assert call("eigen", "--omega1-khz", 528, "--omega2-khz", 528, "--phi-mrad", 16, "-o", f) == 0
        res = sidecar(f)["results"]
        assert res["beta_deg"] == pytest.approx(90.0, abs=1e-9)
        assert res["splitting_khz"] == pytest.approx(528 * 0.016, rel=1e-3)
        lines = f.read_text().splitlines()
        assert lines[0] == "mode,frequency_khz,projection,lamb_dicke" and len(lines) == 3

    def test_prints_summary(self, out, capsys):
        assert run(["eigen", "-o", str(out / "e.csv")]) == 0
        text = capsys.readouterr().out
        assert "beta = 90.0000 deg" in text and "splitting/2pi" in text


class TestOutputs:
    def test_env_directory_and_sidecar(self, out):
        assert call("chi-table", "--points", 5) == 0
        f = out / "env" / "chi-table.csv"
        meta = sidecar(f)
        assert meta["version"] == __version__ and meta["tool"] == "raman-lattice"
        assert meta["config"]["points"] == 5 and meta["subcommand"] == "chi-table"
        assert "seed" in meta

    def test_out_dir_beats_env(self, out):
        assert call("--out-dir", out / "d", "chi-table", "--points", 5) == 0
        assert (out / "d" / "chi-table.csv").exists()
        assert not (out / "env").exists()

    def test_global_options_after_subcommand(self, out):
        assert run(["chi-table", "--points", "3", "-q", "--out-dir", str(out / "x")]) == 0
        assert (out / "x" / "chi-table.csv").exists()

    def test_csv_dialect(self, out):
        f = out / "s.csv"
        assert call("synth-spectrum", "--step-khz", 50, "-o", f) == 0
        raw = f.read_bytes()
        assert b"\r" not in raw and raw.endswith(b"\n")
        header, first = raw.decode().splitlines()[:2]
        assert header == "detuning_khz,transfer"
        assert first.split(",")[0] == "-600"

    def test_chi_table_matches_kernel(self, out):
        f = out / "c.csv"
        assert call("chi-table", "--theta-max", 30, "--points", 61, "--quadrature", "-o", f) == 0
        c = read_csv(f, ["theta", "chi", "chi_quadrature"])
        np.testing.assert_allclose(c["chi"], chi(c["theta"]), rtol=1e-11)
        np.testing.assert_allclose(c["chi_quadrature"], c["chi"], atol=1e-7)
        res = sidecar(f)["results"]
        assert res["chi_decreasing"] == bool(np.all(np.diff(c["chi"]) < 0))
        assert res["max_abs_diff_quadrature"] < 1e-7


class TestConfig:
    def test_config_then_flag_precedence(self, out):
        cfg = out / "c.json"
        cfg.write_text(json.dumps({"nbar": 0.5, "step-khz": 20, "background": 0.0}))
        f = out / "s.csv"
        assert call("--config", cfg, "synth-spectrum", "--step-khz", 10, "-o", f) == 0
        conf = sidecar(f)["config"]
        assert conf["nbar"] == 0.5 and conf["step_khz"] == 10 and conf["background"] == 0.0
        assert len(f.read_text().splitlines()) == 1 + 121

    def test_config_supplies_required_input(self, out):
        assert call("scan-crossing", "-o", out / "scan.csv") == 0
        cfg = out / "c.json"
        cfg.write_text(json.dumps({"input": str(out / "scan.csv")}))
        assert call("--config", cfg, "fit-crossing", "-o", out / "fit.csv") == 0

    def test_unknown_config_key(self, out, capsys):
        cfg = out / "c.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert call("--config", cfg, "eigen") == 2
        rec = json.loads(capsys.readouterr().err)
        assert "bogus" in rec["error"]["message"]


class TestErrors:
    def test_missing_input_is_usage_error(self, out, capsys):
        assert call("fit-crossing", "--input", out / "nope.csv") == 2
        rec = json.loads(capsys.readouterr().err)
        assert rec["error"]["type"] == "CliError" and rec["error"]["subcommand"] == "fit-crossing"

    def test_domain_error_carries_module(self, out, capsys):
        assert call("synth-spectrum", "--nbar", -1, "-o", out / "s.csv") == 1
        rec = json.loads(capsys.readouterr().err)
        assert rec["error"]["module"] == "raman_lattice.raman"
        assert rec["error"]["type"] == "ValueError"

    def test_unknown_subcommand(self, capsys):
        assert call("bogus") == 2
        assert "error" in json.loads(capsys.readouterr().err)

    def test_missing_columns(self, out, capsys):
        f = out / "e.csv"
        call("eigen", "-o", f)
        assert call("fit-crossing", "--input", f) == 2
        assert "missing columns" in capsys.readouterr().err


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["synth-spectrum", "--noise-sigma", "0.02", "--seed", "7", "--step-khz", "5"],
        ["scan-crossing", "--freq-noise-khz", "1", "--area-noise-rel", "0.05", "--seed", "3"],
        ["cool", "--ensemble", "3000", "--seed", "11"],
    ])
    def test_byte_identical_reruns(self, out, argv):
        a, b = out / "a.csv", out / "b.csv"
        assert call(*argv, "-o", a) == 0
        assert call(*argv, "-o", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()

    def test_seed_changes_output(self, out):
        call("synth-spectrum", "--noise-sigma", "0.02", "--seed", "1", "-o", out / "a.csv")
        call("synth-spectrum", "--noise-sigma", "0.02", "--seed", "2", "-o", out / "b.csv")
        assert (out / "a.csv").read_bytes() != (out / "b.csv").read_bytes()


class TestPipelines:
    def test_crossing_round_trip(self, out):
        scan, fit = out / "scan.csv", out / "fit.csv"
        assert call("scan-crossing", "--phi-mrad", 16, "--omega1-khz", 528, "--p0-uw", 9.5, "-o", scan) == 0
        assert call("fit-crossing", "--input", scan, "-o", fit) == 0
        p = sidecar(fit)["results"]["params"]
        # CSV rounding to 12 significant digits bounds the recovery
        assert p["phi"] == pytest.approx(16, rel=1e-6)
        assert p["omega1"] == pytest.approx(528, rel=1e-6)
        assert p["P0"] == pytest.approx(9.5, rel=1e-6)

    def test_area_round_trip(self, out):
        scan, fit = out / "scan.csv", out / "fit.csv"
        assert call("scan-crossing", "--p1-uw", 0.9, "-o", scan) == 0
        assert call("fit-areas", "--input", scan, "--omega1-khz", 528, "-o", fit) == 0
        p = sidecar(fit)["results"]["params"]
        assert p["phi"] == pytest.approx(16, rel=1e-6)
        assert p["P0"] == pytest.approx(9.5, rel=1e-6)
        assert p["P1"] == pytest.approx(0.9, rel=1e-6)

    def test_thermometry_pipeline(self, out):
        s, t = out / "s.csv", out / "t.csv"
        assert call("synth-spectrum", "--step-khz", 0.2, "-o", s) == 0
        es = json.loads(s.with_suffix(".json").read_text())
        assert es["results"]["clipped"] is False
        assert call("eigen", "--omega1-khz", 530, "--omega2-khz", 430, "-o", out / "e.csv") == 0
        f_minus = sidecar(out / "e.csv")["results"]["omega_minus_khz"]
        assert call("thermometry", "--input", s, "--mode-khz", f_minus, "-o", t) == 0
        assert sidecar(t)["results"]["nbar_combined"] == pytest.approx(3.3, rel=0.02)
        rows = t.read_text().splitlines()
        assert rows[0] == "mode,omega_khz,area_blue_khz,area_red_khz,nbar,temperature_uk"
        assert rows[-1].startswith("combined,")

    def test_noise_then_fit_spectrum(self, out):
        s, n, f = out / "s.csv", out / "n.csv", out / "f.csv"
        call("synth-spectrum", "--step-khz", 0.2, "--start-khz", 400, "--stop-khz", 460, "-o", s)
        assert call("add-noise", "--input", s, "--sigma", 0.005, "--seed", 2, "-o", n) == 0
        assert call("fit-spectrum", "--input", n, "--peaks", 1, "-o", f) == 0
        c = read_csv(f, ["center_khz", "fwhm_khz"])
        assert c["center_khz"][0] == pytest.approx(429.84, abs=0.3)
        # interaction-time width 0.886 / 0.3 ms ~ 3 kHz, thermal sum narrows it slightly
        assert 1.5 < c["fwhm_khz"][0] < 4.0

    def test_cool_columns(self, out):
        f = out / "c.csv"
        assert call("cool", "--ensemble", 2000, "--cycles", 5, "--scheme", "2D-halfway",
                    "--omega1-khz", 545, "--omega2-khz", 545, "--nbar", 1.3, "-o", f) == 0
        lines = f.read_text().splitlines()
        assert lines[0] == "cycle,nbar_plus,nbar_minus,ground_fraction" and len(lines) == 7
        meta = sidecar(f)
        assert meta["seed"] == 0
        assert meta["results"]["detuning_khz"] == pytest.approx(-545, abs=0.2)
        assert math.isclose(meta["results"]["protocol"]["t_raman"], 5.5e-6)
