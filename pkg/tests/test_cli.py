import csv
import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from ccurv import cli

SCHEMA = Path(cli.__file__).parent / "schemas" / "manifest.schema.json"
SPHERE = "family = revolution\nprofile = sphere\nradius = 1\n"
TORUS = "family = flat_torus\nlattice = 2, 0; 0, 2\n"


def _manifest(out):
    man = json.loads((out / "manifest.json").read_text())
    schema = json.loads(SCHEMA.read_text())
    for key in schema["required"]:
        assert key in man
    try:
        import jsonschema
    except ImportError:  # optional; the required-key check above still runs
        return man
    jsonschema.validate(man, schema)
    return man


def _rows(path):
    return list(csv.DictReader(path.open()))


# -- solve -------------------------------------------------------------------

def test_solve_sphere(tmp_path, surface_file):
    out = tmp_path / "out"
    code = cli.main(["solve", "--surface", str(surface_file(SPHERE)), "--c", "1", "--out", str(out)])
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    # latitude with cot(rho) = 1
    assert rep["length"] == pytest.approx(2 * math.pi * math.sin(math.pi / 4), rel=1e-3)
    assert rep["residual"] < 1e-3
    assert rep["instability_certificate"] and rep["second_variation_phi1"] < 0
    man = _manifest(out)
    assert man["exit_code"] == 0 and man["command"] == "solve"
    assert {o["path"] for o in man["outputs"]} >= {"solution.json", "solution.csv", "report.json"}
    assert len(man["inputs"]) == 1


def test_solve_not_embeddable(tmp_path, surface_file, capsys):
    out = tmp_path / "out"
    code = cli.main(["solve", "--surface", str(surface_file(TORUS)), "--c", "0.9", "--out", str(out)])
    assert code == cli.EXIT_NUMERICAL == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "NotEmbeddable"
    assert json.loads((out / "error.json").read_text())["exit_code"] == 3
    assert _manifest(out)["error"] == "NotEmbeddable"


@pytest.mark.parametrize("argv", [
    ["solve", "--surface", "missing.cfg", "--c", "1"],
    ["solve", "--c", "1"],
    ["solve", "--surface", "SURF", "--c", "-1"],
    ["region-plot", "--format", "png"],
    ["region-plot", "--grid", "2"],
    ["region-plot", "--tol", "-1"],
])
def test_config_errors(tmp_path, surface_file, argv):
    argv = [str(surface_file(SPHERE)) if a == "SURF" else a for a in argv]
    if argv[0] == "solve" and "missing.cfg" in argv:
        argv[argv.index("missing.cfg")] = str(tmp_path / "missing.cfg")
    assert cli.main(argv + ["--out", str(tmp_path / "out")]) == cli.EXIT_CONFIG == 2


# -- region-plot ---------------------------------------------------------------

def test_region_plot(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["region-plot", "--out", str(out)]) == 0
    fig2 = {float(r["inj"]): float(r["c_blue"]) for r in _rows(out / "figure2.csv")}
    assert fig2[1.0] == pytest.approx(1.3130, abs=5e-4)
    upper = {float(r["minK"]): float(r["c_upper"]) for r in _rows(out / "figure1.csv") if r["c_upper"]}
    assert upper[0.075] == pytest.approx(0.235599, abs=1e-3)
    assert json.loads((out / "regression.json").read_text())["passed"]
    for name in ("figure1.svg", "figure2.svg"):
        assert (out / name).read_text().startswith("<svg")
    _manifest(out)


def test_region_plot_zero_tolerance_fails(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["region-plot", "--tol", "0", "--out", str(out)]) == cli.EXIT_REGRESSION == 4
    reg = json.loads((out / "regression.json").read_text())
    assert not reg["passed"] and reg["failures"]
    assert "FAIL" in capsys.readouterr().out
    assert _manifest(out)["exit_code"] == 4


def test_format_selection(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["region-plot", "--format", "csv", "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert "figure1.csv" in names and "figure1.svg" not in names and "figures.json" not in names


# -- verify ----------------------------------------------------------------------

def test_verify_passes(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["verify", "--out", str(out)]) == 0
    rows = _rows(out / "verify.csv")
    assert rows and all(r["status"] == "pass" for r in rows)
    assert any("Birkhoff" in r["check"] for r in rows)
    _manifest(out)


def test_verify_negative_control(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["verify", "--negative-control", "--out", str(out)]) == 4
    status = {r["check"]: r["status"] for r in _rows(out / "verify.csv")}
    assert status["geodesic_curvature sign"] == "FAIL"
    assert sum(s == "FAIL" for s in status.values()) == 1


# -- determinism, environment, entry point ---------------------------------------------

def test_csv_outputs_are_deterministic(tmp_path, surface_file):
    cfg = str(surface_file(SPHERE))
    for k in (1, 2):
        assert cli.main(["region-plot", "--grid", "50", "--out", str(tmp_path / f"r{k}")]) == 0
        assert cli.main(["verify", "--seed", "7", "--out", str(tmp_path / f"v{k}")]) == 0
        assert cli.main(["solve", "--surface", cfg, "--c", "2", "--format", "csv",
                         "--out", str(tmp_path / f"s{k}")]) == 0
    for sub in ("r", "v", "s"):
        a, b = tmp_path / f"{sub}1", tmp_path / f"{sub}2"
        csvs = sorted(p.name for p in a.glob("*.csv"))
        assert csvs
        for name in csvs:
            assert (a / name).read_bytes() == (b / name).read_bytes()


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["region-plot", "--format", "json"]) == 0
    assert (tmp_path / "env" / "figures.json").is_file()


@pytest.mark.skipif(shutil.which("ccurv") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["ccurv", "region-plot", "--format", "csv", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "within tolerance" in res.stdout


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ccurv.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("ccurv ")
