import csv
import io
import json
import subprocess
import sys

import pytest

from leo_outage.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from leo_outage.config import PRESETS
from leo_outage.outage import outage_exact


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def header_of(text):
    return text.splitlines()[0].split(",")


SCENARIO = ["--preset", "handheld-table1", "--fading", "ils", "--S", "100", "--a", "600km"]


def test_outage_row_matches_library(capsys):
    code, out, _ = run(["outage", *SCENARIO, "--R", "1", "--model", "exact"], capsys)
    assert code == EXIT_OK
    assert header_of(out) == ["p_out", "p_out_ml", "p_out_sl", "n_used"]
    (row,) = rows_of(out)
    ref = outage_exact(PRESETS["handheld-table1"].with_(fading="ils", S=100), 1.0)
    assert float(row["p_out"]) == ref.p_out
    assert int(row["n_used"]) == ref.n_used


@pytest.mark.parametrize(
    "argv, columns",
    [
        (["geometry"], ["theta_min_deg", "a_km", "d_max_km", "psi_max_deg", "psi_th_deg", "d_th_km", "area_ml_km2", "area_sl_km2", "area_vis_km2"]),
        (["case-probs"], ["model", "p_ml", "p_sl", "p_inv", "p_vis"]),
        (["dist", "--points", "5"], ["x_km", "nearest_cdf", "nearest_pdf", "serving_ml_cdf", "serving_sl_cdf"]),
        (["throughput", "--R", "1", "2"], ["R", "theta_min_deg", "p_vis", "p_out", "T"]),
        (["simulate", "outage", "--trials", "2000", "--seed", "1"], ["R", "p_out", "p_out_mc", "mc_stderr", "trials_used", "trials_discarded"]),
        (["simulate", "throughput", "--trials", "2000", "--seed", "1"], ["R", "T", "T_mc", "mc_stderr"]),
        (["simulate", "case-probs", "--trials", "2000", "--seed", "1"], ["case", "p", "p_mc", "mc_stderr"]),
        (["simulate", "dist", "--trials", "2000", "--seed", "1", "--points", "4"], ["x_km", "nearest_cdf", "nearest_cdf_mc", "mc_stderr"]),
        (["sweep", "--var", "R", "--lo", "0.5", "--hi", "1.5", "--count", "3", "--outputs", "p_out,T"], ["R", "p_out", "T"]),
        (["figure", "fig5", "--trials", "200", "--grid", "0:10:5"], ["theta_min_deg", "a_km", "p_vis_exact", "p_vis_approx", "p_vis_mc", "mc_stderr"]),
    ],
)
def test_column_schema(argv, columns, capsys):
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    assert header_of(out) == columns


def test_optimize_both_methods(capsys):
    argv = ["optimize", "--preset", "vsat-table1", "--model", "approx", "--eta", "0.9", "--eps", "0.1", "--method", "both", "--delta-r", "0.1", "--delta-theta", "2deg"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    assert header_of(out) == ["method", "R_star", "theta_star_deg", "T", "iterations", "wall_ms"]
    rows = rows_of(out)
    assert [r["method"] for r in rows] == ["iterative", "exhaustive"]
    assert float(rows[0]["T"]) >= 0.99 * float(rows[1]["T"])


def test_seed_flag_overrides_env(capsys, monkeypatch):
    argv = ["simulate", "outage", *SCENARIO, "--trials", "5000"]
    monkeypatch.setenv("LEO_MC_SEED", "5")
    _, a, _ = run(argv + ["--seed", "7"], capsys)
    monkeypatch.setenv("LEO_MC_SEED", "6")
    _, b, _ = run(argv + ["--seed", "7"], capsys)
    _, c, _ = run(argv, capsys)
    assert a == b
    assert a != c


@pytest.mark.parametrize(
    "argv",
    [
        ["outage", "--a", "600"],
        ["outage", "--theta-min", "10"],
        ["outage", "--S", "0"],
        ["outage", "--fading", "rayleigh"],
        ["outage", "--set", "constellation.Q=1"],
        ["outage", "--R", "-1"],
        ["sweep", "--var", "R", "--lo", "2", "--hi", "1", "--count", "3"],
        ["optimize", "--a", "300km", "--method", "iterative"],
        ["outage", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_invalid_input_exit_code(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_INVALID
    assert err.startswith("error:")
    assert out == ""


def test_argparse_errors_exit_invalid(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["outage", "--bogus"])
    assert exc.value.code == EXIT_INVALID


def test_numerical_failure_exit_code(capsys):
    # the huge line-of-sight power of fhs-paper needs more series terms than allowed
    code, _, err = run(["outage", "--fading", "fhs-paper", "--R", "8"], capsys)
    assert code == EXIT_NUMERICAL
    assert "ConvergenceNotReached" in err


def test_json_round_trip(tmp_path, capsys):
    argv = ["outage", *SCENARIO, "--g=-3dB", "--R", "0.5", "1", "--format", "json"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert len(doc["rows"]) == 2
    path = tmp_path / "out.json"
    path.write_text(out, encoding="utf-8")
    code, again, _ = run(["outage", "--config", str(path), "--R", "0.5", "1", "--format", "json"], capsys)
    assert code == EXIT_OK
    assert json.loads(again) == doc


def test_out_file(tmp_path, capsys):
    path = tmp_path / "g.csv"
    code, out, _ = run(["geometry", "--out", str(path)], capsys)
    assert code == EXIT_OK
    assert out == ""
    assert path.read_text(encoding="utf-8").startswith("theta_min_deg,")


def test_db_and_linear_inputs_agree(capsys):
    _, a, _ = run(["throughput", *SCENARIO, "--g=-3dB", "--R", "1"], capsys)
    _, b, _ = run(["throughput", *SCENARIO, "--g", repr(10 ** -0.3), "--R", "1"], capsys)
    ra, rb = rows_of(a)[0], rows_of(b)[0]
    for k in ra:
        assert float(ra[k]) == pytest.approx(float(rb[k]), rel=1e-12, abs=1e-15)


def test_degree_and_radian_inputs_agree(capsys):
    _, a, _ = run(["outage", "--theta-min", "15deg"], capsys)
    _, b, _ = run(["outage", "--theta-min", f"{15 * 3.141592653589793 / 180!r}rad"], capsys)
    assert float(rows_of(a)[0]["p_out"]) == pytest.approx(float(rows_of(b)[0]["p_out"]), rel=1e-12)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "leo_outage", "case-probs", "--S", "10"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("model,p_ml,p_sl,p_inv,p_vis")
