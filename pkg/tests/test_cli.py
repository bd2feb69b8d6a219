"""Command-line interface: run, sweep, optimize, probe, oracle."""
import csv
import json
import os

import numpy as np
import pytest

from cavfgr import save_model
from cavfgr.cli import main
from util import single_mode_model, two_mode_model

GOA_BLOCK = {
    "Omega": 0.5, "y0": 1.0, "eta": 1.0, "omega_c": 1.0,
    "n_secondary": 60, "omega_DA": 0.0, "gamma": 1.0, "s": 1.0,
}


def _write_cfg(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run_cfg(extra=None):
    doc = {
        "model": {"goa": dict(GOA_BLOCK)},
        "temperature": 1.0,
        "grid": {"t_max": 2.0, "dt": 0.05},
        "cavity": {"omega_p": 0.961, "g_p": 1.0},
    }
    doc.update(extra or {})
    return doc


def test_run_all_variants_and_determinism(tmp_path):
    cfg = _write_cfg(tmp_path, "run.json", _run_cfg())
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", "--config", cfg, "--out", out1]) == 0
    assert main(["run", "--config", cfg, "--out", out2]) == 0

    for fname in ("rates.csv", "populations.csv", "meta.json"):
        b1 = open(os.path.join(out1, fname), "rb").read()
        b2 = open(os.path.join(out2, fname), "rb").read()
        assert b1 == b2, f"{fname} not byte-reproducible"

    with open(os.path.join(out1, "rates.csv")) as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    assert header[0] == "t"
    for v in ("NE", "C-NE", "EQ", "C-EQ", "IMT", "C-IMT", "LT-IMT", "C-LT-IMT"):
        assert f"{v}_fwd" in header and f"{v}_bwd" in header
    assert len(rows) == 1 + 41  # header + nodes of t_max=2, dt=0.05

    with open(os.path.join(out1, "populations.csv")) as fh:
        prows = list(csv.reader(fh))
    assert prows[0][0] == "t"
    assert prows[1][1:] == ["1"] * 8  # P_D(0) = 1 for every variant
    assert len(prows) == 1 + 41

    meta = json.load(open(os.path.join(out1, "meta.json")))
    assert meta["model"]["source"] == "goa"
    assert meta["grid"] == {"t_max": 2.0, "dt": 0.05, "n_steps": 40}
    assert meta["kernel_backend"] in ("compiled", "numpy")
    assert set(meta["equilibrium_integral"]) == {
        "scheme", "rtol", "probe_frac", "dtau", "tau_ceiling"}
    assert meta["cavity"] == {"omega_p": 0.961, "g_p": 1.0}
    assert len(meta["variants"]) == 8


def test_run_cavity_variant_without_cavity_fails(tmp_path):
    doc = _run_cfg()
    del doc["cavity"]
    doc["variants"] = ["NE", "C-NE"]
    cfg = _write_cfg(tmp_path, "bad.json", doc)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_run_default_variants_without_cavity(tmp_path):
    doc = _run_cfg()
    del doc["cavity"]
    cfg = _write_cfg(tmp_path, "free.json", doc)
    out = str(tmp_path / "free")
    assert main(["run", "--config", cfg, "--out", out]) == 0
    meta = json.load(open(os.path.join(out, "meta.json")))
    assert meta["variants"] == ["NE", "EQ", "IMT", "LT-IMT"]


def test_run_grid_and_cavity_overrides(tmp_path):
    doc = _run_cfg()
    cfg = _write_cfg(tmp_path, "ovr.json", doc)
    out = str(tmp_path / "ovr")
    assert main(["run", "--config", cfg, "--out", out, "--t-max", "1.0",
                 "--dt", "0.1", "--omega-p", "1.2", "--variants", "NE,C-NE"]) == 0
    meta = json.load(open(os.path.join(out, "meta.json")))
    assert meta["grid"]["t_max"] == 1.0
    assert meta["cavity"]["omega_p"] == 1.2
    assert meta["variants"] == ["NE", "C-NE"]


def test_run_extend_with_plateau(tmp_path):
    cfg = _write_cfg(tmp_path, "ext.json",
                     _run_cfg({"variants": ["NE"]}))
    out = str(tmp_path / "ext")
    assert main(["run", "--config", cfg, "--out", out,
                 "--extend-with-plateau", "4.0"]) == 0
    with open(os.path.join(out, "rates.csv")) as fh:
        n_rates = sum(1 for _ in fh) - 1
    with open(os.path.join(out, "populations.csv")) as fh:
        n_pops = sum(1 for _ in fh) - 1
    assert n_rates == 41
    assert n_pops == 81


def test_run_numerical_failure_exit_code(tmp_path):
    mpath = tmp_path / "two_mode.json"
    save_model(two_mode_model(), mpath)
    doc = {"model": {"file": str(mpath)}, "beta": 1.0,
           "grid": {"t_max": 1.0, "dt": 0.05}, "variants": ["EQ"]}
    cfg = _write_cfg(tmp_path, "eqfail.json", doc)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_run_rejects_bad_config(tmp_path):
    cfg = _write_cfg(tmp_path, "nomodel.json", {"beta": 1.0})
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    cfg = _write_cfg(tmp_path, "both.json",
                     _run_cfg({"beta": 1.0}))  # temperature and beta
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def _sweep_cfg(tmp_path, workers=1):
    doc = {
        "model": {"goa": dict(GOA_BLOCK)},
        "grid": {"t_max": 1.0, "dt": 0.05},
        "cavity": {"omega_p": 1.0, "g_p": 1.0},
        "variants": ["NE", "C-NE", "IMT"],
        "workers": workers,
        "axes": {"temperature": [1.0, 0.5], "s": [1.0, 3.0]},
        "omega_p_by_cell": [
            {"temperature": 0.5, "s": 3.0, "omega_p": 0.0},
        ],
    }
    return _write_cfg(tmp_path, "sweep.json", doc)


def test_sweep_grid_with_failing_cell(tmp_path):
    cfg = _sweep_cfg(tmp_path)
    out = str(tmp_path / "sw")
    assert main(["sweep", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "index.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    by_cell = {(float(r["temperature"]), float(r["s"])): r for r in rows}
    # The poisoned cell fails without sinking the sweep.
    bad = by_cell[(0.5, 3.0)]
    assert bad["status"] == "error"
    assert bad["k_NE_fwd"] == ""
    assert os.path.exists(os.path.join(out, f"{bad['cell']}", "error.txt"))
    for key, row in by_cell.items():
        if key == (0.5, 3.0):
            continue
        assert row["status"] == "ok"
        assert float(row["k_C-NE_fwd"]) != 0.0
        assert row["k_EQ_fwd"] == ""  # variant not requested
        cell_dir = os.path.join(out, row["cell"])
        assert os.path.exists(os.path.join(cell_dir, "rates.csv"))
        assert os.path.exists(os.path.join(cell_dir, "meta.json"))


def test_sweep_parallel_matches_serial(tmp_path):
    cfg1 = _sweep_cfg(tmp_path)
    out1 = str(tmp_path / "serial")
    assert main(["sweep", "--config", cfg1, "--out", out1]) == 0
    out2 = str(tmp_path / "parallel")
    assert main(["sweep", "--config", cfg1, "--out", out2, "--workers", "2"]) == 0
    b1 = open(os.path.join(out1, "index.csv"), "rb").read()
    b2 = open(os.path.join(out2, "index.csv"), "rb").read()
    assert b1 == b2


def test_sweep_cell_cap(tmp_path):
    cfg = _sweep_cfg(tmp_path)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x"),
                 "--max-cells", "3"]) == 2


def test_sweep_rejects_unknown_axis(tmp_path):
    doc = json.load(open(_sweep_cfg(tmp_path)))
    doc["axes"] = {"coupling": [1.0]}
    cfg = _write_cfg(tmp_path, "badsweep.json", doc)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_sweep_eta_axis_requires_goa(tmp_path):
    mpath = tmp_path / "file_model.json"
    save_model(single_mode_model(), mpath)
    doc = {"model": {"file": str(mpath)}, "beta": 1.0,
           "axes": {"eta": [0.5, 1.0]}}
    cfg = _write_cfg(tmp_path, "etasweep.json", doc)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_optimize_goa(tmp_path):
    doc = {"model": {"goa": dict(GOA_BLOCK)}, "temperature": 1.0,
           "optimize": {"n_scan": 60}}
    cfg = _write_cfg(tmp_path, "opt.json", doc)
    out = str(tmp_path / "opt")
    assert main(["optimize", "--config", cfg, "--out", out, "--g-p", "1.0"]) == 0
    doc = json.load(open(os.path.join(out, "optimize.json")))
    assert doc["method"] == "marcus"
    assert abs(doc["omega_p_star"] - 0.961) < 0.05
    assert doc["enhancement"] > 1.0
    with open(os.path.join(out, "scan.csv")) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["omega_p", "enhancement"]
    assert len(rows) == 1 + 60


def test_optimize_file_model(tmp_path):
    data = os.path.join(os.path.dirname(os.path.abspath(__import__("cavfgr").__file__)),
                        "data", "triad_synthetic.json")
    doc = {"model": {"file": data}, "temperature": 300.0,
           "optimize": {"g_p": 0.001, "n_scan": 40}}
    cfg = _write_cfg(tmp_path, "optfile.json", doc)
    out = str(tmp_path / "optfile")
    assert main(["optimize", "--config", cfg, "--out", out]) == 0
    res = json.load(open(os.path.join(out, "optimize.json")))
    assert np.isfinite(res["omega_p_star"])
    assert res["omega_p_star"] > 0.0


def test_optimize_requires_g_p(tmp_path):
    doc = {"model": {"goa": dict(GOA_BLOCK)}, "temperature": 1.0}
    cfg = _write_cfg(tmp_path, "nogp.json", doc)
    assert main(["optimize", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_probe_json(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "probe.json", _run_cfg())
    assert main(["probe", "--config", cfg, "--t", "1.0", "--tau", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    for key in ("version", "kernel_backend", "beta", "n_modes",
                "reorganization_energy", "gap_variance", "gap_mean_forward",
                "gap_mean_backward", "marcus_forward", "marcus_backward",
                "cavity", "correlator"):
        assert key in doc, key
    assert doc["n_modes"] == 61
    assert doc["reorganization_energy"] == pytest.approx(0.5, rel=1e-10)
    assert doc["cavity"]["omega_p"] == 0.961
    assert doc["correlator"]["t"] == 1.0


def test_oracle_subcommand(tmp_path, capsys):
    mpath = tmp_path / "one_mode.json"
    save_model(single_mode_model(), mpath)
    assert main(["oracle", "--model", str(mpath), "--beta", "1.0",
                 "--t", "2.0", "--tau", "1.3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rel_diff_vs_gamma_sq"] < 1e-8
    assert doc["direction"] == "forward"


def test_oracle_subcommand_box_refusal(tmp_path, capsys):
    mpath = tmp_path / "wide.json"
    save_model(single_mode_model(omega_DA=0.0, r=0.5, s=0.0), mpath)
    # t beyond the certified horizon is a config error, not a crash.
    assert main(["oracle", "--model", str(mpath), "--beta", "1.0",
                 "--t", "50.0", "--tau", "1.0"]) == 2
