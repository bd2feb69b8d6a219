"""Command-line interface.

Subcommands
-----------
run       Compute rate series and populations for one parameter set.
sweep     Grid of runs over temperature / friction / shift / bias axes.
optimize  Scan the photon frequency for maximum equilibrium enhancement.
probe     One-shot JSON diagnostics for a configuration.
oracle    Debug helper: closed-form correlator vs Fock-space brute force.

Configuration is a JSON file selected with --config; individual command
line flags override file values.  All numeric output is written with 17
significant digits, so repeated runs of one configuration are
byte-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__
from . import _kernels
from .bath import GOASpec, goa_to_normal_modes
from .correlators import (
    DEFAULT_EXP_CAP,
    coupling_alpha,
    imt_gap_mean,
    imt_gap_variance,
    mean_photon_number,
    nuclear_corr,
    photon_factor,
)
from .dynamics import extend_with_plateau, propagate
from .model import (
    KB_MEV_PER_K,
    CavityMode,
    DisplacedHarmonicModel,
    Direction,
    ModelFormatError,
    ThermalEnv,
    load_model,
    reorganization_energy,
)
from .optimizer import optimize_omega_p
from .oracle import FockConfig, fock_nuclear_corr
from .rates import (
    VARIANTS,
    RateSeries,
    TimeGrid,
    _cavity_closure,
    _efgr_defaults,
    _kernel_rates,
    _series,
    efgr,
    imt,
    imt_cavity,
    lt_imt,
    marcus_rate,
    nefgr_free,
)

_MAX_CELLS_DEFAULT = 500
_SWEEP_AXES = ("temperature", "eta", "s", "omega_DA")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent CLI configuration."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _build_model(cfg: dict, lenient: bool):
    spec = cfg.get("model")
    if not isinstance(spec, dict):
        raise ConfigError("config needs a model object ({'goa': ...} or {'file': ...})")
    if ("goa" in spec) == ("file" in spec):
        raise ConfigError("model must contain exactly one of 'goa' or 'file'")
    if "goa" in spec:
        try:
            goa = GOASpec(**spec["goa"])
        except TypeError as exc:
            raise ConfigError(f"bad goa spec: {exc}") from exc
        return goa_to_normal_modes(goa), goa
    return load_model(spec["file"], lenient=lenient), None


def _k_b_for(model: DisplacedHarmonicModel) -> float:
    return KB_MEV_PER_K if model.units == "meV_fs" else 1.0


def _build_env(cfg: dict, model) -> ThermalEnv:
    has_beta = "beta" in cfg
    has_temp = "temperature" in cfg
    if has_beta == has_temp:
        raise ConfigError("config needs exactly one of 'beta' or 'temperature'")
    if has_beta:
        return ThermalEnv(beta=float(cfg["beta"]))
    return ThermalEnv.from_temperature(float(cfg["temperature"]), k_b=_k_b_for(model))


def _build_cavity(cfg: dict) -> CavityMode | None:
    spec = cfg.get("cavity")
    if spec is None:
        return None
    if not isinstance(spec, dict) or set(spec) != {"omega_p", "g_p"}:
        raise ConfigError("cavity must be an object with keys omega_p, g_p")
    return CavityMode(omega_p=float(spec["omega_p"]), g_p=float(spec["g_p"]))


def _build_grid(cfg: dict) -> TimeGrid:
    spec = cfg.get("grid", {})
    try:
        return TimeGrid(t_max=float(spec.get("t_max", 20.0)),
                        dt=float(spec.get("dt", 0.01)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_variants(cfg: dict, cavity) -> list[str]:
    req = cfg.get("variants")
    if req is None:
        req = list(VARIANTS) if cavity is not None else [
            v for v in VARIANTS if not v.startswith("C-")
        ]
    if isinstance(req, str):
        req = [s.strip() for s in req.split(",") if s.strip()]
    bad = [v for v in req if v not in VARIANTS]
    if bad:
        raise ConfigError(f"unknown variants {bad}; choose from {list(VARIANTS)}")
    if cavity is None:
        cav_req = [v for v in req if v.startswith("C-")]
        if cav_req:
            raise ConfigError(f"variants {cav_req} need a cavity block in the config")
    # Canonical order, duplicates dropped.
    return [v for v in VARIANTS if v in req]


def _ne_pair(model, env, direction, grid, cavity, cap):
    """NE and C-NE series sharing one correlator evaluation."""
    out = {}
    if cavity is None or cavity.g_p == 0.0:
        free = nefgr_free(model, env, direction, grid, cap)
        out["NE"] = free
        if cavity is not None:
            out["C-NE"] = _series(grid, free.values, "C-NE", direction)
        return out
    nodes = grid.nodes()
    phase = cavity.omega_p * nodes
    colfac = np.stack([
        np.ones_like(nodes, dtype=np.complex128),
        np.exp(1j * phase),
        np.exp(-1j * phase),
    ])
    red = _kernel_rates(model, env, direction, grid, colfac, cap)
    alpha, nbar = _cavity_closure(model, cavity, env)
    out["NE"] = _series(grid, red[0], "NE", direction)
    out["C-NE"] = _series(
        grid, red[0] + alpha * (nbar * red[1] + (nbar + 1.0) * red[2]),
        "C-NE", direction,
    )
    return out


def _const_series(grid, value, variant, direction) -> RateSeries:
    return _series(grid, np.full(grid.n_steps + 1, value), variant, direction)


def _compute_run(model, env, cavity, grid, variants, efgr_opts, cap):
    """All requested rate series, keyed (variant, direction)."""
    series: dict[tuple[str, str], RateSeries] = {}
    want = set(variants)
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        if want & {"NE", "C-NE"}:
            pair = _ne_pair(model, env, direction, grid,
                            cavity if "C-NE" in want else None, cap)
            for v in ("NE", "C-NE"):
                if v in want and v in pair:
                    series[(v, direction.value)] = pair[v]
        if want & {"EQ", "C-EQ"}:
            k0 = efgr(model, env, direction, cap=cap, **efgr_opts)
            if "EQ" in want:
                series[("EQ", direction.value)] = _const_series(grid, k0, "EQ", direction)
            if "C-EQ" in want:
                if cavity.g_p == 0.0:
                    kc = k0
                else:
                    kp = efgr(model, env, direction, shift=+cavity.omega_p,
                              cap=cap, **efgr_opts)
                    km = efgr(model, env, direction, shift=-cavity.omega_p,
                              cap=cap, **efgr_opts)
                    alpha = coupling_alpha(cavity, model.gamma, model.hbar)
                    nbar = mean_photon_number(env, cavity.omega_p, model.hbar)
                    kc = k0 + alpha * (nbar * kp + (nbar + 1.0) * km)
                series[("C-EQ", direction.value)] = _const_series(grid, kc, "C-EQ", direction)
        if "IMT" in want:
            series[("IMT", direction.value)] = imt(model, env, direction, grid)
        if "C-IMT" in want:
            series[("C-IMT", direction.value)] = imt_cavity(
                model, cavity, env, direction, grid, long_time=False)
        if "LT-IMT" in want:
            series[("LT-IMT", direction.value)] = lt_imt(model, env, direction, grid)
        if "C-LT-IMT" in want:
            series[("C-LT-IMT", direction.value)] = imt_cavity(
                model, cavity, env, direction, grid, long_time=True)
    return series


def _write_rates_csv(path, grid, variants, series):
    nodes = grid.nodes()
    cols = [(v, d) for v in variants for d in ("forward", "backward")]
    with open(path, "w") as fh:
        fh.write("t," + ",".join(f"{v}_{'fwd' if d == 'forward' else 'bwd'}"
                                 for v, d in cols) + "\n")
        for i, t in enumerate(nodes):
            row = [_fmt(t)] + [_fmt(series[c].values[i]) for c in cols]
            fh.write(",".join(row) + "\n")


def _write_populations_csv(path, variants, trajectories):
    grid = trajectories[variants[0]].grid
    nodes = grid.nodes()
    with open(path, "w") as fh:
        fh.write("t," + ",".join(f"P_D_{v}" for v in variants) + "\n")
        for i, t in enumerate(nodes):
            row = [_fmt(t)] + [_fmt(trajectories[v].p_donor[i]) for v in variants]
            fh.write(",".join(row) + "\n")


def _meta(model, env, cavity, grid, variants, efgr_opts, cap, extend_to, workers,
          goa=None, model_file=None):
    dtau_dflt, ceil_dflt = _efgr_defaults(model, env, [0.0])
    return {
        "version": __version__,
        "kernel_backend": _kernels.active_backend(),
        "units": model.units,
        "hbar": model.hbar,
        "k_b": _k_b_for(model),
        "beta": env.beta,
        "model": {
            "source": "goa" if goa is not None else "file",
            "goa": asdict(goa) if goa is not None else None,
            "file": model_file,
            "n_modes": model.n_modes,
            "omega_DA": model.omega_DA,
            "gamma": model.gamma,
            "e_ground": model.e_ground,
            "reorganization_energy": reorganization_energy(model),
        },
        "cavity": None if cavity is None else {"omega_p": cavity.omega_p,
                                               "g_p": cavity.g_p},
        "grid": {"t_max": grid.t_max, "dt": grid.dt, "n_steps": grid.n_steps},
        "variants": list(variants),
        "tau_quadrature": "closed newton-cotes rows (trapezoid, simpson, simpson+trapezoid tail)",
        "equilibrium_integral": {
            "scheme": "running cumulative simpson, window doubling",
            "rtol": efgr_opts.get("rtol", 1e-8),
            "probe_frac": efgr_opts.get("probe_frac", 0.1),
            "dtau": efgr_opts.get("dtau", dtau_dflt),
            "tau_ceiling": efgr_opts.get("tau_ceiling", ceil_dflt),
        },
        "overflow_cap": cap,
        "propagator": {"integrator": "rk4",
                       "midpoint_interpolation": "cubic 4-point lagrange",
                       "extend_with_plateau_to": extend_to},
        "workers": workers,
    }


def _execute_run(cfg: dict, out_dir: str, lenient: bool) -> dict:
    """Core of the run subcommand; returns an index-row summary."""
    model, goa = _build_model(cfg, lenient)
    if "omega_DA_override" in cfg:
        model = model.with_omega_da(float(cfg["omega_DA_override"]))
    env = _build_env(cfg, model)
    cavity = _build_cavity(cfg)
    grid = _build_grid(cfg)
    variants = _resolve_variants(cfg, cavity)
    if not variants:
        raise ConfigError("variants list is empty")
    efgr_opts = dict(cfg.get("efgr", {}))
    unknown = set(efgr_opts) - {"rtol", "dtau", "tau_ceiling", "probe_frac"}
    if unknown:
        raise ConfigError(f"unknown efgr options {sorted(unknown)}")
    cap = float(cfg.get("overflow_cap", DEFAULT_EXP_CAP))
    extend_to = cfg.get("extend_with_plateau")
    workers = cfg.get("workers")

    series = _compute_run(model, env, cavity, grid, variants, efgr_opts, cap)

    trajectories = {}
    for v in variants:
        kf = series[(v, "forward")]
        kb = series[(v, "backward")]
        if extend_to is not None:
            kf = extend_with_plateau(kf, float(extend_to))
            kb = extend_with_plateau(kb, float(extend_to))
        trajectories[v] = propagate(kf, kb)

    os.makedirs(out_dir, exist_ok=True)
    _write_rates_csv(os.path.join(out_dir, "rates.csv"), grid, variants, series)
    _write_populations_csv(os.path.join(out_dir, "populations.csv"), variants,
                           trajectories)
    meta = _meta(model, env, cavity, grid, variants, efgr_opts, cap, extend_to,
                 workers, goa=goa,
                 model_file=cfg["model"].get("file") if goa is None else None)
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")

    row = {}
    for v in variants:
        for d in ("forward", "backward"):
            tag = f"k_{v}_{'fwd' if d == 'forward' else 'bwd'}"
            row[tag] = series[(v, d)].plateau()
    for tag, num, den in (("enh_NE_fwd", "k_C-NE_fwd", "k_NE_fwd"),
                          ("enh_EQ_fwd", "k_C-EQ_fwd", "k_EQ_fwd")):
        if num in row and den in row and row[den] != 0.0:
            row[tag] = row[num] / row[den]
    return row


# ----------------------------------------------------------------- run

def _cmd_run(args) -> int:
    cfg = _load_json(args.config)
    _apply_run_overrides(cfg, args)
    _execute_run(cfg, args.out, args.lenient)
    print(f"run complete: {args.out}")
    return 0


def _apply_run_overrides(cfg: dict, args) -> None:
    if getattr(args, "t_max", None) is not None or getattr(args, "dt", None) is not None:
        grid = dict(cfg.get("grid", {}))
        if args.t_max is not None:
            grid["t_max"] = args.t_max
        if args.dt is not None:
            grid["dt"] = args.dt
        cfg["grid"] = grid
    if getattr(args, "beta", None) is not None:
        cfg["beta"] = args.beta
        cfg.pop("temperature", None)
    if getattr(args, "temperature", None) is not None:
        cfg["temperature"] = args.temperature
        cfg.pop("beta", None)
    if getattr(args, "omega_p", None) is not None or getattr(args, "g_p", None) is not None:
        cav = dict(cfg.get("cavity") or {})
        if args.omega_p is not None:
            cav["omega_p"] = args.omega_p
        if args.g_p is not None:
            cav["g_p"] = args.g_p
        if "omega_p" not in cav or "g_p" not in cav:
            raise ConfigError("cavity override needs both --omega-p and --g-p "
                              "unless the config already has a cavity block")
        cfg["cavity"] = cav
    if getattr(args, "variants", None) is not None:
        cfg["variants"] = args.variants
    if getattr(args, "workers", None) is not None:
        cfg["workers"] = args.workers
    if getattr(args, "extend_with_plateau", None) is not None:
        cfg["extend_with_plateau"] = args.extend_with_plateau


# --------------------------------------------------------------- sweep

def _sweep_cells(cfg: dict) -> list[dict]:
    axes_spec = cfg.get("axes")
    if not isinstance(axes_spec, dict) or not axes_spec:
        raise ConfigError("sweep config needs a non-empty 'axes' object")
    unknown = set(axes_spec) - set(_SWEEP_AXES)
    if unknown:
        raise ConfigError(f"unknown sweep axes {sorted(unknown)}; "
                          f"supported: {list(_SWEEP_AXES)}")
    axes = [(name, list(axes_spec[name])) for name in _SWEEP_AXES
            if name in axes_spec]
    for name, vals in axes:
        if not vals:
            raise ConfigError(f"sweep axis {name} is empty")

    omega_p_rules = cfg.get("omega_p_by_cell", [])

    def cell_cavity(assign):
        cav = dict(cfg.get("cavity") or {})
        for rule in omega_p_rules:
            keys = set(rule) - {"omega_p"}
            if all(k in assign and assign[k] == rule[k] for k in keys):
                cav["omega_p"] = rule["omega_p"]
        return cav or None

    base_model = cfg.get("model", {})
    needs_goa = any(name in ("eta", "s") for name, _ in axes)
    if needs_goa and "goa" not in base_model:
        raise ConfigError("sweep axes eta and s require a goa model")

    cells = []
    def rec(i, assign):
        if i == len(axes):
            cell = {k: v for k, v in cfg.items()
                    if k not in ("axes", "omega_p_by_cell")}
            cell["model"] = json.loads(json.dumps(base_model))
            for name, val in assign.items():
                if name == "temperature":
                    cell["temperature"] = val
                    cell.pop("beta", None)
                elif name in ("eta", "s"):
                    cell["model"]["goa"][name] = val
                elif name == "omega_DA":
                    if "goa" in cell["model"]:
                        cell["model"]["goa"]["omega_DA"] = val
                    else:
                        cell["omega_DA_override"] = val
            cav = cell_cavity(assign)
            if cav is not None:
                cell["cavity"] = cav
            cells.append({"assign": dict(assign), "config": cell})
            return
        name, vals = axes[i]
        for v in vals:
            assign[name] = v
            rec(i + 1, assign)
        del assign[name]
    rec(0, {})
    return cells


def _run_cell(payload):
    """Executed in a worker process; must stay picklable and top-level."""
    idx, cell, out_dir, lenient = payload
    cell_dir = os.path.join(out_dir, f"cell_{idx:04d}")
    try:
        row = _execute_run(cell["config"], cell_dir, lenient)
        return idx, "ok", "", row
    except Exception as exc:  # recorded per cell, sweep continues
        os.makedirs(cell_dir, exist_ok=True)
        msg = f"{type(exc).__name__}: {exc}"
        with open(os.path.join(cell_dir, "error.txt"), "w") as fh:
            fh.write(msg + "\n")
        return idx, "error", msg.replace("\n", " "), {}


def _cmd_sweep(args) -> int:
    cfg = _load_json(args.config)
    cells = _sweep_cells(cfg)
    max_cells = args.max_cells if args.max_cells is not None else _MAX_CELLS_DEFAULT
    if len(cells) > max_cells:
        raise ConfigError(
            f"sweep has {len(cells)} cells, above the cap {max_cells}; "
            "raise --max-cells to confirm"
        )
    os.makedirs(args.out, exist_ok=True)
    workers = args.workers or cfg.get("workers") or os.cpu_count() or 1
    payloads = [(i, cell, args.out, args.lenient) for i, cell in enumerate(cells)]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, payloads))
    else:
        results = [_run_cell(p) for p in payloads]

    rate_cols = [f"k_{v}_{d}" for v in VARIANTS for d in ("fwd", "bwd")]
    extra_cols = ["enh_NE_fwd", "enh_EQ_fwd"]
    axis_cols = [name for name in _SWEEP_AXES]
    with open(os.path.join(args.out, "index.csv"), "w") as fh:
        fh.write("cell," + ",".join(axis_cols) + ",omega_p,g_p,status,message,"
                 + ",".join(rate_cols + extra_cols) + "\n")
        n_err = 0
        for (idx, status, message, row), cell in zip(results, cells):
            assign = cell["assign"]
            cav = cell["config"].get("cavity") or {}
            vals = [f"cell_{idx:04d}"]
            vals += [_fmt(assign[a]) if a in assign else "" for a in axis_cols]
            vals += [_fmt(cav["omega_p"]) if "omega_p" in cav else ""]
            vals += [_fmt(cav["g_p"]) if "g_p" in cav else ""]
            vals += [status, message.replace(",", ";")]
            vals += [_fmt(row[c]) if c in row else "" for c in rate_cols + extra_cols]
            fh.write(",".join(vals) + "\n")
            n_err += status != "ok"
    print(f"sweep complete: {len(cells)} cells, {n_err} failed, index at "
          f"{os.path.join(args.out, 'index.csv')}")
    return 0


# ------------------------------------------------------------ optimize

def _cmd_optimize(args) -> int:
    cfg = _load_json(args.config)
    model, _ = _build_model(cfg, args.lenient)
    env = _build_env(cfg, model)
    opt = dict(cfg.get("optimize", {}))
    if args.g_p is not None:
        opt["g_p"] = args.g_p
    if args.method is not None:
        opt["method"] = args.method
    if args.bounds is not None:
        opt["bounds"] = args.bounds
    if args.n_scan is not None:
        opt["n_scan"] = args.n_scan
    if "g_p" not in opt:
        raise ConfigError("optimize needs g_p (config optimize.g_p or --g-p)")
    try:
        result = optimize_omega_p(
            model, env,
            g_p=float(opt["g_p"]),
            bounds=tuple(opt["bounds"]) if "bounds" in opt else None,
            method=opt.get("method", "marcus"),
            n_scan=int(opt.get("n_scan", 400)),
            rel_tol=float(opt.get("rel_tol", 1e-4)),
            efgr_opts=opt.get("efgr"),
        )
    except TypeError as exc:
        raise ConfigError(f"bad optimize options: {exc}") from exc
    os.makedirs(args.out, exist_ok=True)
    doc = {
        "omega_p_star": result.omega_p_star,
        "enhancement": result.enhancement,
        "method": result.method,
        "flags": list(result.flags),
        "g_p": float(opt["g_p"]),
        "version": __version__,
    }
    with open(os.path.join(args.out, "optimize.json"), "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(args.out, "scan.csv"), "w") as fh:
        fh.write("omega_p,enhancement\n")
        for w, f in result.scan:
            fh.write(f"{_fmt(w)},{_fmt(f)}\n")
    flag_note = f" flags={','.join(result.flags)}" if result.flags else ""
    print(f"optimum omega_p = {result.omega_p_star:.6g}, "
          f"enhancement = {result.enhancement:.6g}{flag_note}")
    return 0


# --------------------------------------------------------------- probe

def _cmd_probe(args) -> int:
    cfg = _load_json(args.config)
    model, _ = _build_model(cfg, args.lenient)
    env = _build_env(cfg, model)
    cavity = _build_cavity(cfg)
    grid = _build_grid(cfg)
    doc = {
        "version": __version__,
        "kernel_backend": _kernels.active_backend(),
        "units": model.units,
        "hbar": model.hbar,
        "beta": env.beta,
        "n_modes": model.n_modes,
        "omega_DA": model.omega_DA,
        "gamma": model.gamma,
        "reorganization_energy": reorganization_energy(model),
        "gap_variance": imt_gap_variance(model, env),
        "gap_mean_forward": {
            "t0": imt_gap_mean(model, Direction.FORWARD, 0.0),
            "t_max": imt_gap_mean(model, Direction.FORWARD, grid.t_max),
        },
        "gap_mean_backward": {
            "t0": imt_gap_mean(model, Direction.BACKWARD, 0.0),
            "t_max": imt_gap_mean(model, Direction.BACKWARD, grid.t_max),
        },
        "marcus_forward": marcus_rate(model, env, Direction.FORWARD),
        "marcus_backward": marcus_rate(model, env, Direction.BACKWARD),
    }
    if cavity is not None:
        doc["cavity"] = {
            "omega_p": cavity.omega_p,
            "g_p": cavity.g_p,
            "alpha": coupling_alpha(cavity, model.gamma, model.hbar),
            "mean_photon_number": mean_photon_number(env, cavity.omega_p, model.hbar),
            "photon_factor_tau0": photon_factor(cavity, model.gamma, env, 0.0,
                                                model.hbar).real,
        }
    if args.efgr:
        doc["efgr"] = {
            "forward": efgr(model, env, Direction.FORWARD),
            "backward": efgr(model, env, Direction.BACKWARD),
        }
    if args.t is not None:
        tau = args.tau if args.tau is not None else args.t
        val = nuclear_corr(model, env, Direction(args.direction), args.t, tau)
        doc["correlator"] = {"t": args.t, "tau": tau,
                             "re": val.real, "im": val.imag}
    json.dump(doc, sys.stdout, indent=1)
    print()
    return 0


# -------------------------------------------------------------- oracle

def _cmd_oracle(args) -> int:
    model = load_model(args.model, lenient=args.lenient)
    env = ThermalEnv(beta=args.beta)
    direction = Direction(args.direction)
    config = FockConfig(n_max=args.n_max)
    closed = nuclear_corr(model, env, direction, args.t, args.tau)
    brute = fock_nuclear_corr(model, env, direction, args.t, args.tau, config)
    doc = {
        "t": args.t,
        "tau": args.tau,
        "direction": direction.value,
        "n_max": args.n_max,
        "closed_form": {"re": closed.real, "im": closed.imag},
        "fock": {"re": brute.real, "im": brute.imag},
        "abs_diff": abs(closed - brute),
        "rel_diff_vs_gamma_sq": abs(closed - brute) / model.gamma ** 2,
    }
    json.dump(doc, sys.stdout, indent=1)
    print()
    return 0


# ---------------------------------------------------------------- main

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cavfgr",
        description="Golden-rule charge-transfer rates, cavity-free and "
                    "cavity-modified, for displaced harmonic models.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--lenient", action="store_true",
                        help="accept unknown keys in model files")

    run = sub.add_parser("run", help="rate series and populations for one setup")
    common(run)
    run.add_argument("--out", default="run_out", help="output directory")
    run.add_argument("--t-max", type=float, dest="t_max")
    run.add_argument("--dt", type=float)
    run.add_argument("--beta", type=float)
    run.add_argument("--temperature", type=float)
    run.add_argument("--omega-p", type=float, dest="omega_p")
    run.add_argument("--g-p", type=float, dest="g_p")
    run.add_argument("--variants", help="comma-separated variant list")
    run.add_argument("--workers", type=int)
    run.add_argument("--extend-with-plateau", type=float, dest="extend_with_plateau",
                     metavar="T", help="propagate populations to T with frozen rates")
    run.set_defaults(fn=_cmd_run)

    sweep = sub.add_parser("sweep", help="grid of runs over parameter axes")
    common(sweep)
    sweep.add_argument("--out", default="sweep_out")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--max-cells", type=int, dest="max_cells",
                       help=f"cell-count cap (default {_MAX_CELLS_DEFAULT})")
    sweep.set_defaults(fn=_cmd_sweep)

    opt = sub.add_parser("optimize", help="photon-frequency enhancement scan")
    common(opt)
    opt.add_argument("--out", default="optimize_out")
    opt.add_argument("--g-p", type=float, dest="g_p")
    opt.add_argument("--method", choices=("marcus", "quantum"))
    opt.add_argument("--bounds", type=float, nargs=2, metavar=("LO", "HI"))
    opt.add_argument("--n-scan", type=int, dest="n_scan")
    opt.set_defaults(fn=_cmd_optimize)

    probe = sub.add_parser("probe", help="one-shot JSON diagnostics")
    common(probe)
    probe.add_argument("--t", type=float, help="correlator outer time")
    probe.add_argument("--tau", type=float, help="correlator inner time")
    probe.add_argument("--direction", choices=("forward", "backward"),
                       default="forward")
    probe.add_argument("--efgr", action="store_true",
                       help="include equilibrium rate constants (may be slow)")
    probe.set_defaults(fn=_cmd_probe)

    orc = sub.add_parser("oracle", help="debug: closed form vs Fock brute force")
    orc.add_argument("--model", required=True, help="model JSON file (<= 2 modes)")
    orc.add_argument("--beta", type=float, required=True)
    orc.add_argument("--direction", choices=("forward", "backward"),
                     default="forward")
    orc.add_argument("--t", type=float, required=True)
    orc.add_argument("--tau", type=float, required=True)
    orc.add_argument("--n-max", type=int, default=60, dest="n_max")
    orc.add_argument("--lenient", action="store_true")
    orc.set_defaults(fn=_cmd_oracle)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ModelFormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
