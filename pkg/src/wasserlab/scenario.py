"""Scenario configuration and execution.

A scenario is a JSON document naming a model, endpoint data, parameters,
an engine, a time window and the checks to run.  ``run_scenario`` builds
model, path(s) and entropy series, runs the checks and returns a report
dictionary; ``write_outputs`` stores it as report.json plus CSV series.
"""

import copy
import csv
import json
import math
import traceback
from importlib import resources
from pathlib import Path

import numpy as np

from . import lab
from .densities import density_on_grid, density_preset, phase_on_grid
from .entropy import build_series
from .geometry import BakryEmeryParams, Grid, build_model
from .transport import (closed_form_map, hopf_lax_evolve, interpolate_path,
                        model_gaussian_path, monotone_map, recover_phase)

ENGINES = ("closed_form", "quantile", "hopf_lax", "both", "model")
CHECKS = ("path_invariants", "edi", "epdi", "power_bound", "renyi", "sn", "sturm", "jacobian",
          "ij", "ent_infty", "w_entropy", "niw", "cross_validation")
DEFAULT_GENERATORS = ("xlogx", "power(2)", "power(1.5)", "power(0.5)")
CROSS_TOL = 5e-3


class ConfigError(ValueError):
    pass


def bundled_dir():
    return Path(str(resources.files("wasserlab") / "scenarios"))


def resolve_config_path(name):
    """A config path, or the stem of a bundled scenario."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (bundled_dir() / name, bundled_dir() / f"{name}.json"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no scenario {name!r}")


def load_config(path):
    path = resolve_config_path(path)
    with open(path) as fh:
        cfg = json.load(fh)
    cfg.setdefault("name", path.stem)
    return cfg


def _number(v):
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def apply_overrides(cfg, grid_size=None, time_samples=None, tolerance=None, engine=None,
                    w_sign=None):
    cfg = copy.deepcopy(cfg)
    if grid_size is not None:
        cfg.setdefault("model", {})["size"] = int(grid_size)
    if time_samples is not None:
        win = list(cfg.get("time_window", [0.0, 1.0, 65]))
        cfg["time_window"] = [win[0], win[1], int(time_samples)]
    if tolerance is not None:
        cfg["tolerance"] = float(tolerance)
    if engine is not None:
        cfg["engine"] = engine
    if w_sign is not None:
        cfg["w_sign"] = w_sign
    return cfg


def validate_config(cfg):
    for key in ("model", "endpoints", "params"):
        if key not in cfg:
            raise ConfigError(f"config is missing {key!r}")
    engine = cfg.get("engine", "quantile")
    if engine not in ENGINES:
        raise ConfigError(f"unknown engine {engine!r}")
    ends = cfg["endpoints"]
    if engine == "model":
        pass
    elif "rho0" not in ends:
        raise ConfigError("endpoints need rho0")
    elif "rho1" not in ends and "phi0" not in ends:
        raise ConfigError("endpoints need rho1 or phi0")
    if engine == "closed_form":
        for key in ("rho0", "rho1"):
            if key not in ends or density_preset(ends[key]) is None:
                raise ConfigError("the closed_form engine needs preset rho0 and rho1")
    unknown = set(cfg.get("checks", [])) - set(CHECKS)
    if unknown:
        raise ConfigError(f"unknown checks {sorted(unknown)}")
    t0, t1, samples = cfg.get("time_window", [0.0, 1.0, 65])
    if not t1 > t0 or int(samples) < 5:
        raise ConfigError("time_window must be [t0, t1, samples] with t1 > t0, samples >= 5")
    needs_positive = {"w_entropy", "niw"} & set(cfg.get("checks", []))
    if needs_positive and not t0 > 0:
        raise ConfigError("W-entropy checks need a window with t0 > 0")
    if cfg.get("w_sign", "plus") not in ("minus", "plus"):
        raise ConfigError("w_sign must be minus or plus")
    return cfg


def _params(cfg, K):
    p = cfg["params"]
    return BakryEmeryParams(_number(p.get("m", 1)), float(K), float(p.get("p", 2.0)),
                            _number(p.get("N", 2.0)))


def build_paths(cfg, model, params, times, window):
    """Paths keyed by engine name."""
    engine = cfg.get("engine", "quantile")
    ends = cfg["endpoints"]
    paths = {}
    if engine == "model":
        g = model.grid
        paths["model"] = model_gaussian_path(1, times, Grid(g.a, g.b, g.size), params)
        return paths
    rho0 = density_on_grid(model, ends["rho0"])
    tmap = None
    if "rho1" in ends:
        if engine == "closed_form":
            tmap = closed_form_map(model, ends["rho0"], ends["rho1"])
        elif engine in ("quantile", "both") or "phi0" not in ends:
            tmap = monotone_map(model, rho0, density_on_grid(model, ends["rho1"]))
    if engine in ("closed_form", "quantile") or (engine == "both" and tmap is not None):
        label = "closed_form" if engine == "closed_form" else "quantile"
        paths[label] = interpolate_path(model, tmap, times=times, params=params, window=window,
                                        engine=label)
    if engine in ("hopf_lax", "both"):
        if "phi0" in ends:
            phi0 = phase_on_grid(model, ends["phi0"])
        else:
            # initial phase of the quantile geodesic, in the window's time units
            phi0 = recover_phase(model, tmap, 0.0) / (window[1] - window[0])
        paths["hopf_lax"] = hopf_lax_evolve(model, phi0, rho0, times, params, window)
        if engine == "both" and "quantile" not in paths:
            last = paths["hopf_lax"].densities[-1]
            tq = monotone_map(model, rho0, last / model.integrate(last))
            paths["quantile"] = interpolate_path(model, tq, times=times, params=params,
                                                 window=window, engine="quantile")
    return paths


def _scalar_diagnostics(diag):
    out = {}
    for k, v in diag.items():
        if isinstance(v, (bool, np.bool_)):
            out[k] = bool(v)
        elif isinstance(v, (int, float, np.floating, np.integer)):
            out[k] = float(v)
        elif isinstance(v, str):
            out[k] = v
        elif v is None:
            out[k] = None
    return out


def _series_diagnostics(diag, n):
    return {k: np.asarray(v, dtype=float) for k, v in diag.items()
            if isinstance(v, np.ndarray) and v.shape == (n,)}


def report_entry(rep):
    return {"verdict": rep.verdict, "min_margin": rep.min_margin,
            "max_residual": rep.max_residual, "tolerance": rep.tolerance,
            "diagnostics": _scalar_diagnostics(rep.diagnostics)}


def _clean(x):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def run_checks(cfg, path, series, params, theta):
    """All requested CheckReports for one path, keyed by check id."""
    checks = cfg.get("checks", ["path_invariants", "edi", "epdi", "power_bound"])
    source = cfg.get("derivatives", "analytic")
    tols = dict(cfg.get("tolerances", {}))
    glob = cfg.get("tolerance")

    def tol(name, default=None):
        return tols.get(name, glob if glob is not None else default)

    grid_engine = path.engine not in ("closed_form", "model")
    base = lab.GRID_TOL if grid_engine else None
    reports = []
    for name in checks:
        if name == "path_invariants":
            reports.append(lab.check_path_invariants(path))
        elif name in ("edi", "epdi"):
            if not any(r.check_id == name for r in reports):
                reports.extend(r for r in lab.check_edi_epdi(series, params, theta, source,
                                                              tol(name, base))
                               if r.check_id in checks)
        elif name == "power_bound":
            reports.append(lab.check_power_bound(series, params, theta, source, tol(name, base)))
        elif name == "renyi":
            reports.extend(lab.check_renyi(series, params, path, source, tol(name, base)))
        elif name == "sn":
            reports.append(lab.check_sn(series, params, path, source, tol(name, base)))
        elif name == "sturm":
            for Np in cfg.get("sturm_Nprime", [params.N]):
                reports.append(lab.check_sturm(path, params, Np,
                                               tol(name, base or lab.CLOSED_FORM_TOL)))
        elif name == "jacobian":
            for N in cfg.get("jacobian_N", [params.N]):
                reports.append(lab.check_jacobian(path, params, N, tol(name, lab.GRID_TOL)))
        elif name == "ij":
            for N in cfg.get("jacobian_N", [params.N]):
                reports.append(lab.identity_ij(path, params, N, tol(name, 1e-5)))
        elif name == "ent_infty":
            reports.append(lab.check_ent_infty(series, params, theta, cfg.get("ent_generator"),
                                               source, tol(name, base)))
        elif name in ("w_entropy", "niw"):
            if not any(r.check_id == "w_entropy" for r in reports) or name == "w_entropy":
                w, wrep = lab.w_entropy_profile(series, path, params, cfg.get("w_sign", "plus"),
                                                tol=tol("w_entropy", lab.GRID_TOL))
            if name == "w_entropy":
                reports.append(wrep)
            else:
                reports.append(lab.check_niw(series, w, params, tol("niw", lab.NIW_TOL)))
    return reports


def _cross_validation(paths):
    a, b = paths["quantile"], paths["hopf_lax"]
    w = a.model.mu_weights
    dist = np.array([float(np.dot(w, np.abs(a.densities[k] - b.densities[k])))
                     for k in range(len(a.times))])
    return lab.make_report("cross_validation", a.times, -dist, CROSS_TOL, residual=dist,
                           relation="L1(rho_quantile, rho_hopf_lax)")


def prepare(cfg):
    """Model, paths and entropy series for a config.

    Returns a list of (label, path, params, series), one per engine path,
    with K resolved when the config asks for "auto".
    """
    cfg = validate_config(copy.deepcopy(cfg))
    model = build_model(cfg["model"])
    t0, t1, samples = cfg.get("time_window", [0.0, 1.0, 65])
    window = (float(t0), float(t1))
    times = np.linspace(window[0], window[1], int(samples))
    K_cfg = cfg["params"].get("K", 0.0)
    params = _params(cfg, 0.0 if K_cfg == "auto" else K_cfg)
    params.validate(model, renyi="renyi" in cfg.get("checks", []))
    paths = build_paths(cfg, model, params, times, window)
    gens = list(cfg.get("generators", DEFAULT_GENERATORS))
    if cfg.get("ent_generator") and cfg["ent_generator"] not in gens:
        gens.append(cfg["ent_generator"])
    out = []
    for label, path in paths.items():
        if cfg.get("representation"):
            path = path.with_representation(cfg["representation"])
        params_k = params.with_K(lab.infer_K(path, params)) if K_cfg == "auto" else params
        out.append((label, path, params_k, build_series(model, path, params_k, gens)))
    return out


def run_scenario(cfg):
    """Execute one scenario.  Returns (report dict, artifacts dict)."""
    try:
        cfg = validate_config(copy.deepcopy(cfg))
        prepared = prepare(cfg)
        result = {"scenario": cfg["name"], "engine": cfg.get("engine", "quantile"),
                  "checks": {}, "paths": {}}
        artifacts = {"series": {}, "margins": {}, "paths": {}}
        reports_all = []
        for label, path, params_k, series in prepared:
            theta = path.theta if path.theta > 0 else None
            reports = run_checks(cfg, path, series, params_k, theta)
            prefix = "" if len(prepared) == 1 else f"{label}/"
            for rep in reports:
                result["checks"][prefix + rep.check_id] = report_entry(rep)
            rig = None
            if cfg.get("rigidity"):
                target = next((r for r in reports if r.check_id == cfg["rigidity"]), None)
                if target is not None:
                    rig = lab.rigidity_probe(path, series, params_k, target)
            result["paths"][label] = {"theta": float(path.theta), "K": params_k.K,
                                      "m": params_k.m, "rigidity": rig,
                                      "representation": path.representation}
            artifacts["series"][label] = series.columns()
            artifacts["margins"][label] = (path.times, reports)
            if cfg.get("outputs", {}).get("path_csv"):
                artifacts["paths"][label] = path
            reports_all.extend(reports)
        paths = {label: path for label, path, _, _ in prepared}
        if "quantile" in paths and "hopf_lax" in paths:
            rep = _cross_validation(paths)
            result["checks"][rep.check_id] = report_entry(rep)
            reports_all.append(rep)
        result["status"] = "pass" if all(r.passed for r in reports_all) else "fail"
        return _clean(result), artifacts
    except Exception as exc:  # structured error report
        return {"scenario": cfg.get("name", "?") if isinstance(cfg, dict) else "?",
                "status": "error", "error": f"{type(exc).__name__}: {exc}",
                "traceback": traceback.format_exc()}, {}


def _write_csv(path, columns):
    names = list(columns)
    rows = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def write_outputs(out_dir, report, artifacts):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    for label, cols in artifacts.get("series", {}).items():
        _write_csv(out / f"series-{label}.csv", cols)
    for label, (times, reports) in artifacts.get("margins", {}).items():
        cols = {"t": times}
        for rep in reports:
            cols[f"{rep.check_id}:margin"] = rep.margin
            cols[f"{rep.check_id}:residual"] = rep.residual
            for k, v in _series_diagnostics(rep.diagnostics, len(times)).items():
                cols[f"{rep.check_id}:{k}"] = v
        _write_csv(out / f"margins-{label}.csv", cols)
    for label, path in artifacts.get("paths", {}).items():
        x = path.model.x
        cols = {"t": np.repeat(path.times, x.size), "x": np.tile(x, len(path.times)),
                "rho": path.densities.ravel(), "phi": path.phases.ravel()}
        _write_csv(out / f"path-{label}.csv", cols)
    return out


def load_manifest(path):
    """List of (config, source path) pairs from a manifest file.

    A manifest is a JSON list, or an object with a "scenarios" list; entries
    are file names (relative to the manifest or bundled stems) or inline
    configs.
    """
    path = resolve_config_path(path)
    with open(path) as fh:
        data = json.load(fh)
    entries = data.get("scenarios", []) if isinstance(data, dict) else data
    configs = []
    for e in entries:
        if isinstance(e, dict):
            configs.append(e)
            continue
        local = path.parent / e
        configs.append(load_config(local if local.exists() else e))
    return configs


def summary_table(reports):
    """Text table scenario x check -> verdict, min margin, max residual."""
    lines = [f"{'scenario':32s} {'check':28s} {'verdict':9s} {'min margin':>12s} "
             f"{'max residual':>12s}"]
    for rep in reports:
        if rep.get("status") == "error":
            lines.append(f"{rep['scenario']:32s} {'-':28s} {'error':9s} {rep['error']}")
            continue
        for cid, entry in rep["checks"].items():
            lines.append(f"{rep['scenario']:32s} {cid:28s} {entry['verdict']:9s} "
                         f"{_fmt(entry['min_margin']):>12s} {_fmt(entry['max_residual']):>12s}")
    return "\n".join(lines)


def _fmt(v):
    if isinstance(v, str):
        return v
    return f"{v:.3e}"
