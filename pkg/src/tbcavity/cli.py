"""Command-line driver.

Every run resolves a single configuration (built-in defaults < JSON config
file < command-line flags), writes ``result.csv``, ``meta.json`` and
``summary.json`` into ``<output root>/<subcommand>-<config hash>/`` and
prints a one-line summary. Exit codes: 0 success, 2 invalid configuration,
3 convergence failure. Failures print a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .fock import NotConvergedError, TruncatedBasis, converged_ground_state, ground_state, number_state_band
from .meanfield import QuadratureState, energy, evolve, phase_region
from .model import FermiSeaMode, ModelParams
from .sweep import (
    SweepKind,
    SweepResult,
    bifurcation_scan,
    config_hash,
    distribution_result,
    format_value,
    partition_scan,
    phase_grid,
    scaling_result,
    scaling_scan,
)

OUTPUT_ROOT_ENV = "TBCAVITY_OUTPUT_ROOT"

SUBCOMMANDS = ("ground-state", "distribution", "bifurcation", "phase-diagram", "scaling", "partition", "evolve", "band")


class ConfigError(Exception):
    pass


# -- value parsing ----------------------------------------------------------

def parse_range(v) -> tuple[float, float, int]:
    """'start:stop:steps' or [start, stop, steps]."""
    parts = v.split(":") if isinstance(v, str) else list(v)
    if len(parts) != 3:
        raise ConfigError(f"range must be start:stop:steps, got {v!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad range {v!r}: {exc}") from None
    if steps < 2:
        raise ConfigError(f"range needs at least 2 steps, got {v!r}")
    return start, stop, steps


def _list(conv):
    def parse(v):
        items = v.split(",") if isinstance(v, str) else list(v)
        try:
            return [conv(x) for x in items if str(x).strip() != ""]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad list {v!r}: {exc}") from None

    return parse


def _scalar(conv):
    def parse(v):
        try:
            return conv(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value {v!r}: {exc}") from None

    return parse


def _bool(v):
    if isinstance(v, bool):
        return v
    if str(v).lower() in ("1", "true", "yes"):
        return True
    if str(v).lower() in ("0", "false", "no"):
        return False
    raise ConfigError(f"bad boolean {v!r}")


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError("not an integer")
    return int(f)


FLOAT, INT = _scalar(float), _scalar(_int)

COMMON = {
    "g": (FLOAT, 0.0),
    "k0": (FLOAT, 0.0),
    "L": (INT, 510),
    "omega0": (FLOAT, 1.0),
    "t_h": (FLOAT, 1.0),
    "fermi_mode": (_scalar(lambda v: FermiSeaMode(v).value), "continuum"),
}

# per-subcommand keys: name -> (parser, default)
SPECIFIC = {
    "ground-state": {"n_max": (INT, 30), "auto_escalate": (_bool, False), "n_cap": (INT, 960)},
    "distribution": {"n_max": (INT, 30)},
    "bifurcation": {"axis": (_scalar(str), "g"), "range": (parse_range, "0:3:61")},
    "phase-diagram": {"g": (parse_range, "0:3.5:64"), "k0": (parse_range, "0:6.283185307179586:64")},
    "scaling": {"sizes": (_list(_int), "60,120,240,480"), "n_start": (INT, 30), "n_cap": (INT, 960)},
    "partition": {"betas": (_list(float), "1,4,16,64")},
    "evolve": {"X0": (FLOAT, 1.0), "Y0": (FLOAT, 0.0), "t_end": (FLOAT, 100.0), "dt": (FLOAT, 1e-3)},
    "band": {"n_phot": (_list(_int), "0,1,2,5"), "k0": (parse_range, "0:6.283185307179586:129")},
}

RUNTIME = {"output_dir": (_scalar(str), None), "threads": (INT, None)}


def schema(sub: str) -> dict:
    keys = dict(COMMON)
    keys.update(SPECIFIC[sub])
    keys.update(RUNTIME)
    return keys


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tbcavity", description="Cavity + tight-binding chain simulations.", allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"tbcavity {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for sub in SUBCOMMANDS:
        p = subs.add_parser(sub, allow_abbrev=False)
        p.add_argument("--config", help="JSON config file (or a previous run's meta.json)")
        for key in schema(sub):
            flag = "--" + key.replace("_", "-")
            names = [flag] if flag == "--" + key else [flag, "--" + key]
            p.add_argument(*names, dest=key, default=None)
    return parser


def _load_config_file(path: str, sub: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "config" in data and isinstance(data["config"], dict) and "version" in data:
        data = data["config"]
    data = dict(data)
    file_sub = data.pop("subcommand", sub)
    if file_sub != sub:
        raise ConfigError(f"config is for {file_sub!r}, not {sub!r}")
    return data


def resolve_config(argv: list[str] | None = None) -> dict:
    """Parse ``argv`` into a validated, fully-populated config dict."""
    args = build_parser().parse_args(argv)
    sub = args.subcommand
    keys = schema(sub)
    raw = {k: default for k, (_, default) in keys.items()}
    if args.config:
        file_cfg = _load_config_file(args.config, sub)
        unknown = sorted(set(file_cfg) - set(keys))
        if unknown:
            raise ConfigError(f"unknown config keys for {sub}: {unknown}")
        raw.update(file_cfg)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    config = {"subcommand": sub}
    for k, (conv, _) in keys.items():
        config[k] = None if raw[k] is None else conv(raw[k])
    if sub == "bifurcation" and config["axis"] not in ("g", "k0"):
        raise ConfigError("axis must be 'g' or 'k0'")
    # range-valued g/k0 still need a scalar for the model; the scan overrides it
    scalar_g = config["g"] if not isinstance(config["g"], tuple) else config["g"][0]
    scalar_k0 = config["k0"] if not isinstance(config["k0"], tuple) else config["k0"][0]
    try:
        ModelParams(scalar_g, scalar_k0, config["L"], config["omega0"], config["t_h"], config["fermi_mode"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config


def _params(config: dict, **override) -> ModelParams:
    d = {k: config[k] for k in ("g", "k0", "L", "omega0", "t_h", "fermi_mode")}
    d.update(override)
    return ModelParams(**d)


def _jsonable_config(config: dict) -> dict:
    out = {}
    for k, v in config.items():
        if isinstance(v, tuple):
            v = f"{format_value(v[0])}:{format_value(v[1])}:{v[2]}"
        elif isinstance(v, list):
            v = ",".join(format_value(x) for x in v)
        out[k] = v
    return out


def run_hash(config: dict) -> str:
    stable = {k: v for k, v in _jsonable_config(config).items() if k not in RUNTIME}
    return config_hash(stable)


def output_directory(config: dict) -> Path:
    root = config.get("output_dir") or os.environ.get(OUTPUT_ROOT_ENV) or "runs"
    return Path(root) / f"{config['subcommand']}-{run_hash(config)}"


# -- subcommands ------------------------------------------------------------

def _run_ground_state(config, workers):
    params = _params(config)
    if config["auto_escalate"]:
        gs = converged_ground_state(params, n_start=config["n_max"], n_cap=config["n_cap"])
    else:
        gs = ground_state(TruncatedBasis(config["n_max"]), params)
    summary = gs.summary()
    result = _table(SweepKind.GROUND_STATE, list(summary), [summary])
    if not gs.converged:
        summary["error"] = "not converged"
    return result, summary, f"n_mean={format_value(gs.n_mean)} energy={format_value(gs.energy)} converged={format_value(gs.converged)}"


def _table(kind, columns, rows):
    return SweepResult(kind, columns, rows, {"kind": kind.value})


def _run_distribution(config, workers):
    params = _params(config)
    res = distribution_result(params, config["n_max"])
    summary = dict(res.meta["summary"])
    odd_absent = all(r["logP"] is None for r in res.rows if r["n"] % 2 == 1)
    summary["odd_entries_absent"] = odd_absent
    if not summary["converged"]:
        summary["error"] = "not converged"
    return res, summary, f"n_mean={format_value(summary['n_mean'])} odd_absent={format_value(odd_absent)}"


def _run_bifurcation(config, workers):
    start, stop, steps = config["range"]
    res = bifurcation_scan(config["axis"], start, stop, steps, _params(config), workers)
    counts = {}
    for row in res.rows:
        counts[row["scan_value"]] = counts.get(row["scan_value"], 0) + 1
    summary = {"points": steps, "max_branches": max(counts.values()), "min_branches": min(counts.values())}
    if res.meta.get("on_boundary"):
        summary["warning"] = "degenerate equilibria on the scan (bifurcation points)"
    return res, summary, f"branches {summary['min_branches']}..{summary['max_branches']} over {steps} points"


def _run_phase_diagram(config, workers):
    g_range, k0_range = config["g"], config["k0"]
    res = phase_grid(g_range, k0_range, _params(config, g=g_range[0], k0=k0_range[0]), workers)
    counts: dict[str, int] = {}
    for row in res.rows:
        counts[row["region_label"]] = counts.get(row["region_label"], 0) + 1
    summary = {"region_counts": dict(sorted(counts.items())), "cells": len(res.rows)}
    if any(r["on_boundary"] for r in res.rows):
        summary["warning"] = "some cells lie on a region boundary"
    line = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    return res, summary, f"regions {line}"


def _run_scaling(config, workers):
    params = _params(config)
    fit = scaling_scan(config["sizes"], params, config["n_start"], config["n_cap"], workers)
    res = scaling_result(fit, params, config["n_start"], config["n_cap"])
    summary = dict(res.meta["fit"])
    return res, summary, f"alpha={format_value(fit.alpha) or fit.status} r2={format_value(fit.r_squared)}"


def _run_partition(config, workers):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = partition_scan(config["betas"], _params(config), workers)
    summary = {
        "free_energy": {format_value(r["beta"]): r["free_energy"] for r in res.rows},
        "dominant_x": res.rows[-1]["dominant_x"],
    }
    if caught:
        summary["warning"] = str(caught[0].message)
    return res, summary, f"free_energy(beta={format_value(res.rows[-1]['beta'])})={format_value(res.rows[-1]['free_energy'])}"


def _run_evolve(config, workers):
    params = _params(config)
    traj = evolve(QuadratureState(config["X0"], config["Y0"]), params, t_end=config["t_end"], dt=config["dt"])
    E = energy(traj, params)
    rows = [{"t": t, "X": x, "Y": y, "energy": e} for t, x, y, e in zip(traj.t, traj.X, traj.Y, E)]
    drift = float(np.max(np.abs(E - E[0])) / max(abs(E[0]), 1e-300))
    region = phase_region(params)
    summary = {"relative_energy_drift": drift, "n_equilibria": region.n_equilibria, "region_label": region.region_label}
    return _table(SweepKind.EVOLVE, ["t", "X", "Y", "energy"], rows), summary, f"steps={len(traj) - 1} drift={drift:.3g}"


def _run_band(config, workers):
    params = _params(config, k0=0.0)
    ks = np.linspace(*config["k0"])
    rows = []
    for n in config["n_phot"]:
        e = number_state_band(n, ks, params)
        rows.extend({"n_phot": n, "k0": float(k), "e": float(v)} for k, v in zip(ks, e))
    summary = {"n_phot": config["n_phot"], "min_e": min(r["e"] for r in rows)}
    return _table(SweepKind.BAND, ["n_phot", "k0", "e"], rows), summary, f"{len(rows)} band points"


RUNNERS = {
    "ground-state": _run_ground_state,
    "distribution": _run_distribution,
    "bifurcation": _run_bifurcation,
    "phase-diagram": _run_phase_diagram,
    "scaling": _run_scaling,
    "partition": _run_partition,
    "evolve": _run_evolve,
    "band": _run_band,
}


def run(config: dict) -> tuple[int, Path]:
    """Execute a resolved config; returns (exit status, output directory)."""
    sub = config["subcommand"]
    workers = config.get("threads") or os.cpu_count() or 1
    out = output_directory(config)
    result, summary, line = RUNNERS[sub](config, workers)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "kind": sub,
        "config": _jsonable_config({k: v for k, v in config.items() if k not in RUNTIME}),
        "version": __version__,
    }
    (out / "result.csv").write_text(result.to_csv())
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=format_value) + "\n")
    status = 3 if summary.get("error") == "not converged" else 0
    print(f"{sub}: {line} -> {out}")
    return status, out


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        config = resolve_config(argv)
    except ConfigError as exc:
        return _fail(2, "config", str(exc))
    try:
        status, _ = run(config)
    except NotConvergedError as exc:
        return _fail(3, "not_converged", str(exc))
    except (ValueError, RuntimeError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    if status == 3:
        return _fail(3, "not_converged", "ground state not converged at the requested n_max")
    return status


if __name__ == "__main__":
    sys.exit(main())
