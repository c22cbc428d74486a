"""Parameter scans built from the single-point solvers.

Scan points are independent; with ``workers > 1`` they run in a process pool
and are merged back in submission order, so output never depends on the
worker count.
"""
from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .fock import TruncatedBasis, converged_ground_state, ground_state, photon_distribution
from .landau import partition_function
from .meanfield import Stability, find_fixed_points, order_parameter, phase_region
from .model import ModelParams


class SweepKind(str, enum.Enum):
    BIFURCATION = "bifurcation"
    PHASE_GRID = "phase_grid"
    SCALING = "scaling"
    DISTRIBUTION = "distribution"
    PARTITION = "partition"
    GROUND_STATE = "ground_state"
    EVOLVE = "evolve"
    BAND = "band"


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=format_value).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class SweepResult:
    kind: SweepKind
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "kind": self.kind.value,
            "columns": self.columns,
            "rows": [{c: _jsonable(row.get(c)) for c in self.columns} for row in self.rows],
            "meta": self.meta,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @property
    def stem(self) -> str:
        return f"{self.kind.value}-{config_hash(self.meta)}"

    def write(self, directory: str | Path) -> tuple[Path, Path]:
        """Write ``<kind>-<hash>.csv`` and ``.json`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{self.stem}.csv"
        json_path = directory / f"{self.stem}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(self.to_json())
        return csv_path, json_path


def _jsonable(v):
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, np.generic):
        return v.item()
    return v


def _meta(kind: SweepKind, params: ModelParams, **config) -> dict:
    return {"kind": kind.value, "params": params.to_dict(), "config": config, "version": __version__}


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def linspace(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ValueError("a scan needs at least 2 steps")
    return np.linspace(start, stop, int(steps))


# -- bifurcation ------------------------------------------------------------

def _bifurcation_point(task):
    params, value = task
    rows = []
    for fp in find_fixed_points(params):
        rows.append(
            {
                "scan_value": value,
                "X_star": fp.X_star,
                "stability": fp.stability.value,
                "omega_fluct": fp.omega_fluct,
                "order_param_re": order_parameter(fp).real,
            }
        )
    return rows


def bifurcation_scan(
    axis: str,
    start: float,
    stop: float,
    steps: int,
    params: ModelParams,
    workers: int = 1,
) -> SweepResult:
    """All equilibria at each point of a scan in g or k0."""
    if axis not in ("g", "k0"):
        raise ValueError(f"axis must be 'g' or 'k0', got {axis!r}")
    values = linspace(start, stop, steps)
    tasks = [(params.with_(**{axis: float(v)}), float(v)) for v in values]
    rows = [row for chunk in _map(_bifurcation_point, tasks, workers) for row in chunk]
    meta = _meta(SweepKind.BIFURCATION, params, axis=axis, start=start, stop=stop, steps=int(steps))
    meta["on_boundary"] = any(r["stability"] == Stability.DEGENERATE.value for r in rows)
    return SweepResult(
        SweepKind.BIFURCATION,
        ["scan_value", "X_star", "stability", "omega_fluct", "order_param_re"],
        rows,
        meta,
    )


# -- phase grid -------------------------------------------------------------

def _phase_cell(task):
    params, g, k0 = task
    reg = phase_region(params)
    return {
        "g": g,
        "k0": k0,
        "n_equilibria": reg.n_equilibria,
        "n_centers": reg.n_centers,
        "region_label": reg.region_label,
        "on_boundary": reg.on_boundary,
    }


def phase_grid(
    g_range: tuple[float, float, int],
    k0_range: tuple[float, float, int],
    params: ModelParams,
    workers: int = 1,
) -> SweepResult:
    """Equilibrium counts on a (g, k0) grid; rows ordered g-major."""
    gs = linspace(*g_range)
    ks = linspace(*k0_range)
    tasks = [(params.with_(g=float(g), k0=float(k)), float(g), float(k)) for g in gs for k in ks]
    rows = _map(_phase_cell, tasks, workers)
    meta = _meta(
        SweepKind.PHASE_GRID,
        params,
        g_range=[float(g_range[0]), float(g_range[1]), int(g_range[2])],
        k0_range=[float(k0_range[0]), float(k0_range[1]), int(k0_range[2])],
    )
    return SweepResult(
        SweepKind.PHASE_GRID,
        ["g", "k0", "n_equilibria", "n_centers", "region_label", "on_boundary"],
        rows,
        meta,
    )


# -- finite-size scaling ----------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    sizes: tuple[int, ...]
    n_means: tuple[float, ...]
    alpha: float | None
    intercept: float | None
    r_squared: float | None
    status: str = "ok"
    n_maxes: tuple[int, ...] = ()

    @property
    def refused(self) -> bool:
        return self.alpha is None


NO_SUPERRADIANCE_FLOOR = 1e-12


def fit_power_law(sizes: Iterable[int], n_means: Iterable[float]) -> ScalingFit:
    """Least-squares line through (ln L, ln <n>); the slope is alpha."""
    sizes = tuple(int(s) for s in sizes)
    n_means = tuple(float(n) for n in n_means)
    if len(sizes) < 3 or len(sizes) != len(n_means):
        raise ValueError("need at least 3 (L, <n>) pairs")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if any(n <= NO_SUPERRADIANCE_FLOOR for n in n_means):
        return ScalingFit(sizes, n_means, None, None, None, status="no superradiance")
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(n_means))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(sizes, n_means, float(slope), float(intercept), r2)


def _scaling_point(task):
    params, n_start, n_cap = task
    gs = converged_ground_state(params, n_start=n_start, n_cap=n_cap)
    return gs.n_mean, gs.n_max


def scaling_scan(
    sizes: Sequence[int],
    params: ModelParams,
    n_start: int = 30,
    n_cap: int = 960,
    workers: int = 1,
) -> ScalingFit:
    """<n> of the converged ground state for each L, and the fitted exponent."""
    tasks = [(params.with_(L=int(L)), n_start, n_cap) for L in sizes]
    out = _map(_scaling_point, tasks, workers)
    fit = fit_power_law(sizes, [n for n, _ in out])
    return ScalingFit(
        fit.sizes, fit.n_means, fit.alpha, fit.intercept, fit.r_squared, fit.status, tuple(m for _, m in out)
    )


def scaling_result(fit: ScalingFit, params: ModelParams, n_start: int = 30, n_cap: int = 960) -> SweepResult:
    rows = [
        {"L": L, "n_mean": n, "n_max": m}
        for L, n, m in zip(fit.sizes, fit.n_means, fit.n_maxes or (None,) * len(fit.sizes))
    ]
    meta = _meta(SweepKind.SCALING, params, sizes=list(fit.sizes), n_start=n_start, n_cap=n_cap)
    meta["fit"] = {"alpha": fit.alpha, "intercept": fit.intercept, "r_squared": fit.r_squared, "status": fit.status}
    return SweepResult(SweepKind.SCALING, ["L", "n_mean", "n_max"], rows, meta)


# -- single-point tables ----------------------------------------------------

def distribution_result(params: ModelParams, n_max: int = 30) -> SweepResult:
    gs = ground_state(TruncatedBasis(n_max), params)
    rows = [{"n": n, "P": p, "logP": lp} for n, p, lp in photon_distribution(gs)]
    meta = _meta(SweepKind.DISTRIBUTION, params, n_max=int(n_max))
    meta["summary"] = gs.summary()
    return SweepResult(SweepKind.DISTRIBUTION, ["n", "P", "logP"], rows, meta)


def format_big(log_value: float) -> str:
    """exp(log_value) in scientific notation, valid far beyond double range."""
    if not math.isfinite(log_value):
        return format_value(math.exp(log_value))
    e10 = log_value / math.log(10.0)
    exponent = math.floor(e10)
    mantissa = 10.0 ** (e10 - exponent)
    if mantissa >= 10.0:
        mantissa /= 10.0
        exponent += 1
    return f"{mantissa:.16f}e{exponent:+d}"


def _partition_point(task):
    params, beta = task
    return partition_function(params, beta=beta)


def partition_scan(betas: Sequence[float], params: ModelParams, workers: int = 1) -> SweepResult:
    results = _map(_partition_point, [(params, float(b)) for b in betas], workers)
    rows = [
        {
            "beta": r.beta,
            "Z_numeric": format_big(r.log_Z_numeric),
            "Z_laplace": format_big(r.log_Z_laplace),
            "free_energy": r.free_energy,
            "dominant_x": r.dominant_x,
            "log_Z_numeric": r.log_Z_numeric,
            "log_Z_laplace": r.log_Z_laplace,
        }
        for r in results
    ]
    meta = _meta(SweepKind.PARTITION, params, betas=[float(b) for b in betas])
    return SweepResult(
        SweepKind.PARTITION,
        ["beta", "Z_numeric", "Z_laplace", "free_energy", "dominant_x", "log_Z_numeric", "log_Z_laplace"],
        rows,
        meta,
    )


def rerun(meta: dict, workers: int = 1) -> SweepResult:
    """Re-execute a sweep from the ``meta`` block of an earlier result."""
    kind = SweepKind(meta["kind"])
    params = ModelParams.from_dict(meta["params"])
    cfg = meta["config"]
    if kind is SweepKind.BIFURCATION:
        return bifurcation_scan(cfg["axis"], cfg["start"], cfg["stop"], cfg["steps"], params, workers)
    if kind is SweepKind.PHASE_GRID:
        return phase_grid(tuple(cfg["g_range"]), tuple(cfg["k0_range"]), params, workers)
    if kind is SweepKind.SCALING:
        fit = scaling_scan(cfg["sizes"], params, cfg["n_start"], cfg["n_cap"], workers)
        return scaling_result(fit, params, cfg["n_start"], cfg["n_cap"])
    if kind is SweepKind.DISTRIBUTION:
        return distribution_result(params, cfg["n_max"])
    return partition_scan(cfg["betas"], params, workers)
