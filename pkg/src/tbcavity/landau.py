"""Coherent-state thermodynamics of the cavity field.

With alpha = x + iy the diagonal coherent-state weight factorizes into a
Gaussian in y and exp(-beta phi(x)) in x, so

    Z = (pi beta omega0)^(-1/2) * integral exp(-beta phi(x)) dx.

Everything below works with log Z; at realistic chain lengths beta*phi is in
the thousands and Z itself overflows a double.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _roots
from .model import FermiSea, ModelParams, fermi_coefficients, landau_curvature, landau_gradient, landau_potential

log = logging.getLogger(__name__)

# integrand cut-off relative to the peak
TAIL_CUTOFF = 1e-16


@dataclass(frozen=True)
class CriticalPoint:
    x_star: float
    phi_value: float
    phi_curvature: float
    is_minimum: bool
    degenerate: bool = False


@dataclass(frozen=True)
class PartitionResult:
    beta: float
    log_Z_numeric: float
    log_Z_laplace: float
    free_energy: float
    dominant_x: float

    @property
    def Z_numeric(self) -> float:
        return _safe_exp(self.log_Z_numeric)

    @property
    def Z_laplace(self) -> float:
        return _safe_exp(self.log_Z_laplace)

    @property
    def relative_gap(self) -> float:
        """|Z_numeric - Z_laplace| / Z_numeric, evaluated in log space."""
        return abs(math.expm1(self.log_Z_laplace - self.log_Z_numeric))


def _safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _sea(params, sea):
    return fermi_coefficients(params) if sea is None else sea


def critical_points(params: ModelParams, sea: FermiSea | None = None) -> list[CriticalPoint]:
    """All stationary points of phi, sorted by x."""
    sea = _sea(params, sea)
    k = 2.0 * params.g / math.sqrt(params.L)
    p = 2.0 * params.omega0
    q = 2.0 * params.t_h * k * sea.amplitude

    def f(x):
        return float(landau_gradient(x, params, sea))

    def df(x):
        return float(landau_curvature(x, params, sea))

    out = []
    for root in _roots.find_roots(f, df, p, q, k, sea.phase):
        if root.degenerate:
            log.warning("degenerate critical point at x=%.17g", root.z)
        out.append(
            CriticalPoint(
                x_star=root.z,
                phi_value=float(landau_potential(root.z, params, sea)),
                phi_curvature=root.slope,
                is_minimum=root.slope > 0,
                degenerate=root.degenerate,
            )
        )
    return out


def _tail_half_width(params: ModelParams, sea: FermiSea, beta: float, phi_min: float) -> float:
    # phi(x) >= omega0 x^2 - 2 t_h R, so beyond this |x| the weight is below the cut-off
    floor = 2.0 * params.t_h * sea.amplitude
    excess = floor + phi_min - math.log(TAIL_CUTOFF) / beta
    return math.sqrt(max(excess, 0.0) / params.omega0)


def partition_function(params: ModelParams, sea: FermiSea | None = None, beta: float = 1.0) -> PartitionResult:
    """Numerical and Laplace estimates of the cavity partition function.

    The Laplace estimate sums one Gaussian term per local minimum,

        Z_laplace = sum_min sqrt(2) exp(-beta phi(x*)) / (beta sqrt(omega0 phi''(x*))),

    which is exact when phi is a parabola.
    """
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive, got {beta}")
    sea = _sea(params, sea)
    cps = critical_points(params, sea)
    minima = [cp for cp in cps if cp.is_minimum and not cp.degenerate]
    if any(cp.degenerate for cp in cps):
        warnings.warn("phi has a degenerate critical point; the Laplace estimate is unreliable", RuntimeWarning)
    if not minima:
        raise RuntimeError("no non-degenerate minimum of the Landau potential")
    best = min(minima, key=lambda cp: cp.phi_value)
    phi_min = best.phi_value

    half = _tail_half_width(params, sea, beta, phi_min)
    breaks = sorted({-half, half, *(cp.x_star for cp in cps if -half < cp.x_star < half)})

    def weight(x):
        return math.exp(-beta * (float(landau_potential(x, params, sea)) - phi_min))

    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, _ = integrate.quad(weight, a, b, epsabs=0.0, epsrel=1e-13, limit=500)
        total += val
    prefactor = -0.5 * math.log(math.pi * beta * params.omega0)
    log_num = prefactor + math.log(total) - beta * phi_min

    terms = np.array(
        [
            0.5 * math.log(2.0) - beta * (cp.phi_value - phi_min) - math.log(beta)
            - 0.5 * math.log(params.omega0 * cp.phi_curvature)
            for cp in minima
        ]
    )
    log_lap = float(np.logaddexp.reduce(terms)) - beta * phi_min

    return PartitionResult(
        beta=beta,
        log_Z_numeric=log_num,
        log_Z_laplace=log_lap,
        free_energy=-log_num / beta,
        dominant_x=best.x_star,
    )
