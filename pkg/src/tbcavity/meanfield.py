"""Classical quadrature dynamics of the cavity field.

Mean-field energy in terms of the quadratures (X, Y):

    E(X, Y) = (omega0/2)(X^2 + Y^2) - 2 t_h [C cos(cX) - S sin(cX)]

with c = sqrt(2) g / sqrt(L). Hamilton's equations give the flow

    dX/dt =  omega0 Y
    dY/dt = -omega0 X - 2 t_h c [C sin(cX) + S cos(cX)]

i.e. (dE/dY, -dE/dX).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import j0

from . import _roots
from .model import FermiSea, ModelParams, fermi_coefficients, mean_field_energy_surface

log = logging.getLogger(__name__)


class Stability(str, enum.Enum):
    CENTER = "center"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class QuadratureState:
    X: float
    Y: float
    t: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step samples of the mean-field flow, including the initial state."""

    t: np.ndarray
    X: np.ndarray
    Y: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i) -> QuadratureState:
        return QuadratureState(float(self.X[i]), float(self.Y[i]), float(self.t[i]))

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


@dataclass(frozen=True)
class FixedPoint:
    X_star: float
    stability: Stability
    omega_fluct: float
    basin_tag: int
    Y_star: float = 0.0


@dataclass(frozen=True)
class PhaseRegion:
    g: float
    k0: float
    n_equilibria: int
    n_centers: int
    region_label: str
    on_boundary: bool


@dataclass(frozen=True)
class WeakCouplingBound:
    g_max: float
    g_max_as_printed: float


@dataclass(frozen=True)
class EnergyDensityAverage:
    series: np.ndarray
    time_average: float
    bessel_prediction: float
    photon_estimate: float
    R0: float
    X_star: float


def _sea(params, sea):
    return fermi_coefficients(params) if sea is None else sea


def residual(X, params: ModelParams, sea: FermiSea | None = None):
    """dE/dX at Y = 0; its zeros are the equilibria."""
    sea = _sea(params, sea)
    c = params.quadrature_scale
    return params.omega0 * X + 2.0 * params.t_h * c * (sea.C * np.sin(c * X) + sea.S * np.cos(c * X))


def curvature(X, params: ModelParams, sea: FermiSea | None = None):
    """d^2E/dX^2."""
    sea = _sea(params, sea)
    c = params.quadrature_scale
    return params.omega0 + 2.0 * params.t_h * c * c * (sea.C * np.cos(c * X) - sea.S * np.sin(c * X))


def local_frequency_squared(X, params: ModelParams, sea: FermiSea | None = None):
    """omega^2(X) = omega0 * d^2E/dX^2; negative on the unstable side."""
    return params.omega0 * curvature(X, params, sea)


def flow(state: QuadratureState, params: ModelParams, sea: FermiSea | None = None) -> tuple[float, float]:
    return (
        params.omega0 * state.Y,
        -float(residual(state.X, params, sea)),
    )


def energy(trajectory: Trajectory, params: ModelParams, sea: FermiSea | None = None) -> np.ndarray:
    return mean_field_energy_surface(trajectory.X, trajectory.Y, params, sea)


def _n_steps(t_end: float, dt: float) -> tuple[int, float]:
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    n = max(1, math.ceil(t_end / dt - 1e-9))
    return n, t_end / n


def evolve(
    initial: QuadratureState,
    params: ModelParams,
    sea: FermiSea | None = None,
    t_end: float = 100.0,
    dt: float = 1e-3,
) -> Trajectory:
    """Classical RK4 with a constant step; the step is shrunk so the last
    sample lands exactly on ``t_end``."""
    if not (math.isfinite(initial.X) and math.isfinite(initial.Y) and math.isfinite(initial.t)):
        raise ValueError("initial state must be finite")
    sea = _sea(params, sea)
    n, h = _n_steps(t_end, dt)
    w0 = params.omega0
    c = params.quadrature_scale
    aC = 2.0 * params.t_h * c * sea.C
    aS = 2.0 * params.t_h * c * sea.S
    sin, cos = math.sin, math.cos

    def force(x):
        return -w0 * x - aC * sin(c * x) - aS * cos(c * x)

    X = np.empty(n + 1)
    Y = np.empty(n + 1)
    x, y = float(initial.X), float(initial.Y)
    X[0], Y[0] = x, y
    half = 0.5 * h
    for i in range(1, n + 1):
        k1x, k1y = w0 * y, force(x)
        k2x, k2y = w0 * (y + half * k1y), force(x + half * k1x)
        k3x, k3y = w0 * (y + half * k2y), force(x + half * k2x)
        k4x, k4y = w0 * (y + h * k3y), force(x + h * k3x)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        X[i], Y[i] = x, y
    t = initial.t + h * np.arange(n + 1)
    return Trajectory(t, X, Y)


def _residual_shape(params: ModelParams, sea: FermiSea):
    # residual(X) = omega0 X + 2 t_h c R sin(cX + phase)
    c = params.quadrature_scale
    return params.omega0, 2.0 * params.t_h * c * sea.amplitude, c, sea.phase


def basin_index(X_star: float, params: ModelParams, sea: FermiSea | None = None) -> int:
    """m such that c X* + phase is closest to m pi (the strong-coupling family)."""
    sea = _sea(params, sea)
    return int(round((params.quadrature_scale * X_star + sea.phase) / math.pi))


def fluctuation_frequency(fp_or_X, params: ModelParams, sea: FermiSea | None = None) -> float:
    """|omega| with omega^2 = omega0 d^2E/dX^2 at the fixed point.

    For a saddle this is the magnitude of the imaginary frequency.
    """
    X = fp_or_X.X_star if isinstance(fp_or_X, FixedPoint) else fp_or_X
    return math.sqrt(abs(float(local_frequency_squared(X, params, sea))))


def find_fixed_points(
    params: ModelParams,
    sea: FermiSea | None = None,
    search_window_multiplier: float = 1.5,
) -> list[FixedPoint]:
    """Every equilibrium (X*, 0) of the flow, sorted by X*.

    The residual is omega0 X plus a bounded sinusoid, so roots are confined to
    |X| <= (sinusoid amplitude)/omega0; the window is that bound times
    ``search_window_multiplier``. Brackets come from the closed-form zeros of
    the residual's derivative and are refined by bisection.
    """
    sea = _sea(params, sea)
    p, q, k, delta = _residual_shape(params, sea)
    c = params.quadrature_scale
    w0 = params.omega0
    aC = 2.0 * params.t_h * c * sea.C
    aS = 2.0 * params.t_h * c * sea.S
    bC = 2.0 * params.t_h * c * c * sea.C
    bS = 2.0 * params.t_h * c * c * sea.S
    sin, cos = math.sin, math.cos

    def r(x):
        return w0 * x + aC * sin(c * x) + aS * cos(c * x)

    def dr(x):
        return w0 + bC * cos(c * x) - bS * sin(c * x)

    roots = _roots.find_roots(r, dr, p, q, k, delta, multiplier=search_window_multiplier)
    points = []
    for root in roots:
        if root.degenerate:
            log.warning("degenerate equilibrium at X=%.17g (r'=%.3g): bifurcation point", root.z, root.slope)
            stab = Stability.DEGENERATE
        else:
            stab = Stability.CENTER if root.slope > 0 else Stability.SADDLE
        points.append(
            FixedPoint(
                X_star=root.z,
                stability=stab,
                omega_fluct=math.sqrt(abs(w0 * root.slope)),
                basin_tag=basin_index(root.z, params, sea),
            )
        )
    return points


def order_parameter(fp: FixedPoint) -> complex:
    """<a> = (X* + i Y*)/sqrt(2)."""
    return complex(fp.X_star, fp.Y_star) / math.sqrt(2.0)


def weak_coupling_bound(params: ModelParams) -> WeakCouplingBound:
    """Largest g keeping omega^2 >= 0 at the worst-case phase (cos = -1).

    ``g_max_as_printed`` is the bound (omega0/2) sqrt(pi L / t_h) in the form
    commonly quoted, kept for comparison.
    """
    if params.t_h == 0:
        return WeakCouplingBound(math.inf, math.inf)
    g_max = math.sqrt(math.pi * params.omega0 / (4.0 * params.t_h))
    printed = 0.5 * params.omega0 * math.sqrt(math.pi * params.L / params.t_h)
    return WeakCouplingBound(g_max, printed)


_REGION_LABELS = {1: "A", 3: "B", 5: "C", 7: "D"}


def region_label(n_equilibria: int) -> str:
    return _REGION_LABELS.get(n_equilibria, "Other")


def phase_region(params: ModelParams, sea: FermiSea | None = None) -> PhaseRegion:
    fps = find_fixed_points(params, sea)
    n = len(fps)
    return PhaseRegion(
        g=params.g,
        k0=params.k0,
        n_equilibria=n,
        n_centers=sum(fp.stability is Stability.CENTER for fp in fps),
        region_label=region_label(n),
        on_boundary=any(fp.stability is Stability.DEGENERATE for fp in fps),
    )


def evolve_fluctuation(
    trajectory: Trajectory,
    params: ModelParams,
    sea: FermiSea | None = None,
    deltaX0: float = 1.0,
    deltaV0: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate  dX'' + omega^2(X(t)) dX = 0  along a mean-field trajectory.

    Uses RK4 on the trajectory's own grid; X at half steps comes from the
    cubic Hermite interpolant built from X and dX/dt = omega0 Y at the nodes.
    Returns (deltaX, deltaV) sampled like the trajectory.
    """
    sea = _sea(params, sea)
    X, Y = trajectory.X, trajectory.Y
    n = len(X) - 1
    dX = np.empty(n + 1)
    dV = np.empty(n + 1)
    dX[0], dV[0] = deltaX0, deltaV0
    if n == 0:
        return dX, dV
    h = trajectory.dt
    Xdot = params.omega0 * Y
    Xmid = 0.5 * (X[:-1] + X[1:]) + h * (Xdot[:-1] - Xdot[1:]) / 8.0
    w2 = local_frequency_squared(X, params, sea)
    w2m = local_frequency_squared(Xmid, params, sea)
    x, v = float(deltaX0), float(deltaV0)
    half = 0.5 * h
    for i in range(n):
        a0, am, a1 = w2[i], w2m[i], w2[i + 1]
        k1x, k1v = v, -a0 * x
        k2x, k2v = v + half * k1v, -am * (x + half * k1x)
        k3x, k3v = v + half * k2v, -am * (x + half * k2x)
        k4x, k4v = v + h * k3v, -a1 * (x + h * k3x)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        dX[i + 1], dV[i + 1] = x, v
    return dX, dV


def bessel_j0(x):
    return j0(x)


def _enclosing_center(trajectory: Trajectory, fps: list[FixedPoint]) -> FixedPoint:
    lo, hi = float(trajectory.X.min()), float(trajectory.X.max())
    centers = [fp for fp in fps if fp.stability is Stability.CENTER]
    inside = [fp for fp in centers if lo - 1e-12 <= fp.X_star <= hi + 1e-12]
    if not inside:
        # zero-amplitude trajectories sit on the center itself
        mean = float(trajectory.X.mean())
        inside = [min(centers, key=lambda fp: abs(fp.X_star - mean))]
    if len(inside) > 1:
        raise ValueError("trajectory spans more than one potential well")
    center = inside[0]
    barriers = [fp.X_star for fp in fps if fp.stability is not Stability.CENTER]
    left = max((b for b in barriers if b < center.X_star), default=-math.inf)
    right = min((b for b in barriers if b > center.X_star), default=math.inf)
    if not (left < lo and hi < right):
        raise ValueError("trajectory spans more than one potential well")
    return center


def mean_energy_density(
    trajectory: Trajectory, params: ModelParams, sea: FermiSea | None = None
) -> EnergyDensityAverage:
    """Per-site energy along an oscillation about a single center, its time
    average over whole periods, and the J0-averaged prediction.

    The photon number is the harmonic estimate (X*^2 + R^2/2)/2, R being the
    X oscillation amplitude. The matter term per site is -(2 t_h/L)[C cos(cX)
    - S sin(cX)], i.e. -(2 t_h/pi) cos(cX + k0) for the continuum sea.
    """
    sea = _sea(params, sea)
    center = _enclosing_center(trajectory, find_fixed_points(params, sea))
    Xs = center.X_star
    c = params.quadrature_scale
    R = 0.5 * float(trajectory.X.max() - trajectory.X.min())
    n_photon = 0.5 * (Xs * Xs + 0.5 * R * R)
    pref = 2.0 * params.t_h / params.L

    def matter(u):
        return -pref * (sea.C * np.cos(u) - sea.S * np.sin(u))

    series = n_photon * params.omega0 + matter(c * trajectory.X)

    d = trajectory.X - Xs
    up = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0))
    if len(up) >= 2:
        i0, i1 = up[0], up[-1]
        # interpolate the crossing times so the window spans whole periods
        def crossing(i):
            frac = d[i] / (d[i] - d[i + 1])
            return trajectory.t[i] + frac * (trajectory.t[i + 1] - trajectory.t[i]), frac

        ta, fa = crossing(i0)
        tb, fb = crossing(i1)
        seg_t = np.concatenate([[ta], trajectory.t[i0 + 1 : i1 + 1], [tb]])
        ea = series[i0] + fa * (series[i0 + 1] - series[i0])
        eb = series[i1] + fb * (series[i1 + 1] - series[i1])
        seg_e = np.concatenate([[ea], series[i0 + 1 : i1 + 1], [eb]])
        average = float(trapezoid(seg_e, seg_t) / (tb - ta))
    else:
        average = float(trapezoid(series, trajectory.t) / (trajectory.t[-1] - trajectory.t[0]))

    R0 = c * R
    prediction = n_photon * params.omega0 + float(bessel_j0(R0)) * float(matter(c * Xs))
    return EnergyDensityAverage(series, average, prediction, n_photon, R0, Xs)
