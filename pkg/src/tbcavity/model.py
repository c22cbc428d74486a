"""Model parameters, Fermi-sea reduction and classical potentials.

The electron chain enters every calculation only through two numbers,

    C = sum_k cos(k),   S = sum_k sin(k)

taken over the occupied quasi-momenta, because the coupling term
``-2 t_h sum_k cos(A + k) n_k`` contracts to ``-2 t_h (C cos A - S sin A)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

TWO_PI = 2.0 * math.pi


class FermiSeaMode(str, enum.Enum):
    CONTINUUM = "continuum"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the chain + cavity system.

    ``k0`` is reduced to [0, 2pi) on construction. ``t_h = 0`` is accepted so
    that the matter term can be switched off entirely.
    """

    g: float = 0.0
    k0: float = 0.0
    L: int = 510
    omega0: float = 1.0
    t_h: float = 1.0
    fermi_mode: FermiSeaMode = FermiSeaMode.CONTINUUM

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not (math.isfinite(self.t_h) and self.t_h >= 0):
            raise ValueError(f"t_h must be non-negative, got {self.t_h}")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be non-negative, got {self.g}")
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"L must be an integer >= 2, got {self.L}")
        if not math.isfinite(self.k0):
            raise ValueError(f"k0 must be finite, got {self.k0}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "k0", float(self.k0) % TWO_PI)
        object.__setattr__(self, "fermi_mode", FermiSeaMode(self.fermi_mode))

    @property
    def vector_potential_scale(self) -> float:
        """lambda = g / sqrt(L), the prefactor of (a + a^dagger) in A."""
        return self.g / math.sqrt(self.L)

    @property
    def quadrature_scale(self) -> float:
        """c = sqrt(2) g / sqrt(L), so that A = c X."""
        return math.sqrt(2.0) * self.g / math.sqrt(self.L)

    def with_(self, **changes) -> ModelParams:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fermi_mode"] = self.fermi_mode.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> ModelParams:
        allowed = {"omega0", "t_h", "g", "k0", "L", "fermi_mode"}
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> ModelParams:
        return cls.from_dict(json.loads(text))


def quadrature_from_displacement(x):
    """Coherent-state displacement x -> field quadrature X = sqrt(2) x."""
    return np.sqrt(2.0) * x


def displacement_from_quadrature(X):
    return X / np.sqrt(2.0)


@dataclass(frozen=True)
class FermiSea:
    mode: FermiSeaMode
    k0: float
    C: float
    S: float
    occupied: tuple[float, ...] | None = field(default=None, repr=False)

    @property
    def amplitude(self) -> float:
        """R with C cos(u) - S sin(u) = R cos(u + phase)."""
        return math.hypot(self.C, self.S)

    @property
    def phase(self) -> float:
        return math.atan2(self.S, self.C)


def _wrap(k):
    """Reduce angles to (-pi, pi]."""
    w = np.mod(np.asarray(k, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(w == -math.pi, math.pi, w)


def discrete_half_filling(L: int, k0: float) -> np.ndarray:
    """The floor(L/2) lattice momenta 2 pi j / L closest to k0 on the circle.

    Equidistant pairs are ordered by signed offset, so the state just below
    k0 is taken before the one just above it.
    """
    momenta = _wrap(TWO_PI * np.arange(L) / L)
    offset = _wrap(momenta - k0)
    dist = np.round(np.abs(offset), 12)
    order = np.lexsort((offset, dist))
    chosen = momenta[order[: L // 2]]
    return np.sort(chosen)


def fermi_coefficients(params: ModelParams, mode: FermiSeaMode | str | None = None) -> FermiSea:
    """Reduce the half-filled Fermi sea to its (C, S) coefficients."""
    mode = params.fermi_mode if mode is None else FermiSeaMode(mode)
    if params.L < 2:
        raise ValueError("L must be >= 2")
    if mode is FermiSeaMode.CONTINUUM:
        scale = params.L / math.pi
        return FermiSea(mode, params.k0, scale * math.cos(params.k0), scale * math.sin(params.k0))
    occ = discrete_half_filling(params.L, params.k0)
    return FermiSea(
        mode,
        params.k0,
        float(np.sum(np.cos(occ))),
        float(np.sum(np.sin(occ))),
        tuple(float(k) for k in occ),
    )


def _sea(params: ModelParams, sea: FermiSea | None) -> FermiSea:
    return fermi_coefficients(params) if sea is None else sea


def matter_energy(A, params: ModelParams, sea: FermiSea | None = None):
    """-2 t_h [C cos(A) - S sin(A)] for a classical vector potential A."""
    sea = _sea(params, sea)
    return -2.0 * params.t_h * (sea.C * np.cos(A) - sea.S * np.sin(A))


def landau_potential(x, params: ModelParams, sea: FermiSea | None = None):
    """phi(x) = omega0 x^2 - 2 t_h [C cos(2 g x / sqrt L) - S sin(2 g x / sqrt L)].

    For the continuum sea this is omega0 x^2 - (2 L t_h / pi) cos(2 g x / sqrt L + k0).
    """
    u = 2.0 * params.g * x / math.sqrt(params.L)
    return params.omega0 * x * x + matter_energy(u, params, sea)


def landau_gradient(x, params: ModelParams, sea: FermiSea | None = None):
    sea = _sea(params, sea)
    k = 2.0 * params.g / math.sqrt(params.L)
    u = k * x
    return 2.0 * params.omega0 * x + 2.0 * params.t_h * k * (sea.C * np.sin(u) + sea.S * np.cos(u))


def landau_curvature(x, params: ModelParams, sea: FermiSea | None = None):
    sea = _sea(params, sea)
    k = 2.0 * params.g / math.sqrt(params.L)
    u = k * x
    return 2.0 * params.omega0 + 2.0 * params.t_h * k * k * (sea.C * np.cos(u) - sea.S * np.sin(u))


def mean_field_energy_surface(X, Y, params: ModelParams, sea: FermiSea | None = None):
    """(omega0/2)(X^2 + Y^2) - 2 t_h [C cos(cX) - S sin(cX)], c = sqrt(2) g / sqrt(L)."""
    c = params.quadrature_scale
    return 0.5 * params.omega0 * (X * X + Y * Y) + matter_energy(c * X, params, sea)
