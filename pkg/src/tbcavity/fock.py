"""Exact photon-sector ground states in a truncated Fock basis.

With the Fermi sea frozen, the photon Hamiltonian is

    H = omega0 (N + 1/2) - 2 t_h [C cos(A) - S sin(A)],   A = lambda (a + a^dagger),

lambda = g / sqrt(L). cos(A) and sin(A) are formed from the eigendecomposition
of the truncated (tridiagonal) A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .model import FermiSea, ModelParams, fermi_coefficients


class NotConvergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncatedBasis:
    n_max: int = 30

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def parity(self) -> np.ndarray:
        """Diagonal of the photon parity operator (-1)^n."""
        return 1.0 - 2.0 * (np.arange(self.dim) % 2)


@dataclass(frozen=True)
class FockGroundState:
    amplitudes: np.ndarray
    energy: float
    n_mean: float
    a_mean: float
    parity_odd_weight: float
    converged: bool
    n_max: int
    tail_mass: float

    @property
    def X_mean(self) -> float:
        return math.sqrt(2.0) * self.a_mean

    def summary(self) -> dict:
        return {
            "energy": self.energy,
            "n_mean": self.n_mean,
            "a_mean": self.a_mean,
            "parity_odd_weight": self.parity_odd_weight,
            "converged": self.converged,
            "n_max": self.n_max,
        }


def build_A(basis: TruncatedBasis, params: ModelParams | float) -> np.ndarray:
    """lambda (a + a^dagger); ``params`` may also be lambda itself."""
    lam = params.vector_potential_scale if isinstance(params, ModelParams) else float(params)
    off = lam * np.sqrt(np.arange(1, basis.dim, dtype=float))
    return np.diag(off, 1) + np.diag(off, -1)


def _eig_A(basis: TruncatedBasis, lam: float):
    off = lam * np.sqrt(np.arange(1, basis.dim, dtype=float))
    return linalg.eigh_tridiagonal(np.zeros(basis.dim), off)


def _parity_project(M: np.ndarray, even: bool) -> np.ndarray:
    # A anticommutes with parity, so cos(A) only links n, m of equal parity
    # and sin(A) only links opposite parity; zero what roundoff leaves behind.
    idx = np.arange(M.shape[0])
    same = (idx[:, None] + idx[None, :]) % 2 == 0
    return np.where(same if even else ~same, M, 0.0)


def matrix_cos_sin(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cos(A), sin(A) for a real symmetric A."""
    w, V = linalg.eigh(A)
    return _functions_from_eig(w, V, tridiagonal_fock=_is_fock_tridiagonal(A))


def _is_fock_tridiagonal(A: np.ndarray) -> bool:
    return bool(np.all(np.diag(A) == 0) and np.count_nonzero(np.triu(A, 2)) == 0)


def _functions_from_eig(w, V, tridiagonal_fock: bool = True):
    cosA = (V * np.cos(w)) @ V.T
    sinA = (V * np.sin(w)) @ V.T
    cosA = 0.5 * (cosA + cosA.T)
    sinA = 0.5 * (sinA + sinA.T)
    if tridiagonal_fock:
        cosA = _parity_project(cosA, even=True)
        sinA = _parity_project(sinA, even=False)
    return cosA, sinA


def fock_cos_sin(basis: TruncatedBasis, params: ModelParams | float) -> tuple[np.ndarray, np.ndarray]:
    lam = params.vector_potential_scale if isinstance(params, ModelParams) else float(params)
    w, V = _eig_A(basis, lam)
    return _functions_from_eig(w, V)


def build_hamiltonian(basis: TruncatedBasis, params: ModelParams, sea: FermiSea | None = None) -> np.ndarray:
    sea = fermi_coefficients(params) if sea is None else sea
    cosA, sinA = fock_cos_sin(basis, params)
    H = -2.0 * params.t_h * (sea.C * cosA - sea.S * sinA)
    H[np.diag_indices(basis.dim)] += params.omega0 * (np.arange(basis.dim) + 0.5)
    return 0.5 * (H + H.T)


def _observables(psi: np.ndarray):
    n = np.arange(len(psi))
    prob = psi * psi
    n_mean = float(prob @ n)
    a_mean = float(np.sum(np.sqrt(n[1:]) * psi[:-1] * psi[1:]))
    odd = float(prob[1::2].sum())
    return n_mean, a_mean, odd


def _parity_conserving(sea: FermiSea) -> bool:
    # sin(A) is the only parity-odd term; its weight is S
    return abs(sea.S) <= 1e-13 * max(abs(sea.C), 1.0)


def _lowest(basis: TruncatedBasis, params: ModelParams, sea: FermiSea):
    H = build_hamiltonian(basis, params, sea)
    if _parity_conserving(sea):
        # solve the even and odd sectors separately so the other sector's
        # amplitudes are exactly zero
        best = None
        for start in (0, 1):
            idx = np.arange(start, basis.dim, 2)
            w, v = linalg.eigh(H[np.ix_(idx, idx)], subset_by_index=[0, 0])
            if best is None or w[0] < best[0]:
                psi = np.zeros(basis.dim)
                psi[idx] = v[:, 0]
                best = (w[0], psi)
        w, psi = np.array([best[0]]), best[1]
    else:
        w, v = linalg.eigh(H, subset_by_index=[0, 0])
        psi = v[:, 0]
    psi = psi / np.linalg.norm(psi)
    if psi[np.argmax(np.abs(psi))] < 0:
        psi = -psi
    return float(w[0]), psi


def ground_state(
    basis: TruncatedBasis,
    params: ModelParams,
    sea: FermiSea | None = None,
    check_convergence: bool = True,
) -> FockGroundState:
    """Lowest eigenstate of H.

    Convergence is judged by re-solving at 2 n_max: |delta n_mean| < 1e-6 and
    tail weight |psi_nmax|^2 < 1e-10.
    """
    sea = fermi_coefficients(params) if sea is None else sea
    energy, psi = _lowest(basis, params, sea)
    n_mean, a_mean, odd = _observables(psi)
    tail = float(psi[-1] ** 2)
    converged = tail < 1e-10
    if check_convergence:
        _, psi2 = _lowest(TruncatedBasis(2 * basis.n_max), params, sea)
        converged = converged and abs(_observables(psi2)[0] - n_mean) < 1e-6
    return FockGroundState(psi, energy, n_mean, a_mean, odd, converged, basis.n_max, tail)


def converged_ground_state(
    params: ModelParams,
    sea: FermiSea | None = None,
    n_start: int = 30,
    n_cap: int = 960,
) -> FockGroundState:
    """Double n_max from ``n_start`` until converged; fail past ``n_cap``."""
    n_max = n_start
    while n_max <= n_cap:
        gs = ground_state(TruncatedBasis(n_max), params, sea)
        if gs.converged:
            return gs
        n_max *= 2
    raise NotConvergedError(f"ground state not converged with n_max <= {n_cap} for {params}")


def photon_distribution(gs: FockGroundState, floor: float = 1e-300) -> list[tuple[int, float, float | None]]:
    """Rows (n, P(n), log P(n)); log P is None where P(n) < floor."""
    prob = gs.amplitudes**2
    return [(n, float(p), math.log(p) if p >= floor else None) for n, p in enumerate(prob)]


def number_state_band(n_phot: int, k0_grid, params: ModelParams) -> np.ndarray:
    """Energy per site of |n_phot> x (continuum sea centred at each k0).

    e(n, k0) = [omega0 (n + 1/2) - 2 t_h (L/pi) cos(k0) <n|cos A|n>] / L;
    <n|sin A|n> vanishes by parity.
    """
    if n_phot < 0:
        raise ValueError("n_phot must be non-negative")
    basis = TruncatedBasis(max(4 * n_phot, 60))
    cosA, _ = fock_cos_sin(basis, params)
    diag = cosA[n_phot, n_phot]
    k0 = np.asarray(k0_grid, dtype=float)
    L = params.L
    return (params.omega0 * (n_phot + 0.5) - 2.0 * params.t_h * (L / math.pi) * np.cos(k0) * diag) / L
