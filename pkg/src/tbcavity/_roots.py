"""Bracket-and-bisect for residuals of the form  p*z + q*sin(k*z + delta).

Both the mean-field fixed-point condition and the Landau critical-point
condition have this shape. Its derivative ``p + q*k*cos(k*z + delta)``
vanishes at points known in closed form, and between two such points the
residual is monotone, so every monotone piece holds at most one root and a
sign check on its ends brackets it exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Root:
    z: float
    slope: float
    degenerate: bool


def search_half_width(p: float, q: float, multiplier: float = 1.5) -> float:
    """Roots satisfy |p z| = |q sin(...)| <= |q|, so none lie beyond |q|/p."""
    return multiplier * abs(q) / p


def monotone_breakpoints(p: float, q: float, k: float, delta: float, half_width: float) -> np.ndarray:
    """Zeros of the residual's derivative inside [-half_width, half_width]."""
    qk = q * k
    if qk == 0.0 or half_width == 0.0:  # also catches underflow
        return np.empty(0)
    ratio = -p / qk
    if abs(ratio) >= 1.0:
        return np.empty(0)
    theta = math.acos(ratio)
    lo, hi = k * -half_width + delta, k * half_width + delta
    if lo > hi:
        lo, hi = hi, lo
    n_lo = math.floor((lo - theta) / (2 * math.pi)) - 1
    n_hi = math.ceil((hi + theta) / (2 * math.pi)) + 1
    n = np.arange(n_lo, n_hi + 1)
    phases = np.concatenate([theta + 2 * math.pi * n, -theta + 2 * math.pi * n])
    z = (phases - delta) / k
    return np.sort(z[np.abs(z) < half_width])


def bisect(f: Callable[[float], float], a: float, b: float, fa: float, fb: float) -> float:
    """Bisect a strict sign change down to adjacent floating-point numbers."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    for _ in range(2000):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return a if abs(fa) <= abs(fb) else b


def find_roots(
    f: Callable[[float], float],
    df: Callable[[float], float],
    p: float,
    q: float,
    k: float,
    delta: float,
    multiplier: float = 1.5,
    dedup_rel: float = 1e-8,
    degenerate_slope: float = 1e-10,
) -> list[Root]:
    """All roots of ``f(z) = p z + q sin(k z + delta)`` in increasing order.

    ``f`` and ``df`` are the residual and its derivative as evaluated by the
    caller; ``p, q, k, delta`` only place the brackets.
    """
    half_width = search_half_width(p, q, multiplier)
    if half_width == 0.0 or k == 0.0:
        # residual is p z + q sin(delta): a single linear root
        z = -q * math.sin(delta) / p if k == 0.0 else 0.0
        s = float(df(z))
        return [Root(z, s, abs(s) < degenerate_slope)]

    nodes = np.concatenate([[-half_width], monotone_breakpoints(p, q, k, delta, half_width), [half_width]])
    values = [float(f(z)) for z in nodes]
    found: list[float] = []
    for i, (z, v) in enumerate(zip(nodes, values)):
        if v == 0.0:
            found.append(float(z))
        elif 0 < i < len(nodes) - 1 and abs(v) < 1e-9 * max(1.0, abs(p * z)):
            # near-tangency without a crossing on either side
            if (v > 0) == (values[i - 1] > 0) == (values[i + 1] > 0) and values[i - 1] != 0 != values[i + 1]:
                found.append(float(z))
    for a, b, fa, fb in zip(nodes[:-1], nodes[1:], values[:-1], values[1:]):
        if fa != 0.0 and fb != 0.0 and (fa < 0.0) != (fb < 0.0):  # products can underflow
            found.append(bisect(f, float(a), float(b), fa, fb))

    tol = dedup_rel * half_width
    roots: list[Root] = []
    for z in sorted(found):
        if roots and abs(z - roots[-1].z) < tol:
            continue
        s = float(df(z))
        roots.append(Root(z, s, abs(s) < degenerate_slope))
    return roots
