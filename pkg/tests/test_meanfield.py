import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbcavity.meanfield import (
    FixedPoint,
    QuadratureState,
    Stability,
    curvature,
    energy,
    evolve,
    evolve_fluctuation,
    find_fixed_points,
    flow,
    fluctuation_frequency,
    local_frequency_squared,
    mean_energy_density,
    order_parameter,
    phase_region,
    residual,
    weak_coupling_bound,
)
from tbcavity.model import ModelParams, fermi_coefficients, mean_field_energy_surface

from oracles import bessel_average, central_difference, dense_sign_scan, second_difference

L = 510


def test_flow_trivial_cases():
    assert flow(QuadratureState(0.0, 0.0), ModelParams(g=1.62, k0=0.0, L=L)) == (0.0, 0.0)
    assert flow(QuadratureState(1.0, 0.0), ModelParams(g=0.0, k0=0.3, omega0=1.7)) == (0.0, -1.7)


@settings(max_examples=100)
@given(X=st.floats(-60, 60), Y=st.floats(-60, 60), g=st.floats(0, 3.5), k0=st.floats(0, 2 * math.pi))
def test_flow_is_symplectic_gradient(X, Y, g, k0):
    p = ModelParams(g=g, k0=k0, L=L)
    dX, dY = flow(QuadratureState(X, Y), p)
    dHdY = central_difference(lambda y: mean_field_energy_surface(X, y, p), Y)
    dHdX = central_difference(lambda x: mean_field_energy_surface(x, Y, p), X)
    assert dX == pytest.approx(dHdY, rel=1e-6, abs=1e-6 * max(1.0, abs(Y)))
    assert dY == pytest.approx(-dHdX, rel=1e-6, abs=1e-6 * max(1.0, abs(X), abs(dY)))


def test_flow_continuum_form():
    p = ModelParams(g=1.62, k0=4.13, L=L)
    X = 7.3
    expected = -X - (2 * 1.62 * math.sqrt(2 * L) / math.pi) * math.sin(math.sqrt(2) * 1.62 / math.sqrt(L) * X + 4.13)
    assert flow(QuadratureState(X, 0.0), p)[1] == pytest.approx(expected, rel=1e-12)


@given(X=st.floats(-60, 60), g=st.floats(0, 3.5), k0=st.floats(0, 2 * math.pi))
def test_flow_divergence_free(X, g, k0):
    # dX/dt depends only on Y and dY/dt only on X
    p = ModelParams(g=g, k0=k0, L=L)
    h = 1e-5
    div = (flow(QuadratureState(X + h, 0.3), p)[0] - flow(QuadratureState(X - h, 0.3), p)[0]) / (2 * h)
    div += (flow(QuadratureState(X, 0.3 + h), p)[1] - flow(QuadratureState(X, 0.3 - h), p)[1]) / (2 * h)
    assert div == 0.0


def test_evolve_harmonic_period():
    p = ModelParams(g=0.0, k0=0.0, omega0=1.0)
    traj = evolve(QuadratureState(1.0, 0.0), p, t_end=2 * math.pi, dt=1e-3)
    assert traj.t[-1] == pytest.approx(2 * math.pi, abs=1e-12)
    assert abs(traj.X[-1] - 1.0) < 1e-8 and abs(traj.Y[-1]) < 1e-8


def test_evolve_rejects_non_finite():
    with pytest.raises(ValueError):
        evolve(QuadratureState(math.nan, 0.0), ModelParams())
    with pytest.raises(ValueError):
        evolve(QuadratureState(0.0, 0.0), ModelParams(), dt=0.0)


@pytest.mark.parametrize("g,k0,X0", [(1.62, 4.13, 5.0), (2.5, math.pi, 20.0), (0.5, 0.0, 3.0)])
def test_energy_conservation(g, k0, X0):
    p = ModelParams(g=g, k0=k0, L=L)
    traj = evolve(QuadratureState(X0, 0.5), p, t_end=100.0, dt=1e-3)
    E = energy(traj, p)
    assert np.max(np.abs(E - E[0])) / abs(E[0]) < 1e-7


def test_center_is_stationary():
    p = ModelParams(g=1.62, k0=4.13, L=L)
    for fp in find_fixed_points(p):
        if fp.stability is Stability.CENTER:
            traj = evolve(QuadratureState(fp.X_star, 0.0), p, t_end=20.0, dt=1e-3)
            assert np.max(np.abs(traj.X - fp.X_star)) < 1e-9
            assert np.max(np.abs(traj.Y)) < 1e-9


def test_single_fixed_point_weak_coupling():
    fps = find_fixed_points(ModelParams(g=0.5, k0=0.0, L=L))
    assert len(fps) == 1
    assert fps[0].X_star == 0.0 and fps[0].stability is Stability.CENTER


@pytest.mark.parametrize("k0", [0.0, 1.0, 3.0])
def test_no_coupling_single_center(k0):
    fps = find_fixed_points(ModelParams(g=0.0, k0=k0, L=L))
    assert len(fps) == 1
    assert fps[0].X_star == 0.0
    assert fps[0].stability is Stability.CENTER
    assert fps[0].omega_fluct == 1.0


@pytest.mark.parametrize("g,k0", [(3.0, 3 * math.pi / 2), (2.5, math.pi), (1.62, 4.13), (3.5, 0.4)])
def test_fixed_points_match_dense_scan(g, k0):
    p = ModelParams(g=g, k0=k0, L=L)
    fps = find_fixed_points(p)
    ref = dense_sign_scan(g, k0, L)
    assert len(fps) == len(ref)
    cell = 3 * 2 * 1.5 * p.quadrature_scale * (L / math.pi) * 2 / 1e6
    assert np.allclose([fp.X_star for fp in fps], ref, atol=cell)


@settings(max_examples=60, deadline=None)
@given(g=st.floats(0.01, 3.5), k0=st.floats(0, 2 * math.pi))
def test_fixed_point_invariants(g, k0):
    p = ModelParams(g=g, k0=k0, L=L)
    fps = find_fixed_points(p)
    assert len(fps) % 2 == 1 or any(fp.stability is Stability.DEGENERATE for fp in fps)
    xs = [fp.X_star for fp in fps]
    assert xs == sorted(xs)
    for fp in fps:
        assert fp.Y_star == 0.0
        assert abs(residual(fp.X_star, p)) < 1e-9 * max(1.0, abs(fp.X_star))
        if fp.stability is not Stability.DEGENERATE:
            assert (fp.stability is Stability.CENTER) == (curvature(fp.X_star, p) > 0)
    stab = [fp.stability for fp in fps]
    if Stability.DEGENERATE not in stab:
        assert all(a is not b for a, b in zip(stab, stab[1:]))
        assert stab[0] is Stability.CENTER and stab[-1] is Stability.CENTER
        assert stab.count(Stability.CENTER) == (len(stab) + 1) // 2


@given(g=st.floats(0, 3.5))
def test_parity_at_k0_zero(g):
    fps = find_fixed_points(ModelParams(g=g, k0=0.0, L=L))
    xs = np.array([fp.X_star for fp in fps])
    assert 0.0 in xs
    assert np.allclose(np.sort(xs), np.sort(-xs), atol=1e-9 * max(1.0, np.abs(xs).max()))


def test_basin_tag_tracks_family():
    p = ModelParams(g=3.0, k0=1.0, L=L)
    c = p.quadrature_scale
    for fp in find_fixed_points(p):
        assert abs(c * fp.X_star + 1.0 - fp.basin_tag * math.pi) <= math.pi / 2 + 1e-12


def test_fluctuation_frequency_values():
    assert fluctuation_frequency(0.0, ModelParams(g=0.0, k0=2.0, omega0=1.3)) == pytest.approx(1.3, rel=1e-15)
    g = 0.7
    p = ModelParams(g=g, k0=0.0, L=L)
    assert fluctuation_frequency(0.0, p) == pytest.approx(math.sqrt(1 + 4 * g * g / math.pi), rel=1e-13)


@pytest.mark.parametrize("g,k0", [(1.62, 4.13), (3.0, 1.0), (2.5, math.pi)])
def test_fluctuation_frequency_matches_curvature(g, k0):
    p = ModelParams(g=g, k0=k0, L=L)
    for fp in find_fixed_points(p):
        if fp.stability is Stability.CENTER:
            fd = second_difference(lambda x: mean_field_energy_surface(x, 0.0, p), fp.X_star, h=1e-3)
            assert fluctuation_frequency(fp, p) ** 2 == pytest.approx(p.omega0 * fd, rel=1e-5)
            assert fp.omega_fluct == pytest.approx(fluctuation_frequency(fp, p), rel=1e-12)


def test_fluctuation_about_center_is_harmonic():
    p = ModelParams(g=1.62, k0=4.13, L=L)
    fp = next(f for f in find_fixed_points(p) if f.stability is Stability.CENTER)
    w = fluctuation_frequency(fp, p)
    t_end = 10 * 2 * math.pi / w
    traj = evolve(QuadratureState(fp.X_star, 0.0), p, t_end=t_end, dt=1e-3)
    dX, _ = evolve_fluctuation(traj, p, deltaX0=0.3, deltaV0=0.2)
    exact = 0.3 * np.cos(w * traj.t) + (0.2 / w) * np.sin(w * traj.t)
    assert np.max(np.abs(dX - exact)) < 1e-6


def test_fluctuation_without_coupling():
    p = ModelParams(g=0.0, omega0=1.0)
    traj = evolve(QuadratureState(2.0, 0.0), p, t_end=20.0, dt=1e-3)
    dX, dV = evolve_fluctuation(traj, p, deltaX0=1.0, deltaV0=0.0)
    assert np.max(np.abs(dX - np.cos(traj.t))) < 1e-9


def test_fluctuation_wronskian_conserved():
    p = ModelParams(g=1.62, k0=4.13, L=L)
    traj = evolve(QuadratureState(12.0, 3.0), p, t_end=50.0, dt=1e-3)
    x1, v1 = evolve_fluctuation(traj, p, deltaX0=1.0, deltaV0=0.0)
    x2, v2 = evolve_fluctuation(traj, p, deltaX0=0.0, deltaV0=1.0)
    W = x1 * v2 - x2 * v1
    assert np.max(np.abs(W - 1.0)) < 1e-6


def test_weak_coupling_bound():
    b = weak_coupling_bound(ModelParams(L=510))
    assert b.g_max == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert b.g_max == pytest.approx(0.8862, abs=1e-4)
    assert b.g_max_as_printed == pytest.approx(math.sqrt(math.pi * 510) / 2, rel=1e-15)
    assert b.g_max_as_printed == pytest.approx(20.02, abs=0.01)
    # omega^2 vanishes exactly at the bound for the worst phase
    p = ModelParams(g=b.g_max, k0=math.pi, L=510)
    assert local_frequency_squared(0.0, p) == pytest.approx(0.0, abs=1e-14)


def test_weak_coupling_bound_scaling():
    one = weak_coupling_bound(ModelParams(omega0=1.0, L=510))
    two = weak_coupling_bound(ModelParams(omega0=2.0, L=510))
    assert two.g_max_as_printed == pytest.approx(2 * one.g_max_as_printed, rel=1e-15)
    # g is dimensionless, so the curvature bound depends on omega0/t_h
    assert two.g_max == pytest.approx(math.sqrt(2) * one.g_max, rel=1e-15)
    assert weak_coupling_bound(ModelParams(omega0=2.0, t_h=2.0)).g_max == pytest.approx(one.g_max)


def test_region_labels():
    assert phase_region(ModelParams(g=0.5, k0=0.0, L=L)).region_label == "A"
    assert phase_region(ModelParams(g=0.0, k0=2.0, L=L)).region_label == "A"
    r = phase_region(ModelParams(g=2.5, k0=math.pi, L=L))
    assert (r.n_equilibria, r.n_centers, r.region_label, r.on_boundary) == (7, 4, "D", False)


def test_order_parameter():
    fp = FixedPoint(0.0, Stability.CENTER, 1.0, 0)
    assert order_parameter(fp) == 0
    a = FixedPoint(3.5, Stability.CENTER, 1.0, 0)
    b = FixedPoint(7.0, Stability.CENTER, 1.0, 0)
    assert order_parameter(b) == 2 * order_parameter(a)
    assert order_parameter(a) == pytest.approx(3.5 / math.sqrt(2))


@pytest.mark.parametrize("R0", [0.5, 1.0, 2.0])
def test_bessel_identity(R0):
    from tbcavity.meanfield import bessel_j0

    assert abs(bessel_average(R0) - bessel_j0(R0)) < 1e-8


def test_mean_energy_zero_amplitude():
    p = ModelParams(g=1.0, k0=0.0, L=L)
    traj = evolve(QuadratureState(0.0, 0.0), p, t_end=5.0, dt=1e-3)
    res = mean_energy_density(traj, p)
    assert res.R0 == 0.0
    assert res.time_average == pytest.approx(res.series[0], rel=1e-14)
    assert res.bessel_prediction == pytest.approx(res.series[0], rel=1e-14)


def test_mean_energy_small_oscillation():
    p = ModelParams(g=1.0, k0=0.0, L=L)
    traj = evolve(QuadratureState(8.0, 0.0), p, t_end=60.0, dt=1e-3)
    res = mean_energy_density(traj, p)
    assert 0 < res.R0 < 1.0
    assert res.time_average == pytest.approx(res.bessel_prediction, rel=1e-3)


def test_mean_energy_rejects_multi_well():
    p = ModelParams(g=2.5, k0=math.pi, L=L)
    # the X = 0 barrier sits about 470 above the inner wells; Y^2/2 = 612 clears it
    traj = evolve(QuadratureState(-17.784, 35.0), p, t_end=30.0, dt=1e-3)
    assert traj.X.min() < 0 < traj.X.max()
    with pytest.raises(ValueError):
        mean_energy_density(traj, p)


def test_discrete_sea_fixed_points():
    p = ModelParams(g=2.0, k0=0.9, L=60, fermi_mode="discrete")
    sea = fermi_coefficients(p)
    fps = find_fixed_points(p, sea)
    assert len(fps) % 2 == 1
    for fp in fps:
        assert abs(residual(fp.X_star, p, sea)) < 1e-9 * max(1.0, abs(fp.X_star))
