import math

import numpy as np
import pytest

from conftest import random_phase_point
from projreg import (
    ForceModel,
    LinearSystem,
    ManevParams,
    ParamClock,
    QuasiState,
    RectilinearError,
    closed_form_state,
    conformal_factor,
    from_quasi,
    rhs_s,
    rhs_t,
    rhs_tau,
    second_order_residual,
    to_quasi,
)


def test_quasi_chart_round_trip(rng):
    mu = random_phase_point(rng)
    z = to_quasi(mu)
    assert z.pn_tilde == pytest.approx(mu.normal**2 * mu.momentum_normal, rel=1e-14)
    back = from_quasi(z)
    assert back.momentum_normal == pytest.approx(mu.momentum_normal, rel=1e-14)

    explicit = QuasiState([1.0, 0, 0], [0, 1.0, 0], 2.0, 12.0)
    assert from_quasi(explicit).momentum_normal == pytest.approx(3.0)

    unit = to_quasi(random_phase_point(rng))
    assert unit.rn > 0


def test_quasi_validation():
    with pytest.raises(ValueError):
        QuasiState([1.0, 0, 0], [0, 1.0, 0], -1.0, 0.0)


def test_conformal_factors():
    z = QuasiState([1.0, 0, 0], [0.0, 1.0, 0], 2.0, 0.0)
    assert conformal_factor(z, "s", 1.0) == pytest.approx(0.25)
    unit = QuasiState([1.0, 0, 0], [0.0, 1.0, 0], 1.0, 0.0)
    assert conformal_factor(unit, "tau", 1.0) == pytest.approx(1.0)
    # the two factors differ exactly by the specific angular momentum
    m = 1.7
    zz = QuasiState([0.9, 0.2, 0], [0.1, 1.4, -0.3], 1.3, 0.2)
    ratio = conformal_factor(zz, "s", m) / conformal_factor(zz, "tau", m)
    assert ratio == pytest.approx(zz.ell_bar(m), rel=1e-14)


def test_conformal_factor_rectilinear():
    z = QuasiState([1.0, 0, 0], [2.0, 0, 0], 1.0, 0.0)  # p parallel to r
    with pytest.raises(RectilinearError):
        conformal_factor(z, "tau", 1.0)


def test_rhs_s_manev_fiber_equation():
    # quasi-momentum rate reduces to -m beta^2 rn + k1 when unperturbed
    params = ManevParams(m=1.4, k1=1.2, k2=0.3)
    model = ForceModel(v0="manev")
    z = QuasiState([1.0, 0, 0], [0.0, 2.1, 0], 1.7, 0.4)
    tan, dt_ds = rhs_s(z, ParamClock(), model, params)
    ell_bar = z.ell_bar(params.m)
    beta_sq = ell_bar**2 - params.k2_bar
    assert tan.pn_tilde == pytest.approx(-params.m * beta_sq * z.rn + params.k1, rel=1e-12)
    assert tan.rn == pytest.approx(z.pn_tilde / params.m, rel=1e-14)
    assert dt_ds == pytest.approx(1.0 / z.rn**2)


def test_rhs_s_on_unit_sphere():
    # on the invariant submanifold the spatial rate is p / m
    params = ManevParams(m=2.0, k1=1.0)
    z = QuasiState([1.0, 0, 0], [0.0, 1.3, 0.4], 0.8, 0.0)
    tan, _ = rhs_s(z, ParamClock(), ForceModel(v0="kepler"), params)
    np.testing.assert_allclose(tan.r, z.p / params.m, atol=1e-15)


def test_rhs_s_circular_rotation():
    params = ManevParams(m=1.0, k1=1.0)
    circ = QuasiState([1.0, 0, 0], [0.0, 1.0, 0], 1.0, 0.0)
    tan, _ = rhs_s(circ, ParamClock(), ForceModel(v0="kepler"), params)
    assert tan.rn == pytest.approx(0.0, abs=1e-15)
    assert tan.pn_tilde == pytest.approx(0.0, abs=1e-15)
    assert np.linalg.norm(tan.r) == pytest.approx(circ.ell_bar(1.0), rel=1e-14)


def test_rhs_tau_is_rhs_s_over_ell_bar(rng):
    params = ManevParams(m=1.3, k1=1.0, k2=0.1)
    model = ForceModel(v0="manev")
    clock = ParamClock()
    for _ in range(50):
        z = to_quasi(random_phase_point(rng))
        ell_bar = z.ell_bar(params.m)
        if ell_bar < 1e-6:
            continue
        tan_s, _ = rhs_s(z, clock, model, params)
        tan_tau, dt_dtau = rhs_tau(z, clock, model, params)
        for name in ("r", "p", "rn", "pn_tilde"):
            np.testing.assert_allclose(
                np.asarray(getattr(tan_tau, name)) * ell_bar,
                np.asarray(getattr(tan_s, name)),
                rtol=1e-12,
                atol=1e-12,
            )
        assert dt_dtau == pytest.approx(1.0 / (ell_bar * z.rn**2), rel=1e-13)


def test_rhs_tau_manev_fiber_equation():
    params = ManevParams(m=1.4, k1=1.2, k2=0.3)
    z = QuasiState([1.0, 0, 0], [0.0, 2.1, 0], 1.7, 0.4)
    tan, _ = rhs_tau(z, ParamClock(), ForceModel(v0="manev"), params)
    ell_bar = z.ell_bar(params.m)
    beta_sq = ell_bar**2 - params.k2_bar
    expected = -(params.m / ell_bar) * beta_sq * z.rn + params.k1 / ell_bar
    assert tan.pn_tilde == pytest.approx(expected, rel=1e-12)


def test_chart_equivalence_with_rhs_t(rng):
    params = ManevParams(m=1.3, k1=1.1, k2=0.15)
    model = ForceModel(v0="manev")
    clock = ParamClock()
    for _ in range(100):
        mu = random_phase_point(rng)
        z = to_quasi(mu)
        tan, dt_ds = rhs_s(z, clock, model, params)
        t_tan = rhs_t(mu, 0.0, model, params)
        d_pn = tan.pn_tilde / z.rn**2 - 2.0 * z.pn_tilde * tan.rn / z.rn**3
        got = np.concatenate([tan.r, tan.p, [tan.rn, d_pn]])
        want = dt_ds * np.concatenate(
            [t_tan.spatial, t_tan.momentum_spatial, [t_tan.normal, t_tan.momentum_normal]]
        )
        assert np.abs(got - want).max() <= 1e-12 * max(1.0, np.abs(want).max())


def test_fiber_affinity():
    # at fixed spatial part the unperturbed fiber rates are affine
    params = ManevParams(m=1.0, k1=1.0, k2=0.1)
    model = ForceModel(v0="manev")
    clock = ParamClock()
    r, p = np.array([1.0, 0, 0]), np.array([0.0, 1.5, 0])
    w0, w1 = (0.7, -0.3), (1.9, 0.8)
    f = {}
    for key, (rn, ptn) in {"a": w0, "b": w1, "mid": (1.3, 0.25)}.items():
        tan, _ = rhs_s(QuasiState(r, p, rn, ptn), clock, model, params)
        f[key] = np.array([tan.rn, tan.pn_tilde])
    np.testing.assert_allclose(f["mid"], 0.5 * (f["a"] + f["b"]), atol=1e-13)


def test_second_order_residual_unperturbed():
    params = ManevParams(m=1.0, k1=1.0, k2=0.1)
    z0 = QuasiState([1.0, 0, 0], [0.0, 1.2, 0], 1.1, 0.2)
    sys_ = LinearSystem.from_state(z0, params)
    h = 1e-3
    s_grid = np.arange(101) * h
    states = [closed_form_state(z0, sys_, sys_.ell_bar0 * s) for s in s_grid]
    spatial, normal = second_order_residual(states, h, params, param="s")
    assert np.abs(spatial).max() < 5e-6
    assert np.abs(normal).max() < 5e-6


def test_second_order_residual_constant_fiber():
    # circular equilibrium: rn'' = 0 and beta^2 rn = k1/m
    params = ManevParams(m=1.0, k1=1.0)
    z0 = QuasiState([1.0, 0, 0], [0.0, 1.0, 0], 1.0, 0.0)
    sys_ = LinearSystem.from_state(z0, params)
    h = 1e-3
    states = [closed_form_state(z0, sys_, s) for s in np.arange(11) * h]
    _, normal = second_order_residual(states, h, params, param="s")
    assert np.abs(normal).max() < 1e-10


def test_second_order_residual_perturbed_forcing(rng):
    # residual reproduces the forcing -(r^2/rn^2) dU1 / m to O(h^2)
    from projreg import IntegratorConfig, integrate

    def v1_grad(x, t):
        return np.array([0.06 * x[0], -0.03 * x[2] + 0.01, -0.03 * x[1]])

    def v1(x, t):
        return 0.03 * (x[0] ** 2 - x[1] * x[2]) + 0.01 * x[1]

    params = ManevParams(m=1.0, k1=1.0)
    model = ForceModel(v0="kepler", v1_value=v1, v1_gradient=v1_grad)
    z0 = QuasiState([1.0, 0, 0], [0.0, 1.1, 0], 1.0, 0.05)
    h = 1e-3
    n = 60
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    traj = integrate("s", z0, n * h, cfg, model, params, epochs=np.arange(1, n + 1) * h)
    states = [s.state for s in traj.samples]
    spatial, _ = second_order_residual(states, h, params, param="s")
    for idx, z in enumerate(states[1:-1], start=1):
        r_sq = float(z.r @ z.r)
        rhat = z.r / math.sqrt(r_sq)
        x_spatial = rhat / z.rn
        g = v1_grad(x_spatial, 0.0)
        du1 = (g - float(g @ rhat) * rhat) / (z.rn * math.sqrt(r_sq))
        forcing = -(r_sq / z.rn**2) * du1 / params.m
        assert np.abs(spatial[idx - 1] - forcing).max() < 5e-5


def test_second_order_residual_tau_scaling():
    params = ManevParams(m=1.0, k1=1.0, k2=0.1)
    z0 = QuasiState([1.0, 0, 0], [0.0, 1.2, 0], 1.1, 0.2)
    sys_ = LinearSystem.from_state(z0, params)
    h = 1e-3
    states = [closed_form_state(z0, sys_, k * h) for k in range(101)]
    spatial, normal = second_order_residual(states, h, params, param="tau")
    assert np.abs(spatial).max() < 5e-6
    assert np.abs(normal).max() < 5e-6


def test_second_order_residual_needs_three_samples():
    params = ManevParams(m=1.0, k1=1.0)
    z = QuasiState([1.0, 0, 0], [0.0, 1.0, 0], 1.0, 0.0)
    with pytest.raises(ValueError):
        second_order_residual([z, z], 0.1, params)


def test_monotone_clocks_and_parameter_consistency(kepler_params, kepler_model):
    from conftest import perihelion_ic
    from projreg import IntegratorConfig, integrate, lift_initial_conditions

    x0, v0 = perihelion_ic(0.4, kepler_params)
    mu0 = lift_initial_conditions(x0, v0, kepler_params)
    z0 = to_quasi(mu0)
    ell_bar0 = z0.ell_bar(kepler_params.m)
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    traj = integrate(
        "s", z0, 10.0, cfg, kepler_model, kepler_params, epochs=np.linspace(0.5, 10.0, 20)
    )
    t_vals = traj.clock_values("t")
    s_vals = traj.clock_values("s")
    tau_vals = traj.clock_values("tau")
    assert np.all(np.diff(t_vals) > 0)
    assert np.all(np.diff(tau_vals) > 0)
    np.testing.assert_allclose(tau_vals, ell_bar0 * s_vals, atol=1e-9)
