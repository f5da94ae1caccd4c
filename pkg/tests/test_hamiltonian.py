import numpy as np
import pytest

from conftest import random_phase_point
from projreg import (
    ConfigPoint,
    ForceModel,
    ManevParams,
    PhasePoint,
    bracket_diagnostics,
    cotangent_lift,
    eval_H,
    eval_K,
    rhs_t,
    transform_force,
    transform_potential,
)
from projreg.verify import symplectic_matrix


def _quadratic_v1(x, t):
    return 0.05 * (x[0] ** 2 - x[1] * x[2]) + 0.02 * x[1]


def _quadratic_v1_grad(x, t):
    g = np.zeros_like(x)
    g[0] = 0.1 * x[0]
    g[1] = -0.05 * x[2] + 0.02
    g[2] = -0.05 * x[1]
    return g


def test_manev_params():
    params = ManevParams(m=2.0, k1=3.0, k2=1.0)
    assert params.k1_bar == pytest.approx(1.5)
    assert params.k2_bar == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ManevParams(m=0.0, k1=1.0)


def test_eval_K_examples():
    params = ManevParams(m=1.0, k1=1.0)
    circ = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.0, 1.0, 0], 0.0)
    assert eval_K(circ, 0.0, ForceModel(v0="kepler"), params) == pytest.approx(-0.5)

    rest = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.0, 0, 0], 0.0)
    assert eval_K(rest, 0.0, ForceModel(v0="none"), params) == pytest.approx(0.0)

    manev = ManevParams(m=1.0, k1=1.0, k2=1.0)
    assert eval_K(rest, 0.0, ForceModel(v0="manev"), manev) == pytest.approx(-1.5)


def test_eval_H_examples():
    params = ManevParams(m=1.0, k1=1.0)
    model = ForceModel(v0="kepler")
    circ = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.0, 1.0, 0], 0.0)
    assert eval_H(circ, 0.0, model, params) == pytest.approx(-0.5)

    rest = PhasePoint.from_components([1.0, 0, 0], 2.0, [0.0, 0, 0], 0.0)
    assert eval_H(rest, 0.0, model, params) == pytest.approx(-2.0)


def test_hamiltonian_correspondence(rng):
    params = ManevParams(m=1.3, k1=1.1, k2=0.2)
    model = ForceModel(v0="manev", v1_value=_quadratic_v1, v1_gradient=_quadratic_v1_grad)
    for _ in range(500):
        mu = random_phase_point(rng)
        rhat = mu.base.unit_spatial
        p = mu.momentum_spatial - np.dot(mu.momentum_spatial, rhat) * rhat
        mu = PhasePoint(mu.base, p, mu.momentum_normal)
        h = eval_H(mu, 0.0, model, params)
        k = eval_K(cotangent_lift(mu), 0.0, model, params)
        assert abs(h - k) < 1e-12 * (1.0 + abs(k))


def test_transform_potential_central():
    params = ManevParams(m=1.0, k1=1.0)
    model = ForceModel(v0="kepler")
    q = ConfigPoint([0.3, -1.1, 0.4], 1.7)
    value, grad = transform_potential(model, q, 0.0, params)
    assert value == pytest.approx(-1.7)
    np.testing.assert_allclose(grad[:3], 0.0, atol=1e-16)
    assert grad[3] == pytest.approx(-1.0)

    manev = ManevParams(m=2.0, k1=1.0, k2=0.5)
    value, grad = transform_potential(ForceModel(v0="manev"), q, 0.0, manev)
    assert value == pytest.approx(-1.0 * 1.7 - 0.25 * 1.7**2)
    assert grad[3] == pytest.approx(-1.0 - 0.5 * 1.7)


def test_transform_potential_fd_oracle(rng):
    params = ManevParams(m=1.0, k1=1.0, k2=0.1)
    model = ForceModel(v0="manev", v1_value=_quadratic_v1, v1_gradient=_quadratic_v1_grad)
    h = 1e-6
    for _ in range(50):
        q = random_phase_point(rng).base
        _, grad = transform_potential(model, q, 0.0, params)
        flat = np.concatenate([q.spatial, [q.normal]])

        def u_of(z):
            return transform_potential(model, ConfigPoint(z[:-1], z[-1]), 0.0, params)[0]

        fd = np.array([(u_of(flat + h * e) - u_of(flat - h * e)) / (2 * h) for e in np.eye(4)])
        assert np.abs(grad - fd).max() < 1e-6


def test_transform_force_examples():
    mu = PhasePoint.from_components([1.0, 0, 0], 2.0, [0.0, 0.3, 0], 0.0)
    # radial force moves entirely into the normal slot
    alpha = transform_force(np.array([1.7, 0, 0]), mu)
    np.testing.assert_allclose(alpha.alpha_spatial, 0.0, atol=1e-16)
    assert alpha.alpha_normal == pytest.approx(-1.7 / 4.0)

    # tangential force scales by 1/(rn |r|)
    c = 0.6
    alpha = transform_force(np.array([0.0, c, 0]), mu)
    np.testing.assert_allclose(alpha.alpha_spatial, [0.0, c / 2.0, 0.0], atol=1e-16)
    assert alpha.alpha_normal == pytest.approx(0.0)

    alpha = transform_force(np.zeros(3), mu)
    np.testing.assert_allclose(alpha.alpha_spatial, 0.0)
    assert alpha.alpha_normal == 0.0


def test_transform_force_orthogonality(rng):
    for _ in range(300):
        mu = random_phase_point(rng)
        alpha = transform_force(rng.uniform(-3, 3, size=3), mu)
        assert abs(np.dot(alpha.alpha_spatial, mu.base.unit_spatial)) < 1e-13


def test_rhs_t_circular_stationary():
    params = ManevParams(m=1.0, k1=1.0)
    circ = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.0, 1.0, 0], 0.0)
    tan = rhs_t(circ, 0.0, ForceModel(v0="kepler"), params)
    assert tan.momentum_normal == pytest.approx(0.0, abs=1e-15)
    assert tan.normal == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(tan.spatial, [0.0, 1.0, 0.0], atol=1e-15)


def test_rhs_t_zero_momentum():
    params = ManevParams(m=1.0, k1=1.0)
    model = ForceModel(v0="kepler")
    rest = PhasePoint.from_components([0.5, 0.5, 0], 1.2, [0.0, 0, 0], 0.0)
    tan = rhs_t(rest, 0.0, model, params)
    np.testing.assert_allclose(tan.spatial, 0.0, atol=1e-16)
    assert tan.normal == 0.0
    _, grad = transform_potential(model, rest.base, 0.0, params)
    np.testing.assert_allclose(tan.momentum_spatial, -grad[:3], atol=1e-16)
    assert tan.momentum_normal == pytest.approx(-grad[3])


def test_rhs_t_normal_rate():
    params = ManevParams(m=2.0, k1=1.0)
    mu = PhasePoint.from_components([1.0, 0, 0], 1.3, [0.0, 0.7, 0], 0.4)
    tan = rhs_t(mu, 0.0, ForceModel(v0="kepler"), params)
    assert tan.normal == pytest.approx(1.3**4 * 0.4 / 2.0)


def test_rhs_t_matches_symplectic_gradient(rng):
    params = ManevParams(m=1.3, k1=1.1, k2=0.15)
    conservative = ForceModel(v0="manev", v1_value=_quadratic_v1, v1_gradient=_quadratic_v1_grad)

    def drag(kappa, t):
        return -0.04 * kappa.momentum_spatial + np.array([0.01, -0.02, 0.005])

    model = ForceModel(
        v0="manev",
        v1_value=_quadratic_v1,
        v1_gradient=_quadratic_v1_grad,
        nonconservative=drag,
    )
    J = symplectic_matrix(4)
    h = 1e-6
    for _ in range(30):
        mu = random_phase_point(rng)
        z = np.concatenate([mu.spatial, [mu.normal], mu.momentum_spatial, [mu.momentum_normal]])

        def h_of(zz):
            pt = PhasePoint.from_components(zz[:3], zz[3], zz[4:7], zz[7])
            return eval_H(pt, 0.0, conservative, params)

        grad = np.array([(h_of(z + h * e) - h_of(z - h * e)) / (2 * h) for e in np.eye(8)])
        expected = J @ grad
        alpha = transform_force(drag(cotangent_lift(mu), 0.0), mu)
        expected[4:7] += alpha.alpha_spatial
        expected[7] += alpha.alpha_normal
        tan = rhs_t(mu, 0.0, model, params)
        got = np.concatenate(
            [tan.spatial, [tan.normal], tan.momentum_spatial, [tan.momentum_normal]]
        )
        assert np.abs(got - expected).max() < 1e-5


def test_bracket_diagnostics_unperturbed():
    params = ManevParams(m=1.0, k1=1.0)
    model = ForceModel(v0="kepler")
    mu = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.3, 1.0, 0], 0.1)
    rates = bracket_diagnostics(mu, model, params)
    assert rates.radial_momentum == pytest.approx(0.3)
    assert rates.radius_rate == pytest.approx(0.3)
    assert rates.radial_momentum_rate == 0.0
    assert rates.ell_sq_rate == 0.0
    assert rates.energy_rate == 0.0


def test_bracket_diagnostics_with_force():
    params = ManevParams(m=1.0, k1=1.0)

    def drag(kappa, t):
        return -0.01 * kappa.momentum_spatial

    model = ForceModel(v0="kepler", nonconservative=drag)
    mu = PhasePoint.from_components([1.0, 0, 0], 1.0, [0.0, 1.0, 0], 0.0)
    rates = bracket_diagnostics(mu, model, params)
    # radial component of the transformed force vanishes identically
    assert abs(rates.radial_momentum_rate) < 1e-15
    # circular orbit: kappa = mu, alpha = -0.01 mu, energy decays at p.alpha/m
    assert rates.energy_rate == pytest.approx(-0.01, rel=1e-12)
    assert rates.ell_sq_rate == pytest.approx(-0.02, rel=1e-12)


def test_force_model_validation():
    with pytest.raises(ValueError):
        ForceModel(v0="coulomb")
