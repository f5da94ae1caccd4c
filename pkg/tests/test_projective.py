import numpy as np
import pytest

from conftest import random_phase_point
from projreg import (
    ConfigPoint,
    DomainError,
    PhasePoint,
    angular_momentum,
    cotangent_lift,
    cotangent_unlift,
    induced_metric,
    jacobians,
    passive_coords,
    project_point,
    q_residual,
    unproject_point,
)


def _flat(pt: PhasePoint):
    return np.concatenate([pt.spatial, [pt.normal], pt.momentum_spatial, [pt.momentum_normal]])


def test_project_point_examples():
    fixed = project_point(ConfigPoint([1.0, 0, 0], 1.0))
    np.testing.assert_allclose(fixed.spatial, [1.0, 0, 0])
    assert fixed.normal == pytest.approx(1.0)

    out = project_point(ConfigPoint([2.0, 0, 0], 1.0))
    np.testing.assert_allclose(out.spatial, [1.0, 0, 0])
    assert out.normal == pytest.approx(2.0)

    out = project_point(ConfigPoint([0.0, 1.0, 0], 0.5))
    np.testing.assert_allclose(out.spatial, [0.0, 2.0, 0])
    assert out.normal == pytest.approx(1.0)


def test_unproject_point_examples():
    out = unproject_point(ConfigPoint([2.0, 0, 0], 3.0))
    np.testing.assert_allclose(out.spatial, [3.0, 0, 0])
    assert out.normal == pytest.approx(0.5)


def test_round_trip(rng):
    for _ in range(2000):
        q = random_phase_point(rng).base
        back = unproject_point(project_point(q))
        ref = np.linalg.norm(np.concatenate([q.spatial, [q.normal]]))
        err = np.linalg.norm(
            np.concatenate([back.spatial - q.spatial, [back.normal - q.normal]])
        )
        assert err / ref < 1e-13


def test_domain_rejection():
    with pytest.raises(DomainError):
        project_point(ConfigPoint([0.0, 0.0, 0.0], 1.0))
    with pytest.raises(DomainError):
        project_point(ConfigPoint([1.0, 0.0, 0.0], -0.2))
    with pytest.raises(DomainError):
        unproject_point(ConfigPoint([1.0, 0.0, 0.0], 0.0))


def test_jacobian_blocks_at_unit_point():
    jp = jacobians(ConfigPoint([1.0, 0, 0], 1.0))
    expected = np.zeros((4, 4))
    expected[:3, :3] = np.diag([0.0, 1.0, 1.0])  # projector orthogonal to e1
    expected[:3, 3] = [-1.0, 0, 0]
    expected[3, :3] = [1.0, 0, 0]
    np.testing.assert_allclose(jp.forward, expected, atol=1e-15)


def test_jacobian_finite_difference_oracle(rng):
    h = 1e-6
    for _ in range(50):
        q = random_phase_point(rng).base
        jp = jacobians(q)
        flat = np.concatenate([q.spatial, [q.normal]])

        def fwd(z):
            img = project_point(ConfigPoint(z[:-1], z[-1]))
            return np.concatenate([img.spatial, [img.normal]])

        fd = np.stack(
            [(fwd(flat + h * e) - fwd(flat - h * e)) / (2 * h) for e in np.eye(4)],
            axis=1,
        )
        assert np.abs(jp.forward - fd).max() < 1e-6


def test_jacobian_inverse_product(rng):
    for _ in range(200):
        q = random_phase_point(rng).base
        jp = jacobians(q)
        assert np.abs(jp.forward @ jp.inverse_at_image - np.eye(4)).max() < 1e-12
        assert np.abs(jp.inverse_at_image @ jp.forward - np.eye(4)).max() < 1e-12


def test_cotangent_lift_example():
    mu = PhasePoint.from_components([1.0, 0, 0], 2.0, [0.0, 1.0, 0], 0.0)
    kappa = cotangent_lift(mu)
    np.testing.assert_allclose(kappa.spatial, [0.5, 0, 0])
    assert kappa.normal == pytest.approx(1.0)
    np.testing.assert_allclose(kappa.momentum_spatial, [0.0, 2.0, 0])
    assert kappa.momentum_normal == pytest.approx(0.0)
    assert angular_momentum(mu.spatial, mu.momentum_spatial).squared_norm == pytest.approx(1.0)
    assert angular_momentum(kappa.spatial, kappa.momentum_spatial).squared_norm == pytest.approx(1.0)


def test_cotangent_lift_zero_covector():
    mu = PhasePoint.from_components([0.3, -0.2, 1.1], 0.9, [0.0, 0, 0], 0.0)
    kappa = cotangent_lift(mu)
    np.testing.assert_allclose(kappa.momentum_spatial, 0.0, atol=1e-16)
    assert kappa.momentum_normal == 0.0


def test_cotangent_unlift_examples():
    kappa = PhasePoint.from_components([0.5, 0, 0], 1.0, [0.0, 2.0, 0], 0.0)
    mu = cotangent_unlift(kappa)
    np.testing.assert_allclose(mu.spatial, [1.0, 0, 0])
    assert mu.normal == pytest.approx(2.0)
    np.testing.assert_allclose(mu.momentum_spatial, [0.0, 1.0, 0])
    assert mu.momentum_normal == pytest.approx(0.0)

    # purely radial covector maps into the normal momentum slot
    c, xv, xn = 1.7, np.array([0.6, 0.8, 0.0]), 1.3
    radial = PhasePoint.from_components(xv, xn, c * xv, 0.0)
    mu = cotangent_unlift(radial)
    np.testing.assert_allclose(mu.momentum_spatial, 0.0, atol=1e-15)
    assert mu.momentum_normal == pytest.approx(-c * np.dot(xv, xv))


def test_unlift_maps_hyperplane_to_cylinder(rng):
    for _ in range(100):
        pt = random_phase_point(rng)
        kappa = PhasePoint(ConfigPoint(pt.spatial, 1.0), pt.momentum_spatial, 0.0)
        mu = cotangent_unlift(kappa)
        res = q_residual(mu, 1.0)
        assert abs(res[0]) < 1e-14 and abs(res[1]) < 1e-14


def test_lift_round_trip(rng):
    for _ in range(500):
        mu = random_phase_point(rng)
        back = cotangent_unlift(cotangent_lift(mu))
        assert np.linalg.norm(_flat(back) - _flat(mu)) / np.linalg.norm(_flat(mu)) < 1e-12


def test_lift_pullback_identities(rng):
    for _ in range(300):
        mu = random_phase_point(rng)
        kappa = cotangent_lift(mu)
        qn = mu.normal
        ell_sq = angular_momentum(mu.spatial, mu.momentum_spatial).squared_norm
        k_sq = float(kappa.momentum_spatial @ kappa.momentum_spatial)
        pred = qn**2 * (ell_sq + qn**2 * mu.momentum_normal**2)
        assert abs(k_sq - pred) <= 1e-12 * max(1.0, abs(pred))
        xk = float(kappa.spatial @ kappa.momentum_spatial)
        assert abs(xk + qn * mu.momentum_normal) <= 1e-12 * max(1.0, abs(xk))


def test_induced_metric_identity_at_unit_point():
    met = induced_metric(ConfigPoint([1.0, 0, 0], 1.0), m=1.0)
    np.testing.assert_allclose(met.g, np.eye(4), atol=1e-15)


def test_induced_metric_is_pullback(rng):
    m = 1.7
    for _ in range(100):
        q = random_phase_point(rng).base
        met = induced_metric(q, m)
        jac = jacobians(q).forward
        np.testing.assert_allclose(met.g, m * jac.T @ jac, atol=1e-12, rtol=1e-12)
        assert np.abs(met.g @ met.g_inv - np.eye(4)).max() < 1e-11


def test_induced_metric_determinant(rng):
    m = 2.3
    for _ in range(100):
        q = random_phase_point(rng).base
        met = induced_metric(q, m)
        pred = m**4 / (q.normal**8 * q.spatial_norm**4)
        assert np.linalg.det(met.g) == pytest.approx(pred, rel=1e-11)


def test_passive_active_equivalence(rng):
    for _ in range(1000):
        kappa = random_phase_point(rng)
        active = cotangent_unlift(kappa)
        passive = passive_coords(kappa)
        assert np.linalg.norm(_flat(active) - _flat(passive)) <= 1e-13 * max(
            1.0, np.linalg.norm(_flat(active))
        )


def test_passive_coordinate_identities(rng):
    for _ in range(300):
        kappa = random_phase_point(rng)
        qp = passive_coords(kappa)
        am_r = angular_momentum(kappa.spatial, kappa.momentum_spatial)
        am_q = angular_momentum(qp.spatial, qp.momentum_spatial)
        scale = max(1.0, np.abs(am_r.matrix).max())
        assert np.abs(am_r.matrix - am_q.matrix).max() <= 1e-12 * scale
        r_pi = float(kappa.spatial @ kappa.momentum_spatial)
        assert r_pi == pytest.approx(-qp.normal * qp.momentum_normal, rel=1e-12, abs=1e-12)


def test_lift_symplectic_finite_difference(rng):
    from projreg.verify import symplectic_matrix

    J = symplectic_matrix(4)
    h = 1e-6

    def lifted(z):
        pt = PhasePoint.from_components(z[:3], z[3], z[4:7], z[7])
        return _flat(cotangent_lift(pt))

    for _ in range(20):
        z = _flat(random_phase_point(rng))
        fd = np.stack(
            [(lifted(z + h * e) - lifted(z - h * e)) / (2 * h) for e in np.eye(8)],
            axis=1,
        )
        assert np.abs(fd.T @ J @ fd - J).max() < 1e-5


def test_canonical_one_form_preserved(rng):
    for _ in range(200):
        mu = random_phase_point(rng)
        kappa = cotangent_lift(mu)
        jac = jacobians(mu.base).forward
        delta = rng.uniform(-1, 1, size=4)
        kap_full = np.concatenate([kappa.momentum_spatial, [kappa.momentum_normal]])
        mu_full = np.concatenate([mu.momentum_spatial, [mu.momentum_normal]])
        assert abs(kap_full @ (jac @ delta) - mu_full @ delta) < 1e-10


def test_dimension_generic(rng):
    # the maps are dimension-agnostic; exercise a planar and a 5-D case
    for nsp in (2, 4):
        mu = random_phase_point(rng, nsp=nsp)
        back = cotangent_unlift(cotangent_lift(mu))
        assert np.linalg.norm(_flat(back) - _flat(mu)) < 1e-12 * np.linalg.norm(_flat(mu))
