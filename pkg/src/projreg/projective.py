"""The projective diffeomorphism, its Jacobians, cotangent lift, and induced metric.

The point map sends a configuration (q_vec, q_n) to (qhat / q_n, |q_vec|):
position is split into a direction and an inverse radius, with the radius
stored in the normal slot.  Its cotangent lift is a symplectomorphism, which
is what makes the transformed dynamics Hamiltonian with no extra structure.

All maps are only diffeomorphisms on the region where the spatial part is
nonzero and the normal coordinate is positive; inputs outside that region
raise DomainError rather than returning non-finite values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .euclid import ConfigPoint, PhasePoint

__all__ = [
    "EPS_DOMAIN",
    "JacobianPair",
    "InducedMetric",
    "project_point",
    "unproject_point",
    "jacobians",
    "cotangent_lift",
    "cotangent_unlift",
    "induced_metric",
    "passive_coords",
]

EPS_DOMAIN = 1e-12


def _require_domain(point: ConfigPoint, where: str) -> tuple[np.ndarray, float, float]:
    r = point.spatial_norm
    if r <= EPS_DOMAIN or point.normal <= EPS_DOMAIN:
        raise DomainError(
            f"{where}: point outside the valid region "
            f"(|spatial|={r:.3e}, normal={point.normal:.3e})"
        )
    return point.spatial, r, point.normal


def project_point(q: ConfigPoint) -> ConfigPoint:
    """Forward point map: spatial -> qhat / q_n, normal -> |q_vec|."""
    vec, r, qn = _require_domain(q, "project_point")
    return ConfigPoint(vec / (qn * r), r)


def unproject_point(x: ConfigPoint) -> ConfigPoint:
    """Inverse point map: spatial -> x_n * xhat, normal -> 1 / |x_vec|."""
    vec, r, xn = _require_domain(x, "unproject_point")
    return ConfigPoint((xn / r) * vec, 1.0 / r)


@dataclass(frozen=True)
class JacobianPair:
    """Forward differential and the inverse differential evaluated at the image."""

    forward: np.ndarray
    inverse_at_image: np.ndarray


def jacobians(q: ConfigPoint) -> JacobianPair:
    """Block Jacobians of the forward map at q.

    `inverse_at_image` is the closed-form inverse (the differential of the
    inverse map composed with the forward map), not a numerical inversion;
    near small normal coordinates the explicit blocks are better conditioned.
    """
    vec, r, qn = _require_domain(q, "jacobians")
    n = q.dim
    rhat = vec / r
    proj = np.eye(n - 1) - np.outer(rhat, rhat)

    fwd = np.zeros((n, n))
    fwd[: n - 1, : n - 1] = proj / (qn * r)
    fwd[: n - 1, n - 1] = -rhat / qn**2
    fwd[n - 1, : n - 1] = rhat

    inv = np.zeros((n, n))
    inv[: n - 1, : n - 1] = (qn * r) * proj
    inv[: n - 1, n - 1] = rhat
    inv[n - 1, : n - 1] = -(qn**2) * rhat

    return JacobianPair(fwd, inv)


def cotangent_lift(mu: PhasePoint) -> PhasePoint:
    """Lift of the forward map to phase space (covectors pushed through the inverse differential)."""
    vec, r, qn = _require_domain(mu.base, "cotangent_lift")
    qhat = vec / r
    p = mu.momentum_spatial
    radial = float(np.dot(p, qhat))
    kappa = qn * r * (p - radial * qhat) - qn**2 * mu.momentum_normal * qhat
    return PhasePoint(ConfigPoint(qhat / qn, r), kappa, radial)


def cotangent_unlift(kappa: PhasePoint) -> PhasePoint:
    """Inverse of the lifted map."""
    vec, r, xn = _require_domain(kappa.base, "cotangent_unlift")
    xhat = vec / r
    k = kappa.momentum_spatial
    radial = float(np.dot(k, xhat))
    mu = (r / xn) * (k - radial * xhat) + kappa.momentum_normal * xhat
    return PhasePoint(ConfigPoint(xn * xhat, 1.0 / r), mu, -(r**2) * radial)


@dataclass(frozen=True)
class InducedMetric:
    """Pullback of the mass-scaled Euclidean metric, with its inverse."""

    g: np.ndarray
    g_inv: np.ndarray


def induced_metric(q: ConfigPoint, m: float = 1.0) -> InducedMetric:
    """Induced kinetic-energy metric at q.

    Block structure: tangent-sphere directions are scaled by 1/(q_n^2 r^2),
    the radial direction is untouched, and the normal direction carries
    1/q_n^4.  Equals m * (J^T J) with J the forward Jacobian.
    """
    vec, r, qn = _require_domain(q, "induced_metric")
    n = q.dim
    rhat = vec / r
    rr = np.outer(rhat, rhat)
    proj = np.eye(n - 1) - rr

    g = np.zeros((n, n))
    g[: n - 1, : n - 1] = proj / (qn**2 * r**2) + rr
    g[n - 1, n - 1] = 1.0 / qn**4

    g_inv = np.zeros((n, n))
    g_inv[: n - 1, : n - 1] = (qn**2 * r**2) * proj + rr
    g_inv[n - 1, n - 1] = qn**4

    return InducedMetric(m * g, g_inv / m)


def passive_coords(kappa: PhasePoint) -> PhasePoint:
    """Passive reading of the same transformation: cartesian coordinates to
    projective coordinates of one fixed phase point.

    Numerically identical to `cotangent_unlift`; kept as a separate code path
    so the active/passive equivalence can be cross-checked.
    """
    vec, r, rn = _require_domain(kappa.base, "passive_coords")
    rhat = vec / r
    pi = kappa.momentum_spatial
    radial = float(np.dot(rhat, pi))
    q_vec = rn * rhat
    q_n = 1.0 / r
    p_vec = (r / rn) * (pi - radial * rhat) + kappa.momentum_normal * rhat
    p_n = -(r**2) * radial
    return PhasePoint(ConfigPoint(q_vec, q_n), p_vec, p_n)
