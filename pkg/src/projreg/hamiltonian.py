"""Original and transformed Hamiltonians, force transforms, and flow-rate diagnostics.

The original system is a particle in the spatial hyperplane, written with a
redundant normal dimension so the projective lift applies.  The transformed
Hamiltonian implemented here is the reduced one,

    H = (rn^2 / 2m) (ell^2 + rn^2 * pn^2) + U,

whose flow preserves both the spatial radius and the radial momentum; the
full pullback differs by (rhat.p)^2 / 2m, constant along the flows of
interest, and is monitored through the residual diagnostics rather than
integrated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .euclid import ConfigPoint, PhasePoint, angular_momentum
from .projective import _require_domain, cotangent_lift

__all__ = [
    "SINGULARITY_EPS",
    "ManevParams",
    "ForceModel",
    "TransformedForce",
    "PhaseTangent",
    "BracketRates",
    "eval_K",
    "eval_H",
    "transform_potential",
    "transform_force",
    "rhs_t",
    "bracket_diagnostics",
]

SINGULARITY_EPS = 1e-12

_V0_KINDS = ("none", "kepler", "manev")


@dataclass(frozen=True)
class ManevParams:
    """Central-force constants k1, k2 and the particle mass."""

    m: float
    k1: float = 0.0
    k2: float = 0.0

    def __post_init__(self):
        if not (self.m > 0.0 and np.isfinite(self.m)):
            raise ValueError(f"mass must be positive and finite, got {self.m}")
        if not (np.isfinite(self.k1) and np.isfinite(self.k2)):
            raise ValueError("force constants must be finite")

    @property
    def k1_bar(self) -> float:
        return self.k1 / self.m

    @property
    def k2_bar(self) -> float:
        return self.k2 / self.m


@dataclass(frozen=True)
class ForceModel:
    """Potential/force content of a run.

    v0 selects the central-force potential: "none", "kepler" (k1 only), or
    "manev" (k1 and k2); the constants themselves live on ManevParams.

    v1_value and v1_gradient describe an extra conservative potential as
    callables (spatial point, time) -> value / spatial gradient, with no
    dependence on the normal coordinate.  Both must be supplied together for
    energy bookkeeping to be consistent; the gradient alone is enough for the
    dynamics.

    nonconservative is a callable (original PhasePoint, time) -> spatial force
    covector, with zero normal component by contract.  All callables must be
    pure functions of their arguments.
    """

    v0: str = "kepler"
    v1_value: Optional[Callable[[np.ndarray, float], float]] = None
    v1_gradient: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    nonconservative: Optional[Callable[[PhasePoint, float], np.ndarray]] = None

    def __post_init__(self):
        if self.v0 not in _V0_KINDS:
            raise ValueError(f"v0 must be one of {_V0_KINDS}, got {self.v0!r}")

    @property
    def singular(self) -> bool:
        return self.v0 in ("kepler", "manev")

    @property
    def unperturbed(self) -> bool:
        return self.v1_value is None and self.v1_gradient is None and self.nonconservative is None


def _v0_original(model: ForceModel, params: ManevParams, r: float) -> float:
    """Central potential as a function of the spatial radius."""
    if model.v0 == "none":
        return 0.0
    if r < SINGULARITY_EPS:
        raise DomainError(f"radius {r:.3e} too close to the central singularity")
    if model.v0 == "kepler":
        return -params.k1 / r
    return -params.k1 / r - 0.5 * params.k2 / r**2


def _v0_transformed(model: ForceModel, params: ManevParams, rn: float) -> tuple[float, float]:
    """Transformed central potential and its normal derivative.

    The pullback turns -k1/r - k2/(2 r^2) into -k1*rn - k2*rn^2/2.
    """
    if model.v0 == "none":
        return 0.0, 0.0
    k2 = params.k2 if model.v0 == "manev" else 0.0
    return (-params.k1 * rn - 0.5 * k2 * rn**2, -params.k1 - k2 * rn)


def _v1_at(model: ForceModel, x_spatial: np.ndarray, t: float) -> float:
    if model.v1_value is None:
        return 0.0
    return float(model.v1_value(x_spatial, t))


def _v1_grad_at(model: ForceModel, x_spatial: np.ndarray, t: float) -> np.ndarray:
    if model.v1_gradient is None:
        return np.zeros_like(x_spatial)
    return np.asarray(model.v1_gradient(x_spatial, t), dtype=float)


def eval_K(kappa: PhasePoint, t: float, model: ForceModel, params: ManevParams) -> float:
    """Original Hamiltonian: kinetic term over the flat metric plus the potential."""
    x = kappa.spatial
    r = float(np.linalg.norm(x))
    kinetic = (np.dot(kappa.momentum_spatial, kappa.momentum_spatial) + kappa.momentum_normal**2) / (
        2.0 * params.m
    )
    return float(kinetic + _v0_original(model, params, r) + _v1_at(model, x, t))


def eval_H(mu: PhasePoint, t: float, model: ForceModel, params: ManevParams) -> float:
    """Reduced transformed Hamiltonian at a transformed-chart phase point.

    Agrees with eval_K at the lifted point whenever the radial momentum
    rhat.p vanishes (the invariant-submanifold case).
    """
    vec, r, rn = _require_domain(mu.base, "eval_H")
    am = angular_momentum(vec, mu.momentum_spatial, params.m)
    pn = mu.momentum_normal
    kinetic = rn**2 * (am.squared_norm + rn**2 * pn**2) / (2.0 * params.m)
    u0, _ = _v0_transformed(model, params, rn)
    x_spatial = vec / (r * rn)
    return float(kinetic + u0 + _v1_at(model, x_spatial, t))


def transform_potential(
    model: ForceModel, q: ConfigPoint, t: float, params: ManevParams
) -> tuple[float, np.ndarray]:
    """Transformed potential value and its full gradient at a transformed point.

    The central part is evaluated in closed form; the perturbing part is
    pulled back through the point map, which mixes its spatial gradient into
    the normal slot:

        dU_i = (1/(q_n r)) (delta_ij - qhat_i qhat_j) dV_j
        dU_n = -(1/q_n^2) qhat.dV
    """
    vec, r, qn = _require_domain(q, "transform_potential")
    n = q.dim
    qhat = vec / r
    u0, du0_n = _v0_transformed(model, params, qn)

    x_spatial = qhat / qn
    value = u0 + _v1_at(model, x_spatial, t)

    grad = np.zeros(n)
    grad[n - 1] = du0_n
    if model.v1_gradient is not None:
        dv = _v1_grad_at(model, x_spatial, t)
        radial = float(np.dot(dv, qhat))
        grad[: n - 1] = (dv - radial * qhat) / (qn * r)
        grad[n - 1] += -radial / qn**2
    return float(value), grad


@dataclass(frozen=True)
class TransformedForce:
    """Force covector in the transformed chart; its radial component vanishes."""

    alpha_spatial: np.ndarray
    alpha_normal: float


def transform_force(f: np.ndarray, mu: PhasePoint) -> TransformedForce:
    """Pull a spatial force covector (zero normal component) through the lift."""
    vec, r, rn = _require_domain(mu.base, "transform_force")
    rhat = vec / r
    f = np.asarray(f, dtype=float)
    radial = float(np.dot(f, rhat))
    alpha = (f - radial * rhat) / (rn * r)
    return TransformedForce(alpha, -radial / rn**2)


def _evaluate_alpha(
    mu: PhasePoint, t: float, model: ForceModel, params: ManevParams
) -> Optional[TransformedForce]:
    if model.nonconservative is None:
        return None
    kappa = cotangent_lift(mu)
    f = np.asarray(model.nonconservative(kappa, t), dtype=float)
    return transform_force(f, mu)


@dataclass(frozen=True)
class PhaseTangent:
    """Coordinate rates of a phase point (same layout as PhasePoint)."""

    spatial: np.ndarray
    normal: float
    momentum_spatial: np.ndarray
    momentum_normal: float


def rhs_t(mu: PhasePoint, t: float, model: ForceModel, params: ManevParams) -> PhaseTangent:
    """Time-parameterized transformed dynamics, with force terms if present.

        dr_i/dt  = -(rn^2/m) ell_ij r_j
        drn/dt   =  rn^4 pn / m
        dp_i/dt  = -(rn^2/m) ell_ij p_j - dU1_i + alpha_i
        dpn/dt   = -(rn/m)(ell^2 + 2 rn^2 pn^2) - dUn + alpha_n
    """
    vec, r, rn = _require_domain(mu.base, "rhs_t")
    m = params.m
    p = mu.momentum_spatial
    pn = mu.momentum_normal
    rp = float(np.dot(vec, p))
    r_sq = r * r
    p_sq = float(np.dot(p, p))
    ell_sq = r_sq * p_sq - rp * rp

    _, grad_u = transform_potential(model, mu.base, t, params)
    alpha = _evaluate_alpha(mu, t, model, params)
    a_sp = alpha.alpha_spatial if alpha is not None else 0.0
    a_n = alpha.alpha_normal if alpha is not None else 0.0

    d_r = (rn**2 / m) * (r_sq * p - rp * vec)
    d_rn = rn**4 * pn / m
    d_p = -(rn**2 / m) * (p_sq * vec - rp * p) - grad_u[:-1] + a_sp
    d_pn = -(rn / m) * (ell_sq + 2.0 * rn**2 * pn**2) - grad_u[-1] + a_n
    return PhaseTangent(d_r, d_rn, d_p, d_pn)


@dataclass(frozen=True)
class BracketRates:
    """Analytic flow rates of the conserved-quantity candidates.

    radius_rate uses the full-pullback bracket value rhat.p / m; it vanishes
    on the invariant submanifold, where it coincides with the reduced
    Hamiltonian's bracket.  energy_rate assumes the perturbing potential has
    no explicit time dependence.
    """

    radial_momentum: float
    radial_momentum_rate: float
    radius_rate: float
    ell_sq_rate: float
    energy_rate: float


def bracket_diagnostics(
    mu: PhasePoint, model: ForceModel, params: ManevParams, t: float = 0.0
) -> BracketRates:
    """Rates of rhat.p, |r|, ell^2, and the Hamiltonian along the (forced) flow."""
    vec = mu.spatial
    r = float(np.linalg.norm(vec))
    rn = mu.normal
    p = mu.momentum_spatial
    pn = mu.momentum_normal
    m = params.m
    rhat_p = float(np.dot(vec, p)) / r if r > 0 else 0.0

    alpha = _evaluate_alpha(mu, t, model, params)
    a_sp = alpha.alpha_spatial if alpha is not None else np.zeros_like(p)
    a_n = alpha.alpha_normal if alpha is not None else 0.0

    grad_u1 = np.zeros_like(p)
    if model.v1_gradient is not None:
        _, grad_full = transform_potential(model, mu.base, t, params)
        grad_u1 = grad_full[:-1]

    pa = float(np.dot(p, a_sp))
    pdu = float(np.dot(p, grad_u1))
    return BracketRates(
        radial_momentum=rhat_p,
        radial_momentum_rate=float(np.dot(vec / r, a_sp)) if r > 0 else 0.0,
        radius_rate=rhat_p / m,
        ell_sq_rate=2.0 * r**2 * (pa - pdu),
        energy_rate=(rn**2 / m) * (r**2 * pa + rn**2 * pn * a_n),
    )
