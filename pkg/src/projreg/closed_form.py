"""Closed-form unperturbed solutions in the transformed chart.

With only central forces of the attractive 1/r + 1/r^2 family, the
regularized equations decouple into a planar rotation of (r, p) at unit rate
in the angle parameter and a driven harmonic oscillation of (rn, pn_tilde)
at frequency beta/ell_bar.  For the pure inverse-square case the two
frequencies coincide, the orbit closes after one angle period, and the
physical cartesian state has an explicit closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NonOscillatoryError, RectilinearError
from .euclid import MEMBERSHIP_TOL, ConfigPoint, PhasePoint, angular_momentum, q_residual
from .hamiltonian import ManevParams
from .regularized import EPS_ELL, QuasiState

__all__ = [
    "ANGMOM_MATCH_TOL",
    "LinearSystem",
    "rotation_exponential",
    "spatial_solution",
    "fiber_solution",
    "closed_form_state",
    "cartesian_kepler_state",
    "time_of",
]

ANGMOM_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class LinearSystem:
    """Frozen coefficients of the unperturbed linear dynamics.

    Built from an initial condition; the angular-momentum matrix and the
    derived fiber frequency beta = sqrt(ell_bar^2 - k2/m) are integrals of
    motion, so they stay fixed along the solution.
    """

    L0: np.ndarray
    ell0: float
    ell_bar0: float
    beta0: float
    params: ManevParams

    def __post_init__(self):
        mat = np.array(self.L0, dtype=float)
        mat.flags.writeable = False
        object.__setattr__(self, "L0", mat)

    @classmethod
    def from_state(cls, state: QuasiState, params: ManevParams) -> "LinearSystem":
        am = angular_momentum(state.r, state.p, params.m)
        ell0 = am.magnitude
        if ell0 <= EPS_ELL:
            raise RectilinearError(
                f"angular momentum {ell0:.3e} is too small; rectilinear motion is not supported"
            )
        beta_sq = am.specific**2 - params.k2_bar
        if beta_sq <= 0.0:
            raise NonOscillatoryError(
                f"squared fiber frequency {beta_sq:.3e} is not positive "
                "(ell_bar^2 must exceed k2/m)"
            )
        return cls(am.matrix, ell0, am.specific, float(np.sqrt(beta_sq)), params)


def rotation_exponential(sys: LinearSystem, tau: float) -> np.ndarray:
    """Rotation matrix exp(-(tau/ell0) L0) via the Rodrigues formula.

    Exact for the rank-2 antisymmetric matrices built from a position/momentum
    pair, in any spatial dimension.
    """
    if sys.ell0 <= EPS_ELL:
        raise RectilinearError("rotation is undefined for zero angular momentum")
    L = sys.L0
    n = L.shape[0]
    return (
        np.eye(n)
        - (np.sin(tau) / sys.ell0) * L
        + ((1.0 - np.cos(tau)) / sys.ell0**2) * (L @ L)
    )


def _check_frozen_angmom(ic: QuasiState, sys: LinearSystem) -> None:
    Lic = angular_momentum(ic.r, ic.p, sys.params.m).matrix
    scale = max(1.0, float(np.abs(sys.L0).max()))
    if float(np.abs(Lic - sys.L0).max()) > ANGMOM_MATCH_TOL * scale:
        raise ValueError("initial condition does not match the frozen angular momentum")


def spatial_solution(ic: QuasiState, sys: LinearSystem, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Spatial part at angle offset tau: both r and p rotate by the same matrix."""
    _check_frozen_angmom(ic, sys)
    rot = rotation_exponential(sys, tau)
    return rot @ ic.r, rot @ ic.p


def fiber_solution(
    rn0: float, pn_tilde0: float, sys: LinearSystem, tau: float
) -> tuple[float, float]:
    """Normal pair at angle offset tau: driven oscillation at phase beta0*s.

        rn(tau)       = rn0 cos(e) + pn_tilde0 sin(e)/(m beta0) + (k1/m)(1 - cos(e))/beta0^2
        pn_tilde(tau) = -m beta0 rn0 sin(e) + pn_tilde0 cos(e) + (k1/beta0) sin(e)

    with e = (beta0/ell_bar0) * tau.
    """
    m = sys.params.m
    k1 = sys.params.k1
    beta = sys.beta0
    eps = (beta / sys.ell_bar0) * tau
    ce, se = np.cos(eps), np.sin(eps)
    rn = rn0 * ce + pn_tilde0 * se / (m * beta) + (k1 / m) * (1.0 - ce) / beta**2
    ptn = -m * beta * rn0 * se + pn_tilde0 * ce + (k1 / beta) * se
    return float(rn), float(ptn)


def closed_form_state(ic: QuasiState, sys: LinearSystem, tau: float) -> QuasiState:
    """Full analytic state at angle offset tau."""
    r, p = spatial_solution(ic, sys, tau)
    rn, ptn = fiber_solution(ic.rn, ic.pn_tilde, sys, tau)
    if rn <= 0.0:
        raise DomainError(f"normal coordinate reached {rn:.3e} at tau={tau}; radius escaped")
    return QuasiState(r, p, rn, ptn)


def cartesian_kepler_state(
    ic_phase: PhasePoint,
    params: ManevParams,
    tau: float,
    tol: float = MEMBERSHIP_TOL,
) -> PhasePoint:
    """Exact cartesian state of the inverse-square problem at true-anomaly offset tau.

    The input is a transformed-chart phase point on the unit-radius invariant
    submanifold (checked to `tol`); the output is the physical phase point
    with unit normal coordinate and zero normal momentum:

        x(tau)     = (q0 cos(tau) + (mu0/ell0) sin(tau)) / rn(tau)
        kappa(tau) = kappa0 + (k1 / (m ell_bar0^2)) (mu(tau) - mu0)

    Only the pure inverse-square case is supported here; with a nonzero
    quadratic constant the angle frequencies differ and the cartesian state
    must be recovered by lifting the transformed solution instead.
    """
    if params.k2 != 0.0:
        raise ValueError("closed-form cartesian states require k2 = 0; lift the transformed solution")
    res_norm, res_ortho = q_residual(ic_phase, 1.0)
    if abs(res_norm) > tol or abs(res_ortho) > tol:
        raise ValueError(
            f"initial condition off the unit-radius submanifold: residuals ({res_norm:.2e}, {res_ortho:.2e})"
        )

    q0 = ic_phase.spatial
    mu0 = ic_phase.momentum_spatial
    qn0 = ic_phase.normal
    mun_tilde0 = qn0**2 * ic_phase.momentum_normal

    am = angular_momentum(q0, mu0, params.m)
    ell0 = am.magnitude
    if ell0 <= EPS_ELL:
        raise RectilinearError("rectilinear initial conditions have no angle parameterization")
    ell_bar0 = am.specific
    c = params.k1_bar / ell_bar0**2

    ct, st = np.cos(tau), np.sin(tau)
    mu_tau = mu0 * ct - ell0 * st * q0
    qn_tau = (qn0 - c) * ct + (mun_tilde0 / ell0) * st + c
    if qn_tau <= 0.0:
        raise DomainError(f"normal coordinate reached {qn_tau:.3e} at tau={tau}; radius escaped")

    x_tau = (q0 * ct + (mu0 / ell0) * st) / qn_tau
    kappa0 = qn0 * mu0 - mun_tilde0 * q0
    kappa_tau = kappa0 + c * (mu_tau - mu0)
    return PhasePoint(ConfigPoint(x_tau, 1.0), kappa_tau, 0.0)


def time_of(ic: QuasiState, sys: LinearSystem, tau: float) -> float:
    """Elapsed time over the angle interval [0, tau] by adaptive quadrature.

    dt/dtau = 1 / (ell_bar0 * rn(tau)^2); the integrand blows up if the
    normal coordinate crosses zero (the radius escaping to infinity), which
    is reported as a domain error.
    """
    m = sys.params.m
    beta = sys.beta0
    amp_c = ic.rn - sys.params.k1_bar / beta**2
    amp_s = ic.pn_tilde / (m * beta)
    offset = sys.params.k1_bar / beta**2

    def rn_of(tau_prime: float) -> float:
        eps = (beta / sys.ell_bar0) * tau_prime
        return amp_c * np.cos(eps) + amp_s * np.sin(eps) + offset

    if offset - np.hypot(amp_c, amp_s) <= 0.0:
        grid = np.linspace(0.0, tau, 4097)
        if np.any([rn_of(v) <= 0.0 for v in grid]):
            raise DomainError("normal coordinate crosses zero inside the interval; time diverges")

    value, _ = quad(
        lambda v: 1.0 / (sys.ell_bar0 * rn_of(v) ** 2),
        0.0,
        tau,
        epsabs=1e-13,
        epsrel=1e-10,
        limit=max(200, int(abs(tau) * 20) + 50),
    )
    return float(value)
