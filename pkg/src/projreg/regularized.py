"""Conformal factors, the quasi-momentum chart, and the regularized right-hand sides.

Two evolution parameters replace time: a Sundman-like parameter s with
dt/ds = 1/rn^2, and a true-anomaly-like parameter tau with dt/dtau equal to
that divided by the specific angular momentum.  In the chart
(r, p, rn, pn_tilde) with quasi-momentum pn_tilde = rn^2 * pn, the
unperturbed equations of motion are linear-affine in either parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import RectilinearError
from .euclid import ConfigPoint, PhasePoint, angular_momentum
from .hamiltonian import ForceModel, ManevParams, _evaluate_alpha, transform_potential

__all__ = [
    "EPS_ELL",
    "QuasiState",
    "QuasiTangent",
    "ParamClock",
    "to_quasi",
    "from_quasi",
    "conformal_factor",
    "rhs_s",
    "rhs_tau",
    "second_order_residual",
]

EPS_ELL = 1e-10


@dataclass(frozen=True)
class QuasiState:
    """Transformed state in the (r, p, rn, pn_tilde) chart."""

    r: np.ndarray
    p: np.ndarray
    rn: float
    pn_tilde: float

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        p = np.array(self.p, dtype=float)
        if r.shape != p.shape or r.ndim != 1:
            raise ValueError("r and p must be 1-D vectors of equal size")
        r.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rn", float(self.rn))
        object.__setattr__(self, "pn_tilde", float(self.pn_tilde))
        if not self.rn > 0.0:
            raise ValueError(f"normal coordinate must be positive, got {self.rn}")

    @property
    def dim(self) -> int:
        return self.r.size + 1

    def ell_bar(self, m: float) -> float:
        return angular_momentum(self.r, self.p, m).specific


@dataclass(frozen=True)
class QuasiTangent:
    """Coordinate rates in the quasi-momentum chart."""

    r: np.ndarray
    p: np.ndarray
    rn: float
    pn_tilde: float


@dataclass(frozen=True)
class ParamClock:
    """Synchronized values of the three evolution parameters."""

    t: float = 0.0
    s: float = 0.0
    tau: float = 0.0


def to_quasi(mu: PhasePoint) -> QuasiState:
    """Swap the normal momentum for the quasi-momentum rn^2 * pn."""
    rn = mu.normal
    if not rn > 0.0:
        raise ValueError(f"normal coordinate must be positive, got {rn}")
    return QuasiState(mu.spatial, mu.momentum_spatial, rn, rn**2 * mu.momentum_normal)


def from_quasi(z: QuasiState) -> PhasePoint:
    """Inverse chart change: pn = pn_tilde / rn^2."""
    return PhasePoint(ConfigPoint(z.r, z.rn), z.p, z.pn_tilde / z.rn**2)


def conformal_factor(state: QuasiState, which: str, m: float) -> float:
    """dt/ds or dt/dtau at the given state."""
    if which == "s":
        return 1.0 / state.rn**2
    if which == "tau":
        ell_bar = state.ell_bar(m)
        if ell_bar <= EPS_ELL:
            raise RectilinearError(
                f"specific angular momentum {ell_bar:.3e} too small for the angle parameterization"
            )
        return 1.0 / (ell_bar * state.rn**2)
    raise ValueError(f"which must be 's' or 'tau', got {which!r}")


def _time_rates(
    z: QuasiState, t: float, model: ForceModel, params: ManevParams
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Time-parameterized rates of (r, p, rn, pn_tilde), forces included."""
    m = params.m
    r_vec, p_vec, rn = z.r, z.p, z.rn
    r = float(np.linalg.norm(r_vec))
    rp = float(np.dot(r_vec, p_vec))
    p_sq = float(np.dot(p_vec, p_vec))
    ell_sq = r * r * p_sq - rp * rp

    mu = from_quasi(z)
    _, grad_u = transform_potential(model, mu.base, t, params)
    alpha = _evaluate_alpha(mu, t, model, params)
    a_sp = alpha.alpha_spatial if alpha is not None else 0.0
    a_n = alpha.alpha_normal if alpha is not None else 0.0

    d_r = (rn**2 / m) * (r * r * p_vec - rp * r_vec)
    d_p = -(rn**2 / m) * (p_sq * r_vec - rp * p_vec) - grad_u[:-1] + a_sp
    d_rn = rn**2 * z.pn_tilde / m
    d_ptn = -(rn**3 / m) * ell_sq + rn**2 * (-grad_u[-1] + a_n)
    return d_r, d_p, d_rn, d_ptn


def rhs_s(
    z: QuasiState, clock: ParamClock, model: ForceModel, params: ManevParams
) -> tuple[QuasiTangent, float]:
    """Sundman-parameterized rates plus dt/ds.

    Unperturbed, these reduce to

        r'  = -ell_bar_ij r_j        rn'       = pn_tilde / m
        p'  = -ell_bar_ij p_j        pn_tilde' = -m ell_bar^2 rn - dU0/drn

    and the force/perturbation terms enter scaled by dt/ds through the chain
    rule (the quasi-momentum equation picks up rn^2 * dt/ds = 1).
    """
    factor = conformal_factor(z, "s", params.m)
    d_r, d_p, d_rn, d_ptn = _time_rates(z, clock.t, model, params)
    return (
        QuasiTangent(factor * d_r, factor * d_p, factor * d_rn, factor * d_ptn),
        factor,
    )


def rhs_tau(
    z: QuasiState, clock: ParamClock, model: ForceModel, params: ManevParams
) -> tuple[QuasiTangent, float]:
    """Angle-parameterized rates plus dt/dtau; rejects near-rectilinear states."""
    factor = conformal_factor(z, "tau", params.m)
    d_r, d_p, d_rn, d_ptn = _time_rates(z, clock.t, model, params)
    return (
        QuasiTangent(factor * d_r, factor * d_p, factor * d_rn, factor * d_ptn),
        factor,
    )


def second_order_residual(
    states: Sequence[QuasiState],
    h: float,
    params: ManevParams,
    param: str = "s",
    model: Optional[ForceModel] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference second-derivative residuals along a uniformly sampled window.

    For the Sundman parameter the tested forms are

        r'' + ell_bar^2 r        and        rn'' + beta^2 rn - k1/m,

    with beta^2 = ell_bar^2 - k2/m evaluated per sample; for the angle
    parameter the frequencies are rescaled by 1/ell_bar^2.  The residuals
    equal the perturbation forcing (zero when unperturbed) up to O(h^2).

    Returns (spatial residuals, normal residuals) for the interior samples.
    The model argument selects which central-force constants apply; by default
    the Manev form with both constants from `params` is assumed.
    """
    if len(states) < 3:
        raise ValueError("need at least 3 samples for a central difference")
    if param not in ("s", "tau"):
        raise ValueError(f"param must be 's' or 'tau', got {param!r}")
    if h <= 0:
        raise ValueError("sample spacing must be positive")
    k1_bar = params.k1_bar
    k2_bar = params.k2_bar
    if model is not None:
        if model.v0 == "none":
            k1_bar = k2_bar = 0.0
        elif model.v0 == "kepler":
            k2_bar = 0.0

    r = np.stack([z.r for z in states])
    rn = np.array([z.rn for z in states])
    ell_bar_sq = np.array([z.ell_bar(params.m) ** 2 for z in states])

    d2r = (r[2:] - 2.0 * r[1:-1] + r[:-2]) / h**2
    d2rn = (rn[2:] - 2.0 * rn[1:-1] + rn[:-2]) / h**2
    beta_sq = ell_bar_sq[1:-1] - k2_bar

    if param == "s":
        spatial = d2r + ell_bar_sq[1:-1, None] * r[1:-1]
        normal = d2rn + beta_sq * rn[1:-1] - k1_bar
    else:
        spatial = d2r + r[1:-1]
        normal = d2rn + (beta_sq / ell_bar_sq[1:-1]) * rn[1:-1] - k1_bar / ell_bar_sq[1:-1]
    return spatial, normal
