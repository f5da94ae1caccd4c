"""Initial-condition lifting, numerical propagation, and trajectory projection.

Integrations run in the quasi-momentum chart for the transformed system
(parameterized by t, s, or tau) or in plain cartesian coordinates for the
unregularized reference dynamics.  All three evolution parameters are
co-integrated as extra state so every sample carries a synchronized clock.

Requested output epochs are reached by clamping the step to land on them
exactly (no dense-output interpolation), which keeps repeated runs
bit-reproducible.  Constraint drift off the invariant submanifold is
monitored through the per-sample residual diagnostics, never corrected.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, DomainExitError, IntegrationError
from .euclid import MEMBERSHIP_TOL, ConfigPoint, PhasePoint, q_residual, sigma_residual
from .hamiltonian import (
    SINGULARITY_EPS,
    ForceModel,
    ManevParams,
    PhaseTangent,
    eval_H,
    eval_K,
)
from .projective import EPS_DOMAIN, cotangent_lift, cotangent_unlift
from .regularized import EPS_ELL, ParamClock, QuasiState, from_quasi, to_quasi

__all__ = [
    "IntegratorConfig",
    "Diagnostics",
    "TrajectorySample",
    "Trajectory",
    "ProjectedSample",
    "ProjectedTrajectory",
    "lift_initial_conditions",
    "direct_cartesian_rhs",
    "integrate",
    "project_trajectory",
]

_RHS_KINDS = ("t", "s", "tau", "cartesian")


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration method and error-control settings."""

    method: str = "embedded_rk45"
    rtol: float = 1e-10
    atol: float = 1e-12
    step: Optional[float] = None
    max_steps: int = 1_000_000
    param: Optional[str] = None

    def __post_init__(self):
        if self.method not in ("fixed_rk4", "embedded_rk45"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "fixed_rk4" and not (self.step and self.step > 0):
            raise ValueError("fixed_rk4 requires a positive step")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("rtol and atol must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.param is not None and self.param not in ("t", "s", "tau"):
            raise ValueError(f"param must be one of t, s, tau; got {self.param!r}")


@dataclass(frozen=True)
class Diagnostics:
    """Conserved-quantity samples and submanifold residuals at one state."""

    h: float
    ell_sq: float
    res_q: tuple[float, float]
    res_sigma: tuple[float, float]
    energy_k: float


@dataclass(frozen=True)
class TrajectorySample:
    clock: ParamClock
    state: object  # QuasiState for transformed runs, PhasePoint for cartesian runs
    diagnostics: Diagnostics


@dataclass(frozen=True)
class Trajectory:
    """Ordered samples of one propagation; immutable once built."""

    param: str
    kind: str  # "transformed" | "cartesian"
    samples: tuple[TrajectorySample, ...]

    def clock_values(self, name: str) -> np.ndarray:
        return np.array([getattr(s.clock, name) for s in self.samples])

    def diagnostic_values(self, name: str) -> np.ndarray:
        return np.array([getattr(s.diagnostics, name) for s in self.samples])

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]


@dataclass(frozen=True)
class ProjectedSample:
    """Physical-side sample: cartesian position/momentum plus lift residuals."""

    clock: ParamClock
    position: np.ndarray
    momentum: np.ndarray
    normal_position: float
    kappa_n: float
    ell_sq: float


@dataclass(frozen=True)
class ProjectedTrajectory:
    samples: tuple[ProjectedSample, ...]


def lift_initial_conditions(x0, v0, params: ManevParams) -> PhasePoint:
    """Embed a cartesian position/velocity pair and pull it back to the transformed chart.

    The embedding puts the state on the unit-normal hyperplane bundle
    (normal coordinate 1, zero normal momentum); its preimage lies on the
    unit-radius invariant submanifold of the transformed dynamics.
    """
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if float(np.linalg.norm(x0)) <= EPS_DOMAIN:
        raise DomainError("cannot lift a state at zero radius")
    kappa = PhasePoint(ConfigPoint(x0, 1.0), params.m * v0, 0.0)
    return cotangent_unlift(kappa)


def direct_cartesian_rhs(
    kappa: PhasePoint, t: float, model: ForceModel, params: ManevParams
) -> PhaseTangent:
    """Unregularized reference dynamics on the physical hyperplane.

    The normal pair is frozen (its momentum is identically zero there), so
    only the spatial components evolve.
    """
    x = kappa.spatial
    r = float(np.linalg.norm(x))
    if model.singular and r <= SINGULARITY_EPS:
        raise DomainError(f"radius {r:.3e} at the central singularity")
    d_x = kappa.momentum_spatial / params.m
    d_k = -_central_gradient(model, params, x, r)
    if model.v1_gradient is not None:
        d_k = d_k - np.asarray(model.v1_gradient(x, t), dtype=float)
    if model.nonconservative is not None:
        d_k = d_k + np.asarray(model.nonconservative(kappa, t), dtype=float)
    return PhaseTangent(d_x, 0.0, d_k, 0.0)


def _central_gradient(model: ForceModel, params: ManevParams, x: np.ndarray, r: float) -> np.ndarray:
    if model.v0 == "none":
        return np.zeros_like(x)
    k2 = params.k2 if model.v0 == "manev" else 0.0
    dv_dr = params.k1 / r**2 + k2 / r**3
    return dv_dr * (x / r)


# --- flat right-hand sides ---
#
# Transformed state layout: [r (nsp), p (nsp), rn, pn_tilde, t, s, tau]
# Cartesian state layout:   [x (nsp), kappa (nsp), t, s, tau]


class _DomainExit(Exception):
    pass


class _StepUnderflow(Exception):
    """Step-size collapse; carries the furthest state reached for classification."""

    def __init__(self, x, y):
        super().__init__(f"step size underflow at parameter value {x!r}")
        self.x = x
        self.y = y


def _make_transformed_rhs(
    kind: str, model: ForceModel, params: ManevParams, nsp: int
) -> Callable[[float, np.ndarray], np.ndarray]:
    m = params.m
    k1 = params.k1 if model.v0 in ("kepler", "manev") else 0.0
    k2 = params.k2 if model.v0 == "manev" else 0.0
    has_v1 = model.v1_gradient is not None
    has_force = model.nonconservative is not None

    def rhs(_x: float, y: np.ndarray) -> np.ndarray:
        r = y[:nsp]
        p = y[nsp : 2 * nsp]
        rn = y[2 * nsp]
        ptn = y[2 * nsp + 1]
        t = y[2 * nsp + 2]
        r_sq = float(r @ r)
        if not (rn > 0.0) or r_sq <= 0.0:
            raise _DomainExit(f"left the valid region (|r|^2={r_sq:.3e}, rn={rn:.3e})")
        rmag = math.sqrt(r_sq)
        rp = float(r @ p)
        p_sq = float(p @ p)
        ell_sq = r_sq * p_sq - rp * rp
        ell_bar = math.sqrt(ell_sq) / m if ell_sq > 0.0 else 0.0

        du_sp = np.zeros(nsp)
        du_n = -k1 - k2 * rn
        a_sp = np.zeros(nsp)
        a_n = 0.0
        if has_v1 or has_force:
            rhat = r / rmag
            x_spatial = rhat / rn
            if has_v1:
                g = np.asarray(model.v1_gradient(x_spatial, t), dtype=float)
                radial = float(g @ rhat)
                du_sp = (g - radial * rhat) / (rn * rmag)
                du_n += -radial / rn**2
            if has_force:
                kap_sp = rn * rmag * (p - (rp / r_sq) * r) - ptn * rhat
                kappa = PhasePoint(ConfigPoint(x_spatial, rmag), kap_sp, rp / rmag)
                f = np.asarray(model.nonconservative(kappa, t), dtype=float)
                radial_f = float(f @ rhat)
                a_sp = (f - radial_f * rhat) / (rn * rmag)
                a_n = -radial_f / rn**2

        rn2 = rn * rn
        d_r = (rn2 / m) * (r_sq * p - rp * r)
        d_p = -(rn2 / m) * (p_sq * r - rp * p) - du_sp + a_sp
        d_rn = rn2 * ptn / m
        d_ptn = -(rn2 * rn / m) * ell_sq + rn2 * (-du_n + a_n)

        if kind == "t":
            scale = 1.0
        elif kind == "s":
            scale = 1.0 / rn2
        else:
            if ell_bar <= EPS_ELL:
                raise _DomainExit(
                    f"specific angular momentum {ell_bar:.3e} too small for the angle parameter"
                )
            scale = 1.0 / (ell_bar * rn2)

        dy = np.empty(2 * nsp + 5)
        dy[:nsp] = scale * d_r
        dy[nsp : 2 * nsp] = scale * d_p
        dy[2 * nsp] = scale * d_rn
        dy[2 * nsp + 1] = scale * d_ptn
        dy[2 * nsp + 2] = scale
        dy[2 * nsp + 3] = scale * rn2
        dy[2 * nsp + 4] = scale * ell_bar * rn2
        return dy

    return rhs


def _make_cartesian_rhs(
    model: ForceModel, params: ManevParams, nsp: int
) -> Callable[[float, np.ndarray], np.ndarray]:
    m = params.m
    k2 = params.k2 if model.v0 == "manev" else 0.0
    k1 = params.k1 if model.v0 in ("kepler", "manev") else 0.0
    singular = model.singular
    has_v1 = model.v1_gradient is not None
    has_force = model.nonconservative is not None

    def rhs(_x: float, y: np.ndarray) -> np.ndarray:
        x = y[:nsp]
        k = y[nsp : 2 * nsp]
        t = y[2 * nsp]
        r_sq = float(x @ x)
        if r_sq <= 0.0 or (singular and r_sq <= SINGULARITY_EPS**2):
            raise _DomainExit(f"radius^2 {r_sq:.3e} reached the central singularity")
        r = math.sqrt(r_sq)
        d_k = -(k1 / r**2 + k2 / r**3) * (x / r) if (k1 or k2) else np.zeros(nsp)
        if has_v1:
            d_k = d_k - np.asarray(model.v1_gradient(x, t), dtype=float)
        if has_force:
            kappa = PhasePoint(ConfigPoint(x, 1.0), k, 0.0)
            d_k = d_k + np.asarray(model.nonconservative(kappa, t), dtype=float)
        xk = float(x @ k)
        ell_sq = r_sq * float(k @ k) - xk * xk
        ell_bar = math.sqrt(ell_sq) / m if ell_sq > 0.0 else 0.0

        dy = np.empty(2 * nsp + 3)
        dy[:nsp] = k / m
        dy[nsp : 2 * nsp] = d_k
        dy[2 * nsp] = 1.0
        dy[2 * nsp + 1] = 1.0 / r_sq
        dy[2 * nsp + 2] = ell_bar / r_sq
        return dy

    return rhs


# --- steppers ---

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _rk4_step(f, x, y, h):
    k1 = f(x, y)
    k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(x + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _drive_fixed_rk4(f, x0, xf, y0, step, stops, record, max_steps):
    """Uniform RK4 steps, subdividing each inter-stop segment evenly."""
    x, y = x0, np.array(y0, dtype=float)
    taken = 0
    for stop in stops:
        seg_start = x
        seg = stop - seg_start
        n = max(1, int(math.ceil(seg / step - 1e-12)))
        h = seg / n
        for i in range(n):
            taken += 1
            if taken > max_steps:
                raise IntegrationError(f"exceeded max_steps={max_steps}")
            y = _rk4_step(f, x, y, h)
            x = seg_start + (i + 1) * h
        x = stop
        record(stop, y)


def _drive_dp45(f, x0, xf, y0, rtol, atol, h0, stops, record, record_all, max_steps):
    """Adaptive Dormand-Prince 5(4) driver with step clamping at the stops."""
    x = x0
    y = np.array(y0, dtype=float)
    span_scale = max(abs(x0), abs(xf), 1.0)
    h = min(h0, stops[0] - x0)
    k1 = f(x, y)
    attempts = 0
    stop_iter = iter(stops)
    next_stop = next(stop_iter, None)
    while next_stop is not None:
        if h > next_stop - x:
            h = next_stop - x
        if h <= span_scale * 1e-15:
            raise _StepUnderflow(x, y)
        attempts += 1
        if attempts > max_steps:
            raise IntegrationError(f"exceeded max_steps={max_steps}")
        ks = [k1]
        failed = False
        for i in range(1, 7):
            yi = y + h * (np.stack(ks, axis=0).T @ _DP_A[i])
            try:
                ks.append(f(x + _DP_C[i] * h, yi))
            except _DomainExit:
                # Trial state wandered out of the domain: retry with a smaller
                # step, unless the step is already negligible (true exit).
                if h <= span_scale * 1e-13:
                    raise
                h *= 0.25
                failed = True
                break
        if failed:
            continue
        kmat = np.stack(ks, axis=0)
        y5 = y + h * (kmat.T @ _DP_B5)
        y4 = y + h * (kmat.T @ _DP_B4)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            x_new = x + h
            landed = abs(x_new - next_stop) <= 1e-14 * max(1.0, abs(next_stop))
            if landed:
                x_new = next_stop
            x, y = x_new, y5
            k1 = ks[6]  # first-same-as-last
            if landed:
                record(x, y)
                next_stop = next(stop_iter, None)
            elif record_all:
                record(x, y)
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
        h = h * fac


def integrate(
    rhs: str,
    ic,
    span: float,
    cfg: IntegratorConfig,
    model: ForceModel,
    params: ManevParams,
    epochs: Optional[Sequence[float]] = None,
    clock0: ParamClock = ParamClock(),
) -> Trajectory:
    """Propagate over `span` in the chosen evolution parameter.

    rhs is one of "t", "s", "tau" (transformed dynamics in the quasi-momentum
    chart) or "cartesian" (the direct reference dynamics, time-parameterized).
    ic is a transformed-chart PhasePoint or QuasiState for the first three, a
    physical PhasePoint for "cartesian".  `epochs` are offsets from the start
    at which samples are taken (hit exactly); without them every accepted step
    is recorded.  Diagnostics are evaluated at each recorded sample.
    """
    if rhs not in _RHS_KINDS:
        raise ValueError(f"rhs must be one of {_RHS_KINDS}, got {rhs!r}")
    if not (np.isfinite(span) and span > 0):
        raise ValueError(f"span must be positive and finite, got {span}")
    param = "t" if rhs == "cartesian" else rhs
    if cfg.param is not None and cfg.param != param:
        raise ValueError(f"cfg.param={cfg.param!r} conflicts with rhs={rhs!r}")

    if rhs == "cartesian":
        if not isinstance(ic, PhasePoint):
            raise TypeError("cartesian integration needs a physical PhasePoint")
        if not ic.base.in_positive_domain():
            raise DomainError("cartesian initial condition outside the liftable region")
        nsp = ic.spatial.size
        y0 = np.concatenate([ic.spatial, ic.momentum_spatial, [clock0.t, clock0.s, clock0.tau]])
        flat_rhs = _make_cartesian_rhs(model, params, nsp)
        normal_frozen = (ic.normal, ic.momentum_normal)
    else:
        z0 = ic if isinstance(ic, QuasiState) else to_quasi(ic)
        nsp = z0.r.size
        radial = float(z0.r @ z0.p) / float(np.linalg.norm(z0.r))
        if abs(radial) > MEMBERSHIP_TOL:
            # reduced dynamics only mirror the physical flow where the lifted
            # normal momentum vanishes; off it the run is flagged, not refused
            warnings.warn(
                f"initial condition has radial momentum {radial:.3e}; the propagated "
                "flow does not correspond to a physical trajectory",
                stacklevel=2,
            )
        y0 = np.concatenate(
            [z0.r, z0.p, [z0.rn, z0.pn_tilde, clock0.t, clock0.s, clock0.tau]]
        )
        flat_rhs = _make_transformed_rhs(rhs, model, params, nsp)
        normal_frozen = None

    x0 = getattr(clock0, param)
    xf = x0 + span
    if epochs is None:
        stops = [xf]
        record_all = True
    else:
        offs = np.asarray(epochs, dtype=float)
        if offs.size == 0:
            raise ValueError("epochs must be non-empty when given")
        if np.any(offs <= 0) or np.any(offs > span + 1e-12 * max(1.0, span)):
            raise ValueError("epochs must lie in (0, span]")
        if np.any(np.diff(offs) <= 0):
            raise ValueError("epochs must be strictly increasing")
        stops = list(x0 + offs)
        if not math.isclose(stops[-1], xf, rel_tol=0, abs_tol=1e-12 * max(1.0, abs(xf))):
            stops.append(xf)
        record_all = False

    samples: list[TrajectorySample] = []

    def record(x: float, y: np.ndarray) -> None:
        clock = ParamClock(
            **{
                "t": x if param == "t" else y[-3],
                "s": x if param == "s" else y[-2],
                "tau": x if param == "tau" else y[-1],
            }
        )
        if rhs == "cartesian":
            state = PhasePoint(
                ConfigPoint(y[:nsp], normal_frozen[0]), y[nsp : 2 * nsp], normal_frozen[1]
            )
            diag = _diagnose_cartesian(state, clock.t, model, params)
        else:
            state = QuasiState(y[:nsp], y[nsp : 2 * nsp], y[2 * nsp], y[2 * nsp + 1])
            diag = _diagnose_transformed(state, clock.t, model, params)
        samples.append(TrajectorySample(clock, state, diag))

    record(x0, y0)
    try:
        if cfg.method == "fixed_rk4":
            if record_all:
                _drive_fixed_rk4_all(flat_rhs, x0, xf, y0, cfg.step, record, cfg.max_steps)
            else:
                _drive_fixed_rk4(flat_rhs, x0, xf, y0, cfg.step, stops, record, cfg.max_steps)
        else:
            h0 = cfg.step if cfg.step else span / 1000.0
            _drive_dp45(
                flat_rhs,
                x0,
                xf,
                y0,
                cfg.rtol,
                cfg.atol,
                h0,
                stops,
                record,
                record_all,
                cfg.max_steps,
            )
    except _DomainExit as exc:
        kind = "cartesian" if rhs == "cartesian" else "transformed"
        partial = Trajectory(param, kind, tuple(samples))
        raise DomainExitError(str(exc), trajectory=partial) from None
    except _StepUnderflow as exc:
        kind = "cartesian" if rhs == "cartesian" else "transformed"
        partial = Trajectory(param, kind, tuple(samples))
        # a collapsing step right at the domain boundary is an escape/collision,
        # not a tolerance problem
        if rhs == "cartesian":
            boundary = float(np.linalg.norm(exc.y[:nsp])) < 1e-6
        else:
            boundary = exc.y[2 * nsp] < 1e-6
        if boundary:
            raise DomainExitError(str(exc), trajectory=partial) from None
        raise IntegrationError(str(exc), trajectory=partial) from None
    except IntegrationError as exc:
        kind = "cartesian" if rhs == "cartesian" else "transformed"
        exc.trajectory = Trajectory(param, kind, tuple(samples))
        raise

    kind = "cartesian" if rhs == "cartesian" else "transformed"
    return Trajectory(param, kind, tuple(samples))


def _drive_fixed_rk4_all(f, x0, xf, y0, step, record, max_steps):
    n = max(1, int(math.ceil((xf - x0) / step - 1e-12)))
    if n > max_steps:
        raise IntegrationError(f"exceeded max_steps={max_steps}")
    h = (xf - x0) / n
    x, y = x0, y0
    for i in range(n):
        y = _rk4_step(f, x, y, h)
        x = x0 + (i + 1) * h
        record(x, y)


def _diagnose_transformed(
    z: QuasiState, t: float, model: ForceModel, params: ManevParams
) -> Diagnostics:
    mu = from_quasi(z)
    kappa = cotangent_lift(mu)
    r_sq = float(z.r @ z.r)
    rp = float(z.r @ z.p)
    ell_sq = r_sq * float(z.p @ z.p) - rp * rp
    return Diagnostics(
        h=eval_H(mu, t, model, params),
        ell_sq=ell_sq,
        res_q=q_residual(mu, 1.0),
        res_sigma=sigma_residual(kappa, 1.0),
        energy_k=eval_K(kappa, t, model, params),
    )


def _diagnose_cartesian(
    kappa: PhasePoint, t: float, model: ForceModel, params: ManevParams
) -> Diagnostics:
    mu = cotangent_unlift(kappa)
    x = kappa.spatial
    k = kappa.momentum_spatial
    xk = float(x @ k)
    ell_sq = float(x @ x) * float(k @ k) - xk * xk
    return Diagnostics(
        h=eval_H(mu, t, model, params),
        ell_sq=ell_sq,
        res_q=q_residual(mu, 1.0),
        res_sigma=sigma_residual(kappa, 1.0),
        energy_k=eval_K(kappa, t, model, params),
    )


def project_trajectory(traj: Trajectory) -> ProjectedTrajectory:
    """Map a transformed-side trajectory to physical cartesian samples.

    The lifted normal momentum is reported as a residual: it is an integral
    of motion and should stay at zero for runs started on the invariant
    submanifold.
    """
    if traj.kind != "transformed":
        raise ValueError("project_trajectory expects a transformed-side trajectory")
    out = []
    for sample in traj.samples:
        kappa = cotangent_lift(from_quasi(sample.state))
        x = kappa.spatial
        k = kappa.momentum_spatial
        xk = float(x @ k)
        ell_sq = float(x @ x) * float(k @ k) - xk * xk
        out.append(
            ProjectedSample(
                clock=sample.clock,
                position=x,
                momentum=k,
                normal_position=kappa.normal,
                kappa_n=kappa.momentum_normal,
                ell_sq=ell_sq,
            )
        )
    return ProjectedTrajectory(tuple(out))
