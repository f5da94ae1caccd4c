"""Run-configuration files: TOML (preferred) or JSON with the same structure.

Schema (TOML section / key names):

    [model]    v0 = "kepler" | "manev" | "none"
               k1 = 1.0            # central strength (ignored for v0 = "none")
               k2 = 0.0            # quadratic strength, manev only
               drag = 0.0          # optional uniform drag coefficient
               accel = [0, 0, 0]   # optional fixed external acceleration
    [params]   m = 1.0
    [ic]       x0 = [...]          # cartesian position, with
               v0 = [...]          # cartesian velocity -- or instead:
    [ic.transformed]  r = [...], p = [...], rn = 1.0, pn_tilde = 0.0
    [integrator]      method, rtol, atol, step, max_steps, param
    [span]     parameter = "tau", length = 6.2831853
    [output]   path = "traj.csv", samples = 200   # or step = 0.01
    [compare]  eccentricities = [...], budgets = [...]   # compare subcommand

Everything is nondimensional; no unit handling is performed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .euclid import PhasePoint
from .hamiltonian import ForceModel, ManevParams
from .propagate import IntegratorConfig, lift_initial_conditions
from .regularized import QuasiState, to_quasi

__all__ = ["RunConfig", "load_config"]


@dataclass(frozen=True)
class RunConfig:
    model: ForceModel
    params: ManevParams
    ic: QuasiState
    integrator: IntegratorConfig
    span_param: str
    span_length: float
    out_path: Optional[str]
    samples: Optional[int]
    sample_step: Optional[float]
    drag: float
    accel: tuple[float, ...]
    eccentricities: tuple[float, ...] = ()
    budgets: tuple[int, ...] = ()

    @property
    def perturbed(self) -> bool:
        return self.drag != 0.0 or any(a != 0.0 for a in self.accel)

    def sample_epochs(self) -> np.ndarray:
        span = self.span_length
        if self.sample_step:
            count = max(1, int(round(span / self.sample_step)))
        else:
            count = self.samples or 200
        return np.linspace(span / count, span, count)


def _read_table(path: Path) -> dict:
    raw = path.read_bytes().decode()
    if path.suffix.lower() == ".json":
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    try:
        return tomllib.loads(raw)
    except tomllib.TOMLDecodeError as exc:
        if path.suffix.lower() == ".toml":
            raise ConfigError(f"{path}: invalid TOML: {exc}") from None
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            raise ConfigError(f"{path}: not parseable as TOML or JSON") from None


def _vector(section: dict, key: str, where: str) -> np.ndarray:
    try:
        vec = np.asarray(section[key], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key}: missing or not a numeric array") from exc
    if vec.ndim != 1 or vec.size < 2:
        raise ConfigError(f"{where}.{key}: expected a flat vector of dimension >= 2")
    return vec


def _scalar(section: dict, key: str, default=None, where: str = "") -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def load_config(path, param_override: Optional[str] = None) -> RunConfig:
    """Parse and validate a configuration file into a ready-to-run bundle."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    data = _read_table(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")

    model_sec = data.get("model", {})
    v0 = model_sec.get("v0", "kepler")
    if v0 not in ("none", "kepler", "manev"):
        raise ConfigError(f"model.v0: must be none|kepler|manev, got {v0!r}")
    k1 = _scalar(model_sec, "k1", 0.0 if v0 == "none" else None, "model")
    k2 = _scalar(model_sec, "k2", 0.0, "model") if v0 == "manev" else 0.0
    drag = _scalar(model_sec, "drag", 0.0, "model")
    if drag < 0.0:
        raise ConfigError("model.drag: must be >= 0")

    params_sec = data.get("params", {})
    m = _scalar(params_sec, "m", 1.0, "params")
    try:
        params = ManevParams(m=m, k1=k1, k2=k2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    accel = np.zeros(0)
    if "accel" in model_sec:
        accel = _vector(model_sec, "accel", "model")

    ic_sec = data.get("ic")
    if not isinstance(ic_sec, dict):
        raise ConfigError("ic: section required")
    has_cartesian = "x0" in ic_sec or "v0" in ic_sec
    has_transformed = "transformed" in ic_sec
    if has_cartesian == has_transformed:
        raise ConfigError("ic: provide exactly one of (x0, v0) or [ic.transformed]")
    if has_cartesian:
        x0 = _vector(ic_sec, "x0", "ic")
        v0_vec = _vector(ic_sec, "v0", "ic")
        if x0.size != v0_vec.size:
            raise ConfigError("ic: x0 and v0 dimensions differ")
        nsp = x0.size
        try:
            ic = to_quasi(lift_initial_conditions(x0, v0_vec, params))
        except ValueError as exc:
            raise ConfigError(f"ic: {exc}") from None
    else:
        sub = ic_sec["transformed"]
        if not isinstance(sub, dict):
            raise ConfigError("ic.transformed: must be a table")
        try:
            ic = QuasiState(
                _vector(sub, "r", "ic.transformed"),
                _vector(sub, "p", "ic.transformed"),
                _scalar(sub, "rn", None, "ic.transformed"),
                _scalar(sub, "pn_tilde", 0.0, "ic.transformed"),
            )
        except ValueError as exc:
            raise ConfigError(f"ic.transformed: {exc}") from None
        nsp = ic.r.size

    if accel.size and accel.size != nsp:
        raise ConfigError("model.accel: dimension does not match the initial condition")
    accel_vec = accel if accel.size else np.zeros(nsp)

    nonconservative = None
    if drag != 0.0 or np.any(accel_vec != 0.0):
        accel_force = params.m * accel_vec

        def nonconservative(kappa: PhasePoint, t: float, _d=drag, _a=accel_force):
            return -_d * kappa.momentum_spatial + _a

    model = ForceModel(v0=v0, nonconservative=nonconservative)

    span_sec = data.get("span", {})
    span_param = span_sec.get("parameter", "tau")
    span_length = _scalar(span_sec, "length", None, "span")
    if span_length <= 0 or not np.isfinite(span_length):
        raise ConfigError("span.length: must be positive and finite")

    integ_sec = data.get("integrator", {})
    method = integ_sec.get("method", "embedded_rk45")
    step = integ_sec.get("step")
    try:
        integrator = IntegratorConfig(
            method=method,
            rtol=_scalar(integ_sec, "rtol", 1e-10, "integrator"),
            atol=_scalar(integ_sec, "atol", 1e-12, "integrator"),
            step=float(step) if step is not None else None,
            max_steps=int(_scalar(integ_sec, "max_steps", 1_000_000, "integrator")),
            param=integ_sec.get("param"),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from None

    if param_override is not None:
        span_param = param_override
        integrator = IntegratorConfig(
            method=integrator.method,
            rtol=integrator.rtol,
            atol=integrator.atol,
            step=integrator.step,
            max_steps=integrator.max_steps,
            param=param_override,
        )
    if span_param not in ("t", "s", "tau"):
        raise ConfigError(f"span.parameter: must be t|s|tau, got {span_param!r}")
    if integrator.param is not None and integrator.param != span_param:
        raise ConfigError(
            f"integrator.param={integrator.param!r} conflicts with span.parameter={span_param!r}"
        )

    out_sec = data.get("output", {})
    out_path = out_sec.get("path")
    samples = out_sec.get("samples")
    sample_step = out_sec.get("step")
    if samples is not None and (not isinstance(samples, int) or samples <= 0):
        raise ConfigError("output.samples: must be a positive integer")
    if sample_step is not None and sample_step <= 0:
        raise ConfigError("output.step: must be positive")

    cmp_sec = data.get("compare", {})
    eccs = tuple(float(e) for e in cmp_sec.get("eccentricities", ()))
    budgets = tuple(int(b) for b in cmp_sec.get("budgets", ()))
    if any(not 0.0 <= e < 1.0 for e in eccs):
        raise ConfigError("compare.eccentricities: must lie in [0, 1)")
    if any(b <= 0 for b in budgets):
        raise ConfigError("compare.budgets: must be positive")

    return RunConfig(
        model=model,
        params=params,
        ic=ic,
        integrator=integrator,
        span_param=span_param,
        span_length=float(span_length),
        out_path=out_path,
        samples=samples,
        sample_step=sample_step,
        drag=drag,
        accel=tuple(accel_vec),
        eccentricities=eccs,
        budgets=budgets,
    )
