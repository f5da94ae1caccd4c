"""Batch front-end: propagate, closed-form sampling, verification, comparison.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 domain/integration error, 4 unsupported combination.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .closed_form import LinearSystem, closed_form_state, time_of
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DomainError,
    DomainExitError,
    IntegrationError,
    NonOscillatoryError,
    RectilinearError,
)
from .euclid import ConfigPoint, PhasePoint, q_residual
from .hamiltonian import eval_H
from .projective import cotangent_lift
from .propagate import IntegratorConfig, Trajectory, integrate, lift_initial_conditions
from .regularized import ParamClock, QuasiState, from_quasi, to_quasi
from .verify import run_checks

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_UNSUPPORTED = 4


def _csv_header(nsp: int) -> str:
    cols = ["tau", "s", "t"]
    cols += [f"q{i}" for i in range(1, nsp + 1)] + ["qn"]
    cols += [f"mu{i}" for i in range(1, nsp + 1)] + ["pn_tilde"]
    cols += [f"x{i}" for i in range(1, nsp + 1)]
    cols += [f"kappa{i}" for i in range(1, nsp + 1)]
    cols += ["H", "ellsq", "res_q_norm", "res_q_ortho"]
    return ",".join(cols)


def _state_row(clock: ParamClock, z: QuasiState, model, params) -> list[float]:
    mu = from_quasi(z)
    kappa = cotangent_lift(mu)
    h = eval_H(mu, clock.t, model, params)
    rp = float(z.r @ z.p)
    ell_sq = float(z.r @ z.r) * float(z.p @ z.p) - rp * rp
    res = q_residual(mu, 1.0)
    row = [clock.tau, clock.s, clock.t]
    row += list(z.r) + [z.rn]
    row += list(z.p) + [z.pn_tilde]
    row += list(kappa.spatial)
    row += list(kappa.momentum_spatial)
    row += [h, ell_sq, res[0], res[1]]
    return row


def _format_row(row) -> str:
    # v + 0.0 normalizes negative zero
    return ",".join(f"{v + 0.0:.17g}" for v in row)


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")


def _trajectory_rows(traj: Trajectory, model, params) -> list[list[float]]:
    return [_state_row(s.clock, s.state, model, params) for s in traj.samples]


def _summary(header: str, rows: list[list[float]], out: Optional[str]) -> dict:
    cols = header.split(",")
    arr = np.array(rows)
    final = dict(zip(cols, (float(v) for v in arr[-1])))
    drift_names = ("H", "ellsq", "res_q_norm", "res_q_ortho")
    drifts = {}
    for name in drift_names:
        idx = cols.index(name)
        series = arr[:, idx]
        if name.startswith("res"):
            drifts[name] = float(np.abs(series).max())
        else:
            drifts[name] = float(np.abs(series - series[0]).max())
    return {"rows": len(rows), "final": final, "max_drift": drifts, "out": out}


def cmd_propagate(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    nsp = cfg.ic.r.size
    header = _csv_header(nsp)
    out_path = out or cfg.out_path
    epochs = cfg.sample_epochs()
    try:
        traj = integrate(
            cfg.span_param,
            cfg.ic,
            cfg.span_length,
            cfg.integrator,
            cfg.model,
            cfg.params,
            epochs=epochs,
        )
    except (DomainExitError, IntegrationError) as exc:
        if out_path and exc.trajectory is not None and exc.trajectory.samples:
            rows = _trajectory_rows(exc.trajectory, cfg.model, cfg.params)
            _write_csv(out_path, header, rows)
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    rows = _trajectory_rows(traj, cfg.model, cfg.params)
    if out_path:
        _write_csv(out_path, header, rows)
    if not quiet:
        print(json.dumps({"command": "propagate", **_summary(header, rows, out_path)}))
    return EXIT_OK


def cmd_closed_form(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    if cfg.perturbed:
        print("closed-form sampling requires an unperturbed model", file=sys.stderr)
        return EXIT_UNSUPPORTED
    nsp = cfg.ic.r.size
    header = _csv_header(nsp)
    out_path = out or cfg.out_path
    sys_ = LinearSystem.from_state(cfg.ic, cfg.params)
    taus = np.concatenate([[0.0], cfg.sample_epochs()])

    rows = []
    t_acc = 0.0
    integrand = _time_integrand(cfg.ic, sys_)
    for i, tau in enumerate(taus):
        if i > 0:
            seg, _ = quad(integrand, taus[i - 1], tau, epsabs=1e-13, epsrel=1e-10)
            t_acc += seg
        z = closed_form_state(cfg.ic, sys_, float(tau))
        clock = ParamClock(t=t_acc, s=float(tau) / sys_.ell_bar0, tau=float(tau))
        rows.append(_state_row(clock, z, cfg.model, cfg.params))
    if out_path:
        _write_csv(out_path, header, rows)
    if not quiet:
        print(json.dumps({"command": "closed-form", **_summary(header, rows, out_path)}))
    return EXIT_OK


def _time_integrand(ic: QuasiState, sys_: LinearSystem):
    params = sys_.params
    beta = sys_.beta0
    amp_c = ic.rn - params.k1_bar / beta**2
    amp_s = ic.pn_tilde / (params.m * beta)
    offset = params.k1_bar / beta**2

    def integrand(tau: float) -> float:
        eps = (beta / sys_.ell_bar0) * tau
        rn = amp_c * math.cos(eps) + amp_s * math.sin(eps) + offset
        return 1.0 / (sys_.ell_bar0 * rn**2)

    return integrand


def cmd_verify(seed: int, counts: float, out: Optional[str], quiet: bool) -> int:
    report = run_checks(seed=seed, scale=counts)
    text = json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    if not quiet:
        print(text)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILURE


def compare_table(cfg: RunConfig) -> list[dict]:
    """Final-position error of regularized vs direct fixed-step propagation.

    One row per (eccentricity, step budget); truth is the closed-form state
    after one angle period, the same code path as the closed-form subcommand.
    """
    params = cfg.params
    model = cfg.model
    eccs = cfg.eccentricities or (0.0, 0.5, 0.9, 0.99)
    budgets = cfg.budgets or (20_000,)
    two_pi = 2.0 * math.pi
    rows = []
    for e in eccs:
        r0 = 1.0 - e
        v0 = math.sqrt(params.k1_bar * (1.0 + e) / (1.0 - e))
        x0 = np.array([r0, 0.0, 0.0])
        vel = np.array([0.0, v0, 0.0])
        mu0 = lift_initial_conditions(x0, vel, params)
        z0 = to_quasi(mu0)
        sys_ = LinearSystem.from_state(z0, params)
        z_true = closed_form_state(z0, sys_, two_pi)
        x_true = cotangent_lift(from_quasi(z_true)).spatial
        period = time_of(z0, sys_, two_pi)
        kappa0 = PhasePoint(ConfigPoint(x0, 1.0), params.m * vel, 0.0)
        for budget in budgets:
            cfg_reg = IntegratorConfig(
                method="fixed_rk4", step=two_pi / budget, max_steps=budget + 8
            )
            reg = integrate("tau", z0, two_pi, cfg_reg, model, params, epochs=[two_pi])
            x_reg = cotangent_lift(from_quasi(reg.final.state)).spatial
            cfg_dir = IntegratorConfig(
                method="fixed_rk4", step=period / budget, max_steps=budget + 8
            )
            direct = integrate(
                "cartesian", kappa0, period, cfg_dir, model, params, epochs=[period]
            )
            x_dir = direct.final.state.spatial
            err_reg = float(np.linalg.norm(x_reg - x_true))
            err_dir = float(np.linalg.norm(x_dir - x_true))
            rows.append(
                {
                    "eccentricity": e,
                    "budget": budget,
                    "err_regularized": err_reg,
                    "err_direct": err_dir,
                    "ratio": err_dir / err_reg if err_reg > 0 else math.inf,
                    "truth": x_true,
                }
            )
    return rows


def cmd_compare(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    if cfg.model.v0 == "none":
        print("compare requires a kepler or manev model", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if cfg.perturbed:
        print("compare requires an unperturbed model (truth is closed-form)", file=sys.stderr)
        return EXIT_UNSUPPORTED
    rows = compare_table(cfg)
    nsp = len(rows[0]["truth"]) if rows else 3
    header = "eccentricity,budget,err_regularized,err_direct,ratio," + ",".join(
        f"truth_x{i}" for i in range(1, nsp + 1)
    )
    out_path = out or cfg.out_path
    flat_rows = [
        [r["eccentricity"], r["budget"], r["err_regularized"], r["err_direct"], r["ratio"]]
        + list(r["truth"])
        for r in rows
    ]
    if out_path:
        _write_csv(out_path, header, flat_rows)
    if not quiet:
        printable = [
            {k: (list(v) if isinstance(v, np.ndarray) else v) for k, v in r.items()}
            for r in rows
        ]
        print(json.dumps({"command": "compare", "rows": printable, "out": out_path}))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projreg",
        description="Regularized central-force propagation and verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("propagate", "closed-form", "compare"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML or JSON run configuration")
        p.add_argument("--out", default=None, help="output CSV path (overrides config)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--param", choices=("t", "s", "tau"), default=None)
        p.add_argument("--quiet", action="store_true")
    v = sub.add_parser("verify")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--counts", type=float, default=1.0, help="sample-count scale factor")
    v.add_argument("--out", default=None, help="also write the JSON report here")
    v.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.seed, args.counts, args.out, args.quiet)
        cfg = load_config(args.config, param_override=args.param)
        if args.command == "propagate":
            return cmd_propagate(cfg, args.out, args.quiet)
        if args.command == "closed-form":
            return cmd_closed_form(cfg, args.out, args.quiet)
        return cmd_compare(cfg, args.out, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, RectilinearError, NonOscillatoryError, IntegrationError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
