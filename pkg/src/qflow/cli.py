"""Command-line entry point: ``qflow {flow,check-sub,selftest} --config <path>``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import flow, functionals, oracle, subsolution, symfun
from .config import ConfigError, RunConfig, parse_config
from .field import TorusGeometry, TrigPolynomial, mixed_density, save_field

# oracle agreement bounds used by the selftest battery
SYM_RTOL = 1e-12
GRAD_ATOL = 1e-6
MIXED_RTOL = 1e-10
J_ATOL = 1e-6
FAULT = 1e-6


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_flow(cfg: RunConfig, out: Path) -> int:
    geom, fcfg, _ = cfg.build()
    report = flow.run(geom, fcfg)
    out.mkdir(parents=True, exist_ok=True)
    flow.write_series_csv(report, out / "series.csv", every=cfg.snapshot_every)
    save_field(out / "u_hat.qf1", geom, report.final_u_hat, "u_hat")

    mp_violations = flow.maximum_principle_violations(report, geom)
    c = functionals.constant_c(geom, cfg.k, cfg.l)
    J_applies = bool(np.all(fcfg.psi >= c))
    J_violations = flow.J_monotone_violations(report) if J_applies else 0
    summary = {
        "status": report.status,
        "steps": report.steps,
        "t": float(report.column("t")[-1]),
        "b": report.final_b,
        "b_consistent": report.b_consistent,
        "decay_rate": report.decay_rate,
        "residual": report.residual,
        "max_principle": "ok" if mp_violations == 0 else "violated",
        "max_principle_violations": mp_violations,
        "J_monotone": ("ok" if J_violations == 0 else "violated") if J_applies else "n/a",
        "J_monotone_violations": J_violations,
    }
    if report.theta_samples:
        summary["theta_min"] = min(th for _, _, th in report.theta_samples)
    if report.message:
        summary["message"] = report.message
    text = "".join(f"{key} = {_fmt(val)}\n" for key, val in summary.items())
    (out / "summary.txt").write_text(text)
    sys.stdout.write(text)

    healthy = (
        report.status == flow.CONVERGED
        and report.b_consistent
        and mp_violations == 0
        and J_violations == 0
        and summary.get("theta_min", 1.0) > 0
    )
    return 0 if healthy else 1


def cmd_check_sub(cfg: RunConfig) -> int:
    if cfg.ubar is None:
        if cfg.l >= 1:
            raise ConfigError("ubar: a subsolution table is required when l >= 1")
        cfg = dataclasses.replace(cfg, ubar="zero")
    geom, fcfg, u_bar = cfg.build()
    report = subsolution.check_subsolution(geom, u_bar, cfg.k, cfg.l, fcfg.psi)
    print(json.dumps(report.summary(), indent=2))
    return 0 if report.min_margin > 0 else 1


def _random_hermitian(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (Z + Z.conj().T)


def _cone_point(rng, n, k, margin=0.05):
    while True:
        lam = rng.normal(size=n) + rng.uniform(0.0, 2.0)
        if symfun.cone_margin(lam, k) >= margin:
            return lam


def selftest_battery(n_max=6, samples=2000, seed=0, fault=False):
    """Oracle-vs-fast-path deviations as ``{check: (deviation, bound)}``."""
    rng = np.random.default_rng(seed)
    results = {}

    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, n_max + 1))
        lam = rng.normal(size=n) * rng.uniform(0.1, 3.0)
        scale_lam = np.abs(lam)
        for k in range(n + 1):
            fast = symfun.elementary_sym(lam, k)
            if fault and k == n:
                fast *= 1.0 + FAULT
            scale = max(oracle.sym_enum(scale_lam, k), 1e-300)
            worst = max(worst, abs(fast - oracle.sym_enum(lam, k)) / scale)
    results["elementary_sym"] = (worst, SYM_RTOL)

    worst = 0.0
    pairs = [(k, l) for k in range(1, min(n_max, 3) + 1) for l in range(k)]
    for _ in range(max(samples // 10, 1)):
        k, l = pairs[int(rng.integers(len(pairs)))]
        n = int(rng.integers(max(k, 2), n_max + 1))
        worst = max(worst, oracle.fd_check_gradient(_cone_point(rng, n, k), k, l))
    results["f_gradient"] = (worst, GRAD_ATOL)

    worst = 0.0
    for _ in range(max(samples // 10, 1)):
        n = int(rng.integers(2, min(n_max, 3) + 1))
        A, B = _random_hermitian(rng, n), _random_hermitian(rng, n)
        i = int(rng.integers(0, n + 1))
        j = int(rng.integers(0, n - i + 1))
        ref = oracle.mixed_determinant(A, B, i, j)
        scale = max(1.0, np.linalg.norm(A) ** i * np.linalg.norm(B) ** j)
        worst = max(worst, abs(float(mixed_density(A, B, i, j)) - ref) / scale)
    results["mixed_density"] = (worst, MIXED_RTOL)

    worst = 0.0
    geom = TorusGeometry(2, 8, a=2.0, toy=True)
    for _ in range(3):
        rows = [((int(rng.integers(-2, 3)), int(rng.integers(-2, 3)), 0, 0), 0.01 * rng.normal(), rng.uniform(0, 6.3))
                for _ in range(3)]
        u = geom.sample(TrigPolynomial.from_rows(rows))
        for l in range(3):
            fast = functionals.J_functional(geom, u, l).value
            worst = max(worst, abs(fast - oracle.path_integral_J(geom, u, l, nodes=21)))
    results["J_functional"] = (worst, J_ATOL)
    return results


def cmd_selftest(cfg: RunConfig) -> int:
    results = selftest_battery(cfg.selftest_n, cfg.selftest_samples, cfg.seed, cfg.selftest_fault)
    ok = True
    for name, (dev, bound) in results.items():
        passed = dev <= bound
        ok &= passed
        print(f"{name:16s} max_dev = {dev:.3e}  bound = {bound:.0e}  {'PASS' if passed else 'FAIL'}")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="qflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("flow", "check-sub", "selftest"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "selftest", type=Path)
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--toy", action="store_true", help="fields depend on (x1, y1) only")
        if name == "selftest":
            p.add_argument("--inject-fault", action="store_true", help="perturb S_n by a relative 1e-6")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config) if args.config else RunConfig().validate()
        overrides = {}
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            overrides["seed"] = args.seed
        if args.toy:
            overrides["toy"] = True
        if getattr(args, "inject_fault", False):
            overrides["selftest_fault"] = True
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides).validate()
        if args.command == "flow":
            out = args.out or Path(cfg.out or ".")
            return cmd_flow(cfg, out)
        if args.command == "check-sub":
            return cmd_check_sub(cfg)
        return cmd_selftest(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"qflow: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
