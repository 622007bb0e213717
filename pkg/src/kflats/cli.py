"""Command line interface.

Subcommands:

* ``exact``     closed-form moment, cumulant, asymptotic, and covariance report
* ``simulate``  Monte Carlo samples of the component vector, with summary
* ``validate``  simulated estimates against exact values, z-scored
* ``clt``       normal-approximation distance sweep over window radii

Exit codes: 0 success (and validation pass), 1 validation failure, 2 usage
error, 3 I/O error, 4 simulation budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import moments as mts
from . import stats as sts
from .errors import BudgetExceeded, KFlatsError
from .geometry import MeasureConvention, ProcessParams, functional_A_ball
from .simulator import BLOCK_SIZE, run_monte_carlo, sample_intrinsic_volumes

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_BUDGET = 4

_CONVENTIONS = {
    "invariant": MeasureConvention.INVARIANT,
    "signed-distance": MeasureConvention.SIGNED_DISTANCE,
}


class UsageError(Exception):
    """Invalid flag combination; maps to exit code 2."""


def _fnum(x: float) -> str:
    """Shortest decimal that round-trips the float."""
    return repr(float(x))


def _add_common(sp: argparse.ArgumentParser, with_j: bool) -> None:
    sp.add_argument("--dim", type=int, required=True, help="ambient dimension d")
    sp.add_argument("--k", type=int, required=True, help="flat dimension, 0 <= k <= d-1")
    if with_j:
        sp.add_argument(
            "--j", type=int, default=None,
            help="intrinsic volume index, 0 <= j <= k (default: k)",
        )
    sp.add_argument("--intensity", type=float, default=1.0, help="process intensity (default 1)")
    sp.add_argument("--radius", type=float, default=1.0, help="window radius (default 1)")
    sp.add_argument(
        "--convention", choices=sorted(_CONVENTIONS), default="invariant",
        help="flat measure normalization (default invariant)",
    )
    sp.add_argument("--max-order", type=int, default=4, help="highest order reported (default 4)")
    sp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    sp.add_argument(
        "--workers", type=int, default=None,
        help="worker threads (default: all cores; never affects results)",
    )
    sp.add_argument("--out", default="-", help="output path (default stdout)")
    sp.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kflats",
        description="Exact moments and Monte Carlo simulation of intrinsic "
        "volumes induced by Poisson k-flat processes in a ball window.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("exact", help="closed-form report for one component")
    _add_common(sp, with_j=True)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("simulate", help="draw component vectors and summarize")
    _add_common(sp, with_j=False)
    sp.add_argument("--reps", type=int, default=10000, help="replications (default 10000)")
    sp.add_argument(
        "--max-flats-per-rep", type=float, default=1e6,
        help="budget cap on the expected flats per replication (default 1e6)",
    )
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", help="z-score simulation against exact values")
    _add_common(sp, with_j=False)
    sp.add_argument("--reps", type=int, default=100000, help="replications (default 100000)")
    sp.add_argument(
        "--orders", dest="max_order", type=int,
        help="alias for --max-order (highest validated order)",
    )
    sp.add_argument("--z-threshold", type=float, default=4.0, help="pass threshold (default 4)")
    sp.add_argument("--corrupt-exact", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("clt", help="normal-approximation rate sweep over radii")
    _add_common(sp, with_j=True)
    sp.add_argument("--rhos", default="1,2,4,8,16", help="comma-separated radii (>= 3 distinct)")
    sp.add_argument("--reps", type=int, default=100000, help="replications per radius")
    sp.add_argument(
        "--slope-halfwidth", type=float, default=0.15,
        help="acceptance window around the theoretical slope (default 0.15)",
    )
    sp.set_defaults(func=cmd_clt)

    return parser


def _build_params(args: argparse.Namespace) -> ProcessParams:
    if args.dim < 1:
        raise UsageError("--dim must be >= 1")
    if not 0 <= args.k <= args.dim - 1:
        raise UsageError("--k must satisfy 0 <= k <= dim - 1")
    if not args.intensity > 0:
        raise UsageError("--intensity must be > 0")
    if not args.radius > 0:
        raise UsageError("--radius must be > 0")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be >= 1")
    return ProcessParams(
        args.dim, args.k, args.intensity, args.radius, _CONVENTIONS[args.convention]
    )


def _resolve_j(args: argparse.Namespace) -> int:
    j = args.k if args.j is None else args.j
    if not 0 <= j <= args.k:
        raise UsageError("--j must satisfy 0 <= j <= k")
    return j


def _check_order(args: argparse.Namespace, cap: int = 24) -> int:
    if not 1 <= args.max_order <= cap:
        raise UsageError(f"--max-order must lie in [1, {cap}]")
    return args.max_order


def _write_out(args: argparse.Namespace, text: str) -> None:
    if args.out in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config_pairs(p: ProcessParams, **extra) -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = [
        ("dim", p.d),
        ("k", p.k),
        ("intensity", p.intensity),
        ("radius", p.radius),
        ("convention", p.convention.value),
    ]
    pairs.extend(extra.items())
    return pairs


def cmd_exact(args: argparse.Namespace) -> int:
    p = _build_params(args)
    j = _resolve_j(args)
    m_max = _check_order(args)
    report = mts.moment_report(p, j, m_max)
    orders = list(range(1, m_max + 1))
    a_vals = [functional_A_ball(p, j, m).value for m in orders]
    asy_gamma = [mts.asymptotic_cumulant(p, j, m) for m in orders]
    asy_mu = [mts.asymptotic_moment(p, j, m) for m in orders]
    nlim = [mts.normalized_moment_limit(m) for m in orders]
    bound = mts.berry_esseen_bound(p, j)
    cov = mts.covariance_matrix(p)

    if args.fmt == "json":
        payload = {
            "config": dict(_config_pairs(p, j=j, max_order=m_max)),
            "mean": report.mean,
            "orders": orders,
            "functional_A": list(a_vals),
            "central_moments": list(report.central_moments),
            "cumulants": list(report.cumulants),
            "asymptotic_cumulant_exponent": [t.rho_exponent for t in asy_gamma],
            "asymptotic_cumulant_coefficient": [t.coefficient for t in asy_gamma],
            "asymptotic_moment_exponent": [t.rho_exponent for t in asy_mu],
            "asymptotic_moment_coefficient": [t.coefficient for t in asy_mu],
            "normalized_moment_limit": nlim,
            "berry_esseen_bound": bound,
            "covariance_matrix": [[float(v) for v in row] for row in cov],
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
        return EXIT_OK

    config = _config_pairs(p, j=j, max_order=m_max)
    lines = ["# kflats exact " + " ".join(f"{k}={v}" for k, v in config)]
    lines.append("quantity,order,value")
    lines.append(f"mean,,{_fnum(report.mean)}")
    for m, v in zip(orders, a_vals):
        lines.append(f"functional_A,{m},{_fnum(v)}")
    for m, v in zip(orders, report.central_moments):
        lines.append(f"central_moment,{m},{_fnum(v)}")
    for m, v in zip(orders, report.cumulants):
        lines.append(f"cumulant,{m},{_fnum(v)}")
    for m, t in zip(orders, asy_gamma):
        lines.append(f"asymptotic_cumulant_exponent,{m},{_fnum(t.rho_exponent)}")
        lines.append(f"asymptotic_cumulant_coefficient,{m},{_fnum(t.coefficient)}")
    for m, t in zip(orders, asy_mu):
        lines.append(f"asymptotic_moment_exponent,{m},{_fnum(t.rho_exponent)}")
        lines.append(f"asymptotic_moment_coefficient,{m},{_fnum(t.coefficient)}")
    for m, v in zip(orders, nlim):
        lines.append(f"normalized_moment_limit,{m},{_fnum(v)}")
    lines.append(f"berry_esseen_bound,,{_fnum(bound)}")
    for i in range(p.k + 1):
        for jj in range(p.k + 1):
            lines.append(f"covariance_{i}_{jj},,{_fnum(cov[i, jj])}")
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    p = _build_params(args)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    samples = sample_intrinsic_volumes(
        p, j_max=p.k, n_reps=args.reps, seed=args.seed, workers=args.workers,
        max_flats_per_rep=args.max_flats_per_rep,
    )
    means = samples.mean(axis=0)
    variances = samples.var(axis=0, ddof=1) if args.reps > 1 else np.zeros(p.k + 1)
    config = _config_pairs(
        p, reps=args.reps, seed=args.seed, block_size=BLOCK_SIZE,
        max_flats_per_rep=args.max_flats_per_rep,
    )

    if args.fmt == "json":
        payload = {
            "config": dict(config),
            "columns": ["rep"] + [f"V{j}" for j in range(p.k + 1)],
            "samples": [
                [i] + [int(row[0])] + [float(v) for v in row[1:]]
                for i, row in enumerate(samples)
            ],
            "summary": {
                "count": args.reps,
                "means": [float(v) for v in means],
                "variances": [float(v) for v in variances],
            },
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
        return EXIT_OK

    lines = ["# kflats simulate " + " ".join(f"{k}={v}" for k, v in config)]
    lines.append("rep," + ",".join(f"V{j}" for j in range(p.k + 1)))
    for i, row in enumerate(samples):
        rendered = [str(int(row[0]))] + [_fnum(v) for v in row[1:]]
        lines.append(f"{i}," + ",".join(rendered))
    lines.append(f"# summary count={args.reps}")
    lines.append("# summary means=" + ",".join(_fnum(v) for v in means))
    lines.append("# summary variances=" + ",".join(_fnum(v) for v in variances))
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


@dataclass(frozen=True)
class ValidationRow:
    name: str
    exact: float
    estimate: float
    standard_error: float

    @property
    def z(self) -> float:
        if self.standard_error > 0:
            return (self.estimate - self.exact) / self.standard_error
        return 0.0 if self.estimate == self.exact else math.inf


def cmd_validate(args: argparse.Namespace) -> int:
    p = _build_params(args)
    orders = args.max_order
    if not 2 <= orders <= 6:
        raise UsageError(
            "--orders must lie in [2, 6]: standard errors need twice the "
            "order and the accumulator caps at order 12"
        )
    if args.reps < 2:
        raise UsageError("--reps must be >= 2")
    acc = run_monte_carlo(
        p, j_max=p.k, n_reps=args.reps, max_order=2 * orders,
        seed=args.seed, workers=args.workers,
    )
    rows: list[ValidationRow] = []
    for j in range(p.k + 1):
        est_mu = sts.sample_central_moments(acc, orders, component=j)
        for m in range(2, orders + 1):
            rows.append(ValidationRow(
                f"mu_j{j}_m{m}",
                mts.central_moment_exact(p, j, m),
                est_mu.values[m - 1],
                est_mu.standard_errors[m - 1],
            ))
        est_gamma = sts.sample_cumulants(acc, orders, component=j)
        for m in range(2, orders + 1):
            rows.append(ValidationRow(
                f"gamma_j{j}_m{m}",
                mts.cumulant_exact(p, j, m),
                est_gamma.values[m - 1],
                est_gamma.standard_errors[m - 1],
            ))
    corr, corr_se = sts.sample_covariance_matrix(acc)
    exact_corr = mts.covariance_matrix(p)
    for i in range(p.k + 1):
        for j in range(i + 1, p.k + 1):
            rows.append(ValidationRow(
                f"corr_{i}_{j}", float(exact_corr[i, j]), float(corr[i, j]),
                float(corr_se[i, j]),
            ))
    if args.corrupt_exact:
        rows = [
            ValidationRow(r.name, r.exact * 1.05, r.estimate, r.standard_error)
            for r in rows
        ]
    worst = max(abs(r.z) for r in rows)
    passed = worst <= args.z_threshold

    config = _config_pairs(p, reps=args.reps, seed=args.seed, orders=orders)
    if args.fmt == "json":
        payload = {
            "config": dict(config),
            "rows": [
                {
                    "name": r.name,
                    "exact": r.exact,
                    "estimate": r.estimate,
                    "standard_error": r.standard_error,
                    "z": r.z,
                }
                for r in rows
            ],
            "z_threshold": args.z_threshold,
            "max_abs_z": worst,
            "passed": passed,
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = ["# kflats validate " + " ".join(f"{k}={v}" for k, v in config)]
        lines.append("name,exact,estimate,standard_error,z")
        for r in rows:
            lines.append(
                f"{r.name},{_fnum(r.exact)},{_fnum(r.estimate)},"
                f"{_fnum(r.standard_error)},{_fnum(r.z)}"
            )
        status = "pass" if passed else "FAIL"
        lines.append(
            f"# summary {status} max|z|={_fnum(worst)} threshold={_fnum(args.z_threshold)}"
        )
        _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_clt(args: argparse.Namespace) -> int:
    p = _build_params(args)
    j = _resolve_j(args)
    try:
        rhos = [float(tok) for tok in args.rhos.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"--rhos must be a comma-separated list of numbers: {exc}")
    if len(set(rhos)) < 3:
        raise UsageError("--rhos needs at least 3 distinct radii")
    if min(rhos) < 1.0:
        raise UsageError("--rhos entries must be >= 1")
    if args.reps < 2:
        raise UsageError("--reps must be >= 2")
    fit = sts.clt_rate_fit(p, j, rhos, args.reps, seed=args.seed, workers=args.workers)
    target = -0.5 * p.measure_exponent
    lo, hi = target - args.slope_halfwidth, target + args.slope_halfwidth
    bounded = all(d <= b for d, b in zip(fit.distances, fit.bounds))
    passed = bounded and lo <= fit.slope <= hi

    config = _config_pairs(p, j=j, reps=args.reps, seed=args.seed)
    if args.fmt == "json":
        payload = {
            "config": dict(config),
            "rhos": list(fit.rhos),
            "distances": list(fit.distances),
            "bounds": list(fit.bounds),
            "slope": fit.slope,
            "intercept": fit.intercept,
            "target_slope": target,
            "slope_window": [lo, hi],
            "passed": passed,
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = ["# kflats clt " + " ".join(f"{k}={v}" for k, v in config)]
        lines.append("rho,distance,bound")
        for rho, d, b in zip(fit.rhos, fit.distances, fit.bounds):
            lines.append(f"{_fnum(rho)},{_fnum(d)},{_fnum(b)}")
        status = "pass" if passed else "FAIL"
        lines.append(
            f"# summary {status} slope={_fnum(fit.slope)} intercept={_fnum(fit.intercept)}"
            f" target={_fnum(target)} window=[{_fnum(lo)},{_fnum(hi)}]"
        )
        _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KFlatsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
