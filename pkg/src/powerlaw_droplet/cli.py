"""Command line entry point: ``powerlaw-droplet {similarity,table,spread,pde}``.

Exit codes: 0 success, 1 solver or runtime failure, 2 argument error.
"""

import argparse
from dataclasses import replace
import logging
import math
from pathlib import Path
import sys

import numpy as np

from . import io
from .dimensional import FluidParams, apparent_contact_angle, fit_spreading_exponent, front_radius, make_setup
from .pde import PdeStabilityError, RadialGrid, RunStats, init_drop, rescale_and_compare, run_until
from .scaling import (
    PAPER_LAMBDAS,
    angle_prefactor,
    build_constants_table,
    constants_from_critical,
    similarity_exponent,
    spreading_prefactor,
)
from .shooting import find_critical_kappa, solve_drop
from .similarity import PAPER_TABLE_OPTIONS, IntegratorOptions

__all__ = ["build_parser", "main"]

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("powerlaw_droplet")


class UsageError(Exception):
    """Bad arguments that argparse itself cannot detect."""


def _lambda_list(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}") from exc


def build_parser():
    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tolerance", type=float, default=1e-8, help="bisection width on kappa0")
    solver.add_argument("--h-stop", type=float, default=None, help="height that counts as the front")
    solver.add_argument("--step-fraction", type=float, default=None, help="RK4 step as a fraction of H")
    solver.add_argument("--front-test", choices=("asymptotic", "touch"), default=None,
                        help="how a trajectory reaching h_stop is classified")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="output file (directory for pde); stdout if omitted")
    output.add_argument("--format", choices=("csv", "json"), default="csv")

    fluid = argparse.ArgumentParser(add_help=False)
    fluid.add_argument("--lambda", dest="lam", type=float, required=True, help="rheology exponent")
    fluid.add_argument("--volume", type=float, default=1.0, help="drop volume [m^3]")
    fluid.add_argument("--gamma", type=float, default=1.0, help="surface tension [N/m]")
    fluid.add_argument("--m-index", type=float, default=1.0, help="consistency m [Pa s^(1/lambda)]")

    parser = argparse.ArgumentParser(prog="powerlaw-droplet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("similarity", parents=[solver, output], help="one similarity profile")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--kappa0", type=float, help="central curvature to integrate")
    which.add_argument("--critical", action="store_true", help="search for the zero-angle eigenvalue")
    p.add_argument("--max-rows", type=int, default=5000, help="thin the profile to at most this many rows")

    p = sub.add_parser("table", parents=[solver, output], help="spreading constants for several lambdas")
    p.add_argument("--lambdas", type=_lambda_list, default=list(PAPER_LAMBDAS))
    p.add_argument("--jobs", type=int, default=None, help="worker threads (default $POWERLAW_DROPLET_THREADS)")

    p = sub.add_parser("spread", parents=[solver, output, fluid], help="front radius and contact angle vs time")
    p.add_argument("--t-start", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1e3)
    p.add_argument("--t-points", type=int, default=61)

    p = sub.add_parser("pde", parents=[solver, output, fluid], help="direct simulation of the thin-film equation")
    p.add_argument("--grid-n", type=int, default=512)
    p.add_argument("--domain-R", type=float, default=10.0)
    p.add_argument("--initial-radius", type=float, default=1.0)
    p.add_argument("--shape", choices=("parabolic-cap", "cosine-bump"), default="parabolic-cap")
    p.add_argument("--t-end", type=float, default=None,
                   help="end time (default: when the predicted front reaches 0.8 R)")
    p.add_argument("--t-points", type=int, default=200, help="number of front records")
    p.add_argument("--compare-similarity", action="store_true")
    return parser


def _options(args, base):
    kw = {}
    if args.h_stop is not None:
        kw["h_stop"] = args.h_stop
    if args.step_fraction is not None:
        kw["step_fraction"] = args.step_fraction
    if args.front_test is not None:
        kw["front_test"] = args.front_test
    try:
        return replace(base, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_lambda(lam):
    if not (math.isfinite(lam) and lam > 1.0):
        raise UsageError(f"lambda must be > 1 (shear thinning) for a zero-angle drop, got {lam}")


def _check_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0.0):
            raise UsageError(f"{name} must be positive, got {value}")


def _sidecar_path(out):
    return Path(out).with_suffix(".json")


def cmd_similarity(args):
    if args.lam <= 0.0 or not math.isfinite(args.lam):
        raise UsageError(f"lambda must be positive, got {args.lam}")
    if args.max_rows is not None and args.max_rows < 2:
        raise UsageError("--max-rows must be at least 2")
    if args.format == "csv" and args.out in (None, "-"):
        raise UsageError("CSV output needs --out PATH (the scalars go to PATH with a .json suffix)")
    opts = _options(args, IntegratorOptions())
    if args.critical:
        _check_lambda(args.lam)
        crit = find_critical_kappa(args.lam, args.tolerance, opts)
        profile, kappa0 = crit.profile, crit.kappa_lambda
    else:
        _check_positive(kappa0=args.kappa0)
        profile, kappa0 = solve_drop(args.lam, args.kappa0, opts), args.kappa0

    scalars = {
        "lambda": args.lam,
        "kappa0": kappa0,
        "classification": profile.classification.value,
        "termination": profile.termination,
        "eta_f": profile.eta_f,
        "I": profile.shape_factor,
        "eta_i": profile.eta_i,
        "Hp_at_eta_i": profile.hp_at_eta_i,
        "contact_slope": profile.contact_slope,
        "S_lambda": None,
        "Q_lambda": None,
        "n_samples": len(profile),
    }
    if profile.has_front:
        scalars["S_lambda"] = spreading_prefactor(args.lam, profile.eta_f, profile.shape_factor)
        if profile.hp_at_eta_i is not None:
            scalars["Q_lambda"] = angle_prefactor(args.lam, profile.hp_at_eta_i, profile.shape_factor)

    keep = io.thin_rows(len(profile), args.max_rows)
    cols = (profile.eta[keep], profile.h[keep], profile.hp[keep], profile.k[keep])
    scalars["n_rows"] = int(keep.size)
    if args.format == "json":
        doc = dict(scalars)
        doc["profile"] = {name: col for name, col in zip(("eta", "H", "Hp", "K"), cols)}
        io.write_json(args.out, doc)
        return EXIT_OK
    io.write_csv(args.out, ("eta", "H", "Hp", "K"), zip(*cols))
    io.write_json(_sidecar_path(args.out), scalars)
    return EXIT_OK


TABLE_HEADER = ("lambda", "kappa_lambda", "eta_f", "I", "S_lambda", "Q_lambda")


def cmd_table(args):
    if not args.lambdas:
        raise UsageError("--lambdas must list at least one value")
    for lam in args.lambdas:
        _check_lambda(lam)
    opts = _options(args, PAPER_TABLE_OPTIONS)
    rows = build_constants_table(args.lambdas, args.tolerance, opts, n_jobs=args.jobs)
    failed = any(not r.ok for r in rows)

    def values(r):
        return (r.lam, r.kappa_lambda, r.eta_f, r.shape_factor, r.s_lambda, r.q_lambda)

    if args.format == "json":
        docs = []
        for r in rows:
            doc = dict(zip(TABLE_HEADER, values(r)))
            if not r.ok:
                doc["error"] = r.error
            docs.append(doc)
        io.write_json(args.out, docs)
    else:
        header = TABLE_HEADER + (("error",) if failed else ())
        body = (values(r) + ((r.error,) if failed else ()) for r in rows)
        io.write_csv(args.out, header, body)
    for r in rows:
        if not r.ok:
            print(f"lambda={r.lam}: {r.error}", file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


def _critical_setup(args, t_max=None):
    fluid = FluidParams(args.lam, args.m_index, args.gamma)
    crit = find_critical_kappa(args.lam, args.tolerance, _options(args, IntegratorOptions()))
    return crit, make_setup(fluid, args.volume, constants_from_critical(crit), t_max=t_max)


def cmd_spread(args):
    _check_lambda(args.lam)
    _check_positive(volume=args.volume, gamma=args.gamma, m_index=args.m_index,
                    t_start=args.t_start, t_end=args.t_end)
    if args.t_end < args.t_start:
        raise UsageError("--t-end must not be before --t-start")
    if args.t_points < 2 and args.t_end != args.t_start:
        raise UsageError("--t-points must be at least 2")
    t = np.geomspace(args.t_start, args.t_end, max(args.t_points, 1))
    t[0], t[-1] = args.t_start, args.t_end
    _, setup = _critical_setup(args)
    r = np.atleast_1d(front_radius(setup, t))
    theta = np.atleast_1d(apparent_contact_angle(setup, t))
    tan = np.tan(theta)
    cols = (t, r, tan, np.degrees(theta))
    names = ("t", "r_f", "tan_theta", "theta_deg")
    if args.format == "json":
        io.write_json(args.out, [dict(zip(names, row)) for row in zip(*cols)])
    else:
        io.write_csv(args.out, names, zip(*cols))
    return EXIT_OK


def _fit_window(series):
    """Records in the last octave of front growth (one octave spans 2**(7 lam+3) in time)."""
    final = series.r[-1]
    return (series.r >= 0.5 * final) & (series.t > 0.0)


def cmd_pde(args):
    _check_lambda(args.lam)
    _check_positive(volume=args.volume, gamma=args.gamma, m_index=args.m_index,
                    domain_R=args.domain_R, initial_radius=args.initial_radius)
    if args.out is None:
        raise UsageError("pde needs --out DIRECTORY")
    if args.t_end is not None:
        _check_positive(t_end=args.t_end)
    if args.t_points < 3:
        raise UsageError("--t-points must be at least 3")
    try:
        grid = RadialGrid(args.grid_n, args.domain_R)
        fluid = FluidParams(args.lam, args.m_index, args.gamma)
        state = init_drop(grid, fluid, args.volume, args.shape, args.initial_radius)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    crit = setup = None
    t_end = args.t_end
    if t_end is None or args.compare_similarity:
        crit, setup = _critical_setup(args)
    if t_end is None:
        # front_radius is proportional to t**beta
        t_end = (0.8 * args.domain_R / front_radius(setup, 1.0)) ** (1.0 / setup.beta)

    stats = RunStats()
    mass0 = state.mass
    try:
        final, series = run_until(state, t_end, n_records=args.t_points, stats=stats)
    except PdeStabilityError as exc:
        print(f"error: PDE run failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    beta = similarity_exponent(args.lam)
    window = _fit_window(series)
    summary = {
        "lambda": args.lam,
        "grid_n": args.grid_n,
        "domain_R": args.domain_R,
        "t_end": final.t,
        "beta_expected": beta,
        "beta_hat": None,
        "beta_rel_error": None,
        "prefactor_hat": None,
        "fit_t_range": None,
        "mass_drift": abs(final.mass - mass0) / mass0,
        "min_height_ratio": stats.min_height_ratio,
        "steps": stats.steps,
        "rejected_steps": stats.rejected,
        "front_retreats": stats.front_retreats,
        "deviation": None,
    }
    if np.count_nonzero(window) >= 3:
        sub = (series.t[window], series.r[window])
        beta_hat, c_hat = fit_spreading_exponent(sub)
        summary.update(beta_hat=beta_hat, prefactor_hat=c_hat,
                       beta_rel_error=(beta_hat - beta) / beta,
                       fit_t_range=[float(sub[0][0]), float(sub[0][-1])])
    if args.compare_similarity:
        summary["deviation"] = rescale_and_compare(final, crit, setup)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_csv(out / "front.csv", ("t", "r_front"), zip(series.t, series.r))
    io.write_csv(out / "profile.csv", ("r", "h"), zip(grid.r, final.h))
    io.write_json(out / "summary.json", summary)
    return EXIT_OK


COMMANDS = {"similarity": cmd_similarity, "table": cmd_table, "spread": cmd_spread, "pde": cmd_pde}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # solver failures are reported, not raised
        if args.verbose:
            log.exception("solver failure")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
