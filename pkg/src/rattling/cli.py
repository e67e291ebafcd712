"""Command-line interface: ``rattling simulate | astar | pattern | selftest``.

Exit status: 0 success, 2 invalid configuration, 3 numerical failure,
4 invariant violation.  Diagnostics are a single line on stderr.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import analysis, specfun
from .bounds import check_runtime_bounds
from .counterexample import accumulation_bands, build_counterexample
from .errors import AccuracyError, DomainError, InvariantViolation, NoProgressError, RattlingError, StepSizeError
from .green import GreenEvaluator
from .patterns import check_periodic_window, count_p, gen_quasiperiodic, quasi_uniformity_metric
from .relay import ModelParams
from .solver import SolverConfig, profile, rescale_events, run_event_driven
from .stepper import run_time_stepper

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4


def _number(text: str):
    """Parse ``'1/3'`` as an exact fraction, anything else as float."""
    if "/" in text:
        return Fraction(text)
    return float(text)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


# -- simulate -------------------------------------------------------------------

def cmd_simulate(args) -> int:
    params = ModelParams(args.h1, args.h2, args.c)
    if args.events is None and args.horizon is None:
        raise DomainError("give --events or --horizon")
    cfg = SolverConfig(
        time_tol=args.time_tol,
        value_tol=args.value_tol,
        horizon=args.horizon,
        max_events=args.events,
        verify_with_green=not args.no_verify,
    )
    if args.method == "event":
        log_ = run_event_driven(params, cfg)
    else:
        log_ = run_time_stepper(params, cfg)

    bounds = check_runtime_bounds(log_)
    if not bounds.ok(cfg.value_tol):
        raise InvariantViolation(f"a-priori bounds violated: {bounds.violations}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    extra = {"bounds": bounds.as_dict()}
    if args.timestamp:
        extra["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    tau = None
    if args.epsilon is not None:
        tau = rescale_events(log_, args.epsilon).times
        extra["epsilon"] = args.epsilon
    log_.save(out, tau=tau, extra_meta=extra)

    summary = {"events": len(log_), "last_node": log_.max_node, "last_time": log_.times[-1]}
    if len(log_) >= 20:
        report = analysis.fit_rattling(log_)
        report.save_json(out.with_name(out.name + "_report.json"))
        _write(out.with_name(out.name + "_omega.csv"), report.omega_csv())
        summary.update(measured_a=report.measured_a, predicted_a=report.predicted_a,
                       measured_p_star=report.measured_p_star)
    if args.profile_times:
        n_max = args.profile_nmax or params.max_candidate(max(args.profile_times)) + 10
        rows = ["n,t,u"]
        for t in args.profile_times:
            if t > log_.horizon:
                raise DomainError(f"profile time {t} beyond the computed horizon {log_.horizon}")
            u = profile(log_, t, n_max)
            rows += [f"{n},{float(t)!r},{float(v)!r}" for n, v in enumerate(u)]
        _write(out.with_name(out.name + "_profile.csv"), "\n".join(rows) + "\n")
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


# -- astar ----------------------------------------------------------------------

def cmd_astar(args) -> int:
    for lam in args.lam:
        if not lam > 2:
            raise DomainError(f"lambda must exceed 2, got {lam}")
    text = analysis.astar_table_csv(args.lam)
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    if args.profiles:
        _write(Path(args.profiles), analysis.profiles_csv())
    return EXIT_OK


# -- pattern ----------------------------------------------------------------------

def cmd_pattern(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.counterexample:
        big = build_counterexample(args.levels)
        rows = ["j,M_j,m_j,density,sampled_metric"]
        dens = []
        for j in range(1, big.levels + 1):
            metric = big.sampled_metric(j) if big.m[j] > 1 else math.nan
            dens.append(float(big.density(j)))
            rows.append(f"{j},{big.M[j]},{big.m[j]},{dens[-1]!r},{metric!r}")
        _write(out.with_name(out.name + "_counterexample.csv"), "\n".join(rows) + "\n")
        desc = {"counterexample_levels": big.levels, "n_max": big.M[-1], "start": str(big.p[0])}
        _write(out.with_suffix(".json"), json.dumps(desc, sort_keys=True, indent=2) + "\n")
        bands = accumulation_bands(dens, args.band_gap)
        print(json.dumps({"levels": big.levels, "bands": bands}))
        return EXIT_OK

    alpha = args.alpha
    beta = args.beta
    pat = gen_quasiperiodic(alpha, beta, args.nmax)
    pat.save_json(out.with_suffix(".json"))
    _write(out.with_name(out.name + "_membership.csv"), pat.membership_csv())
    rows = ["n,p,metric"]
    for n in pat.positive_nodes:
        p = count_p(pat, n)
        if p >= 1:
            rows.append(f"{n},{p},{quasi_uniformity_metric(pat, n)!r}")
    _write(out.with_name(out.name + "_metric.csv"), "\n".join(rows) + "\n")
    summary = {"members": len(pat.positive_nodes), "first": list(pat.positive_nodes[:5])}
    if args.window:
        p1, p2 = args.window
        j_max = args.nmax - p1 - p2
        summary["window"] = {"p1": p1, "p2": p2, "holds": check_periodic_window(pat, p1, p2, args.j_min, j_max)}
    print(json.dumps(summary))
    return EXIT_OK


# -- selftest ---------------------------------------------------------------------

def _check_specfun() -> list[tuple[str, float, float]]:
    xs = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
    ident = float(np.max(np.abs(2 * specfun.h(xs) + xs * specfun.g(xs) - specfun.f(xs))))
    grid = np.linspace(0.1, 5.0, 50)
    d = 1e-5
    fd_g = (specfun.f(grid + d) - specfun.f(grid - d)) / (2 * d) - specfun.g(grid)
    fd_h = (specfun.g(grid + d) - specfun.g(grid - d)) / (2 * d) - specfun.h(grid)
    quad = max(abs(specfun.f_defining_integral(x) - specfun.f(x)) for x in (0.5, 1.0, 3.0))
    return [
        ("2h + xg - f", ident, 1e-12),
        ("g(0) + 1/2", abs(specfun.g(0.0) + 0.5), 1e-15),
        ("f' - g (finite difference)", float(np.max(np.abs(fd_g))), 1e-6),
        ("g' - h (finite difference)", float(np.max(np.abs(fd_h))), 1e-6),
        ("f vs defining integral", quad, 1e-10),
    ]


def _check_green() -> list[tuple[str, float, float]]:
    gr = GreenEvaluator()
    ode = sym = anti = 0.0
    for t in (0.25, 1.0, 4.0, 16.0):
        for n in range(9):
            res = gr.gamma_dot(n, t) - gr.laplacian_gamma(n, t) - (1.0 if n == 0 else 0.0)
            ode = max(ode, abs(res))
            sym = max(sym, abs(gr.gamma(-n, t) - gr.gamma(n, t)))
            anti = max(anti, abs(gr.grad_gamma(-(n + 1), t) + gr.grad_gamma(n, t)))
    return [("ODE residual", ode, 1e-9), ("symmetry", sym, 0.0), ("gradient antisymmetry", anti, 0.0)]


def _check_integrals() -> list[tuple[str, float, float]]:
    dual = 0.0
    for a in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0):
        dual = max(dual, abs(analysis.integral_I_F(a, cross_check=False) - analysis.integral_I_F_semi_infinite(a)))
        dual = max(dual, abs(analysis.integral_I_G(a, cross_check=False) - analysis.integral_I_G_semi_infinite(a)))
    ident = max(abs(analysis.identity_main3(a)) for a in (0.2, 1.0, 5.0))
    return [("I_F/I_G dual forms", dual, 1e-9), ("(2a+1)I_G - 2I_F + 2a", ident, 1e-9)]


SELFTEST_GROUPS: dict[str, Callable[[], list]] = {
    "specfun": _check_specfun,
    "green": _check_green,
    "integrals": _check_integrals,
}


def cmd_selftest(args) -> int:
    groups = list(SELFTEST_GROUPS) if args.group == "all" else [args.group]
    failed = False
    for name in groups:
        results = SELFTEST_GROUPS[name]()
        ok = True
        for label, value, tol in results:
            if args.strict is not None:
                tol = min(tol, args.strict) if tol > 0 else tol
            good = value <= tol
            ok &= good
            print(f"  {name}: {label:28s} {value:.3e} <= {tol:.1e}  {'ok' if good else 'FAIL'}")
        failed |= not ok
        print(f"{name} {'PASS' if ok else 'FAIL'}")
    return EXIT_NUMERIC if failed else EXIT_OK


# -- wiring ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rattling", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="compute switching events and a fit report",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    s.add_argument("--h1", type=float, default=1.0, help="relay output before switching")
    s.add_argument("--h2", type=float, default=0.0, help="minus the relay output after switching")
    s.add_argument("--c", type=float, default=0.1, help="initial profile -c n^2")
    s.add_argument("--events", type=int, default=None, help="stop after this many events")
    s.add_argument("--horizon", type=float, default=None, help="stop at this time")
    s.add_argument("--time-tol", type=float, default=1e-9)
    s.add_argument("--value-tol", type=float, default=1e-7)
    s.add_argument("--method", choices=("event", "stepper"), default="event")
    s.add_argument("--no-verify", action="store_true", help="skip the direct Green-sum check at each switching")
    s.add_argument("--epsilon", type=float, default=None, help="add a tau = epsilon^2 t column")
    s.add_argument("--profile-times", type=float, nargs="*", default=None, help="write u_n(t) at these times")
    s.add_argument("--profile-nmax", type=int, default=None)
    s.add_argument("--timestamp", action="store_true", help="record the creation time in the sidecar")
    s.add_argument("--out", default="run", help="output stem")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("astar", help="table of the propagation constant",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    a.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[3.0, 5.0, 10.0, 50.0])
    a.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    a.add_argument("--profiles", default=None, help="also write F/G/H profiles at a = 0.2, 1, 5 here")
    a.set_defaults(func=cmd_astar)

    p = sub.add_parser("pattern", help="quasiperiodic patterns and the counterexample",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--alpha", type=_number, default=Fraction(1, 2), help="frequency; 'p/q' is exact")
    p.add_argument("--beta", type=_number, default=Fraction(1, 4), help="phase; 'p/q' is exact")
    p.add_argument("--nmax", type=int, default=1000)
    p.add_argument("--window", type=int, nargs=2, metavar=("P1", "P2"), default=None)
    p.add_argument("--j-min", type=int, default=1)
    p.add_argument("--counterexample", action="store_true")
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--band-gap", type=float, default=0.05)
    p.add_argument("--out", default="pattern", help="output stem")
    p.set_defaults(func=cmd_pattern)

    t = sub.add_parser("selftest", help="identity and residual checks",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    t.add_argument("--group", choices=("all", *SELFTEST_GROUPS), default="all")
    t.add_argument("--strict", type=float, default=None, help="tighten every group tolerance to at most this value")
    t.set_defaults(func=cmd_selftest)
    return ap


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(exc, (AccuracyError, NoProgressError, StepSizeError, ArithmeticError)):
        return EXIT_NUMERIC
    if isinstance(exc, ValueError):
        return EXIT_CONFIG
    return EXIT_NUMERIC


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RattlingError, ValueError, ArithmeticError) as exc:
        print(f"rattling: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
