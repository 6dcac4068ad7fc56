"""Batch command-line front end; every verification is a subcommand.

Consumers are scripts and CI: output is JSON (one report object) or CSV,
written to stdout or --output.  Exit codes: 0 all asserted checks passed,
1 a check failed, 2 bad configuration, 3 numerical failure (series
non-convergence, ambiguous zero, quadrature breakdown).  Reports embed the
resolved configuration and seed; the timestamp field is labeled so byte
comparisons can exclude it.
"""

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .errors import BellshapeError
from .stable import (
    Alpha,
    SeriesConfig,
    density_derivative,
    sample_stable,
)
from .signs import Grid, log_grid, verify_bell_shape
from .factorization import factorization_residual
from .chains import default_chain, verify_wbs
from .totalpos import (
    build_kernel,
    find_negative_minor_2x2,
    scan_minors,
    stable_density_evaluator as build_stable_evaluator,
    vd_bound_check,
)
from .selfdecomp import (
    LogBetaExample,
    conjecture2_probe,
    integer_alpha_factorization_mc,
    spectral_k,
)
from . import chains


def _alpha_arg(parser, required=True):
    parser.add_argument("--alpha", type=float, required=required,
                        help="stability index in (0, 1)")


def _common_args(parser):
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", default=None, help="write report here instead of stdout")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dry-run", action="store_true",
                        help="print the resolved config without computing")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellshape", description=__doc__)
    p.add_argument("--version", action="version", version=f"bellshape {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("eval", help="evaluate the stable density or a derivative")
    _alpha_arg(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--max-terms", type=int, default=100_000)
    sp.add_argument("--tail-tol", type=float, default=1e-17)
    sp.add_argument("--precision", choices=("auto", "double"), default="auto")
    _common_args(sp)

    sp = sub.add_parser("derivs", help="evaluate derivatives 0..max-order at one point")
    _alpha_arg(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--precision", choices=("auto", "double"), default="auto")
    _common_args(sp)

    sp = sub.add_parser("bellshape", help="verify zero counts and sign profiles")
    _alpha_arg(sp)
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--grid-lo", type=float, default=None)
    sp.add_argument("--grid-hi", type=float, default=None)
    sp.add_argument("--grid-points", type=int, default=None)
    sp.add_argument("--depth", type=int, default=60, help="bisection refinement depth")
    _common_args(sp)

    sp = sub.add_parser("factorize", help="stable exponent identity residual")
    _alpha_arg(sp)
    sp.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--terms", type=int, default=10_000, help="exponential rates kept")
    sp.add_argument("--tol", type=float, default=1e-5, help="pass threshold on |residual|")
    _common_args(sp)

    sp = sub.add_parser("wbs", help="weak-bell-shape profiles of an exponential chain")
    sp.add_argument("--n", type=int, default=3, help="number of chain rates (stock chain)")
    sp.add_argument("--i-max", type=int, default=None, help="highest derivative order")
    _common_args(sp)

    sp = sub.add_parser("tp-check", help="kernel minor scan / variation diminishing")
    sp.add_argument("--kernel", choices=("stable", "expsum"), default="stable")
    _alpha_arg(sp, required=False)
    sp.add_argument("--n", type=int, default=6, help="rates in the expsum kernel")
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--budget", type=int, default=0, help="random minors per order")
    sp.add_argument("--grid-points", type=int, default=40)
    sp.add_argument("--vd-inputs", type=int, default=0,
                    help="random vectors for the variation-diminishing bound")
    _common_args(sp)

    sp = sub.add_parser("conjecture", help="log-Beta partial bell-shape probe")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    _common_args(sp)

    sp = sub.add_parser("factor-check", help="Monte Carlo multiplicative factorization")
    sp.add_argument("--n", type=int, required=True, help="integer with alpha = 1/n")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--threshold", type=float, default=0.01)
    _common_args(sp)

    sp = sub.add_parser("sample", help="draw stable variates")
    _alpha_arg(sp)
    sp.add_argument("--count", type=int, required=True)
    _common_args(sp)

    return p


# ---------------------------------------------------------------------------
# handlers: each returns (passed, results_dict, csv_rows)
# ---------------------------------------------------------------------------


def _run_eval(args):
    cfg = SeriesConfig(max_terms=args.max_terms, tail_tolerance=args.tail_tol,
                       precision=args.precision)
    ev = density_derivative(Alpha(args.alpha), args.x, args.order, cfg)
    res = {"value": ev.value, "est_error": ev.est_error, "order": ev.order, "x": ev.x}
    rows = [("order", "x", "value", "est_error"),
            (ev.order, ev.x, ev.value, ev.est_error)]
    return True, res, rows


def _run_derivs(args):
    cfg = SeriesConfig(precision=args.precision)
    a = Alpha(args.alpha)
    vals = [density_derivative(a, args.x, n, cfg) for n in range(args.max_order + 1)]
    res = {"values": [{"order": e.order, "value": e.value, "est_error": e.est_error}
                      for e in vals]}
    rows = [("order", "x", "value", "est_error")]
    rows += [(e.order, e.x, e.value, e.est_error) for e in vals]
    return True, res, rows


def _run_bellshape(args):
    a = Alpha(args.alpha)
    grid = None
    if args.grid_lo is not None or args.grid_hi is not None or args.grid_points is not None:
        from .signs import stable_grid

        base = stable_grid(a, args.max_order)
        lo = args.grid_lo if args.grid_lo is not None else base.points[0]
        hi = args.grid_hi if args.grid_hi is not None else base.points[-1]
        n = args.grid_points if args.grid_points is not None else len(base.points)
        grid = Grid(points=log_grid(lo, hi, n), refinement_depth=args.depth)
    report = verify_bell_shape(a, args.max_order, g=grid)
    return report.all_pass, report.to_dict(), report.to_csv_rows()


def _run_factorize(args):
    rep = factorization_residual(Alpha(args.alpha), args.lam, args.terms)
    ok = abs(rep.residual) < args.tol
    res = rep.to_dict()
    res["tolerance"] = args.tol
    res["pass"] = ok
    rows = [("alpha", "lambda", "psi_me", "psi_sum", "tail_correction", "residual", "pass"),
            (rep.alpha.alpha, rep.lam, rep.psi_me, rep.psi_sum, rep.tail_correction,
             rep.residual, ok)]
    return ok, res, rows


def _run_wbs(args):
    spec = default_chain(args.n)
    i_max = args.i_max if args.i_max is not None else args.n + 3
    report = verify_wbs(spec, i_max)
    rows = [("order", "observed", "expected", "pass")]
    rows += [(p.order, str(p.observed), str(p.expected), p.passed)
             for p in report.profiles]
    return report.all_pass, report.to_dict(), rows


def _run_tp_check(args):
    if args.kernel == "stable":
        if args.alpha is None:
            raise ValueError("--alpha is required for the stable kernel")
        a = Alpha(args.alpha)
        f = build_stable_evaluator(a)
        pts = log_grid(0.05, 40.0, args.grid_points)
        km = build_kernel(f, pts, pts, kernel_id=f"stable-density alpha={a.alpha}")
        witness = find_negative_minor_2x2(km)
        report = scan_minors(km, order=min(args.order, 2), budget=args.budget,
                             seed=args.seed)
        ok = witness is not None  # the stable kernel must fail TP_2
        res = {
            "kernel": km.kernel_id,
            "expectation": "negative 2x2 minor exists",
            "witness_found": witness is not None,
            "witness": None if witness is None else {
                "rows": list(witness[0]), "cols": list(witness[1]), "value": witness[2]},
            "scan": report.to_dict(),
        }
    else:
        rates = [chains.default_chain(args.n).exp_rates[k] for k in range(args.n)]
        spec = chains.exponential_sum_chain(rates)
        lt = chains.chain_laplace(spec)

        def f(t):
            return chains.chain_density(lt, t, 0)

        pts = log_grid(5e-3, 3.0, args.grid_points)
        km = build_kernel(f, pts, pts, kernel_id=f"exponential-sum n={args.n}")
        report = scan_minors(km, order=args.order, budget=args.budget, seed=args.seed)
        ok = report.all_nonnegative
        vd_ok = True
        vd_results = []
        if args.vd_inputs > 0:
            import numpy as np

            rng = np.random.Generator(np.random.PCG64(args.seed))
            for _ in range(args.vd_inputs):
                v = rng.standard_normal(len(pts))
                cin, cout = vd_bound_check(km, v)
                vd_results.append({"in_changes": cin, "out_changes": cout})
                vd_ok = vd_ok and (cout <= cin)
            ok = ok and vd_ok
        res = {
            "kernel": km.kernel_id,
            "expectation": "all sampled minors nonnegative",
            "scan": report.to_dict(),
            "vd_checks": vd_results,
            "vd_pass": vd_ok,
        }
    rows = [("kernel", "pass"), (res["kernel"], ok)]
    return ok, res, rows


def _run_conjecture(args):
    e = LogBetaExample(args.a, args.b)
    report = conjecture2_probe(e, args.n)
    k_limit = spectral_k(e, 1e-12)
    k_ok = abs(k_limit - args.b) < 1e-6
    ok = report.all_pass and k_ok
    res = report.to_dict()
    res["k_zero_plus"] = k_limit
    res["k_zero_plus_expected"] = args.b
    res["k_zero_plus_pass"] = k_ok
    rows = [("order", "observed", "expected", "pass")]
    rows += [(p.order, str(p.observed), str(p.expected), p.passed)
             for p in report.per_order]
    return ok, res, rows


def _run_factor_check(args):
    d, ok = integer_alpha_factorization_mc(args.n, args.samples, args.seed,
                                           args.threshold)
    res = {"n": args.n, "samples": args.samples, "ks_distance": d,
           "threshold": args.threshold, "pass": ok}
    rows = [("n", "samples", "ks_distance", "threshold", "pass"),
            (args.n, args.samples, d, args.threshold, ok)]
    return ok, res, rows


def _run_sample(args):
    xs = sample_stable(Alpha(args.alpha), args.count, args.seed)
    res = {"count": args.count, "samples": [float(v) for v in xs]}
    rows = [("index", "value")] + [(i, float(v)) for i, v in enumerate(xs)]
    return True, res, rows


_HANDLERS = {
    "eval": _run_eval,
    "derivs": _run_derivs,
    "bellshape": _run_bellshape,
    "factorize": _run_factorize,
    "wbs": _run_wbs,
    "tp-check": _run_tp_check,
    "conjecture": _run_conjecture,
    "factor-check": _run_factor_check,
    "sample": _run_sample,
}


def _resolved_config(args) -> dict:
    skip = {"output", "format", "dry_run"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
        return
    out_dir = os.environ.get("BELLSHAPE_OUTPUT_DIR")
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    with open(path, "w") as fh:
        fh.write(text)


def _csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _resolved_config(args)

    if args.dry_run:
        _emit(json.dumps({"subcommand": args.subcommand, "config": config},
                         sort_keys=True, indent=2) + "\n", args.output)
        return 0

    try:
        passed, results, rows = _HANDLERS[args.subcommand](args)
    except BellshapeError as exc:
        sys.stderr.write(f"numerical failure in {args.subcommand}: {exc}\n")
        return 3
    except (ValueError,) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2

    if args.format == "json":
        envelope = {
            "subcommand": args.subcommand,
            "config": config,
            "pass": passed,
            "results": results,
            "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        }
        _emit(json.dumps(envelope, sort_keys=True, indent=2) + "\n", args.output)
    else:
        _emit(_csv_text(rows), args.output)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
