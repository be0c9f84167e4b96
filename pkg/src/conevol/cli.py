"""Command-line entry point: ``conevol <subcommand> ...``.

Exit codes: 0 every check passed, 1 a check failed, 2 usage error,
3 invalid input or geometry error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import GeometryError
from .generators import GeneratorSpec, generate, suite_specs
from .geometry import Polytope, center_at_centroid
from .io import load_input, load_polytope, write_tsv
from .measure import ConeVolumeMeasure, cone_volume_measure
from .scc import check_scc_measure, ensure_centered
from .ufunctional import u_report
from .verify import run_verify
from .xray import divergence_identity, xray_piecewise

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


def _table(header, rows):
    cells = [[str(h) for h in header]] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_fmt(v) for v in x) + ")"
    return str(x)


def _emit(args, payload, text):
    print(json.dumps(payload, indent=2, sort_keys=True) if args.json else text)


def _tolerances(args, *fields) -> Tolerances:
    t = DEFAULT_TOLERANCES.with_overrides(cap=args.cap)
    if args.tol is not None:
        t = t.with_overrides(**{f: args.tol for f in fields})
    return t


def _polytope(args, t: Tolerances) -> Polytope:
    P = load_polytope(args.file, t.incidence, t.cap)
    return center_at_centroid(P) if args.auto_center else P


def _measure_or_polytope(args, t):
    obj = load_input(args.file, t.incidence, t.cap)
    if isinstance(obj, ConeVolumeMeasure):
        return obj, None
    P = ensure_centered(obj, t.centering, args.auto_center)
    return cone_volume_measure(P), P


def cmd_cvm(args):
    t = _tolerances(args, "volume")
    P = _polytope(args, t)
    mu = cone_volume_measure(P)
    residual = abs(mu.total - P.volume) / P.volume
    ok = residual <= t.volume
    payload = dict(mu.to_dict(), volume=P.volume, relative_residual=residual, passed=ok)
    rows = [(i, a, w) for i, (a, w) in enumerate(mu.atoms)]
    text = (_table(["atom", "normal", "cone volume"], rows)
            + f"\n\ntotal {mu.total:.15g}   volume {P.volume:.15g}   residual {residual:.3g}")
    _emit(args, payload, text)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_scc(args):
    t = _tolerances(args, "scc")
    mu, _ = _measure_or_polytope(args, t)
    rep = check_scc_measure(mu, t.scc, t.subspace, t.cap)
    rows = [(r.k, list(r.subspace.members), r.mass, r.bound, r.ratio, r.status,
             "-" if r.witness is None else list(r.witness.members)) for r in rep.rows]
    text = (_table(["dim", "atoms", "mass", "bound", "ratio", "status", "witness"], rows)
            + f"\n\n{len(rep.violations)} violations, {len(rep.equalities)} equalities: "
            + ("PASS" if rep.passed else "FAIL"))
    _emit(args, dict(rep.to_dict(), tolerances=t.as_dict()), text)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_ufun(args):
    t = _tolerances(args, "ufunctional", "recursion")
    mu, P = _measure_or_polytope(args, t)
    rep = u_report(mu, None if P is None else P.volume, t.ufunctional, t.recursion, t.cap)
    rows = [(k, s) for k, s in rep.sigmas.items()]
    margins = [(m.k, m.lhs, m.rhs, m.margin / m.scale) for m in rep.margins]
    text = "\n".join([
        _table(["k", "sigma_k"], rows), "",
        _table(["k", "sigma_{k+1}^{k+1}", "(n-k)/n V sigma_k^k", "relative margin"], margins), "",
        f"U {rep.u:.15g}   bound {rep.bound:.15g}   ratio {rep.ratio:.15g}",
        f"equality {rep.equality}   parallelotope {rep.parallelotope}: "
        + ("PASS" if rep.passed else "FAIL"),
    ])
    _emit(args, dict(rep.to_dict(), tolerances=t.as_dict()), text)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _vector(text):
    try:
        v = np.array([float(x) for x in text.replace(" ", "").split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
        raise argparse.ArgumentTypeError("direction must be a finite nonzero vector")
    return v


def cmd_xray(args):
    t = _tolerances(args, "divergence")
    P = _polytope(args, t)
    if len(args.dir) != P.dim:
        raise GeometryError(f"direction has {len(args.dir)} coordinates, polytope has {P.dim}")
    pp = xray_piecewise(P, args.dir, validate=False)
    rec = divergence_identity(P, args.dir, t.divergence, pp, t.subspace, strict=False)
    fit_ok = max(pp.residuals) <= 1e-8
    ok = fit_ok and rec.passed
    if args.data:
        ts = np.linspace(pp.breakpoints[0], pp.breakpoints[-1], args.samples)
        write_tsv(args.data, ["t", "f"], zip(ts.tolist(), np.atleast_1d(pp(ts)).tolist()))
    payload = dict(pp.to_dict(), held_out_residuals=pp.residuals, integral=pp.integral(),
                   volume=P.volume, first_moment=pp.first_moment(),
                   gradient_moment=pp.gradient_moment(), divergence=rec.to_dict(), passed=ok)
    rows = [(i, a, b, c.convert(domain=[-1, 1]).coef.tolist(), r) for i, (a, b, c, r) in
            enumerate(zip(pp.breakpoints[:-1], pp.breakpoints[1:], pp.cells, pp.residuals))]
    text = "\n".join([
        _table(["cell", "from", "to", "coefficients (ascending)", "held-out"], rows), "",
        f"integral {pp.integral():.15g}   volume {P.volume:.15g}",
        f"first moment {pp.first_moment():.6g}   gradient moment {pp.gradient_moment():.15g}",
        f"divergence identity lhs {rec.lhs:.15g}  rhs {rec.rhs:.15g}  residual {rec.residual:.3g}: "
        + ("PASS" if ok else "FAIL"),
    ])
    _emit(args, payload, text)
    return EXIT_PASS if ok else EXIT_FAIL


def _report_text(rep):
    checks = _table(["check", "result"], [(k, "pass" if v else "FAIL") for k, v in rep.checks.items()])
    worst = max(rep.directions, key=lambda d: d.divergence.residual)
    return "\n".join([
        f"input {rep.input}   dim {rep.dim}   volume {rep.volume:.15g}",
        f"SCC worst ratio {rep.scc.worst_ratio:.12g}   U/bound {rep.u.ratio:.12g}"
        f"   parallelotope {rep.u.parallelotope}",
        f"{len(rep.directions)} directions, worst divergence residual "
        f"{worst.divergence.residual:.3g}   log-concavity violations "
        f"{rep.log_concavity_violations}/{rep.log_concavity_samples}",
        "", checks, "", "PASS" if rep.passed else "FAIL",
    ])


def _verify_tolerances(args):
    return _tolerances(args, "scc", "ufunctional", "recursion")


def cmd_verify(args):
    t = _verify_tolerances(args)
    if (args.file is None) == (args.gen is None):
        raise SystemExit(_usage_error(args, "verify needs exactly one of FILE or --gen SPEC"))
    if args.gen:
        P, desc = generate(_spec(args.gen)), args.gen
    else:
        P, desc = load_polytope(args.file, t.incidence, t.cap), args.file
    rep = run_verify(P, t, seed=args.seed, auto_center=args.auto_center or bool(args.gen),
                     descriptor=desc)
    _emit(args, rep.to_dict(volatile=not args.no_timing), _report_text(rep))
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _spec(text):
    try:
        return GeneratorSpec.parse(text)
    except ValueError as exc:
        raise GeometryError(str(exc)) from exc


def _suite_instance(job):
    index, spec, t, seed = job
    try:
        rep = run_verify(generate(spec), t, seed=seed + index, descriptor=str(spec))
        return index, rep.to_dict(volatile=False), rep.timing, None
    except GeometryError as exc:
        return index, None, {}, f"{type(exc).__name__}: {exc}"


def suite_summary(results) -> dict:
    """Totals over (report-dict or None, error) pairs."""
    done = [r for r, _ in results if r is not None]
    non_par = [r["u"]["ratio"] for r in done if not r["u"]["parallelotope"]]
    return {
        "instances": len(results),
        "passed": sum(r["passed"] for r in done),
        "errors": sum(e is not None for _, e in results),
        "scc_violations": sum(r["scc"]["violations"] for r in done),
        "u_violations": sum(not r["u"]["lower_ok"] for r in done),
        "divergence_failures": sum(not d["divergence"]["passed"]
                                   for r in done for d in r["directions"]),
        "min_non_parallelotope_u_ratio": min(non_par, default=None),
    }


def _dims(text):
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            dims = list(range(lo, hi + 1))
        else:
            dims = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 2..4 or a list like 2,3, got {text!r}")
    if not dims or min(dims) < 2 or max(dims) > 6:
        raise argparse.ArgumentTypeError("dimensions must lie in [2, 6]")
    return dims


def cmd_suite(args):
    t = _verify_tolerances(args)
    specs = suite_specs(args.count, args.seed, args.dims)
    jobs = [(i, s, t, args.seed) for i, s in enumerate(specs)]
    workers = args.jobs or os.cpu_count() or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_suite_instance, jobs))
    else:
        out = [_suite_instance(j) for j in jobs]
    out.sort(key=lambda r: r[0])
    results = [(r, e) for _, r, _, e in out]
    summary = suite_summary(results)
    ok = summary["passed"] == len(specs)
    rows = []
    for (i, r, timing, e), spec in zip(out, specs):
        if r is None:
            rows.append((i, str(spec), "-", "-", "ERROR", e))
        else:
            rows.append((i, str(spec), r["scc"]["worst_ratio"], r["u"]["ratio"],
                         "pass" if r["passed"] else "FAIL", f"{sum(timing.values()):.2f}s"))
    text = (_table(["#", "instance", "SCC worst ratio", "U/bound", "result", "time"], rows)
            + f"\n\n{summary['passed']}/{len(specs)} pass   SCC violations "
            f"{summary['scc_violations']}   U violations {summary['u_violations']}   "
            f"divergence failures {summary['divergence_failures']}")
    payload = {"summary": summary, "tolerances": t.as_dict(),
               "instances": [{"index": i, "spec": str(s), "report": r, "error": e}
                             for (i, r, _, e), s in zip(out, specs)]}
    _emit(args, payload, text)
    return EXIT_PASS if ok else EXIT_FAIL


def _usage_error(args, message):
    args.parser.print_usage(sys.stderr)
    print(f"conevol: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="override the main comparison tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--auto-center", action="store_true",
                        help="translate the input so its centroid is the origin")
    common.add_argument("--cap", type=int, default=DEFAULT_TOLERANCES.cap,
                        help="maximum number of enumerated subsets")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="conevol",
                                     description="Cone-volume measure checks for convex polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, helptext in [
        ("cvm", cmd_cvm, "cone-volume measure of a polytope"),
        ("scc", cmd_scc, "subspace concentration check"),
        ("ufun", cmd_ufun, "U-functional, sigma_k and recursion margins"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file", help="polytope JSON (or measure JSON for scc/ufun)")
        p.set_defaults(func=fn)

    p = sub.add_parser("xray", parents=[common], help="piecewise-polynomial X-ray along a direction")
    p.add_argument("file")
    p.add_argument("--dir", type=_vector, required=True, help="direction, e.g. 1,0,0")
    p.add_argument("--data", help="write (t, f(t)) samples to this tab-separated file")
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=cmd_xray)

    p = sub.add_parser("verify", parents=[common], help="run every check on one polytope")
    p.add_argument("file", nargs="?")
    p.add_argument("--gen", metavar="SPEC", help="generator spec, e.g. named:cube:dim=3")
    p.add_argument("--seed", type=int, default=0, help="seed for random directions")
    p.add_argument("--no-timing", action="store_true",
                   help="omit timing and timestamp so JSON output is reproducible")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", parents=[common], help="verify a seeded batch of random polytopes")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", type=_dims, default=[2, 3, 4], help="e.g. 2..4")
    p.add_argument("--jobs", type=int, default=0, help="worker processes (default: all cores)")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.parser = parser
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"conevol: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
