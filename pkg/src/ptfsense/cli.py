"""Command-line experiments.

Exit codes: 0 success (and every bound holds), 1 bound violation, 2 input
error, 3 infeasible sample budget.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import poly as polymod
from .bounds import gns_bound, radial_bound, wiggle_bound
from .circle import count_sign_changes
from .errors import BudgetError, PTFSenseError
from .estimators import (
    DEFAULT_EPS_GRID,
    auto_samples,
    estimate_expected_sign_changes,
    estimate_gns,
    estimate_radial,
    estimate_rotation_disagreement,
    estimate_surface_crossing,
    estimate_wiggle,
    verify_bounds,
)
from .families import FamilySpec
from .poly import PTF
from .sampling import CorrelationSpec, SeededStream

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

SUBCOMMANDS = (
    "estimate-gns",
    "estimate-radial",
    "estimate-wiggle",
    "estimate-surface",
    "sign-changes",
    "verify-bounds",
    "sweep",
)

CSV_HEADER = ["eps", "estimate", "std_error", "bound", "ratio"]


class InputError(PTFSenseError):
    pass


def _count(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(value)


def _grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad eps grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    default_workers = int(os.environ.get("PTFSENSE_WORKERS", "1") or 1)
    parser = argparse.ArgumentParser(prog="ptfsense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--poly", metavar="FILE", help="polynomial JSON file")
        src.add_argument("--family", metavar="SPEC", help="e.g. ball:r=1.0,n=2 or prodlin:n=3,d=3,seed=7")
        eps = p.add_mutually_exclusive_group()
        eps.add_argument("--eps", type=float)
        eps.add_argument("--eps-grid", type=_grid)
        p.add_argument("--samples", type=_count, default=100_000)
        p.add_argument("--rel-error", type=float, help="size --samples from a 10^4-sample pilot run")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=default_workers)
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name == "estimate-gns":
            p.add_argument("--phi", type=float, help="estimate along the rotation family at this offset")
        if name == "sign-changes":
            p.add_argument("--audit", type=int, default=0, metavar="K", help="also report the first K circles")
        if name == "verify-bounds":
            p.add_argument("--skip-surface", action="store_true")
    return parser


def load_function(args) -> PTF:
    try:
        if args.poly is not None:
            return PTF(polymod.load(args.poly))
        return FamilySpec.parse(args.family).build()
    except (PTFSenseError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _eps(args, default: float = 0.1) -> float:
    if args.eps_grid is not None:
        raise InputError("this subcommand takes --eps, not --eps-grid")
    return default if args.eps is None else args.eps


def _samples(args, f, estimator, **kw) -> int:
    if args.rel_error is None:
        return args.samples
    return auto_samples(estimator, f, args.rel_error, args.seed, **kw)


def _estimate_doc(result, **extra) -> dict:
    doc = result.to_dict()
    doc.update(extra)
    return doc


def cmd_estimate(args, f: PTF):
    eps = _eps(args)
    d, n = max(f.degree, 1), f.n
    if args.command == "estimate-gns":
        spec = CorrelationSpec(eps)
        if args.phi is None:
            samples = _samples(args, f, estimate_gns, spec=spec)
            res = estimate_gns(f, spec, samples, args.seed, args.workers)
        else:
            samples = _samples(args, f, estimate_rotation_disagreement, spec=spec, phi=args.phi)
            res = estimate_rotation_disagreement(f, spec, args.phi, samples, args.seed, args.workers)
        bound = gns_bound(d, eps)
    elif args.command == "estimate-radial":
        samples = _samples(args, f, estimate_radial, eps=eps)
        res = estimate_radial(f, eps, samples, args.seed, args.workers)
        bound = radial_bound(d, eps, n)
    else:
        samples = _samples(args, f, estimate_wiggle, eps=eps)
        res = estimate_wiggle(f, eps, samples, args.seed, args.workers)
        bound = wiggle_bound(d, eps, n)
    doc = _estimate_doc(res, eps=eps, d=f.degree, n=n, bound=bound)
    rows = [["eps", "estimate", "std_error", "ci_low", "ci_high", "samples", "seed", "bound"],
            [eps, res.estimate, res.std_error, res.ci_low, res.ci_high, res.samples, res.seed, bound]]
    return doc, rows, EXIT_OK


def cmd_surface(args, f: PTF):
    if args.eps is not None:
        raise InputError("estimate-surface takes --eps-grid")
    grid = args.eps_grid or list(DEFAULT_EPS_GRID)
    est = estimate_surface_crossing(f, grid, args.samples, args.seed, args.workers)
    rows = [["eps", "ratio", "crossings"]] + [list(r) for r in zip(est.eps_grid, est.ratios, est.crossings)]
    return est.to_dict(), rows, EXIT_OK


def cmd_sign_changes(args, f: PTF):
    res = estimate_expected_sign_changes(f, args.samples, args.seed, args.workers)
    doc = {
        "expected_sign_changes": res.to_dict(),
        "degenerate": res.skipped,
        "max_allowed": 2 * f.degree,
    }
    if args.audit:
        stream = SeededStream(args.seed, 0)
        X = stream.normal((args.audit, f.n))
        Y = stream.normal((args.audit, f.n))
        doc["audit"] = [count_sign_changes(f.poly, x, y).to_dict() for x, y in zip(X, Y)]
    rows = [["estimate", "std_error", "ci_low", "ci_high", "samples", "seed", "degenerate"],
            [res.estimate, res.std_error, res.ci_low, res.ci_high, res.samples, res.seed, res.skipped]]
    return doc, rows, EXIT_OK


def cmd_verify(args, f: PTF):
    eps = _eps(args, default=0.05)
    reports = verify_bounds(f, eps, args.samples, args.seed, args.workers, surface=not args.skip_surface)
    ok = all(r.satisfied for r in reports)
    doc = {"all_satisfied": ok, "reports": [r.to_dict() for r in reports]}
    rows = [["bound_name", "d", "n", "eps", "bound_value", "estimate", "std_error", "satisfied", "slack"]]
    rows += [[r.bound_name, r.d, r.n, r.eps, r.bound_value, r.estimate.estimate, r.estimate.std_error, r.satisfied, r.slack]
             for r in reports]
    return doc, rows, EXIT_OK if ok else EXIT_VIOLATION


def cmd_sweep(args, f: PTF):
    grid = args.eps_grid if args.eps_grid is not None else ([args.eps] if args.eps is not None else None)
    if not grid:
        raise InputError("sweep needs --eps-grid")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise InputError("sweep eps grid must be decreasing")
    d = max(f.degree, 1)
    rows = [CSV_HEADER]
    for eps in grid:
        res = estimate_gns(f, CorrelationSpec(eps), args.samples, args.seed, args.workers)
        bound = gns_bound(d, eps)
        rows.append([eps, res.estimate, res.std_error, bound, res.estimate / bound])
    doc = [dict(zip(CSV_HEADER, r)) for r in rows[1:]]
    return doc, rows, EXIT_OK


_DISPATCH = {
    "estimate-gns": cmd_estimate,
    "estimate-radial": cmd_estimate,
    "estimate-wiggle": cmd_estimate,
    "estimate-surface": cmd_surface,
    "sign-changes": cmd_sign_changes,
    "verify-bounds": cmd_verify,
    "sweep": cmd_sweep,
}


def _render(doc, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.workers < 1:
            raise InputError("--workers must be at least 1")
        f = load_function(args)
        doc, rows, code = _DISPATCH[args.command](args, f)
    except InputError as exc:
        print(f"ptfsense: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(f"ptfsense: budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PTFSenseError, ValueError) as exc:
        print(f"ptfsense: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = _render(doc, rows, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
