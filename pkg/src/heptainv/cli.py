"""Command-line entry point: ``heptainv <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails (an oracle check,
or a sweep row whose exact norm exceeds the bound) and 2 on usage errors.
CSV and plain-text numbers are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from contextlib import contextmanager
from typing import Iterator, Sequence

import numpy as np

from . import __version__
from .inverse import a_inv_entry, assemble_inverse
from .matrices import SystemSpec, Variant, build_a
from .norm_bounds import bound_breakdown, bound_value, norm_sweep
from .oracle import full_suite
from .sequences import alpha, gamma
from .solver import BeamProblem, beam_fixed_point, contraction_predictor, exact_contraction_rate, solve

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x), ".17g")


def parse_n_list(text: str) -> list[int]:
    """``"7:512:5"`` (inclusive stop), ``"7,8,16"`` or a comma mix of both."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty item in n-list {text!r}")
        try:
            if ":" in part:
                fields = [int(f) for f in part.split(":")]
                if len(fields) not in (2, 3):
                    raise ValueError
                start, stop = fields[0], fields[1]
                step = fields[2] if len(fields) == 3 else 1
                if step <= 0:
                    raise UsageError(f"range step must be positive in {part!r}")
                out.extend(range(start, stop + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse n-list item {part!r}") from None
    return out


def _spec(args) -> SystemSpec:
    try:
        return SystemSpec(args.n, args.variant)
    except ValueError as exc:
        raise UsageError(f"--n: {exc}") from None


@contextmanager
def _sink(path: str | None) -> Iterator[io.TextIOBase]:
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, delimiter=",", lineterminator="\n")


def _write_json(fh, obj) -> None:
    json.dump(obj, fh, indent=2, allow_nan=False)
    fh.write("\n")


# ---------------------------------------------------------------- commands


def cmd_gamma(args) -> int:
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    value = alpha(args.k) if args.alpha else gamma(args.k)
    if args.exact:
        print(value)
        return EXIT_OK
    try:
        print(fmt(float(value)))
    except OverflowError:
        raise UsageError(f"value at k={args.k} exceeds double range; pass --exact") from None
    return EXIT_OK


def cmd_matrix(args) -> int:
    a = build_a(_spec(args))
    with _sink(args.output) as fh:
        if args.emit == "dense-csv":
            _writer(fh).writerows(a.to_dense().tolist())
        else:
            _write_json(
                fh,
                {
                    "n": a.n,
                    "offsets": list(range(a.half_bandwidth + 1)),
                    "diagonals": [d.tolist() for d in a.diagonals],
                },
            )
    return EXIT_OK


def cmd_inverse(args) -> int:
    spec = _spec(args)
    if args.entry is not None:
        try:
            i, j = (int(t) for t in args.entry.split(","))
        except ValueError:
            raise UsageError(f"--entry expects i,j, got {args.entry!r}") from None
        if not (1 <= i <= spec.n and 1 <= j <= spec.n):
            raise UsageError(f"--entry ({i}, {j}) outside 1..{spec.n}")
        print(fmt(a_inv_entry(spec, i, j, method=args.method)))
        return EXIT_OK
    try:
        inv = assemble_inverse(spec, method=args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _sink(args.output) as fh:
        w = _writer(fh)
        for row in inv:
            w.writerow([fmt(x) for x in row])
    return EXIT_OK


def cmd_bound(args) -> int:
    spec = _spec(args)
    if not args.breakdown:
        print(fmt(bound_value(spec)))
        return EXIT_OK
    bd = bound_breakdown(spec)
    record = bd.as_dict()
    dominance = bd.dominance()
    with _sink(args.output) as fh:
        if args.emit == "json":
            record["dominance"] = dominance
            _write_json(fh, record)
        else:
            w = _writer(fh)
            w.writerow(["field", "value"])
            for key, value in record.items():
                w.writerow([key, value if isinstance(value, str) else fmt(value)])
            for key, ok in dominance.items():
                w.writerow([key, fmt(ok)])
    return EXIT_OK if dominance["bound >= exact_norm"] else EXIT_FAIL


def cmd_norm_sweep(args) -> int:
    n_values = parse_n_list(args.n_list)
    try:
        for n in n_values:
            SystemSpec(n, args.variant)
        rows = norm_sweep(args.variant, n_values, method=args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _sink(args.output) as fh:
        w = _writer(fh)
        w.writerow(["n", "exact_norm", "bound"])
        for n, exact, bound in rows:
            w.writerow([n, fmt(exact), fmt(bound)])
    bad = [n for n, exact, bound in rows if exact > bound]
    if bad:
        print(f"bound violated at n = {bad}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _read_rhs(source: str, n: int) -> np.ndarray:
    if source == "ones":
        return np.ones(n)
    if source == "e1":
        e = np.zeros(n)
        e[0] = 1.0
        return e
    try:
        data = np.loadtxt(source, delimiter=",", ndmin=1)
    except (OSError, ValueError) as exc:
        raise UsageError(f"--rhs: cannot read {source!r}: {exc}") from None
    return data


def cmd_solve(args) -> int:
    spec = _spec(args)
    rhs = _read_rhs(args.rhs, spec.n)
    try:
        x = solve(spec, rhs)
    except ValueError as exc:
        raise UsageError(f"--rhs: {exc}") from None
    with _sink(args.output) as fh:
        w = _writer(fh)
        w.writerow(["i", "x"])
        for i, v in enumerate(np.atleast_1d(x), start=1):
            w.writerow([i, fmt(v)])
    return EXIT_OK


def _forcing(text: str):
    """Return ``(f, lipschitz)`` for the named forcing."""
    if text == "zero":
        return (lambda x, u: np.zeros_like(x)), 0.0
    if text == "sin-plus-x":
        return (lambda x, u: np.sin(u) + x), 1.0
    if text.startswith("const:"):
        try:
            c = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--forcing: bad constant in {text!r}") from None
        if not math.isfinite(c):
            raise UsageError("--forcing: constant must be finite")
        return (lambda x, u: np.full_like(x, c)), 0.0
    raise UsageError(f"--forcing: unknown forcing {text!r}")


def cmd_beam(args) -> int:
    f, lip = _forcing(args.forcing)
    try:
        problem = BeamProblem(args.n, f, c_ei=args.cei, lipschitz=lip, variant=args.variant)
        trace = beam_fixed_point(problem, tol=args.tol, max_iter=args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _sink(args.emit) as fh:
        w = _writer(fh)
        w.writerow(["iteration", "step", "residual"])
        for k, (s, r) in enumerate(zip(trace.steps, trace.residuals), start=1):
            w.writerow([k, fmt(s), fmt(r)])
    summary = {
        "converged": trace.converged,
        "iterations": trace.iterations,
        "rho_bound": contraction_predictor(problem),
        "rho_exact": exact_contraction_rate(problem),
        "max_abs_u": float(np.max(np.abs(trace.solution))),
    }
    print(" ".join(f"{k}={fmt(v)}" for k, v in summary.items()), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    variants = (Variant.TOEPLITZ, Variant.NEAR) if args.variant == "both" else (Variant.parse(args.variant),)
    try:
        reports = full_suite(parse_n_list(args.n_list), variants)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = [r.as_record() for r in reports]
    with _sink(args.emit) as fh:
        _write_json(fh, records)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.check} {r.case}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heptainv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    variants = [v.value for v in Variant]

    def with_spec(sp, default_variant="toeplitz"):
        sp.add_argument("--variant", choices=variants, default=default_variant)
        sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("gamma", help="gamma_k (or alpha_k)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--exact", action="store_true", help="print the exact integer")
    sp.add_argument("--alpha", action="store_true", help="print alpha_k instead")
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("matrix", help="write A_n")
    with_spec(sp)
    sp.add_argument("--emit", choices=["dense-csv", "banded-json"], default="banded-json")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("inverse", help="explicit inverse entries")
    with_spec(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--entry", metavar="I,J")
    group.add_argument("--emit", choices=["dense-csv"])
    sp.add_argument("--method", choices=["closed", "segmented"])
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_inverse)

    sp = sub.add_parser("bound", help="closed-form inverse-norm bound")
    with_spec(sp)
    sp.add_argument("--breakdown", action="store_true")
    sp.add_argument("--emit", choices=["csv", "json"], default="csv")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("norm-sweep", help="(n, exact_norm, bound) table")
    sp.add_argument("--variant", choices=variants, default="toeplitz")
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--emit", choices=["csv"], default="csv")
    sp.add_argument("--method", choices=["structured", "explicit"], default="structured")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_norm_sweep)

    sp = sub.add_parser("solve", help="O(n) solve of A_n x = rhs")
    with_spec(sp)
    sp.add_argument("--rhs", default="ones", help="ones, e1 or a CSV file with one value per line")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("beam", help="fixed-point iteration for the clamped beam")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--variant", choices=variants, default="near")
    sp.add_argument("--forcing", default="sin-plus-x", help="zero, const:C or sin-plus-x")
    sp.add_argument("--cei", type=float, default=6.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=100)
    sp.add_argument("--emit", metavar="TRACE.csv")
    sp.set_defaults(func=cmd_beam)

    sp = sub.add_parser("verify", help="run the oracle suite")
    sp.add_argument("--variant", choices=variants + ["both"], default="both")
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--emit", metavar="REPORT.json")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(f"{args.command}: {exc}")  # status 2
    except BrokenPipeError:
        # downstream closed early (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
