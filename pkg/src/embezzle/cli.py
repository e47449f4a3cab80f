"""Command-line interface.

Exit codes: 0 success, 1 invariant or bound violation, 2 input error.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from . import protocol, schmidt
from .selftest import DEFAULT_SEED, run_selftest
from .statefile import StateFileError, parse_state_file
from .validation import SizeGuardError

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

SWEEP_COLUMNS = (
    "n",
    "m",
    "fidelity",
    "eq4_bound",
    "sum_omega_sq",
    "delta",
    "eq6_bound",
    "fannes_floor",
    "entropy_bits",
)
MAX_SWEEP_POINTS = 10**4
# above this rank only the closed-form bounds are reported
MAX_EXACT_RANK = protocol.MAX_MERGE_POPS

class InputError(Exception):
    pass

def _error(msg):
    print(f"error: {msg}", file=sys.stderr)

def fmt(value):
    """Render a scalar for CSV/JSON output with 17 significant digits."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")

def json_object(pairs):
    body = ", ".join(
        f"{json.dumps(k)}: {json.dumps(v) if isinstance(v, (str, list)) else fmt(v)}" for k, v in pairs
    )
    return "{" + body + "}"

def _report_for(n, phi):
    return protocol.bound_report(n, phi, bounds_only=n > MAX_EXACT_RANK)

def _row(report):
    return (
        report.n,
        report.m,
        report.fidelity,
        report.eq4_bound,
        report.sum_omega_sq,
        report.delta,
        report.eq6_bound,
        report.fannes_floor,
        report.target_entropy_bits,
    )

def _load(path):
    try:
        return parse_state_file(path)
    except (StateFileError, ValueError) as exc:
        raise InputError(str(exc)) from exc

# --- report ------------------------------------------------------------------

def cmd_report(args):
    if args.n < 2:
        raise InputError("bounds undefined for n<2")
    phi = _load(args.target)
    rep = _report_for(args.n, phi)
    failed = rep.violations()
    fields = list(rep.to_dict().items())
    fields += [("fannes_ratio", rep.fannes_ratio), ("violations", failed)]
    print(json_object(fields))
    for name in failed:
        _error(f"invariant violated: {name}")
    return EXIT_VIOLATION if failed else EXIT_OK

# --- sweep -------------------------------------------------------------------

def sweep_values(n_list=None, start=None, factor=None, count=None):
    """Sorted, de-duplicated list of catalyst ranks for a sweep."""
    if n_list:
        values = list(n_list)
    elif start is not None and factor is not None and count is not None:
        if count < 1 or count > MAX_SWEEP_POINTS:
            raise InputError(f"--n-count must lie in [1, {MAX_SWEEP_POINTS}]")
        if factor <= 1:
            raise InputError("--n-factor must exceed 1")
        if float(factor).is_integer():
            values = [start * int(factor) ** i for i in range(count)]
        else:
            values = [int(round(start * factor**i)) for i in range(count)]
    else:
        raise InputError("give either --n or all of --n-start, --n-factor, --n-count")
    values = sorted(set(values))
    if len(values) > MAX_SWEEP_POINTS:
        raise InputError(f"at most {MAX_SWEEP_POINTS} sweep points are allowed")
    if values[0] < 2:
        raise InputError("all sweep ranks must be >= 2")
    return values

def write_sweep(path, reports, fmt_name):
    """Write rows atomically: a failed write leaves no partial file behind."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sweep-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            if fmt_name == "csv":
                fh.write(",".join(SWEEP_COLUMNS) + "\r\n")
                for rep in reports:
                    fh.write(",".join("" if v is None else fmt(v) for v in _row(rep)) + "\r\n")
            else:
                for rep in reports:
                    fh.write(json_object(zip(SWEEP_COLUMNS, _row(rep))) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

def read_sweep(path, fmt_name="csv"):
    """Load a sweep table back as a list of dicts (floats, ints, or ``None``)."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt_name == "csv":
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
                raise ValueError(f"unexpected header {reader.fieldnames}")
            for raw in reader:
                rows.append({k: (None if v == "" else float(v)) for k, v in raw.items()})
        else:
            for line in fh:
                rows.append(json.loads(line))
    for row in rows:
        row["n"], row["m"] = int(row["n"]), int(row["m"])
    return rows

def validate_sweep_rows(rows, tol=protocol.BOUND_TOL):
    """Re-check the report invariants on every row; returns ``(n, invariant)`` pairs that fail."""
    problems = []
    for r in rows:
        if r["fidelity"] is None:
            continue
        checks = (
            ("fidelity >= sum_omega_sq", r["fidelity"] >= r["sum_omega_sq"] - tol),
            ("sum_omega_sq >= eq4_bound", r["sum_omega_sq"] >= r["eq4_bound"] - tol),
            ("delta <= eq6_bound", r["delta"] <= r["eq6_bound"] + tol),
            (
                "fannes_floor <= delta",
                r["delta"] >= protocol.INV_E or r["fannes_floor"] <= r["delta"] + tol,
            ),
        )
        problems.extend((r["n"], name) for name, ok in checks if not ok)
    return problems

def cmd_sweep(args):
    values = sweep_values(args.n, args.n_start, args.n_factor, args.n_count)
    phi = _load(args.target)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(lambda n: _report_for(n, phi), values))
    try:
        write_sweep(args.out, reports, args.format)
    except OSError as exc:
        raise InputError(f"{args.out}: {exc.strerror}") from exc
    problems = validate_sweep_rows(read_sweep(args.out, args.format))
    for n, name in problems:
        _error(f"n={n}: invariant violated: {name}")
    print(f"wrote {len(reports)} rows to {args.out}")
    return EXIT_VIOLATION if problems else EXIT_OK

# --- trump -------------------------------------------------------------------

def trump_verdict(x, y, c):
    """Compare plain majorization with catalysed majorization for spectra ``x -> y``."""
    xc = schmidt.sorted_outer(x, c)
    yc = schmidt.sorted_outer(y, c)
    return {
        "trumped": schmidt.is_trumped(x, y, c),
        "majorized": schmidt.majorizes(y, x),
        "majorization_witness": schmidt.first_violation(y, x),
        "trumping_witness": schmidt.first_violation(yc, xc),
    }

def cmd_trump(args):
    x, y, c = (schmidt.spectrum(_load(p)) for p in (args.x, args.y, args.catalyst))
    try:
        verdict = trump_verdict(x, y, c)
    except SizeGuardError as exc:
        raise InputError(str(exc)) from exc
    print(json_object(verdict.items()))
    return EXIT_OK

# --- selftest / min-rank ------------------------------------------------------

def cmd_selftest(args):
    result = run_selftest(seed=args.seed)
    print("\n".join(result.summary_lines()))
    return EXIT_OK if result.ok else EXIT_VIOLATION

def cmd_min_rank(args):
    try:
        n = protocol.min_rank_for(args.epsilon, args.m)
        pairs = protocol.min_qubit_pairs(args.epsilon, args.m)
    except (ValueError, OverflowError) as exc:
        raise InputError(str(exc)) from exc
    fields = [("epsilon", args.epsilon), ("m", args.m), ("n", n), ("qubit_pairs", pairs)]
    fields.append(("exceeds_int64", n > 2**63))
    if args.m > 1:
        # bound evaluated in log space so huge n is fine
        fields.append(("fidelity_lower_bound", max(0.0, 1.0 - math.log2(args.m) / _log2_int(n))))
    print(json_object(fields))
    return EXIT_OK

def _log2_int(n):
    shift = max(0, n.bit_length() - 64)
    return math.log2(n >> shift) + shift

def _n_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc

def build_parser():
    parser = argparse.ArgumentParser(prog="embezzle", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="bound report for one (n, target) pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="bound reports over a range of catalyst ranks")
    p.add_argument("--target", required=True)
    p.add_argument("--n", type=_n_list, help="comma-separated ranks")
    p.add_argument("--n-start", type=int)
    p.add_argument("--n-factor", type=float)
    p.add_argument("--n-count", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trump", help="check catalysed conversion x -> y")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--catalyst", required=True)
    p.set_defaults(func=cmd_trump)

    p = sub.add_parser("selftest", help="run the randomized invariant suite")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("min-rank", help="catalyst rank sufficient for fidelity 1 - epsilon")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_min_rank)
    return parser

def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        _error(str(exc))
        return EXIT_INPUT

if __name__ == "__main__":
    sys.exit(main())
