"""Command-line driver: ``realsort gen|sort|verify|bench``.

Exit codes: 0 success, 1 verification mismatch or invariant failure,
2 usage or parse error, 3 a value pair needs more key bits than ``--bit-cap``.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Sequence

from .converter import DEFAULT_BIT_CAP, CapacityError, InvariantViolation, sort_permutation
from .inputs import DISTRIBUTIONS, InputParseError, generate, read_input
from .metrics import csv_header, to_csv

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

BENCH_DERIVED = "probes_per_n_over_sqrtlog"


def _gen_params(args) -> dict:
    params = {}
    if args.max_k is not None:
        if args.dist != "geometric-gaps":
            raise SystemExit("--max-k only applies to geometric-gaps")
        params["max_k"] = args.max_k
    return params


def cmd_gen(args) -> int:
    params = _gen_params(args)
    lines = generate(args.dist, args.n, args.seed, **params)
    extra = "".join(f" {k}={v}" for k, v in params.items())
    header = f"# realsort gen dist={args.dist} n={args.n} seed={args.seed}{extra}\n"
    text = header + "\n".join(lines) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def oracle_permutation(values) -> list[int]:
    """Comparison-sort reference: stable ``sorted`` over exact rationals."""
    return sorted(range(len(values)), key=values.__getitem__)


def _write_metrics(path: str, record) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(csv_header() + "\n" + to_csv(record) + "\n")


def cmd_sort(args) -> int:
    data = read_input(args.input)
    if not data.values:
        print("error: input holds no values", file=sys.stderr)
        return EXIT_USAGE
    perm, conv = sort_permutation(data.values, bit_cap=args.bit_cap)
    if args.oracle and perm != oracle_permutation(data.values):
        print("error: output differs from the comparison-sort oracle", file=sys.stderr)
        return EXIT_MISMATCH
    sys.stdout.write("".join(data.texts[i] + "\n" for i in perm))
    if args.metrics:
        _write_metrics(args.metrics, conv.metrics)
    return EXIT_OK


def cmd_verify(args) -> int:
    data = read_input(args.input)
    if not data.values:
        print("error: input holds no values", file=sys.stderr)
        return EXIT_USAGE
    report = verify_values(data.values, bit_cap=args.bit_cap, check=args.check)
    for line in report["lines"]:
        print(line)
    if args.metrics and report.get("metrics") is not None:
        _write_metrics(args.metrics, report["metrics"])
    return EXIT_OK if report["ok"] else EXIT_MISMATCH


def verify_values(values, *, bit_cap: int = DEFAULT_BIT_CAP, check: int = 1) -> dict:
    """Run the converter with runtime invariant checks next to the oracle.

    Returns ``{"ok", "match", "lines", "metrics", ...}``; ``CapacityError``
    propagates.
    """
    lines = []
    try:
        perm, conv = sort_permutation(values, bit_cap=bit_cap, check=check)
    except InvariantViolation as exc:
        lines.append("INVARIANT FAILURE")
        lines.append(f"  {exc}")
        return {"ok": False, "match": False, "lines": lines, "metrics": None}
    match = perm == oracle_permutation(values)
    c = conv.converter
    cfg = conv.config
    lines.append("MATCH" if match else "MISMATCH")
    lines.append(f"n={cfg.n} distinct_keys={conv.distinct} t={cfg.t} e={cfg.e} "
                 f"leaf_capacity={cfg.leaf_capacity}")
    lines.append(f"invariant checks passed: {c.checks_run} "
                 "(ladder completeness, leaf capacity, branch leaf-mass, stack order)")
    lines.append("probe budget: every match within floor(log2 top)+1 probes")
    lines.append(f"stack bound: max_top+1={conv.metrics.max_top + 1} <= {cfg.max_levels}")
    lines.append(f"light internal nodes from merge repair: {c.light_repair_nodes}")
    lines.append(f"final scale: 2**{c.final_exponent}")
    return {
        "ok": match,
        "match": match,
        "lines": lines,
        "metrics": conv.metrics,
        "distinct": conv.distinct,
        "conversion": conv,
    }


def bench_row(n: int, dist: str, seed: int, params: dict, bit_cap: int) -> str:
    from .inputs import parse_lines

    data = parse_lines(generate(dist, n, seed, **params))
    _, conv = sort_permutation(data.values, bit_cap=bit_cap)
    m = conv.metrics
    derived = (m.probes / n) / math.sqrt(math.log2(n)) if n > 1 else float("nan")
    return f"{to_csv(m)},{derived:.6f}"


def cmd_bench(args) -> int:
    params = _gen_params(args)
    out = sys.stdout if not args.output or args.output == "-" else open(args.output, "w")
    try:
        out.write(f"{csv_header()},{BENCH_DERIVED}\n")
        for n in args.n:
            out.write(bench_row(n, args.dist, args.seed, params, args.bit_cap) + "\n")
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="realsort", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an input file")
    g.add_argument("--dist", choices=sorted(DISTRIBUTIONS), default="uniform")
    g.add_argument("-n", type=_positive, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-k", type=_positive, help="largest gap exponent (geometric-gaps)")
    g.add_argument("-o", "--output", help="file to write (default stdout)")
    g.set_defaults(func=cmd_gen)

    def common(sp):
        sp.add_argument("input", help="input file, one value per line")
        sp.add_argument("--bit-cap", type=_positive, default=DEFAULT_BIT_CAP,
                        help="largest permitted key bit length")
        sp.add_argument("--metrics", metavar="PATH", help="write a metrics CSV here")

    s = sub.add_parser("sort", help="sort an input file")
    common(s)
    s.add_argument("--stable", action=argparse.BooleanOptionalAction, default=True,
                   help="keep input order among equal values (always on)")
    s.add_argument("--oracle", action="store_true", help="also check against a comparison sort")
    s.set_defaults(func=cmd_sort)

    v = sub.add_parser("verify", help="sort with invariant checks and compare to an oracle")
    common(v)
    v.add_argument("--check", type=int, choices=(1, 2), default=1,
                   help="1 checks touched nodes, 2 re-validates everything (slow)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="metrics sweep over input sizes")
    b.add_argument("-n", type=_positive, nargs="+", required=True)
    b.add_argument("--dist", choices=sorted(DISTRIBUTIONS), default="uniform")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-k", type=_positive)
    b.add_argument("--bit-cap", type=_positive, default=DEFAULT_BIT_CAP)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
