"""Command line: solve, oracle, gen, bench.

Exit codes: 0 success, 1 malformed input or usage, 2 infeasible constraint,
3 enumeration budget exhausted.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import bench
from .constraints import ColorTable
from .geometry import ResourceError, UsageError
from .instances import gaussian_planted
from .io import (dumps, format_instance, load_constraint, oracle_document, read_instance,
                 solve_document, write_plot_data)
from .oracle import exact_msr
from .solver import SolveOptions, solve

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _load(args):
    points, colors = read_instance(args.input)
    spec = load_constraint(args.constraint, colors)
    return points, colors, spec


def cmd_solve(args) -> int:
    points, colors, spec = _load(args)
    opts = SolveOptions(mode=args.mode, radius_path=args.radius_path, workers=args.workers)
    t0 = time.perf_counter()
    sol = solve(points, args.k, args.epsilon, colors, spec, opts)
    doc = solve_document(points, colors, sol, args.input)
    if args.timing:
        doc["diagnostics"]["wall_time"] = time.perf_counter() - t0
    with _sink(args.output) as out:
        out.write(dumps(doc))
    if args.emit_plot_data and sol.feasible:
        with open(args.emit_plot_data, "w") as fh:
            write_plot_data(fh, points, sol.clusters, colors)
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    points, colors, spec = _load(args)
    res = exact_msr(points, args.k, colors, spec)
    doc = oracle_document(points, colors, args.k, spec, res, args.input)
    with _sink(args.output) as out:
        out.write(dumps(doc))
    if args.emit_plot_data and res.feasible:
        with open(args.emit_plot_data, "w") as fh:
            write_plot_data(fh, points, res.clusters, colors)
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def _gen_colors(rng, sizes, mode: str | None) -> ColorTable | None:
    if mode is None:
        return None
    if mode == "exact-fair":
        if any(s % 2 for s in sizes):
            raise UsageError(f"exact-fair coloring needs even cluster sizes, got {sizes}")
        out = []
        for s in sizes:
            cols = [0, 1] * (s // 2)
            rng.shuffle(cols)
            out += cols
        return ColorTable(tuple(out), ("0", "1"))
    try:
        m = int(mode)
    except ValueError:
        raise UsageError(f"--colors takes a count or 'exact-fair', got {mode!r}") from None
    n = sum(sizes)
    if not 1 <= m <= n:
        raise UsageError(f"cannot use {m} colors on {n} points")
    # every color appears at least once, the rest drawn uniformly
    cols = list(range(m)) + [int(c) for c in rng.integers(0, m, size=n - m)]
    rng.shuffle(cols)
    return ColorTable(tuple(cols), tuple(str(c) for c in range(m)))


def cmd_gen(args) -> int:
    if args.n < 1 or args.d < 1 or args.k_planted < 1:
        raise UsageError("--n, --d and --k-planted must be positive")
    if args.k_planted > args.n:
        raise UsageError(f"cannot plant {args.k_planted} clusters with {args.n} points")
    rng = np.random.default_rng(args.seed)
    points, sizes, cov = gaussian_planted(rng, args.n, args.d, args.k_planted, args.separation)
    colors = _gen_colors(rng, sizes, args.colors)
    with _sink(args.output) as out:
        out.write(format_instance(points, colors))
    diag = {"planted": [dict(b.to_dict(), size=s) for b, s in zip(cov.balls, sizes)],
            "separation": args.separation, "seed": args.seed}
    print(json.dumps(diag, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    fn = bench.SUITES[args.suite]
    kw = {"timing": args.timing}
    params = inspect.signature(fn).parameters
    if "workers" in params:
        kw["workers"] = args.workers
    if "mode" in params:
        kw["mode"] = args.mode
    report = fn(args.trials, args.seed, **kw)
    with _sink(args.output) as out:
        out.write(report.format())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairmsr", description="Constrained k-min-sum-radii clustering.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--input", required=True, help="CSV instance")
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--constraint", default="none",
                        help="none | lower-bound:L | outliers:Z | exact-fairness | "
                             "min-balance:B | exact-balance | range-balance:TABLE")
        sp.add_argument("--output", help="result document path (default stdout)")
        sp.add_argument("--emit-plot-data", metavar="PATH",
                        help="write coordinates, cluster id and color per point")

    s = sub.add_parser("solve", help="approximate solver")
    common(s)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--mode", choices=("engineering", "theoretical"), default="engineering")
    s.add_argument("--radius-path", choices=("auto", "kcenter", "coreset"), default="auto")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="record wall time in diagnostics")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum by enumeration")
    common(o)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="planted Gaussian instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--k-planted", type=int, required=True)
    g.add_argument("--separation", type=float, default=3.0,
                   help="center distance over summed radii")
    g.add_argument("--colors", help="number of colors, or 'exact-fair'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", help="instance path (default stdout)")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="seeded benchmark campaigns")
    b.add_argument("--suite", choices=sorted(bench.SUITES), required=True)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--mode", choices=("engineering", "theoretical"), default="engineering")
    b.add_argument("--timing", action="store_true", help="add a wall-time column")
    b.add_argument("--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"fairmsr: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UsageError as exc:
        print(f"fairmsr: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
