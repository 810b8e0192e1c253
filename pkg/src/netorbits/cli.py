"""Command-line front end: counts, sweeps, and the self-check oracle.

Emits one report row per requested count, as CSV or JSON.  Exit codes:
0 success, 1 oracle property failure, 2 configuration error, 3 enumeration
guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import arch as arch_mod
from . import numeric, symbolic, symmetry
from .arch import Architecture, EnumerationGuardError, ValueSet, canonical_value_set, evaluate, param_count

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_GUARD = 3

CSV_HEADER = ["arch", "P", "V", "method", "policy", "count", "seconds"]


@dataclass
class RunConfig:
    arch: Architecture
    values: ValueSet
    method: str
    activation: str = "relu"
    policy: symbolic.NormalizationPolicy = symbolic.DEFAULT_POLICY
    tol: float = numeric.DEFAULT_TOL
    grid_points: int = numeric.GRID_POINTS
    shards: int = 1
    workers: int = 1
    guard: int = arch_mod.DEFAULT_GUARD


@dataclass
class ReportRow:
    arch: str
    P: int
    V: int
    method: str
    policy: str
    count: str  # decimal string or exact rational string; never a float
    seconds: float

    def as_list(self):
        return [self.arch, str(self.P), str(self.V), self.method,
                self.policy, self.count, f"{self.seconds:.3f}"]


def write_report(rows, path=None, fmt="csv"):
    """Serialize report rows as CSV or JSON to `path` (or stdout)."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_list())
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(
            [dict(zip(CSV_HEADER, row.as_list())) for row in rows], indent=2
        ) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_report(path):
    """Parse a CSV report back into ReportRow objects (round-trip of write_report)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        for rec in reader:
            rows.append(ReportRow(rec[0], int(rec[1]), int(rec[2]), rec[3],
                                  rec[4], rec[5], float(rec[6])))
    return rows


def run_count(cfg: RunConfig) -> ReportRow:
    """Dispatch one counting method and wrap the result in a report row."""
    V = len(cfg.values)
    t0 = time.perf_counter()
    policy_label = "-"
    if cfg.method == "bound":
        count = str(symmetry.upper_bound(cfg.arch, V))
        method = "bound"
    elif cfg.method == "exact":
        count = str(symmetry.burnside_exact(cfg.arch, V))
        method = "exact"
    elif cfg.method == "symbolic":
        count = str(symbolic.count_unique_symbolic(
            cfg.arch, cfg.values, cfg.policy, guard=cfg.guard, shards=cfg.shards))
        method = "symbolic"
        policy_label = cfg.policy.label()
    elif cfg.method == "numeric":
        grid = numeric.make_grid(cfg.grid_points)
        count = str(numeric.count_unique_numeric(
            cfg.arch, cfg.values, cfg.activation, grid, cfg.tol,
            guard=cfg.guard, shards=cfg.shards, workers=cfg.workers))
        method = f"numeric:{cfg.activation}"
        policy_label = f"tol={cfg.tol:g}"
    else:
        raise ValueError(f"unknown method {cfg.method!r}")
    dt = time.perf_counter() - t0
    return ReportRow(str(cfg.arch), param_count(cfg.arch), V, method,
                     policy_label, count, dt)


def run_sweep(arch_strings, v_list, methods, shards=1, guard=arch_mod.DEFAULT_GUARD):
    """Yield one row per (architecture, V, method), in the given order.

    A generator so that a guard abort partway through still leaves the rows
    computed so far with the caller.
    """
    for v in v_list:
        for text in arch_strings:
            a = Architecture.parse(text)
            vs = canonical_value_set(v)
            for method in methods:
                cfg = RunConfig(a, vs, method, shards=shards, guard=guard)
                yield run_count(cfg)


def plot_sweep(rows, out_stem):
    """Render count (log scale) vs parameter count, one SVG per V.

    Solid lines for exact/symbolic counts grouped by hidden-layer depth,
    dashed for the bound.  Returns the written paths.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    v_values = sorted({r.V for r in rows})
    for v in v_values:
        fig, ax = plt.subplots(figsize=(6, 4.5))
        sub = [r for r in rows if r.V == v]
        depths = sorted({len(r.arch.split("-")) - 1 for r in sub})
        colors = {d: c for d, c in zip(depths, ["tab:red", "tab:blue", "tab:green", "tab:purple"])}
        for d in depths:
            for method in sorted({r.method for r in sub}):
                pts = sorted(
                    (r.P, Fraction(r.count)) for r in sub
                    if r.method == method and len(r.arch.split("-")) - 1 == d
                )
                if not pts:
                    continue
                style = "--" if method == "bound" else "-"
                ax.plot([p for p, _ in pts], [float(c) for _, c in pts], style,
                        color=colors[d], marker="o", markersize=3,
                        label=f"{d} hidden layer(s), {method}")
        ax.set_yscale("log")
        ax.set_xlabel("parameters")
        ax.set_ylabel("distinct function mappings")
        ax.set_title(f"V = {v}")
        ax.legend(fontsize=7)
        path = f"{out_stem}_V{v}.svg"
        fig.savefig(path, format="svg", bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Oracle


def run_oracle(a: Architecture, vs: ValueSet, samples=200, seed=0,
               inject_fault=False, guard=arch_mod.DEFAULT_GUARD):
    """Cross-check the fast counters against brute force and the group axioms.

    Checks: class-formula cycle counts vs explicit cycle counts for every
    group element; exact function invariance under every group element on
    sampled states; orbit enumeration vs the class-sum count.  Returns
    (ok, lines); the fault-injection hook corrupts one induced permutation to
    prove the checks can fail.
    """
    lines = []
    ok = True
    rng = random.Random(seed)
    V = len(vs)
    P = param_count(a)
    if V ** P > guard:
        raise EnumerationGuardError(f"{V}^{P} states exceed the enumeration guard {guard}")

    elements = list(symmetry.group_elements(a))
    images = [symmetry.induced_param_permutation(a, g) for g in elements]
    if inject_fault and P >= 2 and len(images) > 1:
        # deliberately corrupt one non-identity element's parameter map
        img = list(images[1])
        img[0], img[1] = img[1], img[0]
        images[1] = tuple(img)

    # cycle counts: class formula vs explicit factorisation
    mismatch = None
    for g, img in zip(elements, images):
        types = tuple(symmetry.cycle_type(p) for p in g)
        if symmetry.cycles_from_types(a, types) != symmetry.cycle_count(img):
            mismatch = (g, types, symmetry.cycle_count(img))
            break
    if mismatch:
        ok = False
        g, types, got = mismatch
        lines.append(f"FAIL cycle-count: element {g} class {types} "
                     f"formula={symmetry.cycles_from_types(a, types)} explicit={got}")
    else:
        lines.append(f"PASS cycle-count formula vs explicit ({len(elements)} elements)")

    # exact invariance of the function under the action
    bad = None
    xs = [(Fraction(num, 3),) * a.input_count for num in (-2, 1, 5)]
    for _ in range(samples):
        s = tuple(rng.randrange(V) for _ in range(P))
        img = images[rng.randrange(len(images))]
        moved = symmetry.apply_perm(s, img)
        for x in xs:
            lhs = evaluate(a, moved, vs, lambda z: z * z + 1, x)
            rhs = evaluate(a, s, vs, lambda z: z * z + 1, x)
            if lhs != rhs:
                bad = (s, img, x, lhs, rhs)
                break
        if bad:
            break
    if bad:
        ok = False
        s, img, x, lhs, rhs = bad
        lines.append(f"FAIL invariance: state {s} image {img} x={x}: {lhs} != {rhs}")
    else:
        lines.append(f"PASS exact action invariance ({samples} sampled states)")

    # orbit enumeration vs class-sum count
    reps = set()
    for s in arch_mod.state_iter(a, vs):
        best = s
        for img in images:
            t = symmetry.apply_perm(s, img)
            if t < best:
                best = t
        reps.add(best)
    fast = symmetry.burnside_exact(a, V)
    if len(reps) != fast:
        ok = False
        lines.append(f"FAIL orbit count: enumeration={len(reps)} class-sum={fast}")
    else:
        lines.append(f"PASS orbit count: enumeration == class-sum == {fast}")

    return ok, lines


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p):
    p.add_argument("--arch", required=True, help='architecture string, e.g. "1-2-2"')
    p.add_argument("--values", default="-1,1",
                   help='comma-separated exact rationals, e.g. "-1,0,1"')
    p.add_argument("--guard", type=int, default=arch_mod.DEFAULT_GUARD,
                   help="max state count for exhaustive methods")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="netorbits",
        description="Exact and empirical counting of distinct functions of "
                    "finite-valued feed-forward networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    default_shards = int(os.environ.get("NETORBITS_SHARDS", "1"))

    p = sub.add_parser("count", help="run one counting method")
    _add_common(p)
    p.add_argument("--method", required=True,
                   choices=["bound", "exact", "symbolic", "numeric"])
    p.add_argument("--activation", default="relu", choices=numeric.ACTIVATIONS)
    p.add_argument("--policy", default="nocombine",
                   choices=["nocombine", "combine+keep0", "combine+drop0"])
    p.add_argument("--tol", type=float, default=numeric.DEFAULT_TOL)
    p.add_argument("--grid-points", type=int, default=numeric.GRID_POINTS)
    p.add_argument("--shards", type=int, default=default_shards)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", default=None)
    p.add_argument("--format", default="csv", choices=["csv", "json"])

    p = sub.add_parser("sweep", help="counts for a family of architectures")
    p.add_argument("--archs", required=True,
                   help="comma-separated architecture strings")
    p.add_argument("--V", default="2,3", help="comma-separated value-set sizes")
    p.add_argument("--methods", default="bound,exact",
                   help="comma-separated subset of bound,exact,symbolic")
    p.add_argument("--shards", type=int, default=default_shards)
    p.add_argument("--guard", type=int, default=arch_mod.DEFAULT_GUARD)
    p.add_argument("--output", default=None)
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--plot", default=None, metavar="STEM",
                   help="write STEM_V<k>.svg charts")

    p = sub.add_parser("oracle", help="brute-force verification of the counters")
    _add_common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true",
                   help="corrupt the permutation layout to prove checks can fail")

    return parser


def cmd_count(args) -> int:
    cfg = RunConfig(
        arch=Architecture.parse(args.arch),
        values=ValueSet.parse(args.values),
        method=args.method,
        activation=args.activation,
        policy=symbolic.NormalizationPolicy.from_label(args.policy),
        tol=args.tol,
        grid_points=args.grid_points,
        shards=args.shards,
        workers=args.workers,
        guard=args.guard,
    )
    row = run_count(cfg)
    write_report([row], args.output, args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    arch_strings = [s for s in args.archs.split(",") if s]
    v_list = [int(v) for v in args.V.split(",") if v]
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in ("bound", "exact", "symbolic"):
            raise ValueError(f"sweep does not support method {m!r}")
    rows = []
    try:
        for row in run_sweep(arch_strings, v_list, methods,
                             shards=args.shards, guard=args.guard):
            rows.append(row)
    except EnumerationGuardError:
        # flush what we have before reporting the guard violation
        write_report(rows, args.output, args.format)
        raise
    write_report(rows, args.output, args.format)
    if args.plot:
        for path in plot_sweep(rows, args.plot):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    a = Architecture.parse(args.arch)
    vs = ValueSet.parse(args.values)
    ok, lines = run_oracle(a, vs, samples=args.samples, seed=args.seed,
                           inject_fault=args.inject_fault, guard=args.guard)
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_PROPERTY_FAILURE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG_ERROR if exc.code not in (0, None) else 0
    try:
        if args.command == "count":
            return cmd_count(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        raise ValueError(f"unknown command {args.command!r}")
    except EnumerationGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
