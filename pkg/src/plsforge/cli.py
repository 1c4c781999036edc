"""Command-line front end: instances, partitions, scheme suites and cost curves.

Exit codes: 0 when the requested check passes, 1 when it fails, 2 on a parse
error or an exhausted search budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import registry
from .bits import LabelFormatError
from .graph import (
    Configuration, GraphError, generate, log2_ceil, read_configuration, write_graph,
)
from .partition import (
    PaddedCarvingError, RadiusFunction, algorithm_a, check_ts, cluster_degeneracy,
    degeneracy_to_ts, padded_carving, warmup_carving, write_partition,
)
from .pls import (
    EnumerationBudgetExceeded, PLSError, check_completeness, check_soundness_exhaustive,
    check_soundness_fuzz, scheme_cost,
)
from .rng import derive_seed
from .schemes import ExtensionBudgetExceeded, compile_tradeoff
from .schemes.spanning import tree_inputs

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("PLSFORGE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"PLSFORGE_SEED must be an integer, got {raw!r}") from None


def _number(text: str) -> int | float:
    try:
        return int(text)
    except ValueError:
        return float(text)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _ratio(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------- gen

def cmd_gen(args) -> int:
    params = [_number(p) for p in args.params]
    g = generate(args.kind, *params, seed=args.seed)
    cfg = Configuration(g, tree_inputs(g, args.seed)) if args.tree else Configuration.blank(g)
    buf = io.StringIO()
    write_graph(cfg, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_PASS


# ---------------------------------------------------------------- partition

def cmd_partition(args) -> int:
    g = read_configuration(args.graph).graph
    t, L = args.t, log2_ceil(g.n)
    metrics: dict = {"algorithm": args.algorithm, "t": t, "n": g.n, "seed": args.seed}
    p = None
    if args.algorithm == "warmup":
        ordered = warmup_carving(g, t)
        p = degeneracy_to_ts(g, ordered)
        metrics["cluster_degeneracy"] = _ratio(cluster_degeneracy(g, ordered))
        bounds = (16 * t * L, Fraction(1, t))
    elif args.algorithm == "padded":
        beta = args.beta if args.beta is not None else math.log(max(g.n, 2))
        bounds = (t, Fraction(2 * beta / t).limit_denominator(10 ** 9))
        metrics["beta"] = beta
        try:
            ordered = padded_carving(g, t, beta, args.seed, args.budget or 50)
        except PaddedCarvingError as exc:
            metrics.update(success=False, failed_step=exc.step, alive=exc.alive,
                           best_ratio=_ratio(exc.best_ratio), bound=_ratio(exc.bound))
        else:
            p = degeneracy_to_ts(g, ordered)
            metrics["cluster_degeneracy"] = _ratio(cluster_degeneracy(g, ordered))
    else:
        res = algorithm_a(g, t, RadiusFunction(args.seed, t, g.n), max_steps=args.budget)
        bounds = (16 * t * L, Fraction(1, t))
        metrics["alive"] = sorted(res.alive)
        if res.ok:
            p = res.partition
        else:
            metrics["success"] = False
    metrics["diameter_bound"] = bounds[0]
    metrics["eps_bound"] = _ratio(bounds[1])
    if p is not None:
        report = check_ts(g, p, *bounds)
        metrics.update(success=report.ok, clusters=len(p.clusters),
                       max_weak_diameter=report.max_weak_diameter,
                       cost_ratio=_ratio(report.cost_ratio), violations=report.violations[:10])
        if args.out:
            write_partition(p, args.out)
    _emit(_json(metrics), args.metrics)
    return EXIT_PASS if metrics["success"] else EXIT_FAIL


# ---------------------------------------------------------------- verify

def _graph_descriptor(args) -> str:
    return args.graph if args.graph else f"generated:{args.scheme}"


def cmd_verify(args) -> int:
    entry = registry.get(args.scheme, t=args.t, m=args.m, solver=args.solver)
    s = entry.scheme
    started = time.perf_counter()
    report: dict = {"scheme": s.name, "graph": _graph_descriptor(args), "t": args.t,
                    "mode": args.mode, "seed": args.seed, "meta": entry.meta}
    cfg_seed = derive_seed(args.seed, "cli", args.scheme)
    given = read_configuration(args.graph) if args.graph else None

    if args.mode == "completeness":
        cfgs = [given] if given else entry.valid_configs(args.count, args.seed)
        result = check_completeness(s, cfgs, entry.predicate)
        report.update(n=[c.n for c in cfgs], cost_bits=result.cost, checked=result.checked,
                      passed=result.ok, failures=[list(f) for f in result.failures[:10]])
    else:
        if given is None:
            if entry.invalid is None:
                raise CliError(f"{args.scheme} has no generator of invalid configurations")
            cfg = entry.invalid(cfg_seed)
        else:
            cfg = given
        if entry.predicate(cfg):
            raise CliError("soundness suites need a configuration outside the predicate")
        nearby = [entry.valid(cfg_seed)] if given is None else []
        report["n"] = cfg.n
        if args.mode == "sound-exhaustive":
            if args.max_bits is not None:
                max_bits = args.max_bits
            elif nearby:
                max_bits = scheme_cost(s, nearby)
            else:
                raise CliError("--max-bits is required with --graph")
            result = check_soundness_exhaustive(s, cfg, max_bits, budget=args.budget or 1 << 24,
                                                pred=entry.predicate)
            report.update(max_bits=max_bits, explored=result.explored, raw_space=result.raw_space,
                          passed=result.ok, violations=len(result.violations))
        else:
            result = check_soundness_fuzz(s, cfg, args.trials, seed=args.seed, nearby=nearby,
                                          max_bits=args.max_bits, pred=entry.predicate)
            report.update(trials=result.trials, passed=result.ok,
                          violations=len(result.violations), note=result.note)
    if args.timing:
        report["seconds"] = round(time.perf_counter() - started, 3)
    _emit(_json(report), args.out)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- tradeoff curve

def cmd_tradeoff(args) -> int:
    if args.graph:
        cfg = read_configuration(args.graph)
    else:
        cfg = Configuration.blank(generate(args.family, args.n, seed=args.seed))
    base = registry.get(args.scheme)
    if base.scheme.name == "spanning-tree" and all(v == "" for v in cfg.inputs.values()):
        cfg = Configuration(cfg.graph, tree_inputs(cfg.graph, args.seed))
    t_values = [int(x) for x in args.t_list.split(",") if x.strip()]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "radius", "cost_bits", "ts_overhead_bits", "error"])
    failed = False
    for t in t_values:
        ts = registry.get(args.ts, t=t).scheme
        try:
            s = compile_tradeoff(base.scheme, ts)
            writer.writerow([t, s.radius_for(cfg.n), scheme_cost(s, [cfg]),
                             scheme_cost(ts, [cfg]), ""])
        except (PLSError, ValueError, RuntimeError) as exc:
            failed = True
            writer.writerow([t, "", "", "", type(exc).__name__])
    _emit(buf.getvalue(), args.out)
    return EXIT_FAIL if failed else EXIT_PASS


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plsforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="defaults to $PLSFORGE_SEED or 0")
        p.add_argument("--out", default=None, help="output file (stdout when omitted)")

    p = sub.add_parser("gen", help="write a generated graph file")
    p.add_argument("kind")
    p.add_argument("params", nargs="*")
    p.add_argument("--tree", action="store_true", help="attach parent pointers of a random BFS tree")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("partition", help="build a TS partition and report its metrics")
    p.add_argument("algorithm", choices=["warmup", "padded", "algA"])
    p.add_argument("--graph", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--budget", type=int, default=None,
                   help="resamples per step (padded) or step cap (algA)")
    p.add_argument("--metrics", default=None, help="metrics JSON file (stdout when omitted)")
    common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("verify", help="run a completeness or soundness suite")
    p.add_argument("--scheme", required=True)
    p.add_argument("--mode", required=True, choices=["completeness", "sound-exhaustive", "sound-fuzz"])
    p.add_argument("--graph", default=None)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--max-bits", type=int, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--solver", choices=["hook", "exhaustive"], default=None)
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tradeoff-curve", help="honest compiled cost for several t, as CSV")
    p.add_argument("--scheme", default="spanning-tree")
    p.add_argument("--ts", default="ts-cert-const", choices=["ts-cert-const", "ts-cert-logn"])
    p.add_argument("--graph", default=None)
    p.add_argument("--family", default="path")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--t-list", default="1,2,4,8")
    common(p)
    p.set_defaults(func=cmd_tradeoff)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except (EnumerationBudgetExceeded, ExtensionBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CliError, GraphError, LabelFormatError, registry.UnknownScheme, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
