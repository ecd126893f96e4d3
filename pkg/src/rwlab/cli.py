"""``rwlab`` command line.

Exit codes: 0 ok, 2 construction error, 3 malformed input, 4 incomplete
allocation.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import random
import sys
from pathlib import Path

from .adversary import AdversaryInstance, ConstructionError, UniformOracle, attack, build_instance
from .algorithms import ALGORITHMS, IncompleteAllocation, run_algorithm
from .analysis import bound_scan, crossing_point
from .cake import fmt
from .experiment import STRATEGIES, ExperimentConfig, bench, doubling, run_experiment, summarize
from .fairness import Allocation, InvalidAllocation, SocialGraph, fairness_report, uniform_profile
from .instances import parse_profile, path_example_graph, path_example_valuations, profile_to_text, random_graph, random_valuation
from .query import Transcript, ValuationOracle

EXIT_CONSTRUCTION = 2
EXIT_MALFORMED = 3
EXIT_INCOMPLETE = 4

log = logging.getLogger("rwlab")


class Malformed(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise Malformed(f"cannot read {path}: {exc}") from exc


def load_instance(path: str) -> AdversaryInstance | list:
    """Adversary instance (header ``n m r seed``) or valuation profile (header ``n``)."""
    text = _read(path)
    first = next((ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")), None)
    try:
        if first is not None and len(first) == 4:
            return AdversaryInstance.parse(text)
        return parse_profile(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _parse_file(path: str, parser):
    try:
        return parser(_read(path))
    except (ValueError, ZeroDivisionError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(args, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t" if args.format == "tsv" else ",", lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    return "nan" if x != x else format(x, ".12g")


def cmd_generate(args) -> int:
    if args.adversary:
        inst = build_instance(args.n, args.seed)
        _emit(args, inst.to_text())
        print(f"n={inst.n} m={inst.m} r={inst.r} budget={inst.budget} seed={inst.seed}", file=sys.stderr)
        return 0
    if args.path_example:
        vals, g = path_example_valuations(), path_example_graph()
    else:
        rng = random.Random(args.seed)
        vals = [random_valuation(rng) for _ in range(args.n)]
        g = random_graph(rng, args.n)
    _emit(args, profile_to_text(vals))
    if args.graph_out:
        Path(args.graph_out).write_text(g.to_text())
    print(f"n={len(vals)} seed={args.seed}", file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    if isinstance(inst, AdversaryInstance):
        oracle, n = UniformOracle(), inst.n
    else:
        oracle, n = ValuationOracle(inst), len(inst)
    try:
        res = run_algorithm(args.algorithm, oracle, n, budget=args.budget)
    except ValueError as exc:
        raise Malformed(str(exc)) from exc
    _emit(args, res.allocation.to_text())
    if args.transcript_out:
        Path(args.transcript_out).write_text(res.transcript.to_text())
    print(f"algorithm={args.algorithm} n={n} queries={res.query_count} truncated={str(res.truncated).lower()}",
          file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    alloc = _parse_file(args.allocation, Allocation.parse)
    if isinstance(inst, AdversaryInstance):
        vals, g = uniform_profile(inst.n), inst.graph()
    else:
        vals, g = inst, None
    if args.graph:
        g = _parse_file(args.graph, SocialGraph.parse)
    if g is None:
        raise Malformed("a --graph file is needed with a valuation profile")
    if not (alloc.n == len(vals) == g.n):
        raise Malformed(f"sizes disagree: allocation {alloc.n}, valuations {len(vals)}, graph {g.n}")
    rep = fairness_report(alloc, vals, g)
    lines = [f"{k}={str(rep[k]).lower()}" for k in
             ("proportional", "locally_proportional", "envy_free", "locally_envy_free")]
    for i, (pm, lm) in enumerate(zip(rep["proportional_margins"], rep["lp_margins"])):
        lines.append(f"agent {i} proportional_margin={fmt(pm)} lp_margin={'NA' if lm is None else fmt(lm)}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_attack(args) -> int:
    inst = load_instance(args.instance)
    if not isinstance(inst, AdversaryInstance):
        raise Malformed("attack needs an adversary instance file")
    alloc = _parse_file(args.allocation, Allocation.parse)
    t = _parse_file(args.transcript, Transcript.parse) if args.transcript else Transcript()
    if alloc.n != inst.n:
        raise Malformed(f"allocation has {alloc.n} agents, instance {inst.n}")
    _emit(args, attack(alloc, t, None, inst).to_text() + "\n")
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(n_values=args.n, trials=args.trials, seed=args.seed,
                           strategies=args.strategies, budget=args.budget)
    results = run_experiment(cfg)
    summary = summarize(results)
    rows = [[r.n, r.m, r.budget, r.strategy, cfg.seed, r.trials, r.refuted, _num(r.rate), _num(r.mean_queries)]
            for r in summary]
    _emit(args, _table(args, ["n", "m", "budget", "strategy", "seed", "trials", "refuted", "rate", "mean_queries"],
                       rows))
    if args.trials_out:
        trows = [[r.n, r.trial, r.seed, r.strategy, r.budget, r.queries, int(r.truncated), r.verdict,
                  "" if r.agent is None else r.agent] for r in results]
        Path(args.trials_out).write_text(_table(
            args, ["n", "trial", "seed", "strategy", "budget", "queries", "truncated", "verdict", "agent"], trows))
    if args.plot:
        _plot_rates(summary, args.plot)
    return 0


def _plot_rates(summary, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for strat in sorted({r.strategy for r in summary}):
        pts = [(r.n, r.rate) for r in summary if r.strategy == strat]
        ax.plot(*zip(*pts), marker="o", label=strat)
    ax.set_xlabel("n")
    ax.set_ylabel("refutation rate")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_bench(args) -> int:
    ns = args.n if args.n else doubling(args.n_min, args.n_max)
    rows = [[r.algorithm, r.n, r.queries, _num(r.per_n_log_n), _num(r.per_n_squared)]
            for r in bench(args.algorithms, ns)]
    _emit(args, _table(args, ["algorithm", "n", "queries", "q_per_n_log2_n", "q_per_n2"], rows))
    return 0


def cmd_bounds(args) -> int:
    if args.m_min % 32 or args.m_max % 32:
        raise Malformed("m values must be multiples of 32")
    scan = bound_scan(args.m_max, args.m_min)
    rows = [[t.m, _num(t.ln_binomial), _num(t.ln_double_factorial), _num(t.ln_pow2_term),
             _num(t.exp_term), _num(t.total_log)] for t in scan]
    _emit(args, _table(args, ["m", "ln_binomial", "ln_double_factorial", "ln_pow2_term", "exp_term", "total_log"],
                       rows))
    star = crossing_point(scan)
    print(f"crossing m*={star if star is not None else 'none'}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "tsv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="rwlab", description="Robertson-Webb cake-cutting laboratory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write an instance file")
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--adversary", action="store_true")
    kind.add_argument("--random", action="store_true")
    g.add_argument("-n", type=int, default=3)
    g.add_argument("--path-example", "--figure2", dest="path_example", action="store_true",
                   help="with --random: the 3-agent path example")
    g.add_argument("--graph-out", default=None)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", parents=[common], help="run an algorithm through a counting oracle")
    r.add_argument("algorithm", choices=sorted(ALGORITHMS))
    r.add_argument("--instance", required=True)
    r.add_argument("--budget", type=int, default=None)
    r.add_argument("--transcript-out", default=None)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", parents=[common], help="evaluate the four fairness notions")
    c.add_argument("--allocation", required=True)
    c.add_argument("--instance", required=True)
    c.add_argument("--graph", default=None)
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("attack", parents=[common], help="try to refute an allocation on an adversary instance")
    a.add_argument("--allocation", required=True)
    a.add_argument("--transcript", default=None)
    a.add_argument("--instance", required=True)
    a.set_defaults(func=cmd_attack)

    e = sub.add_parser("experiment", parents=[common], help="refutation rates of budget-capped strategies")
    e.add_argument("--n", type=int, nargs="+", default=[33, 65, 97, 129])
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
    e.add_argument("--budget", type=int, default=None, help="override the per-n query budget")
    e.add_argument("--trials-out", default=None)
    e.add_argument("--plot", default=None, help="write a PNG of refutation rate vs n")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", parents=[common], help="query counts under uniform agents")
    b.add_argument("--algorithms", nargs="+", default=["even-paz", "last-diminisher"], choices=sorted(ALGORITHMS))
    b.add_argument("--n", type=int, nargs="+", default=None)
    b.add_argument("--n-min", type=int, default=2)
    b.add_argument("--n-max", type=int, default=1024)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("bounds", parents=[common], help="log-space union bound scan")
    s.add_argument("--m-min", type=int, default=32)
    s.add_argument("--m-max", type=int, default=2 ** 15)
    s.set_defaults(func=cmd_bounds)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (Malformed, InvalidAllocation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except IncompleteAllocation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
