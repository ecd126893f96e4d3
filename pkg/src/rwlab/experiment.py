"""Seeded experiment and benchmark harnesses shared by the CLI and scripts/."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .adversary import UniformOracle, attack, build_instance, query_budget
from .algorithms import ALGORITHMS, run_algorithm
from .fairness import uniform_profile
from .query import ValuationOracle

STRATEGIES = ("contiguous", "even-paz", "last-diminisher")

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("RWLAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    workers = worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def trial_seed(seed: int, n: int, trial: int) -> int:
    """Independent per-cell seed, stable across runs and worker counts."""
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    n_values: Sequence[int] = (33, 65, 97, 129)
    trials: int = 100
    seed: int = 0
    strategies: Sequence[str] = STRATEGIES
    # None means the construction's own budget for each n
    budget: int | None = None


@dataclass(frozen=True)
class TrialResult:
    n: int
    trial: int
    seed: int
    strategy: str
    budget: int
    queries: int
    truncated: bool
    verdict: str
    agent: int | None


def run_trial(n: int, trial: int, seed: int, strategy: str, budget: int | None = None) -> TrialResult:
    inst = build_instance(n, seed)
    cap = query_budget(n) if budget is None else budget
    res = run_algorithm(strategy, UniformOracle(), n, budget=cap)
    v = attack(res.allocation, res.transcript, None, inst)
    return TrialResult(n, trial, seed, strategy, cap, res.query_count, res.truncated, v.kind, v.agent)


def _run_cell(args) -> list[TrialResult]:
    n, trial, seed, strategies, budget = args
    return [run_trial(n, trial, seed, s, budget) for s in strategies]


def run_experiment(cfg: ExperimentConfig) -> list[TrialResult]:
    cells = [(n, t, trial_seed(cfg.seed, n, t), tuple(cfg.strategies), cfg.budget)
             for n in cfg.n_values for t in range(cfg.trials)]
    rows = [r for cell in parallel_map(_run_cell, cells) for r in cell]
    rows.sort(key=lambda r: (r.n, r.strategy, r.trial))
    return rows


@dataclass
class RateRow:
    n: int
    m: int
    budget: int
    strategy: str
    trials: int
    refuted: int
    mean_queries: float = field(default=0.0)

    @property
    def rate(self) -> float:
        return self.refuted / self.trials if self.trials else float("nan")


def summarize(results: Iterable[TrialResult]) -> list[RateRow]:
    rows: dict[tuple[int, str], RateRow] = {}
    qsum: dict[tuple[int, str], int] = {}
    for r in results:
        key = (r.n, r.strategy)
        row = rows.setdefault(key, RateRow(r.n, 32 * ((r.n - 1) // 32), r.budget, r.strategy, 0, 0))
        row.trials += 1
        row.refuted += r.verdict != "unrefuted"
        qsum[key] = qsum.get(key, 0) + r.queries
    for key, row in rows.items():
        row.mean_queries = qsum[key] / row.trials
    return [rows[k] for k in sorted(rows)]


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    n: int
    queries: int

    @property
    def per_n_log_n(self) -> float:
        return self.queries / (self.n * math.log2(self.n)) if self.n > 1 else float("nan")

    @property
    def per_n_squared(self) -> float:
        return self.queries / self.n ** 2


def bench_one(args: tuple[str, int]) -> BenchRow:
    name, n = args
    res = run_algorithm(name, ValuationOracle(uniform_profile(n)), n)
    return BenchRow(name, n, res.query_count)


def bench(algorithms: Sequence[str], n_values: Sequence[int]) -> list[BenchRow]:
    cells = [(a, n) for a in algorithms for n in n_values
             if a in ALGORITHMS and not (a == "cut-and-choose" and n != 2)]
    rows = parallel_map(bench_one, cells)
    rows.sort(key=lambda r: (r.algorithm, r.n))
    return rows


def doubling(lo: int, hi: int) -> list[int]:
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out
