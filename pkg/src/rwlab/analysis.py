"""Pairings of R, split counts, and the tail and union bounds behind them.

Cake quantities stay exact; probability bounds are evaluated in natural-log
space with floats since the combinatorial factors overflow quickly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from .adversary import AdversaryInstance, boundary_profile
from .fairness import Allocation


@dataclass(frozen=True)
class PairPartition:
    pairs: tuple[frozenset[int], ...]

    def __post_init__(self):
        pairs = tuple(frozenset(p) for p in self.pairs)
        seen: set[int] = set()
        for p in pairs:
            if len(p) != 2:
                raise ValueError(f"pair {sorted(p)} does not have two elements")
            if seen & p:
                raise ValueError(f"pairs overlap at {sorted(seen & p)}")
            seen |= p
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def consecutive(cls, order: Sequence[int]) -> "PairPartition":
        if len(order) % 2:
            raise ValueError("need an even number of elements to pair")
        return cls(tuple(frozenset(order[k:k + 2]) for k in range(0, len(order), 2)))

    def elements(self) -> frozenset[int]:
        return frozenset().union(*self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def split_count(P: PairPartition, S: Iterable[int]) -> int:
    """Number of pairs holding exactly one element of ``S``."""
    s = set(S)
    return sum(1 for p in P.pairs if len(p & s) == 1)


def hit_indicators(P: PairPartition, S: Iterable[int]) -> list[int]:
    s = set(S)
    return [int(bool(p & s)) for p in P.pairs]


def is_segmentation_for(P: PairPartition, S: Iterable[int]) -> bool:
    """At most a quarter of the pairs are split by ``S``."""
    return 4 * split_count(P, S) <= len(P)


def is_segmentation_for_set(P: PairPartition, M: Iterable[int], inst: AdversaryInstance) -> bool:
    if P.elements() != frozenset(inst.R):
        raise ValueError("partition must cover exactly R")
    return all(is_segmentation_for(P, inst.S(i)) for i in M)


def canonical_segmentation(a: Allocation, inst: AdversaryInstance) -> PairPartition:
    """Pair up R in order of where each agent's cake starts."""
    starts = {}
    for r in inst.R:
        if not a[r]:
            raise ValueError(f"R-agent {r} holds no cake")
        starts[r] = a[r].inf
    if len(set(starts.values())) != len(starts):
        raise ValueError("two R-agents' pieces start at the same point")
    return PairPartition.consecutive(sorted(inst.R, key=starts.__getitem__))


@dataclass(frozen=True)
class SegmentationReport:
    premise: bool                  # every i in M has b_i <= m/16
    holds: bool                    # canonical pairing is a segmentation of M
    counterexample: int | None     # agent in M whose split count exceeds the cap


def segmentation_bound_check(a: Allocation, inst: AdversaryInstance, M: Iterable[int]) -> SegmentationReport:
    M = list(M)
    prof = boundary_profile(a, inst)
    premise = all(16 * prof.b(i) <= inst.m for i in M)
    if not premise:
        return SegmentationReport(False, True, None)
    P = canonical_segmentation(a, inst)
    for i in M:
        if not is_segmentation_for(P, inst.S(i)):
            return SegmentationReport(True, False, i)
    return SegmentationReport(True, True, None)


# --- tail bounds -----------------------------------------------------------------

def _check_m(m: int) -> None:
    if m % 32:
        raise ValueError(f"m must be a multiple of 32, got {m}")


def hoeffding_tail_bound(m: int) -> float:
    """``exp(-m/128)``: chance that at most 5/8 of the pairs are hit."""
    _check_m(m)
    return math.exp(-m / 128)


def tail_threshold(m: int) -> int:
    """``(5/8)(m/4)`` hit pairs."""
    return 5 * m // 32


def hit_count_distribution(m: int) -> dict[int, int]:
    """Count size-m/4 subsets of a 2k-set by how many of k fixed pairs they hit.

    Enumerates every subset; pairs are ``{0,1}, {2,3}, ...``.
    """
    half, quarter = m // 2, m // 4
    counts: dict[int, int] = {}
    for S in combinations(range(half), quarter):
        hit = len({x // 2 for x in S})
        counts[hit] = counts.get(hit, 0) + 1
    return counts


def exact_split_tail(m: int = 32, threshold: int | None = None, *, complement: bool = False) -> Fraction:
    """Exact ``P[#hit pairs <= threshold]`` by enumerating all ``C(16, 8)`` subsets.

    With ``complement`` a pair counts as hit when it holds a vertex *outside*
    ``S``.
    """
    if m != 32:
        raise ValueError("exact enumeration only at m=32; use monte_carlo_split_tail")
    if threshold is None:
        threshold = tail_threshold(m)
    half, quarter = m // 2, m // 4
    total = good = 0
    universe = set(range(half))
    for S in combinations(range(half), quarter):
        pts = universe.difference(S) if complement else S
        total += 1
        if len({x // 2 for x in pts}) <= threshold:
            good += 1
    return Fraction(good, total)


def closed_form_hit_count(pairs: int, chosen: int, hits: int) -> int:
    """Subsets of size ``chosen`` from ``pairs`` pairs hitting exactly ``hits`` pairs.

    ``d`` pairs are taken whole and ``s`` singly with ``s + d = hits`` and
    ``s + 2d = chosen``.
    """
    d = chosen - hits
    s = hits - d
    if d < 0 or s < 0:
        return 0
    return math.comb(pairs, hits) * math.comb(hits, d) * 2 ** s


def pair_hit_probability(m: int = 32) -> Fraction:
    """Exact chance that a fixed pair meets a uniform size-m/4 subset of R."""
    half, quarter = m // 2, m // 4
    return 1 - Fraction(math.comb(half - 2, quarter), math.comb(half, quarter))


@dataclass(frozen=True)
class MonteCarloEstimate:
    trials: int
    successes: int
    estimate: float
    stderr: float
    ci_low: float
    ci_high: float


def sample_hit_counts(m: int, trials: int, rng: np.random.Generator, chunk: int = 20_000) -> np.ndarray:
    half, quarter = m // 2, m // 4
    out = np.empty(trials, dtype=np.int64)
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        # rank < quarter under a random permutation marks a uniform subset
        ranks = np.argsort(rng.random((k, half)), axis=1).argsort(axis=1)
        member = ranks < quarter
        out[done:done + k] = (member[:, 0::2] | member[:, 1::2]).sum(axis=1)
        done += k
    return out


def monte_carlo_split_tail(m: int, trials: int, seed: int, confidence: float = 0.997) -> MonteCarloEstimate:
    _check_m(m)
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    hits = sample_hit_counts(m, trials, rng)
    k = int((hits <= tail_threshold(m)).sum())
    p = k / trials
    ci = binomtest(k, trials).proportion_ci(confidence_level=confidence)
    return MonteCarloEstimate(trials, k, p, math.sqrt(p * (1 - p) / trials), ci.low, ci.high)


# --- union bound -----------------------------------------------------------------

@dataclass(frozen=True)
class UnionBoundTerms:
    m: int
    ln_binomial: float
    ln_double_factorial: float
    ln_pow2_term: float
    exp_term: float

    @property
    def total_log(self) -> float:
        return self.ln_binomial + self.ln_double_factorial + self.ln_pow2_term + self.exp_term


def ln_double_factorial_odd(k: int) -> float:
    """``ln((k-1)!!)`` for even ``k``, via ``(k-1)!! = k! / (2^(k/2) (k/2)!)``."""
    if k % 2:
        raise ValueError("k must be even")
    return math.lgamma(k + 1) - (k // 2) * math.log(2) - math.lgamma(k // 2 + 1)


def union_bound_log(m: int) -> UnionBoundTerms:
    """Log of ``C(m/2, m/4) * (m/2 - 1)!! * 2^(m/4) * exp(-m^2/512)``."""
    _check_m(m)
    if m < 32:
        raise ValueError("m must be at least 32")
    half, quarter = m // 2, m // 4
    return UnionBoundTerms(
        m=m,
        ln_binomial=math.lgamma(half + 1) - 2 * math.lgamma(quarter + 1),
        ln_double_factorial=ln_double_factorial_odd(half),
        ln_pow2_term=quarter * math.log(2),
        exp_term=-(m * m) / 512,
    )


def bound_scan(m_max: int = 2 ** 15, m_min: int = 32) -> list[UnionBoundTerms]:
    return [union_bound_log(m) for m in range(m_min, m_max + 1, 32)]


def crossing_point(scan: Sequence[UnionBoundTerms]) -> int | None:
    """Smallest scanned ``m`` whose union bound drops below one."""
    return next((t.m for t in scan if t.total_log < 0), None)


def count_pair_partitions(elements: Sequence[int]) -> int:
    """Count perfect matchings by generating them (feasible up to 16 elements)."""
    def rec(rest: tuple[int, ...]) -> int:
        if not rest:
            return 1
        first, tail = rest[0], rest[1:]
        return sum(rec(tail[:k] + tail[k + 1:]) for k in range(len(tail)))
    if len(elements) % 2:
        return 0
    return rec(tuple(elements))
