"""Concrete instances: the three-agent path example and random generators."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .cake import Interval, Piece, Valuation, cut
from .fairness import Allocation, SocialGraph


def path_example_valuations() -> list[Valuation]:
    """Agent 0 only values [0, 1/4], agent 1 is uniform, agent 2 only values [3/4, 1]."""
    return [
        Valuation.from_segments([(0, Fraction(1, 4), 4)]),
        Valuation.uniform(),
        Valuation.from_segments([(Fraction(3, 4), 1, 4)]),
    ]


def path_example_graph() -> SocialGraph:
    return SocialGraph.path(3)


def path_example_allocations() -> list[Allocation]:
    q = Fraction
    return [
        Allocation.of([(0, q(1, 4))], [(q(1, 4), q(3, 4))], [(q(3, 4), 1)]),
        Allocation.of([(0, q(1, 16))], [(q(1, 4), q(3, 4))], [(q(1, 16), q(1, 4)), (q(3, 4), 1)]),
        Allocation.of([(0, q(1, 16))], [(q(1, 4), q(11, 16))], [(q(1, 16), q(1, 4)), (q(11, 16), 1)]),
        Allocation.of([(0, q(1, 12))], [(q(1, 12), q(3, 4))], [(q(3, 4), 1)]),
        Allocation.of([(q(1, 4), q(1, 2))], [(0, q(1, 4)), (q(3, 4), 1)], [(q(1, 2), q(3, 4))]),
    ]


# (proportional, locally proportional, envy-free, locally envy-free) per allocation
PATH_EXAMPLE_EXPECTED = [
    (True, True, True, True),
    (False, True, False, True),
    (False, True, False, False),
    (True, False, False, False),
    (False, False, False, False),
]


def random_valuation(rng: random.Random, grid: int = 24, max_segments: int = 5,
                     max_density: int = 6) -> Valuation:
    """Random piecewise-constant valuation with breakpoints on ``1/grid``."""
    k = rng.randint(1, max_segments)
    cuts = sorted(rng.sample(range(1, grid), k - 1))
    pts = [Fraction(0)] + [Fraction(c, grid) for c in cuts] + [Fraction(1)]
    weights = [rng.randint(0, max_density) for _ in range(k)]
    if not any(weights):
        weights[rng.randrange(k)] = 1
    total = sum(w * (b - a) for w, a, b in zip(weights, pts, pts[1:]))
    return Valuation._merged(pts, [Fraction(w) / total for w in weights])


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> SocialGraph:
    return SocialGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_connected_graph(rng: random.Random, n: int, p: float = 0.4) -> SocialGraph:
    """Random spanning tree plus independent extra edges."""
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[k], order[rng.randrange(k)]))) for k in range(1, n)}
    edges |= {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    return SocialGraph.from_edges(n, edges)


def random_allocation(rng: random.Random, n: int, grid: int = 24, segments: int | None = None) -> Allocation:
    """Cut [0, 1] on a rational grid and hand each segment to a random agent."""
    segments = segments or rng.randint(n, 2 * n + 2)
    segments = min(segments, grid)
    cuts = sorted(rng.sample(range(1, grid), segments - 1))
    pts = [Fraction(0)] + [Fraction(c, grid) for c in cuts] + [Fraction(1)]
    owner = [rng.randrange(n) for _ in range(segments)]
    # make sure everyone shows up when possible
    if segments >= n:
        for agent, slot in zip(range(n), rng.sample(range(segments), n)):
            owner[slot] = agent
    buckets: list[list[Interval]] = [[] for _ in range(n)]
    for o, a, b in zip(owner, pts, pts[1:]):
        buckets[o].append(Interval(a, b))
    return Allocation(tuple(Piece(tuple(b)) for b in buckets))


def equal_value_allocation(v: Valuation, n: int, order: Sequence[int]) -> Allocation:
    """Consecutive pieces each worth exactly 1/n under ``v``."""
    pieces: list[Piece] = [Piece()] * n
    lo = Fraction(0)
    for k, agent in enumerate(order):
        hi = Fraction(1) if k == n - 1 else cut(v, lo, Fraction(1, n))
        pieces[agent] = Piece((Interval(lo, hi),)) if lo < hi else Piece()
        lo = hi
    return Allocation(tuple(pieces))


def profile_to_text(valuations: Sequence[Valuation]) -> str:
    return f"{len(valuations)}\n" + "".join(f"{i} {v.to_text()}\n" for i, v in enumerate(valuations))


def parse_profile(text: str) -> list[Valuation]:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0].split()) != 1:
        raise ValueError("valuation file must start with a line holding n")
    n = int(rows[0])
    found: dict[int, Valuation] = {}
    for row in rows[1:]:
        head, _, rest = row.partition(" ")
        found[int(head)] = Valuation.parse(rest)
    if sorted(found) != list(range(n)):
        raise ValueError(f"expected valuations for agents 0..{n - 1}")
    return [found[i] for i in range(n)]
