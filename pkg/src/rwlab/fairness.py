"""Social graphs, allocations, and the four fairness predicates.

Proportional and locally proportional checks return a :class:`Check`
carrying per-agent margins (own value minus the threshold), so callers can
see *how* an agent fails. Envy checks return plain booleans.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cake import ONE, ZERO, Piece, Valuation, normalize_piece, value


@dataclass(frozen=True)
class SocialGraph:
    n: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one entry per vertex")
        for i, nbrs in enumerate(self.adjacency):
            if i in nbrs:
                raise ValueError(f"self-loop at {i}")
            for j in nbrs:
                if not 0 <= j < self.n or i not in self.adjacency[j]:
                    raise ValueError(f"edge {i}-{j} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SocialGraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge {i}-{j} out of range for n={n}")
            adj[i].add(j)
            adj[j].add(i)
        return cls(n, tuple(frozenset(s) for s in adj))

    @classmethod
    def complete(cls, n: int) -> "SocialGraph":
        return cls.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "SocialGraph":
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def empty(cls, n: int) -> "SocialGraph":
        return cls(n, tuple(frozenset() for _ in range(n)))

    def neighbors(self, i: int) -> frozenset[int]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i in range(self.n) for j in self.adjacency[i] if i < j)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        todo = deque([0])
        while todo:
            for j in self.adjacency[todo.popleft()]:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == self.n

    def to_text(self) -> str:
        return f"{self.n}\n" + "".join(f"{i} {j}\n" for i, j in self.edges())

    @classmethod
    def parse(cls, text: str) -> "SocialGraph":
        lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or len(lines[0]) != 1:
            raise ValueError("graph file must start with a line holding n")
        n = int(lines[0][0])
        edges = []
        for toks in lines[1:]:
            if len(toks) != 2:
                raise ValueError(f"bad edge line {' '.join(toks)!r}")
            edges.append((int(toks[0]), int(toks[1])))
        return cls.from_edges(n, edges)


class InvalidAllocation(ValueError):
    pass


@dataclass(frozen=True)
class Allocation:
    """One piece per agent; together they tile [0, 1] up to endpoints."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        ivs = sorted(iv for p in self.pieces for iv in p.intervals)
        if not ivs:
            raise InvalidAllocation("allocation covers nothing")
        if ivs[0].lo != 0:
            raise InvalidAllocation(f"gap [0, {ivs[0].lo}]")
        for a, b in zip(ivs, ivs[1:]):
            if b.lo > a.hi:
                raise InvalidAllocation(f"gap [{a.hi}, {b.lo}]")
            if b.lo < a.hi:
                raise InvalidAllocation(f"overlap of positive measure near [{b.lo}, {a.hi}]")
        if ivs[-1].hi != 1:
            raise InvalidAllocation(f"gap [{ivs[-1].hi}, 1]")

    @property
    def n(self) -> int:
        return len(self.pieces)

    def __getitem__(self, i: int) -> Piece:
        return self.pieces[i]

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def measures(self) -> list[Fraction]:
        return [p.measure for p in self.pieces]

    @classmethod
    def of(cls, *pieces) -> "Allocation":
        """Each argument is a :class:`Piece` or a list of ``(lo, hi)`` pairs."""
        return cls(tuple(p if isinstance(p, Piece) else Piece.of(*p) for p in pieces))

    def to_text(self) -> str:
        return "".join(f"{i} {p}".rstrip() + "\n" for i, p in enumerate(self.pieces))

    @classmethod
    def parse(cls, text: str) -> "Allocation":
        rows: dict[int, Piece] = {}
        for ln in text.splitlines():
            if not ln.strip() or ln.lstrip().startswith("#"):
                continue
            head, _, rest = ln.strip().partition(" ")
            agent = int(head)
            if agent in rows:
                raise InvalidAllocation(f"agent {agent} listed twice")
            rows[agent] = Piece.parse(rest)
        if sorted(rows) != list(range(len(rows))):
            raise InvalidAllocation("agent ids must be 0..n-1")
        return cls(tuple(rows[i] for i in range(len(rows))))


def merge_pieces(pieces: Iterable[Piece]) -> Piece:
    return normalize_piece(iv for p in pieces for iv in p.intervals)


@dataclass(frozen=True)
class Check:
    ok: bool
    # None for an agent with no local comparison (isolated vertex)
    margins: tuple[Fraction | None, ...]

    def __bool__(self) -> bool:
        return self.ok


def _check_sizes(a: Allocation, v: Sequence[Valuation]) -> None:
    if len(v) != a.n:
        raise ValueError(f"{len(v)} valuations for {a.n} agents")


def is_proportional(a: Allocation, v: Sequence[Valuation]) -> Check:
    _check_sizes(a, v)
    share = Fraction(1, a.n)
    margins = tuple(value(v[i], a[i]) - share for i in range(a.n))
    return Check(all(m >= 0 for m in margins), margins)


def lp_margin(a: Allocation, vi: Valuation, g: SocialGraph, i: int) -> Fraction | None:
    """Own value minus the average value of neighbours' pieces, under ``vi``."""
    nbrs = g.neighbors(i)
    if not nbrs:
        return None
    avg = sum((value(vi, a[j]) for j in nbrs), ZERO) / len(nbrs)
    return value(vi, a[i]) - avg


def is_locally_proportional(a: Allocation, v: Sequence[Valuation], g: SocialGraph) -> Check:
    _check_sizes(a, v)
    if g.n != a.n:
        raise ValueError(f"graph has {g.n} vertices, allocation {a.n} agents")
    margins = tuple(lp_margin(a, v[i], g, i) for i in range(a.n))
    return Check(all(m is None or m >= 0 for m in margins), margins)


def is_envy_free(a: Allocation, v: Sequence[Valuation]) -> bool:
    _check_sizes(a, v)
    for i in range(a.n):
        own = value(v[i], a[i])
        if any(value(v[i], a[j]) > own for j in range(a.n) if j != i):
            return False
    return True


def is_locally_envy_free(a: Allocation, v: Sequence[Valuation], g: SocialGraph) -> bool:
    _check_sizes(a, v)
    for i in range(a.n):
        own = value(v[i], a[i])
        if any(value(v[i], a[j]) > own for j in g.neighbors(i)):
            return False
    return True


def uniform_profile(n: int) -> list[Valuation]:
    u = Valuation.uniform()
    return [u] * n


def fairness_report(a: Allocation, v: Sequence[Valuation], g: SocialGraph) -> dict:
    p = is_proportional(a, v)
    lp = is_locally_proportional(a, v, g)
    return {
        "proportional": p.ok,
        "locally_proportional": lp.ok,
        "envy_free": is_envy_free(a, v),
        "locally_envy_free": is_locally_envy_free(a, v, g),
        "proportional_margins": p.margins,
        "lp_margins": lp.margins,
    }


def full_cake() -> Piece:
    return Piece.of((0, ONE))
