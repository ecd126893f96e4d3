"""Lower-bound construction for local proportionality and its two refutations.

Vertices are numbered ``L = 0..m/2-1``, ``R = m/2..m-1``, ``U = m..n-1``.
Every query is answered as if all agents had the uniform density.

An allocation is refuted either because its piece sizes are unequal (then
some agent's LP inequality already fails under uniform valuations), or
because some ``i`` in ``L`` has an unqueried boundary point ``x`` of its
neighbours' cake, around which a density-2 / density-0 bump shifts value
towards the neighbours without contradicting any recorded response.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cake import ONE, ZERO, Interval, Piece, Valuation, fmt, value
from .fairness import Allocation, SocialGraph, is_locally_proportional, lp_margin, merge_pieces, uniform_profile
from .query import Eval, Oracle, QueriedPointSet, Query, Transcript, is_consistent

MIN_AGENTS = 33


class ConstructionError(ValueError):
    pass


def m_for(n: int) -> int:
    """Largest multiple of 32 strictly below ``n``."""
    return 32 * ((n - 1) // 32)


def query_budget(n: int) -> int:
    if n < MIN_AGENTS:
        raise ConstructionError(f"construction needs n >= {MIN_AGENTS}, got {n}")
    return 8 * ((n - 1) // 32) ** 2


@dataclass(frozen=True)
class AdversaryInstance:
    n: int
    seed: int
    # S_i for i in L, indexed by i
    neighborhoods: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return m_for(self.n)

    @property
    def r(self) -> int:
        return self.n - self.m

    @property
    def L(self) -> range:
        return range(0, self.m // 2)

    @property
    def R(self) -> range:
        return range(self.m // 2, self.m)

    @property
    def U(self) -> range:
        return range(self.m, self.n)

    @property
    def budget(self) -> int:
        return query_budget(self.n)

    def S(self, i: int) -> tuple[int, ...]:
        return self.neighborhoods[i]

    def graph(self) -> SocialGraph:
        edges = [(u, v) for u in self.U for v in range(self.n) if v != u]
        edges += [(i, j) for i in self.L for j in self.neighborhoods[i]]
        return SocialGraph.from_edges(self.n, edges)

    def to_text(self) -> str:
        lines = [
            f"# adversary instance m={self.m} r={self.r} budget={self.budget}",
            f"{self.n} {self.m} {self.r} {self.seed}",
            "L " + " ".join(map(str, self.L)),
            "R " + " ".join(map(str, self.R)),
            "U " + " ".join(map(str, self.U)),
        ]
        lines += [f"{i}: " + " ".join(map(str, self.neighborhoods[i])) for i in self.L]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "AdversaryInstance":
        rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        try:
            n, m, r, seed = (int(t) for t in rows[0].split())
        except (IndexError, ValueError):
            raise ValueError("instance header must be 'n m r seed'") from None
        if m != m_for(n) or r != n - m:
            raise ValueError(f"header n={n} m={m} r={r} is inconsistent")
        groups = {}
        for row in rows[1:4]:
            tag, *ids = row.split()
            groups[tag] = [int(x) for x in ids]
        if (groups.get("L"), groups.get("R"), groups.get("U")) != (
                list(range(m // 2)), list(range(m // 2, m)), list(range(m, n))):
            raise ValueError("L/R/U lines do not match the canonical vertex numbering")
        nbhd: dict[int, tuple[int, ...]] = {}
        for row in rows[4:]:
            head, _, rest = row.partition(":")
            nbhd[int(head)] = tuple(int(x) for x in rest.split())
        if sorted(nbhd) != list(range(m // 2)):
            raise ValueError("need exactly one neighbourhood line per L-agent")
        inst = cls(n, seed, tuple(nbhd[i] for i in range(m // 2)))
        _validate(inst)
        return inst


def _validate(inst: AdversaryInstance) -> None:
    R = set(inst.R)
    for i, s in enumerate(inst.neighborhoods):
        if len(s) != inst.m // 4 or len(set(s)) != len(s) or not set(s) <= R:
            raise ValueError(f"S_{i} must be {inst.m // 4} distinct R-vertices")


def build_instance(n: int, seed: int) -> AdversaryInstance:
    if n < MIN_AGENTS:
        raise ConstructionError(f"construction needs n >= {MIN_AGENTS}, got {n}")
    m = m_for(n)
    rng = np.random.default_rng(seed)
    half, quarter = m // 2, m // 4
    nbhd = []
    for _ in range(half):
        # uniform size-m/4 subset: prefix of a uniform permutation
        chosen = rng.permutation(half)[:quarter]
        nbhd.append(tuple(sorted(int(c) + half for c in chosen)))
    return AdversaryInstance(n, seed, tuple(nbhd))


class UniformOracle(Oracle):
    """Answers every agent's queries with the uniform density."""

    def answer(self, query: Query) -> Fraction | None:
        if isinstance(query, Eval):
            return query.y - query.x
        y = query.x + query.alpha
        return y if y <= 1 else None


def uniform_oracle() -> UniformOracle:
    return UniformOracle()


# --- uniform-valuation witness -------------------------------------------------

@dataclass(frozen=True)
class UniformWitness:
    """Source ``source`` of the size-comparison digraph and a larger neighbour."""

    edges: frozenset[tuple[int, int]]
    source: int
    larger_neighbor: int


def find_uniform_witness(a: Allocation, g: SocialGraph) -> UniformWitness | None:
    """Return ``None`` when all pieces have equal measure.

    Among the sources of the comparison digraph the one with the smallest
    piece (then smallest id) is reported; its larger neighbour is the
    smallest-id neighbour with a strictly bigger piece.
    """
    if not g.is_connected():
        raise ValueError("uniform witness needs a connected graph")
    if g.n != a.n:
        raise ValueError("graph and allocation disagree on n")
    sizes = a.measures()
    edges = frozenset((i, j) for i in range(g.n) for j in g.neighbors(i) if sizes[i] < sizes[j])
    if not edges:
        if len(set(sizes)) > 1:
            raise AssertionError("unequal sizes on a connected graph must give an edge")
        return None
    has_in = {j for _, j in edges}
    sources = sorted({i for i, _ in edges} - has_in, key=lambda i: (sizes[i], i))
    i2 = sources[0]
    j2 = min(j for j in g.neighbors(i2) if sizes[j] > sizes[i2])
    margin = lp_margin(a, Valuation.uniform(), g, i2)
    if not (margin is not None and margin < 0):
        raise AssertionError(f"witness {i2} does not violate LP (margin {margin})")
    return UniformWitness(edges, i2, j2)


# --- boundary perturbation -------------------------------------------------------

@dataclass(frozen=True)
class BoundaryProfile:
    unions: dict[int, Piece]
    points: dict[int, tuple[Fraction, ...]]

    def b(self, i: int) -> int:
        return len(self.points[i])


def boundary_profile(a: Allocation, inst: AdversaryInstance) -> BoundaryProfile:
    unions, points = {}, {}
    for i in inst.L:
        u = merge_pieces(a[j] for j in inst.S(i))
        unions[i] = u
        points[i] = u.boundary()
    return BoundaryProfile(unions, points)


@dataclass(frozen=True)
class PerturbationAttack:
    agent: int
    x: Fraction
    epsilon: Fraction
    dense: Interval      # density 2, inside the neighbours' cake
    empty: Interval      # density 0, outside it
    valuation: Valuation
    # LP margin of ``agent`` under ``valuation``; equals -epsilon / deg(agent)
    margin: Fraction

    def profile(self, n: int) -> list[Valuation]:
        vs = uniform_profile(n)
        vs[self.agent] = self.valuation
        return vs


def _bump_valuation(dense: Interval, empty: Interval) -> Valuation:
    """Uniform density except 2 on ``dense`` and 0 on ``empty``."""
    lo, hi = min(dense.lo, empty.lo), max(dense.hi, empty.hi)
    segs = [(dense.lo, dense.hi, 2), (empty.lo, empty.hi, 0)]
    if lo > 0:
        segs.append((0, lo, 1))
    if hi < 1:
        segs.append((hi, 1, 1))
    return Valuation.from_segments(segs)


def find_perturbation(
    a: Allocation,
    t: Transcript,
    qpoints: QueriedPointSet,
    inst: AdversaryInstance,
    i: int,
    graph: SocialGraph | None = None,
    profile: BoundaryProfile | None = None,
) -> PerturbationAttack | None:
    """Try each unqueried interior boundary point of agent ``i``'s neighbour cake.

    The bump radius is the distance from ``x`` to the nearest queried point,
    other boundary point of the neighbours' cake, cake end, or endpoint of
    ``A_i`` or of a ``U``-agent's piece. The last two keep the density-0
    side off cake that agent ``i`` or its ``U`` neighbours hold, which
    would otherwise cancel the gain. Candidates are tried left to right;
    one is accepted only after the transcript and the LP margin are
    re-checked. Returns ``None`` when no candidate works.
    """
    if i not in inst.L:
        raise ValueError(f"agent {i} is not in L")
    g = graph or inst.graph()
    prof = profile or boundary_profile(a, inst)
    union = prof.unions[i]
    bpts = prof.points[i]
    q = qpoints[i]
    guard = set(a[i].boundary())
    for u in inst.U:
        guard.update(a[u].boundary())
    held = [a[i]] + [a[u] for u in inst.U]
    deg = g.degree(i)
    for x in bpts:
        if x in q or not 0 < x < 1:
            continue
        avoid = (q | set(bpts) | guard | {ZERO, ONE}) - {x}
        eps = min(abs(x - p) for p in avoid)
        left, right = Interval(x - eps, x), Interval(x, x + eps)
        mid_left = x - eps / 2
        if union.contains(mid_left):
            dense, empty = left, right
        else:
            dense, empty = right, left
        empty_piece = Piece((empty,))
        if any(h.intersection_measure(empty_piece) for h in held):
            continue
        v = _bump_valuation(dense, empty)
        if not is_consistent(t, {i: v}, default=Valuation.uniform()):
            continue
        margin = lp_margin(a, v, g, i)
        if margin != -eps / deg:
            continue
        return PerturbationAttack(i, x, eps, dense, empty, v, margin)
    return None


@dataclass(frozen=True)
class Verdict:
    kind: str  # "uniform", "perturbation" or "unrefuted"
    agent: int | None = None
    x: Fraction | None = None
    epsilon: Fraction | None = None
    witness: UniformWitness | None = None
    perturbation: PerturbationAttack | None = None

    @property
    def refuted(self) -> bool:
        return self.kind != "unrefuted"

    def to_text(self) -> str:
        if self.kind == "unrefuted":
            return "verdict=unrefuted"
        if self.kind == "uniform":
            return (f"verdict=refuted type=uniform agent={self.agent} "
                    f"neighbor={self.witness.larger_neighbor}")
        return (f"verdict=refuted type=perturbation agent={self.agent} "
                f"x={fmt(self.x)} eps={fmt(self.epsilon)}")


def attack(a: Allocation, t: Transcript, qpoints: QueriedPointSet | None,
           inst: AdversaryInstance) -> Verdict:
    """Uniform witness first, then the boundary bump over ``L`` in id order."""
    if a.n != inst.n:
        raise ValueError(f"allocation has {a.n} agents, instance {inst.n}")
    if qpoints is None:
        qpoints = t.queried_points()
    g = inst.graph()
    w = find_uniform_witness(a, g)
    if w is not None:
        return Verdict("uniform", agent=w.source, witness=w)
    prof = boundary_profile(a, inst)
    for i in inst.L:
        att = find_perturbation(a, t, qpoints, inst, i, graph=g, profile=prof)
        if att is not None:
            return Verdict("perturbation", agent=i, x=att.x, epsilon=att.epsilon, perturbation=att)
    return Verdict("unrefuted")


def verify_perturbation(a: Allocation, t: Transcript, inst: AdversaryInstance,
                        att: PerturbationAttack) -> bool:
    """Recheck an attack through the fairness and protocol modules from scratch."""
    g = inst.graph()
    prof = att.profile(inst.n)
    check = is_locally_proportional(a, prof, g)
    return (
        value(att.valuation, Piece.of((0, 1))) == 1
        and is_consistent(t, prof)
        and not check.ok
        and check.margins[att.agent] == -att.epsilon / g.degree(att.agent)
    )
