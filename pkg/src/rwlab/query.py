"""Robertson-Webb oracle boundary.

Algorithms only ever see an :class:`Oracle`. Wrapping one in a
:class:`CountingOracle` records a :class:`Transcript`, per-agent counts and
the queried point sets used by the boundary-perturbation attack.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .cake import NoSuchCut, Valuation, as_rational, cut, eval_query, fmt


@dataclass(frozen=True)
class Eval:
    agent: int
    x: Fraction
    y: Fraction

    def __post_init__(self):
        x, y = as_rational(self.x), as_rational(self.y)
        if not 0 <= x <= y <= 1:
            raise ValueError(f"eval query needs 0 <= x <= y <= 1, got ({x}, {y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class Cut:
    agent: int
    x: Fraction
    alpha: Fraction

    def __post_init__(self):
        x, a = as_rational(self.x), as_rational(self.alpha)
        if not (0 <= x <= 1 and 0 <= a <= 1):
            raise ValueError(f"cut query needs x, alpha in [0, 1], got ({x}, {a})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "alpha", a)


Query = Union[Eval, Cut]


@dataclass(frozen=True)
class TranscriptEntry:
    query: Query
    # None marks a cut with no solution
    response: Fraction | None

    def to_text(self) -> str:
        q = self.query
        if isinstance(q, Eval):
            return f"EVAL {q.agent} {fmt(q.x)} {fmt(q.y)} -> {fmt(self.response)}"
        resp = "NONE" if self.response is None else fmt(self.response)
        return f"CUT {q.agent} {fmt(q.x)} {fmt(q.alpha)} -> {resp}"

    @classmethod
    def parse(cls, line: str) -> "TranscriptEntry":
        toks = line.split()
        if len(toks) != 6 or toks[4] != "->" or toks[0] not in ("EVAL", "CUT"):
            raise ValueError(f"malformed transcript line: {line!r}")
        kind, agent, a, b, _, resp = toks
        if kind == "EVAL":
            return cls(Eval(int(agent), Fraction(a), Fraction(b)), Fraction(resp))
        return cls(Cut(int(agent), Fraction(a), Fraction(b)), None if resp == "NONE" else Fraction(resp))


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)

    def append(self, entry: TranscriptEntry) -> None:
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TranscriptEntry]:
        return iter(self.entries)

    def to_text(self) -> str:
        return "".join(e.to_text() + "\n" for e in self.entries)

    @classmethod
    def parse(cls, text: str) -> "Transcript":
        return cls([TranscriptEntry.parse(ln) for ln in text.splitlines()
                    if ln.strip() and not ln.lstrip().startswith("#")])

    def queried_points(self) -> "QueriedPointSet":
        qp = QueriedPointSet()
        for e in self.entries:
            qp.record(e)
        return qp


class QueriedPointSet:
    """Per-agent set of points submitted to or returned by that agent's queries.

    The ``alpha`` argument of a cut is a value, not a position, so it is
    never recorded. A failed cut contributes only its ``x``.
    """

    def __init__(self, points: Mapping[int, Iterable[Fraction]] | None = None):
        self._pts: defaultdict[int, set[Fraction]] = defaultdict(set)
        for agent, pts in (points or {}).items():
            self._pts[agent].update(as_rational(p) for p in pts)

    def record(self, entry: TranscriptEntry) -> None:
        q = entry.query
        s = self._pts[q.agent]
        if isinstance(q, Eval):
            s.update((q.x, q.y))
        else:
            s.add(q.x)
            if entry.response is not None:
                s.add(entry.response)

    def __getitem__(self, agent: int) -> frozenset[Fraction]:
        return frozenset(self._pts.get(agent, ()))

    def agents(self) -> list[int]:
        return sorted(a for a, s in self._pts.items() if s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QueriedPointSet):
            return NotImplemented
        keys = set(self.agents()) | set(other.agents())
        return all(self[k] == other[k] for k in keys)

    def __repr__(self) -> str:
        return f"QueriedPointSet({ {a: sorted(self[a]) for a in self.agents()} })"


class Oracle:
    """Answers RW queries. Subclasses implement :meth:`answer`."""

    def answer(self, query: Query) -> Fraction | None:
        raise NotImplementedError

    def eval(self, agent: int, x, y) -> Fraction:
        return self.answer(Eval(agent, x, y))

    def cut(self, agent: int, x, alpha) -> Fraction | None:
        return self.answer(Cut(agent, x, alpha))


class ValuationOracle(Oracle):
    """Answers from explicit valuations (minimal cut point on plateaus)."""

    def __init__(self, valuations: Sequence[Valuation]):
        self.valuations = tuple(valuations)

    @property
    def n(self) -> int:
        return len(self.valuations)

    def answer(self, query: Query) -> Fraction | None:
        return oracle_answer(self.valuations, query)


def oracle_answer(valuations: Sequence[Valuation] | Mapping[int, Valuation], query: Query) -> Fraction | None:
    v = valuations[query.agent]
    if isinstance(query, Eval):
        return eval_query(v, query.x, query.y)
    try:
        return cut(v, query.x, query.alpha)
    except NoSuchCut:
        return None


class BudgetExhausted(RuntimeError):
    pass


class CountingOracle(Oracle):
    """Forwards to ``inner`` while counting and recording every query.

    With a ``budget``, the query that would exceed it raises
    :class:`BudgetExhausted` before being forwarded, so ``count`` never
    exceeds the budget.
    """

    def __init__(self, inner: Oracle, budget: int | None = None):
        self.inner = inner
        self.budget = budget
        self.count = 0
        self.per_agent: Counter[int] = Counter()
        self.transcript = Transcript()
        self.points = QueriedPointSet()

    def answer(self, query: Query) -> Fraction | None:
        if self.budget is not None and self.count >= self.budget:
            raise BudgetExhausted(f"query budget {self.budget} exhausted")
        resp = self.inner.answer(query)
        entry = TranscriptEntry(query, resp)
        self.count += 1
        self.per_agent[query.agent] += 1
        self.transcript.append(entry)
        self.points.record(entry)
        return resp


def is_consistent(
    t: Transcript | Iterable[TranscriptEntry],
    candidate: Sequence[Valuation] | Mapping[int, Valuation],
    default: Valuation | None = None,
) -> bool:
    """Whether every recorded response is a valid answer under ``candidate``.

    A recorded cut point ``y`` only has to satisfy ``v([x, y]) == alpha``;
    it need not be the candidate's own (minimal) cut point. ``default``
    stands in for agents absent from a mapping ``candidate``.
    """
    for e in t:
        q = e.query
        try:
            v = candidate[q.agent]
        except (KeyError, IndexError):
            if default is None:
                raise
            v = default
        if isinstance(q, Eval):
            if eval_query(v, q.x, q.y) != e.response:
                return False
        elif e.response is None:
            if eval_query(v, q.x, 1) >= q.alpha:
                return False
        else:
            if e.response < q.x or e.response > 1:
                return False
            if eval_query(v, q.x, e.response) != q.alpha:
                return False
    return True
