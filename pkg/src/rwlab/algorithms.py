"""Baseline cake-cutting protocols that talk to valuations only via an oracle.

All allocations cover the whole cake. :func:`run_algorithm` applies a query
budget; when it runs out the protocol is abandoned and the fallback
(contiguous equal split in id order) is emitted instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .cake import ONE, ZERO, Interval, Piece
from .fairness import Allocation, InvalidAllocation
from .query import BudgetExhausted, CountingOracle, Oracle, Transcript

log = logging.getLogger(__name__)


class IncompleteAllocation(RuntimeError):
    """An algorithm could not produce an allocation covering the cake."""


@dataclass
class AlgorithmResult:
    allocation: Allocation
    query_count: int
    transcript: Transcript
    truncated: bool = False


def _counting(oracle: Oracle | None) -> CountingOracle:
    if isinstance(oracle, CountingOracle):
        return oracle
    if oracle is None:
        oracle = Oracle()
    return CountingOracle(oracle)


def _result(oracle: CountingOracle, pieces: Sequence[Piece]) -> AlgorithmResult:
    return AlgorithmResult(Allocation(tuple(pieces)), oracle.count, oracle.transcript)


def _single(lo: Fraction, hi: Fraction) -> Piece:
    return Piece((Interval(lo, hi),)) if lo < hi else Piece()


def cut_and_choose(oracle: Oracle, n: int = 2) -> AlgorithmResult:
    if n != 2:
        raise ValueError("cut-and-choose needs exactly two agents")
    co = _counting(oracle)
    mark = co.cut(0, ZERO, Fraction(1, 2))
    left, right = _single(ZERO, mark), _single(mark, ONE)
    if co.eval(1, ZERO, mark) >= Fraction(1, 2):
        return _result(co, [right, left])
    return _result(co, [left, right])


def even_paz(oracle: Oracle, n: int) -> AlgorithmResult:
    """Divide and conquer with one cut query per agent per level.

    Each agent carries a guaranteed lower bound on its value for the
    current sub-cake and marks the point worth ``ceil(k/2)/k`` of that
    bound. The left half goes to the ``ceil(k/2)`` smallest marks (ties
    by agent id), so every agent keeps a bound of at least ``1/n`` per
    remaining share.
    """
    if n < 1:
        raise ValueError("need at least one agent")
    co = _counting(oracle)
    pieces: list[Piece] = [Piece()] * n

    def solve(lo: Fraction, hi: Fraction, agents: list[tuple[int, Fraction]]) -> None:
        k = len(agents)
        if k == 1:
            pieces[agents[0][0]] = _single(lo, hi)
            return
        k_left = (k + 1) // 2
        marks = []
        for agent, bound in agents:
            y = co.cut(agent, lo, bound * k_left / k)
            if y is None:
                raise IncompleteAllocation(f"agent {agent} has less value than its recorded bound")
            marks.append((y, agent, bound))
        marks.sort(key=lambda t: (t[0], t[1]))
        split = marks[k_left - 1][0]
        left = [(a, b * k_left / k) for _, a, b in marks[:k_left]]
        right = [(a, b * (k - k_left) / k) for _, a, b in marks[k_left:]]
        solve(lo, split, left)
        solve(split, hi, right)

    solve(ZERO, ONE, [(i, ONE) for i in range(n)])
    return _result(co, pieces)


def last_diminisher(oracle: Oracle, n: int) -> AlgorithmResult:
    """Banach-Knaster: a piece worth 1/n is trimmed by each remaining agent in turn."""
    if n < 1:
        raise ValueError("need at least one agent")
    co = _counting(oracle)
    share = Fraction(1, n)
    pieces: list[Piece] = [Piece()] * n
    remaining = list(range(n))
    lo = ZERO
    while len(remaining) > 1:
        holder = remaining[0]
        mark = co.cut(holder, lo, share)
        if mark is None:
            raise IncompleteAllocation(f"agent {holder} cannot mark a share")
        for agent in remaining[1:]:
            if co.eval(agent, lo, mark) > share:
                mark = co.cut(agent, lo, share)
                holder = agent
        pieces[holder] = _single(lo, mark)
        remaining.remove(holder)
        lo = mark
    pieces[remaining[0]] = _single(lo, ONE)
    return _result(co, pieces)


def contiguous_equal_split(n: int, ordering: Sequence[int] | None = None,
                           oracle: Oracle | None = None) -> AlgorithmResult:
    """Agent ``ordering[k]`` gets ``[k/n, (k+1)/n]``. Issues no queries."""
    order = list(range(n)) if ordering is None else list(ordering)
    if sorted(order) != list(range(n)):
        raise ValueError("ordering must be a permutation of 0..n-1")
    co = _counting(oracle)
    pieces: list[Piece] = [Piece()] * n
    for k, agent in enumerate(order):
        pieces[agent] = _single(Fraction(k, n), Fraction(k + 1, n))
    return _result(co, pieces)


def _contiguous(oracle: Oracle, n: int) -> AlgorithmResult:
    return contiguous_equal_split(n, oracle=oracle)


ALGORITHMS: dict[str, Callable[[Oracle, int], AlgorithmResult]] = {
    "cut-and-choose": cut_and_choose,
    "even-paz": even_paz,
    "last-diminisher": last_diminisher,
    "contiguous": _contiguous,
}


def run_algorithm(name: str, oracle: Oracle, n: int, budget: int | None = None) -> AlgorithmResult:
    try:
        algo = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    co = CountingOracle(oracle, budget=budget)
    try:
        return algo(co, n)
    except BudgetExhausted:
        log.info("%s exhausted budget %s after %d queries; using fallback", name, budget, co.count)
        res = contiguous_equal_split(n, oracle=co)
        res.truncated = True
        return res
    except InvalidAllocation as exc:
        raise IncompleteAllocation(str(exc)) from exc
