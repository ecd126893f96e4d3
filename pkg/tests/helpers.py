"""Hypothesis strategies and brute-force oracles shared by the tests."""

from fractions import Fraction

from hypothesis import strategies as st

from rwlab.cake import Interval, Valuation


def unit_rationals(max_den=48):
    return st.builds(
        lambda den, k: Fraction(k % (den + 1), den),
        st.integers(1, max_den),
        st.integers(0, 10 ** 6),
    )


@st.composite
def valuations(draw, max_pieces=6):
    k = draw(st.integers(1, max_pieces))
    inner = sorted(draw(st.sets(unit_rationals().filter(lambda x: 0 < x < 1), min_size=k - 1, max_size=k - 1)))
    pts = [Fraction(0)] + inner + [Fraction(1)]
    weights = draw(st.lists(st.integers(0, 9), min_size=len(pts) - 1, max_size=len(pts) - 1))
    if not any(weights):
        weights[0] = 1
    total = sum(w * (b - a) for w, a, b in zip(weights, pts, pts[1:]))
    return Valuation(tuple(pts), tuple(Fraction(w) / total for w in weights))


@st.composite
def intervals(draw):
    a, b = draw(unit_rationals()), draw(unit_rationals())
    if a == b:
        b = Fraction(1) if a < 1 else Fraction(0)
    return Interval(min(a, b), max(a, b))


def grid_measure(ivs, q):
    """Measure of a union of intervals with endpoints on the 1/q grid, by counting cells."""
    covered = 0
    for k in range(q):
        mid = Fraction(2 * k + 1, 2 * q)
        if any(iv.lo <= mid <= iv.hi for iv in ivs):
            covered += 1
    return Fraction(covered, q)
