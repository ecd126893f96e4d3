import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rwlab.cake import (
    Interval,
    NoSuchCut,
    Piece,
    Valuation,
    cut,
    divide,
    eval_query,
    measure,
    normalize_piece,
    value,
)
from rwlab.instances import path_example_valuations

from .helpers import grid_measure, intervals, unit_rationals, valuations

AGENT1, AGENT2, AGENT3 = path_example_valuations()
UNIFORM = Valuation.uniform()


def iv(a, b):
    return Interval(F(a), F(b))


def test_normalize_merges_adjacent():
    assert normalize_piece([iv(0, "1/4"), iv("1/4", "1/2")]).intervals == (iv(0, "1/2"),)


def test_normalize_sorts():
    assert normalize_piece([iv("1/2", "3/4"), iv(0, "1/4")]).intervals == (iv(0, "1/4"), iv("1/2", "3/4"))


def test_normalize_merges_overlap_matches_grid_measure():
    raw = [iv(0, "1/3"), iv("1/4", "1/2")]
    p = normalize_piece(raw)
    assert p.intervals == (iv(0, "1/2"),)
    assert measure(p) == grid_measure(raw, 12) == F(1, 2)


@pytest.mark.parametrize("lo,hi", [("1/2", "1/2"), ("3/4", "1/2"), ("-1/4", "1/2"), (0, "5/4")])
def test_interval_rejects_degenerate_or_out_of_range(lo, hi):
    with pytest.raises(ValueError):
        Interval(F(lo), F(hi))


@pytest.mark.parametrize("piece,expected", [
    (Piece.of((0, "1/4"), ("3/4", 1)), F(1, 2)),
    (Piece.of((0, 1)), F(1)),
    (Piece.of(("1/16", "1/4"), ("3/4", 1)), F(7, 16)),
])
def test_measure(piece, expected):
    assert measure(piece) == expected


def test_value_examples():
    assert value(AGENT1, Piece.of((0, "1/16"))) == F(1, 4)
    assert value(UNIFORM, Piece.of(("1/4", "3/4"))) == F(1, 2)
    assert value(AGENT2, Piece.of(("1/4", "11/16"))) == F(7, 16)


def test_eval_examples():
    assert eval_query(UNIFORM, F(1, 4), F(3, 4)) == F(1, 2)
    assert eval_query(AGENT3, 0, F(3, 4)) == 0
    assert eval_query(AGENT1, 0, F(1, 8)) == F(1, 2)
    assert eval_query(AGENT1, F(1, 8), F(1, 8)) == 0


@pytest.mark.parametrize("x,y", [(F(1, 2), F(1, 4)), (F(-1, 2), F(1, 4)), (0, F(3, 2))])
def test_eval_rejects_bad_args(x, y):
    with pytest.raises(ValueError):
        eval_query(UNIFORM, x, y)


def test_cut_examples():
    assert cut(UNIFORM, F(1, 5), F(3, 10)) == F(1, 2)
    assert cut(AGENT1, 0, F(1, 2)) == F(1, 8)
    with pytest.raises(NoSuchCut):
        cut(UNIFORM, F(1, 2), F(7, 10))


def test_cut_is_minimal_across_zero_plateau():
    # agent 1 has nothing right of 1/4: every y >= 1/4 gives value 1
    assert cut(AGENT1, 0, 1) == F(1, 4)
    assert cut(AGENT3, 0, F(1, 4)) == F(13, 16)
    assert cut(AGENT3, F(1, 10), 0) == F(1, 10)


def test_divide_examples():
    assert divide(UNIFORM, iv(0, 1), F(1, 2)) == iv(0, "1/2")
    assert divide(UNIFORM, iv("1/4", "3/4"), 1) == iv("1/4", "3/4")
    sub = divide(AGENT2, iv("1/4", 1), F(1, 3))
    assert sub == iv("1/4", "1/2")
    # direct integration of the uniform density
    assert sub.hi - sub.lo == F(1, 3) * (1 - F(1, 4))


def test_divide_zero_share_is_empty():
    assert divide(UNIFORM, iv(0, 1), 0) is None
    assert divide(AGENT1, iv("1/2", 1), F(1, 2)) is None


@pytest.mark.parametrize("bps,ds", [
    ((0, 1), (2,)),
    ((0, F(1, 2), 1), (-1, 3)),
    ((F(1, 4), 1), (F(4, 3),)),
    ((0, F(1, 2), F(1, 2), 1), (1, 1, 1)),
])
def test_valuation_rejects_invalid(bps, ds):
    with pytest.raises(ValueError):
        Valuation(tuple(map(F, bps)), tuple(map(F, ds)))


def test_valuation_text_round_trip():
    text = AGENT1.to_text()
    assert text == "0/1 4/1 1/4 0/1 1/1"
    assert Valuation.parse(text) == AGENT1
    assert Valuation.parse("0 4/1 1/4 0/1 1") == AGENT1


def test_piece_text_round_trip():
    p = Piece.of(("1/16", "1/4"), ("3/4", 1))
    assert str(p) == "1/16..1/4 3/4..1/1"
    assert Piece.parse(str(p)) == p


@given(valuations(), unit_rationals(), unit_rationals(), unit_rationals())
def test_eval_additive(v, a, b, c):
    x, y, z = sorted((a, b, c))
    assert eval_query(v, x, z) == eval_query(v, x, y) + eval_query(v, y, z)


@given(valuations(), unit_rationals(), unit_rationals())
def test_cut_inverts_eval_minimally(v, x, alpha):
    try:
        y = cut(v, x, alpha)
    except NoSuchCut:
        assert eval_query(v, x, 1) < alpha
        return
    assert eval_query(v, x, y) == alpha
    if y > x:
        # just left of y the value is short of alpha, and so everywhere left of it
        assert eval_query(v, x, y - (y - x) / 1000) < alpha


@given(valuations())
def test_total_value_is_one(v):
    assert value(v, Piece.of((0, 1))) == 1


@given(st.lists(intervals(), max_size=6))
def test_uniform_value_equals_measure(ivs):
    p = normalize_piece(ivs)
    assert value(UNIFORM, p) == measure(p)


@given(st.lists(intervals(), max_size=6))
def test_normalize_idempotent_and_measure_preserving(ivs):
    p = normalize_piece(ivs)
    assert normalize_piece(p.intervals) == p
    q = math.lcm(1, *(x.denominator for i in ivs for x in (i.lo, i.hi)))
    if q <= 5000:
        assert measure(p) == grid_measure(ivs, q)
    for a, b in zip(p.intervals, p.intervals[1:]):
        assert a.hi < b.lo
