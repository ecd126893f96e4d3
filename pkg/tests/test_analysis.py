import math
import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from rwlab.adversary import boundary_profile, build_instance
from rwlab.algorithms import contiguous_equal_split
from rwlab.analysis import (
    PairPartition,
    bound_scan,
    canonical_segmentation,
    closed_form_hit_count,
    count_pair_partitions,
    crossing_point,
    exact_split_tail,
    hit_count_distribution,
    hit_indicators,
    hoeffding_tail_bound,
    is_segmentation_for,
    is_segmentation_for_set,
    segmentation_bound_check,
    monte_carlo_split_tail,
    pair_hit_probability,
    split_count,
    union_bound_log,
)
from rwlab.cake import Interval, Piece
from rwlab.fairness import Allocation

PAIRS16 = PairPartition.consecutive(range(16))


def test_pair_partition_validation():
    with pytest.raises(ValueError):
        PairPartition((frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(ValueError):
        PairPartition((frozenset({0, 1, 2}),))
    with pytest.raises(ValueError):
        PairPartition.consecutive(range(5))


def test_segmentation_aligned():
    S = range(8)
    assert split_count(PAIRS16, S) == 0
    assert hit_indicators(PAIRS16, S) == [1, 1, 1, 1, 0, 0, 0, 0]
    assert is_segmentation_for(PAIRS16, S)


def test_segmentation_boundary_two_splits():
    S = [0, 2, 4, 5, 6, 7, 8, 9]  # pairs {0,1} and {2,3} split
    assert split_count(PAIRS16, S) == 2
    assert is_segmentation_for(PAIRS16, S)


def test_segmentation_four_splits_rejected():
    S = [0, 2, 4, 6, 8, 9, 10, 11]
    assert split_count(PAIRS16, S) == 4
    assert not is_segmentation_for(PAIRS16, S)


def test_split_count_parity_and_cap_rule():
    # |S| = 8 forces an even split count, so 3 splits needs a smaller S
    for S in combinations(range(16), 8):
        assert split_count(PAIRS16, S) % 2 == 0
    S7 = [0, 2, 4, 6, 7, 8, 9]
    assert split_count(PAIRS16, S7) == 3
    assert not is_segmentation_for(PAIRS16, S7)


def _naive_is_segmentation_for_set(P, M, inst):
    quarter = len(P.pairs)
    for i in M:
        splits = 0
        for pair in P.pairs:
            a, b = sorted(pair)
            if (a in inst.S(i)) != (b in inst.S(i)):
                splits += 1
        if splits > quarter / 4:
            return False
    return True


def test_segmentation_for_set_matches_naive():
    rng = random.Random(0)
    inst = build_instance(33, 4)
    assert is_segmentation_for_set(PairPartition.consecutive(list(inst.R)), [], inst)
    for _ in range(400):
        order = list(inst.R)
        rng.shuffle(order)
        P = PairPartition.consecutive(order)
        size = rng.choice([1, 1, 2, 8])
        M = rng.sample(list(inst.L), size)
        got = is_segmentation_for_set(P, M, inst)
        assert got == _naive_is_segmentation_for_set(P, M, inst)
        if size == 1:
            assert got == is_segmentation_for(P, inst.S(M[0]))


def test_segmentation_for_set_requires_cover_of_r():
    inst = build_instance(33, 4)
    with pytest.raises(ValueError):
        is_segmentation_for_set(PAIRS16, [0], inst)


def test_canonical_segmentation_id_order():
    inst = build_instance(33, 0)
    order = list(inst.R) + list(inst.L) + list(inst.U)
    a = contiguous_equal_split(33, order).allocation
    assert canonical_segmentation(a, inst) == PairPartition.consecutive(list(inst.R))


def test_canonical_segmentation_reversed():
    inst = build_instance(33, 0)
    order = list(reversed(inst.R)) + list(inst.L) + list(inst.U)
    a = contiguous_equal_split(33, order).allocation
    got = canonical_segmentation(a, inst)
    assert got == PairPartition.consecutive(list(reversed(inst.R)))
    assert frozenset({31, 30}) in got.pairs


def test_canonical_segmentation_ignores_later_intervals():
    inst = build_instance(33, 0)
    R = list(inst.R)
    # first intervals in id order on [0, 1/2]; second intervals in a scrambled order on [1/2, 1]
    firsts = {r: Interval(F(k, 32), F(k + 1, 32)) for k, r in enumerate(R)}
    scrambled = R[::2] + R[1::2]
    seconds = {r: Interval(F(1, 2) + F(k, 64), F(1, 2) + F(k + 1, 64)) for k, r in enumerate(scrambled)}
    pieces = [Piece()] * 33
    for r in R:
        pieces[r] = Piece((firsts[r], seconds[r]))
    rest = [a for a in range(33) if a not in R]
    pieces[rest[0]] = Piece.of((F(3, 4), 1))
    a = Allocation(tuple(pieces))
    assert canonical_segmentation(a, inst) == PairPartition.consecutive(R)


def test_canonical_segmentation_rejects_empty_r_piece():
    inst = build_instance(33, 0)
    pieces = list(contiguous_equal_split(33).allocation.pieces)
    pieces[15] = pieces[15].union(pieces[16])
    pieces[16] = Piece()
    with pytest.raises(ValueError):
        canonical_segmentation(Allocation(tuple(pieces)), inst)


def test_segmentation_bound_contiguous_unions():
    inst = build_instance(33, 6)
    i = 0
    s = list(inst.S(i))
    order = s + [r for r in inst.R if r not in s] + list(inst.L) + list(inst.U)
    a = contiguous_equal_split(33, order).allocation
    assert boundary_profile(a, inst).b(i) == 2
    rep = segmentation_bound_check(a, inst, [i])
    assert rep.premise and rep.holds
    assert segmentation_bound_check(a, inst, []).holds


def test_segmentation_bound_premise_false_reported():
    inst = build_instance(33, 6)
    a = contiguous_equal_split(33).allocation
    heavy = [i for i in inst.L if boundary_profile(a, inst).b(i) > 2]
    rep = segmentation_bound_check(a, inst, heavy[:1])
    assert not rep.premise


def _random_r_allocation(rng, inst, grid=96):
    """Random slot assignment: every agent gets at least one slot, R-agents possibly several."""
    n = inst.n
    owner = list(range(n)) + [rng.choice(list(inst.R)) for _ in range(grid - n)]
    rng.shuffle(owner)
    buckets = [[] for _ in range(n)]
    for k, o in enumerate(owner):
        buckets[o].append(Interval(F(k, grid), F(k + 1, grid)))
    return Allocation(tuple(Piece(tuple(b)) for b in buckets))


def test_split_count_bounded_by_boundary_points():
    rng = random.Random(2)
    for trial in range(200):
        inst = build_instance(33, trial)
        a = _random_r_allocation(rng, inst)
        P = canonical_segmentation(a, inst)
        prof = boundary_profile(a, inst)
        for i in inst.L:
            assert split_count(P, inst.S(i)) <= prof.b(i)


def test_hoeffding_values():
    assert hoeffding_tail_bound(128) == pytest.approx(math.exp(-1), rel=1e-15)
    assert hoeffding_tail_bound(32) == pytest.approx(0.7788007830714049, rel=1e-15)
    assert hoeffding_tail_bound(0) == 1
    with pytest.raises(ValueError):
        hoeffding_tail_bound(40)


def test_hit_distribution_matches_closed_form():
    dist = hit_count_distribution(32)
    assert sum(dist.values()) == math.comb(16, 8)
    for h in range(9):
        assert dist.get(h, 0) == closed_form_hit_count(8, 8, h)


def test_exact_split_tail_value():
    exact = exact_split_tail(32)
    closed = F(sum(closed_form_hit_count(8, 8, h) for h in range(6)), math.comb(16, 8))
    assert exact == closed == F(2310, 12870) == F(7, 39)
    assert float(exact) <= math.exp(-1 / 4)


def test_exact_split_tail_thresholds():
    assert exact_split_tail(32, threshold=8) == 1
    assert exact_split_tail(32, threshold=0) == 0 == closed_form_hit_count(8, 8, 0)
    assert exact_split_tail(32, threshold=4) == F(closed_form_hit_count(8, 8, 4), 12870) == F(70, 12870)
    with pytest.raises(ValueError):
        exact_split_tail(64)


def test_exact_split_tail_complement_symmetry():
    assert exact_split_tail(32, complement=True) == exact_split_tail(32)


def test_pair_hit_probability():
    assert pair_hit_probability(32) == F(23, 30)
    assert pair_hit_probability(32) == 1 - F(math.comb(14, 8), math.comb(16, 8))
    assert pair_hit_probability(32) >= F(3, 4)


def test_monte_carlo_matches_exact():
    est = monte_carlo_split_tail(32, 100_000, seed=1)
    exact = float(exact_split_tail(32))
    sigma = math.sqrt(exact * (1 - exact) / est.trials)
    assert abs(est.estimate - exact) <= 3 * sigma
    assert est.ci_low <= exact <= est.ci_high


@pytest.mark.parametrize("m", [64, 96, 128])
def test_monte_carlo_below_hoeffding(m):
    est = monte_carlo_split_tail(m, 100_000, seed=m)
    assert est.estimate <= hoeffding_tail_bound(m) + (est.ci_high - est.ci_low)


def test_monte_carlo_reproducible_and_validates():
    assert monte_carlo_split_tail(64, 1000, seed=3) == monte_carlo_split_tail(64, 1000, seed=3)
    with pytest.raises(ValueError):
        monte_carlo_split_tail(32, 0, seed=0)


def test_union_bound_m32_components():
    t = union_bound_log(32)
    assert t.ln_binomial == pytest.approx(math.log(12870), rel=1e-12)
    assert t.ln_double_factorial == pytest.approx(math.log(2027025), rel=1e-12)
    assert t.ln_pow2_term == pytest.approx(8 * math.log(2), rel=1e-15)
    assert t.exp_term == -2
    assert t.total_log > 0


def test_union_bound_m64_exact_integers():
    t = union_bound_log(64)
    assert math.comb(32, 16) == 601080390
    odd = math.prod(range(1, 32, 2))
    assert odd == 191898783962510625
    assert t.ln_binomial == pytest.approx(math.log(601080390), rel=1e-12)
    assert t.ln_double_factorial == pytest.approx(math.log(odd), rel=1e-12)


def test_union_bound_crossing_and_monotone_tail():
    scan = bound_scan(2 ** 15)
    star = crossing_point(scan)
    assert star == 928
    signs = [t.total_log < 0 for t in scan]
    assert sum(1 for a, b in zip(signs, signs[1:]) if a != b) == 1
    tail = [t.total_log for t in scan if t.m >= star]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_pair_partition_counts():
    assert count_pair_partitions(range(4)) == 3
    assert count_pair_partitions(range(6)) == 15
    assert count_pair_partitions(range(3)) == 0


@pytest.mark.slow
def test_pair_partition_count_m32():
    assert count_pair_partitions(range(16)) == 2027025 == math.prod(range(1, 16, 2))
