"""Exact cake primitives: intervals, pieces, piecewise-constant valuations.

Every coordinate and value is a :class:`fractions.Fraction`. Nothing here
ever touches a float, so equality tests downstream are exact.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class NoSuchCut(ValueError):
    """Raised by :func:`cut` when less than ``alpha`` value remains right of ``x``."""


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def fmt(x: Fraction) -> str:
    """Render a rational as ``p/q`` (always with a denominator)."""
    return f"{x.numerator}/{x.denominator}"


def _check_unit(x: Fraction, name: str) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"{name}={x} outside [0, 1]")


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        _check_unit(lo, "lo")
        _check_unit(hi, "hi")
        if not lo < hi:
            raise ValueError(f"interval [{lo}, {hi}] has no positive measure")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"{fmt(self.lo)}..{fmt(self.hi)}"


def normalize_piece(raw: Iterable[Interval]) -> "Piece":
    """Sort, merge touching/overlapping intervals, and wrap in a :class:`Piece`.

    Overlaps are merged rather than rejected: a piece is a set, and callers
    build pieces by union.
    """
    items = sorted(raw)
    merged: list[Interval] = []
    for iv in items:
        if not isinstance(iv, Interval):
            raise TypeError(f"expected Interval, got {type(iv).__name__}")
        if merged and iv.lo <= merged[-1].hi:
            if iv.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    return Piece(tuple(merged), _normalized=True)


@dataclass(frozen=True)
class Piece:
    """A finite union of closed intervals, kept in canonical form."""

    intervals: tuple[Interval, ...] = ()
    _normalized: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self._normalized:
            canon = normalize_piece(self.intervals)
            object.__setattr__(self, "intervals", canon.intervals)
        object.__setattr__(self, "_normalized", True)

    @classmethod
    def of(cls, *pairs) -> "Piece":
        """``Piece.of((0, "1/4"), ("3/4", 1))``"""
        return normalize_piece(Interval(as_rational(lo), as_rational(hi)) for lo, hi in pairs)

    @property
    def measure(self) -> Fraction:
        return measure(self)

    @property
    def inf(self) -> Fraction:
        if not self.intervals:
            raise ValueError("empty piece has no infimum")
        return self.intervals[0].lo

    def boundary(self) -> tuple[Fraction, ...]:
        return tuple(x for iv in self.intervals for x in (iv.lo, iv.hi))

    def union(self, *others: "Piece") -> "Piece":
        ivs = list(self.intervals)
        for o in others:
            ivs.extend(o.intervals)
        return normalize_piece(ivs)

    def intersection_measure(self, other: "Piece") -> Fraction:
        total = ZERO
        for a in self.intervals:
            for b in other.intervals:
                lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
                if lo < hi:
                    total += hi - lo
        return total

    def contains(self, x) -> bool:
        x = as_rational(x)
        return any(iv.lo <= x <= iv.hi for iv in self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __str__(self) -> str:
        return " ".join(str(iv) for iv in self.intervals)

    @classmethod
    def parse(cls, text: str) -> "Piece":
        ivs = []
        for tok in text.split():
            lo, sep, hi = tok.partition("..")
            if not sep:
                raise ValueError(f"bad interval token {tok!r}, expected lo..hi")
            ivs.append(Interval(Fraction(lo), Fraction(hi)))
        return normalize_piece(ivs)


def measure(p: Piece) -> Fraction:
    return sum((iv.length for iv in p.intervals), ZERO)


@dataclass(frozen=True)
class Valuation:
    """Piecewise-constant density on [0, 1].

    ``densities[k]`` applies on ``[breakpoints[k], breakpoints[k+1]]``.
    The total integral must be exactly one.
    """

    breakpoints: tuple[Fraction, ...]
    densities: tuple[Fraction, ...]
    _cum: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        ds = tuple(as_rational(d) for d in self.densities)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(ds) != len(bps) - 1:
            raise ValueError("need exactly one density per breakpoint gap")
        if any(d < 0 for d in ds):
            raise ValueError("densities must be nonnegative")
        cum = [ZERO]
        for d, a, b in zip(ds, bps, bps[1:]):
            cum.append(cum[-1] + d * (b - a))
        if cum[-1] != 1:
            raise ValueError(f"density integrates to {cum[-1]}, not 1")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "densities", ds)
        object.__setattr__(self, "_cum", tuple(cum))

    @classmethod
    def uniform(cls) -> "Valuation":
        return cls((ZERO, ONE), (ONE,))

    @classmethod
    def from_segments(cls, segments: Sequence[tuple]) -> "Valuation":
        """Build from ``(lo, hi, density)`` triples; gaps get density 0.

        Adjacent segments of equal density are merged so that equal
        valuations compare equal.
        """
        pts: list[Fraction] = [ZERO]
        ds: list[Fraction] = []
        for lo, hi, d in sorted((as_rational(a), as_rational(b), as_rational(c)) for a, b, c in segments):
            if lo < pts[-1]:
                raise ValueError("segments overlap")
            if lo > pts[-1]:
                pts.append(lo)
                ds.append(ZERO)
            pts.append(hi)
            ds.append(d)
        if pts[-1] < 1:
            pts.append(ONE)
            ds.append(ZERO)
        return cls._merged(pts, ds)

    @classmethod
    def _merged(cls, pts, ds) -> "Valuation":
        out_p, out_d = [pts[0]], []
        for d, b in zip(ds, pts[1:]):
            if out_d and out_d[-1] == d:
                out_p[-1] = b
            else:
                out_d.append(d)
                out_p.append(b)
        return cls(tuple(out_p), tuple(out_d))

    def cdf(self, x) -> Fraction:
        """Value of ``[0, x]``."""
        x = as_rational(x)
        k = bisect_right(self.breakpoints, x) - 1
        if k >= len(self.densities):
            return self._cum[-1]
        return self._cum[k] + self.densities[k] * (x - self.breakpoints[k])

    def density_at(self, x) -> Fraction:
        """Density on the segment starting at or before ``x`` (right-continuous)."""
        k = min(bisect_right(self.breakpoints, as_rational(x)) - 1, len(self.densities) - 1)
        return self.densities[k]

    def to_text(self) -> str:
        parts = [fmt(self.breakpoints[0])]
        for d, b in zip(self.densities, self.breakpoints[1:]):
            parts += [fmt(d), fmt(b)]
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Valuation":
        toks = [Fraction(t) for t in text.split()]
        if len(toks) < 3 or len(toks) % 2 == 0:
            raise ValueError("valuation record must alternate breakpoint density ... breakpoint")
        return cls(tuple(toks[0::2]), tuple(toks[1::2]))


def value(v: Valuation, p: Piece) -> Fraction:
    return sum((v.cdf(iv.hi) - v.cdf(iv.lo) for iv in p.intervals), ZERO)


def eval_query(v: Valuation, x, y) -> Fraction:
    """``v([x, y])``; zero for a degenerate interval."""
    x, y = as_rational(x), as_rational(y)
    _check_unit(x, "x")
    _check_unit(y, "y")
    if x > y:
        raise ValueError(f"eval needs x <= y, got x={x}, y={y}")
    return v.cdf(y) - v.cdf(x)


def cut(v: Valuation, x, alpha) -> Fraction:
    """Smallest ``y`` with ``v([x, y]) == alpha``."""
    x, alpha = as_rational(x), as_rational(alpha)
    _check_unit(x, "x")
    _check_unit(alpha, "alpha")
    if alpha == 0:
        return x
    target = v.cdf(x) + alpha
    if target > v._cum[-1]:
        raise NoSuchCut(f"only {v._cum[-1] - v.cdf(x)} value right of {x}, asked for {alpha}")
    # first breakpoint whose cumulative value reaches target; the segment
    # before it has positive density because the cdf strictly rises there
    k = bisect_left(v._cum, target)
    base = v.breakpoints[k - 1]
    return base + (target - v._cum[k - 1]) / v.densities[k - 1]


def divide(v: Valuation, interval: Interval, lam) -> Interval | None:
    """Left-anchored subinterval worth ``lam`` times the value of ``interval``.

    Returns ``None`` when the requested value is zero; a zero-value share is
    an empty contribution, never a zero-length interval.
    """
    lam = as_rational(lam)
    _check_unit(lam, "lambda")
    target = lam * eval_query(v, interval.lo, interval.hi)
    if target == 0:
        return None
    return Interval(interval.lo, cut(v, interval.lo, target))
