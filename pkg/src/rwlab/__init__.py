"""Exact-arithmetic laboratory for cake cutting in the Robertson-Webb query model."""

from .cake import Interval, NoSuchCut, Piece, Valuation, cut, divide, eval_query, measure, normalize_piece, value
from .fairness import (
    Allocation,
    SocialGraph,
    is_envy_free,
    is_locally_envy_free,
    is_locally_proportional,
    is_proportional,
)
from .query import CountingOracle, Cut, Eval, Transcript, ValuationOracle, is_consistent

__version__ = "0.1.0"
