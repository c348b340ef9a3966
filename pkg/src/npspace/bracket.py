"""Certified two-sided enclosures for norm values."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvariantViolation

# Provenance tags for each side of a bracket.
SOURCE_EXACT_SVD = "exact_svd"
SOURCE_OPTIMIZER = "optimizer"
SOURCE_N_TIMES_NORM = "n_times_norm_bound"
SOURCE_SMITH = "smith_stabilization"
SOURCE_CB_CAP = "cb_cap"
SOURCE_MONOTONICITY = "monotonicity"
SOURCE_TRIVIAL_ZERO = "trivial_zero"
SOURCE_COEFF_RELAXATION = "coeff_relaxation"

SOURCES = frozenset(
    {
        SOURCE_EXACT_SVD,
        SOURCE_OPTIMIZER,
        SOURCE_N_TIMES_NORM,
        SOURCE_SMITH,
        SOURCE_CB_CAP,
        SOURCE_MONOTONICITY,
        SOURCE_TRIVIAL_ZERO,
        SOURCE_COEFF_RELAXATION,
    }
)


@dataclass(frozen=True)
class NormBracket:
    """Interval [lo, hi] certified to contain a norm value.

    ``lo`` is always a witnessed or theory-derived lower bound, ``hi`` an
    upper bound (possibly +inf).  The sources record where each side came
    from so a reader can audit the certification chain.
    """

    lo: float
    hi: float
    lo_source: str
    hi_source: str

    def __post_init__(self):
        if self.lo_source not in SOURCES or self.hi_source not in SOURCES:
            raise InvariantViolation(
                f"unknown bracket source: {self.lo_source!r}/{self.hi_source!r}"
            )
        if not (0.0 <= self.lo <= self.hi):
            raise InvariantViolation(
                f"bracket bounds out of order: lo={self.lo!r} hi={self.hi!r}"
            )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def rel_width(self) -> float:
        """Width relative to max(1, hi); inf brackets give inf."""
        if math.isinf(self.hi):
            return math.inf
        return (self.hi - self.lo) / max(1.0, self.hi)

    def is_tight(self, rel: float = 1e-6) -> bool:
        return self.rel_width <= rel

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack

    def scaled(self, factor: float) -> "NormBracket":
        """Bracket for |factor| times the bracketed value."""
        a = abs(factor)
        return NormBracket(self.lo * a, self.hi * a, self.lo_source, self.hi_source)

    def intersect(self, other: "NormBracket") -> "NormBracket":
        """Pointwise best of two brackets for the same value."""
        lo, lo_src = max((self.lo, self.lo_source), (other.lo, other.lo_source))
        hi, hi_src = min((self.hi, self.hi_source), (other.hi, other.hi_source))
        if lo > hi:
            # Both inputs claim certification, so a crossing means a bug.
            if lo <= hi + 1e-9 * max(1.0, hi):
                lo, lo_src = hi, lo_src
            else:
                raise InvariantViolation(
                    f"disjoint certified brackets: [{self.lo}, {self.hi}] vs "
                    f"[{other.lo}, {other.hi}]"
                )
        return NormBracket(lo, hi, lo_src, hi_src)
