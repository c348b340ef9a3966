"""The N^p norm: sum of ||phi_n|| / n^p as a certified interval.

Partial sums use the per-level brackets termwise; tails are closed using
whichever certificate applies: the stabilized value times a bracketed zeta
tail, the linear growth cap ||phi_n|| <= n ||phi|| for p > 2, or (at p = 1)
a divergence proof.  Zeta values are never read from constants - they are
always partial sums plus integral-comparison tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bracket import (
    SOURCE_MONOTONICITY,
    SOURCE_N_TIMES_NORM,
    SOURCE_SMITH,
    SOURCE_TRIVIAL_ZERO,
    NormBracket,
)
from .errors import InsufficientData
from .maps import LevelNormTable, LinearMapRep

VERDICT_MEMBER = "member"
VERDICT_NOT_MEMBER = "not_member"
VERDICT_MEMBER_BY_THEORY = "member_by_theory"
VERDICT_UNKNOWN = "unknown"

CLOSED_FORM_FUNCTIONAL = "functional"
CLOSED_FORM_STABILIZED = "stabilized"
CLOSED_FORM_ZERO = "zero"


@dataclass(frozen=True)
class NpParameter:
    """The exponent p of the series; restricted to p >= 1."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        if not (self.p >= 1.0):
            raise ValueError(f"p must satisfy p >= 1, got {self.p!r}")


def _as_p(p) -> float:
    return p.p if isinstance(p, NpParameter) else NpParameter(p).p


def zeta_tail(p: float, K: int) -> tuple[float, float]:
    """Certified bounds on sum_{n > K} n^{-p}.

    Integral comparison sharpened with one Euler-Maclaurin correction term;
    the correction's own error has known sign and size for this completely
    monotone summand, so both sides stay certified.  Divergence (p <= 1) is
    signaled as (+inf, +inf), not raised.
    """
    p = float(p)
    K = int(K)
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    if p <= 1.0:
        return math.inf, math.inf
    a = float(K + 1)
    integral = a ** (1.0 - p) / (p - 1.0)
    em_hi = integral + 0.5 * a ** (-p) + p * a ** (-p - 1.0) / 12.0
    em_width = p * (p + 1.0) * (p + 2.0) * a ** (-p - 3.0) / 720.0
    naive_hi = (K ** (1.0 - p) / (p - 1.0)) if K >= 1 else (1.0 + 1.0 / (p - 1.0))
    lo = max(em_hi - em_width, integral, a ** (-p))
    hi = min(em_hi, naive_hi)
    return lo, hi


def zeta_bracket(p: float, K: int = 64) -> tuple[float, float]:
    """Certified bounds on the full sum zeta(p), p > 1."""
    p = float(p)
    if p <= 1.0:
        return math.inf, math.inf
    partial = math.fsum(n ** (-p) for n in range(1, K + 1))
    tlo, thi = zeta_tail(p, K)
    return partial + tlo, partial + thi


@dataclass(frozen=True)
class NpResult:
    """Certified evaluation of the series at one exponent."""

    p: NpParameter
    bracket: NormBracket
    verdict: str
    truncation_level: int
    tail_lo: float
    tail_hi: float
    closed_form: str | None = None
    divergence_proof: str | None = None

    def to_json_dict(self) -> dict:
        out = {
            "p": self.p.p,
            "lo": self.bracket.lo,
            "hi": self.bracket.hi,
            "verdict": self.verdict,
            "K": self.truncation_level,
            "tail": [self.tail_lo, self.tail_hi],
            "closed_form": self.closed_form,
        }
        if self.divergence_proof is not None:
            out["divergence_proof"] = self.divergence_proof
        return out


def default_truncation(table: LevelNormTable) -> int:
    return max(64, 4 * table.stabilization_level)


def np_norm(phi: LinearMapRep, p, table: LevelNormTable, K: int | None = None) -> NpResult:
    """Bracket the series sum_{n >= 1} ||phi_n|| / n^p using a level table."""
    pp = _as_p(p)
    if K is None:
        K = default_truncation(table)
    K = int(K)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")

    if phi.is_zero:
        bracket = NormBracket(0.0, 0.0, SOURCE_TRIVIAL_ZERO, SOURCE_TRIVIAL_ZERO)
        return NpResult(NpParameter(pp), bracket, VERDICT_MEMBER, K, 0.0, 0.0, CLOSED_FORM_ZERO)

    brackets = [table.bracket_at(n) for n in range(1, K + 1)]
    partial_lo = math.fsum(b.lo / n**pp for n, b in enumerate(brackets, start=1))
    partial_hi = math.fsum(b.hi / n**pp for n, b in enumerate(brackets, start=1))

    s = table.stabilization_level
    stabilized = s <= table.max_level and s <= K

    if stabilized and pp > 1.0:
        bs = table.bracket_at(s)
        zlo, zhi = zeta_tail(pp, K)
        tail_lo = bs.lo * zlo
        tail_hi = bs.hi * zhi
        closed = (
            CLOSED_FORM_FUNCTIONAL
            if phi.codomain.ambient_dim == 1
            else CLOSED_FORM_STABILIZED
        )
        bracket = NormBracket(partial_lo + tail_lo, partial_hi + tail_hi, SOURCE_SMITH, SOURCE_SMITH)
        return NpResult(NpParameter(pp), bracket, VERDICT_MEMBER, K, tail_lo, tail_hi, closed)

    if pp > 2.0:
        # ||phi_n|| <= n ||phi||, so the tail is at most hi(1) * sum n^{1-p}.
        tail_lo = table.bracket_at(K).lo * zeta_tail(pp, K)[0]
        tail_hi = table.bracket_at(1).hi * zeta_tail(pp - 1.0, K)[1]
        bracket = NormBracket(
            partial_lo + tail_lo, partial_hi + tail_hi, SOURCE_MONOTONICITY, SOURCE_N_TIMES_NORM
        )
        return NpResult(NpParameter(pp), bracket, VERDICT_MEMBER_BY_THEORY, K, tail_lo, tail_hi)

    if pp == 1.0:
        lo1 = table.bracket_at(1).lo
        if lo1 > 0.0:
            proof = (
                f"level norms are nondecreasing, so every term is at least "
                f"||phi_1||/n >= {lo1:.9g}/n, and the harmonic series diverges"
            )
            bracket = NormBracket(math.inf, math.inf, SOURCE_MONOTONICITY, SOURCE_MONOTONICITY)
            return NpResult(
                NpParameter(pp), bracket, VERDICT_NOT_MEMBER, K, math.inf, math.inf,
                divergence_proof=proof,
            )
        bracket = NormBracket(partial_lo, math.inf, SOURCE_MONOTONICITY, SOURCE_MONOTONICITY)
        return NpResult(NpParameter(pp), bracket, VERDICT_UNKNOWN, K, 0.0, math.inf)

    # 1 < p <= 2 without a usable stabilization certificate: the series may
    # genuinely diverge; no finite upper bound is claimed.
    tail_lo = table.bracket_at(K).lo * zeta_tail(pp, K)[0]
    bracket = NormBracket(partial_lo + tail_lo, math.inf, SOURCE_MONOTONICITY, SOURCE_MONOTONICITY)
    return NpResult(NpParameter(pp), bracket, VERDICT_UNKNOWN, K, tail_lo, math.inf)


def membership(phi: LinearMapRep, p, table: LevelNormTable) -> str:
    """Decide membership of phi in the p-summable class from table evidence."""
    pp = _as_p(p)
    if phi.is_zero:
        return VERDICT_MEMBER
    if pp > 2.0:
        return VERDICT_MEMBER_BY_THEORY
    if table.stabilization_level <= table.max_level and pp > 1.0:
        return VERDICT_MEMBER
    # Growth certificate: ||phi_n|| <= n^{p-1-eps} on the table for a fixed eps.
    for eps in (1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01):
        expo = pp - 1.0 - eps
        if all(
            e.bracket.hi <= (e.level**expo) * (1.0 + 1e-12) for e in table.entries
        ):
            return VERDICT_MEMBER
    if pp == 1.0:
        return VERDICT_NOT_MEMBER
    return VERDICT_UNKNOWN


@dataclass(frozen=True)
class IndexEstimate:
    """Fitted growth exponent and the summability index it implies."""

    r_hat: float
    alpha_hat: float
    fit_window: tuple
    residual: float

    def __post_init__(self):
        if self.r_hat < 1.0:
            raise ValueError(f"r_hat must be >= 1, got {self.r_hat}")

    def to_json_dict(self) -> dict:
        return {
            "r_hat": self.r_hat,
            "alpha_hat": self.alpha_hat,
            "fit_window": list(self.fit_window),
            "residual": self.residual,
        }


# Brackets tighter than this (relative) count as usable index-fit points.
_TIGHT_FOR_FIT = 1e-3


def index_estimate(
    source: LevelNormTable | Iterable[tuple[int, float]],
    fit_window: tuple[int, int] | None = None,
) -> IndexEstimate:
    """Estimate the summability index from level-norm growth.

    Tables that stabilize have index 1 by construction (the fit is skipped);
    otherwise, or for a synthetic (n, value) sequence, the growth exponent is
    a log-log least-squares slope over the fit window, defaulting to the
    upper half of the available levels.
    """
    if isinstance(source, LevelNormTable):
        if source.map.is_zero:
            return IndexEstimate(1.0, 0.0, (1, source.max_level), 0.0)
        if source.stabilization_level <= source.max_level:
            return IndexEstimate(
                1.0, 0.0, (source.stabilization_level, source.max_level), 0.0
            )
        pairs = [
            (e.level, e.bracket.midpoint)
            for e in source.entries
            if e.bracket.rel_width <= _TIGHT_FOR_FIT
        ]
    else:
        pairs = [(int(n), float(v)) for n, v in source]
    pairs.sort()
    if len(pairs) < 3:
        raise InsufficientData(f"index fit needs at least 3 levels, got {len(pairs)}")
    if fit_window is not None:
        lo_n, hi_n = fit_window
        window = [(n, v) for n, v in pairs if lo_n <= n <= hi_n]
    else:
        window = pairs[len(pairs) // 2 :]
    if len(window) < 2:
        raise InsufficientData("fit window keeps fewer than 2 levels")
    if any(v <= 0.0 for _, v in window):
        raise InsufficientData("fit window contains non-positive values")
    xs = np.log([float(n) for n, _ in window])
    ys = np.log([v for _, v in window])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    alpha = float(slope)
    return IndexEstimate(max(1.0, alpha + 1.0), alpha, (window[0][0], window[-1][0]), resid)


@dataclass(frozen=True)
class InclusionReport:
    """Comparison of the series at p <= q: the sum can only shrink."""

    p: float
    q: float
    result_p: NpResult
    result_q: NpResult
    bracket_ok: bool
    values_ok: bool
    both_tight: bool

    @property
    def passed(self) -> bool:
        return self.bracket_ok and self.values_ok

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "result_p": self.result_p.to_json_dict(),
            "result_q": self.result_q.to_json_dict(),
            "bracket_ok": self.bracket_ok,
            "values_ok": self.values_ok,
            "both_tight": self.both_tight,
            "passed": self.passed,
        }


def inclusion_check(
    phi: LinearMapRep, p: float, q: float, table: LevelNormTable, K: int | None = None
) -> InclusionReport:
    """Check the norm comparison ||phi||_q <= ||phi||_p for 1 <= p <= q."""
    pp, qq = _as_p(p), _as_p(q)
    if not pp <= qq:
        raise ValueError(f"need p <= q, got p={pp}, q={qq}")
    rp = np_norm(phi, pp, table, K)
    rq = np_norm(phi, qq, table, K)
    bracket_ok = rq.bracket.lo <= rp.bracket.hi + 1e-9
    both_tight = rp.bracket.is_tight() and rq.bracket.is_tight()
    values_ok = True
    if both_tight:
        values_ok = rq.bracket.midpoint <= rp.bracket.midpoint + 1e-9
    return InclusionReport(pp, qq, rp, rq, bracket_ok, values_ok, both_tight)
