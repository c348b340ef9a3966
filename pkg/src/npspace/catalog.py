"""Built-in example maps with known level-norm behavior.

Every entry carries a closed-form rule n -> ||phi_n|| taken from classical
operator-space facts (functionals, transpose, Schur multipliers, complete
isometries).  The rules are not trusted blindly: tests validate each one
against the brute-force oracle at small levels before anything else relies
on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NoClosedForm
from .maps import LinearMapRep, make_map, map_to_dict
from .npnorm import zeta_tail
from .spaces import full_matrix_space, make_space

PROVENANCE_PAPER_COROLLARY = "paper_corollary"
PROVENANCE_DERIVED_ORACLE = "derived_oracle"
PROVENANCE_TRIVIAL = "trivial"


@dataclass(frozen=True)
class CatalogEntry:
    """A named map plus its expected level-norm rule, when one is known."""

    name: str
    map: LinearMapRep
    expected_level_norms: Callable[[int], float] | None
    expected_stabilization: int | None
    provenance: str


def _matrix_units(d: int) -> list[np.ndarray]:
    return [np.array(b) for b in full_matrix_space(d).basis]


@lru_cache(maxsize=1)
def _entries() -> tuple[CatalogEntry, ...]:
    m1 = full_matrix_space(1, "M1")
    m2 = full_matrix_space(2, "M2")
    m3 = full_matrix_space(3, "M3")

    entries = []

    zero = make_map(m2, m2, [np.zeros((2, 2))] * 4, "zero_M2")
    entries.append(CatalogEntry("zero_M2", zero, lambda n: 0.0, 1, PROVENANCE_TRIVIAL))

    for d, space in ((2, m2), (3, m3)):
        ident = make_map(space, space, [b for b in space.basis], f"identity_M{d}")
        entries.append(
            CatalogEntry(f"identity_M{d}", ident, lambda n: 1.0, 1, PROVENANCE_TRIVIAL)
        )

    for d, space in ((2, m2), (3, m3)):
        transp = make_map(space, space, [np.array(b).T for b in space.basis], f"transpose_M{d}")
        entries.append(
            CatalogEntry(
                f"transpose_M{d}",
                transp,
                lambda n, d=d: float(min(n, d)),
                d,
                PROVENANCE_DERIVED_ORACLE,
            )
        )

    trace = make_map(
        m2, m1, [np.array([[np.trace(b)]]) for b in m2.basis], "trace_M2"
    )
    # Functionals have ||f_n|| = ||f|| for every n; the trace functional on
    # the spectral unit ball attains |tr I| = 2.
    entries.append(CatalogEntry("trace_M2", trace, lambda n: 2.0, 1, PROVENANCE_PAPER_COROLLARY))

    a = np.array([0.6, 0.8j])
    b = np.array([2.0, -1.0])
    rank_one = make_map(
        m2,
        m1,
        [np.array([[np.vdot(a, unit @ b)]]) for unit in m2.basis],
        "rank_one_M2",
    )
    rank_one_value = float(np.linalg.norm(a) * np.linalg.norm(b))
    entries.append(
        CatalogEntry(
            "rank_one_M2",
            rank_one,
            lambda n, v=rank_one_value: v,
            1,
            PROVENANCE_PAPER_COROLLARY,
        )
    )

    # Entrywise multiplier by [[1, 1], [-1, 1]]: norm sqrt(2) at every level
    # (a rotation witness from below, a length-sqrt(2) column factorization
    # from above).
    mult = np.array([[1.0, 1.0], [-1.0, 1.0]])
    schur = make_map(
        m2, m2, [mult * np.array(bm) for bm in m2.basis], "schur_M2"
    )
    entries.append(
        CatalogEntry(
            "schur_M2", schur, lambda n: math.sqrt(2.0), 1, PROVENANCE_DERIVED_ORACLE
        )
    )

    units = _matrix_units(2)
    diag_space = make_space(2, [units[0], units[3]], "diag(M2)")
    diag = make_map(
        m2,
        diag_space,
        [units[0], np.zeros((2, 2)), np.zeros((2, 2)), units[3]],
        "diag_M2",
    )
    entries.append(
        CatalogEntry("diag_M2", diag, lambda n: 1.0, 1, PROVENANCE_DERIVED_ORACLE)
    )

    return tuple(entries)


def list_entries() -> list[CatalogEntry]:
    return list(_entries())


def get_entry(name: str) -> CatalogEntry:
    for entry in _entries():
        if entry.name == name:
            return entry
    known = ", ".join(e.name for e in _entries())
    raise KeyError(f"no catalog entry {name!r}; known entries: {known}")


def resolve_uri(uri: str) -> CatalogEntry:
    """Resolve a 'catalog:<name>' reference."""
    prefix = "catalog:"
    if not uri.startswith(prefix):
        raise ValueError(f"not a catalog URI: {uri!r}")
    return get_entry(uri[len(prefix):])


def expected_np_bracket(entry: CatalogEntry, p: float, K: int) -> tuple[float, float]:
    """Evaluate the entry's closed-form rule as a partial sum plus zeta tail."""
    if entry.expected_level_norms is None:
        raise NoClosedForm(f"catalog entry {entry.name!r} has no closed-form rule")
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"closed-form evaluation needs p > 1, got {p}")
    K = int(K)
    stab = entry.expected_stabilization or 1
    if K < stab:
        raise ValueError(f"K={K} is below the rule's stabilization level {stab}")
    rule = entry.expected_level_norms
    partial = math.fsum(rule(n) / n**p for n in range(1, K + 1))
    stable_value = rule(K + 1)
    tlo, thi = zeta_tail(p, K)
    return partial + stable_value * tlo, partial + stable_value * thi


def export_entry(entry: CatalogEntry) -> dict:
    """The entry's map in the JSON map-file schema (spaces inline)."""
    return map_to_dict(entry.map)
