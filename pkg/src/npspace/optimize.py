"""Alternating-ascent maximization of amplified spectral norms.

The quantity being maximized is ||A(x)|| over level-n elements x of the
domain space with realized norm at most 1, where A(x) is the realized image
of the entrywise-applied map.  For fixed unit vectors u, v the objective
Re<u, A(x) v> is linear in the coordinates of x, so each half-step solves a
linear problem over the unit ball of M_n(V); u, v are then refreshed from
the top singular pair of A(x).  Every iterate is feasible, so every reported
value is a certified lower bound with a re-checkable witness.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .spaces import OperatorSpace, SpaceElement, realize, spectral_norm

# Stream-separation constant mixed into every RNG seed sequence.
_SEED_TAG = 0x414D50

# Restarts agreeing with the best value within this relative gap count as
# independent confirmations of the optimum.
_AGREE_REL = 1e-9


@dataclass(frozen=True)
class OptBudget:
    """Search effort: independent restarts, per-restart iterations, stop tol."""

    restarts: int = 20
    max_iter: int = 200
    tol: float = 1e-11

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or self.tol <= 0:
            raise ValueError(f"invalid budget {self!r}")


DEFAULT_BUDGET = OptBudget()


@dataclass(frozen=True)
class AscentOutcome:
    """Best value found, its witness coordinates, and convergence evidence."""

    value: float
    coords: np.ndarray
    converged: bool
    support: int  # number of restarts agreeing with the best value


def worker_count() -> int:
    """Parallelism cap from NPSPACE_THREADS (default 1; output-invariant)."""
    try:
        return max(1, int(os.environ.get("NPSPACE_THREADS", "1")))
    except ValueError:
        return 1


def realize_image(images: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Realized A(x) for coords (n, n, k) against image stack (k, e, e)."""
    n = coords.shape[0]
    e = images.shape[1]
    return np.einsum("ijt,tab->iajb", coords, images).reshape(n * e, n * e)


def project_to_unit_ball(
    space: OperatorSpace, coords: np.ndarray, rounds: int = 100, tol: float = 1e-12
) -> np.ndarray:
    """Alternating projection onto {x in M_n(V) : ||x|| <= 1}.

    Alternates singular-value clipping with blockwise least-squares return
    to the subspace; ends with an exact rescale so the result is feasible.
    """
    n = coords.shape[0]
    d = space.ambient_dim
    cur = coords
    for _ in range(rounds):
        m = realize(SpaceElement(space, n, cur))
        u, s, vh = np.linalg.svd(m)
        if s[0] <= 1.0 + tol:
            break
        clipped = (u * np.minimum(s, 1.0)) @ vh
        blocks = clipped.reshape(n, d, n, d).transpose(0, 2, 1, 3).reshape(n, n, d * d)
        nxt = blocks @ space._vec_pinv.T
        if np.linalg.norm(nxt - cur) <= tol:
            cur = nxt
            break
        cur = nxt
    nrm = spectral_norm(realize(SpaceElement(space, n, cur)))
    if nrm > 1.0:
        cur = cur / nrm
    return cur


def _coords_from_realized(space: OperatorSpace, n: int, matrix: np.ndarray) -> np.ndarray:
    d = space.ambient_dim
    blocks = matrix.reshape(n, d, n, d).transpose(0, 2, 1, 3).reshape(n, n, d * d)
    return blocks @ space._vec_pinv.T


def _linear_step(
    space: OperatorSpace, images: np.ndarray, n: int, u: np.ndarray, v: np.ndarray
) -> np.ndarray | None:
    """Maximize Re<u, A(x) v> over the unit ball of M_n(V).

    Exact (polar factor) when the domain is the full matrix algebra; for a
    proper subspace the scaled steepest direction is pushed back into the
    feasible set by alternating projection.
    """
    e = images.shape[1]
    um = u.reshape(n, e)
    vm = v.reshape(n, e)
    # G[i,j,t] = <u_i, images_t v_j>; the objective is Re sum x_ijt G_ijt.
    g = np.einsum("ia,tab,jb->ijt", um.conj(), images, vm)
    # Realized representer: Re<W, R_x>_F equals the objective.
    h = np.einsum("ijt,tq->ijq", g, space._vec_pinv)
    d = space.ambient_dim
    w = h.conj().reshape(n, n, d, d).transpose(0, 2, 1, 3).reshape(n * d, n * d)
    scale = np.linalg.norm(w)
    if not np.isfinite(scale) or scale < 1e-300:
        return None
    if space.is_full_matrix_algebra:
        uu, _, vv = np.linalg.svd(w)
        coords = _coords_from_realized(space, n, uu @ vv)
    else:
        direction = _coords_from_realized(space, n, w)
        nrm = spectral_norm(realize(SpaceElement(space, n, direction)))
        if nrm < 1e-300:
            return None
        coords = project_to_unit_ball(space, direction * (2.0 / nrm))
    nrm = spectral_norm(realize(SpaceElement(space, n, coords)))
    if nrm > 1.0:
        coords = coords / nrm
    return coords


def _objective(g: np.ndarray, coords: np.ndarray) -> float:
    return float(np.real(np.sum(g * coords)))


def _run_restart(
    space: OperatorSpace,
    images: np.ndarray,
    n: int,
    budget: OptBudget,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray, bool]:
    e = images.shape[1]
    ne = n * e
    k = images.shape[0]

    def unit(size):
        z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return z / np.linalg.norm(z)

    u = unit(ne)
    v = unit(ne)
    best_val = -np.inf
    best_x = np.zeros((n, n, k), dtype=complex)
    stall = 0
    converged = False
    for _ in range(budget.max_iter):
        x = _linear_step(space, images, n, u, v)
        if x is None:
            # Flat objective (zero map or degenerate direction).
            if best_val == -np.inf:
                return 0.0, best_x, True
            converged = True
            break
        a = realize_image(images, x)
        uu, s, vh = np.linalg.svd(a)
        val = float(s[0])
        improvement = val - best_val
        if val > best_val:
            best_val = val
            best_x = x
            u = uu[:, 0]
            v = vh[0].conj()
        if improvement < budget.tol * max(1.0, abs(best_val)):
            stall += 1
            if stall >= 5:
                converged = True
                break
        else:
            stall = 0
    if best_val == -np.inf:
        return 0.0, best_x, True
    return best_val, best_x, converged


def maximize_amplified_norm(
    space: OperatorSpace,
    images: np.ndarray,
    level: int,
    budget: OptBudget = DEFAULT_BUDGET,
    seed: int = 0,
) -> AscentOutcome:
    """Multi-restart ascent; deterministic for a fixed seed.

    Restarts are independent (and may run on worker threads, capped by
    NPSPACE_THREADS); results are merged in restart order so the outcome
    does not depend on scheduling.
    """
    n = int(level)
    if not np.any(images):
        k = images.shape[0]
        return AscentOutcome(0.0, np.zeros((n, n, k), dtype=complex), True, budget.restarts)

    def run(r: int):
        rng = np.random.default_rng([_SEED_TAG, abs(int(seed)), n, r])
        return _run_restart(space, images, n, budget, rng)

    workers = worker_count()
    if workers > 1 and budget.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(budget.restarts)))
    else:
        results = [run(r) for r in range(budget.restarts)]

    best_val, best_x, best_conv = results[0]
    for val, x, conv in results[1:]:
        if val > best_val:
            best_val, best_x, best_conv = val, x, conv
    support = sum(
        1
        for val, _, conv in results
        if conv and abs(val - best_val) <= _AGREE_REL * max(1.0, best_val)
    )

    # Re-check the witness through the plain evaluation path.
    nrm = spectral_norm(realize(SpaceElement(space, n, best_x)))
    if nrm > 1.0:
        best_x = best_x / nrm
    value = spectral_norm(realize_image(images, best_x))
    converged = best_conv and (support >= 2 or budget.restarts == 1)
    return AscentOutcome(value, best_x, converged, support)
