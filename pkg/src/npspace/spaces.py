"""Concrete operator spaces V inside M_d and their matrix-level norms.

A space is given by an ordered basis of d x d complex matrices.  An element
of the level-n matrix space over V is stored as an (n, n, k) coordinate
array; realizing it substitutes every coordinate vector by the matrix it
encodes, giving an (nd) x (nd) matrix whose spectral norm is the level norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DependentBasis, DimensionMismatch, InvalidLevel, SpaceMismatch

# Relative smallest-singular-value cutoff below which a basis is rejected.
INDEPENDENCE_CUTOFF = 1e-10


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value of a dense matrix."""
    return float(np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)[0])


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OperatorSpace:
    """A subspace of the d x d complex matrices, given by an ordered basis."""

    ambient_dim: int
    basis: tuple
    label: str = "V"

    # Derived arrays, filled in __post_init__:
    #   _stack     (k, d, d)  basis matrices
    #   _vec       (d*d, k)   column t = basis[t] flattened
    #   _vec_pinv  (k, d*d)   least-squares coordinate recovery
    _stack: np.ndarray = field(init=False, repr=False, compare=False)
    _vec: np.ndarray = field(init=False, repr=False, compare=False)
    _vec_pinv: np.ndarray = field(init=False, repr=False, compare=False)
    _vec_smin: float = field(init=False, repr=False, compare=False)
    _vec_smax: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = self.ambient_dim
        if not isinstance(d, int) or d < 1:
            raise DimensionMismatch(f"ambient_dim must be a positive integer, got {d!r}")
        mats = tuple(_readonly(b) for b in self.basis)
        if not mats:
            raise DimensionMismatch("basis must be nonempty")
        for i, b in enumerate(mats):
            if b.shape != (d, d):
                raise DimensionMismatch(
                    f"basis[{i}] has shape {b.shape}, expected ({d}, {d})"
                )
        object.__setattr__(self, "basis", mats)
        stack = _readonly(np.stack(mats))
        vec = _readonly(stack.reshape(len(mats), d * d).T)
        svals = np.linalg.svd(vec, compute_uv=False)
        smax = float(svals[0])
        smin = float(svals[-1])
        if len(mats) > d * d or smin <= INDEPENDENCE_CUTOFF * smax:
            raise DependentBasis(
                f"basis of {self.label!r} is dependent or nearly so "
                f"(smin/smax = {smin / smax if smax else 0.0:.3e})"
            )
        object.__setattr__(self, "_stack", stack)
        object.__setattr__(self, "_vec", vec)
        object.__setattr__(self, "_vec_pinv", _readonly(np.linalg.pinv(vec)))
        object.__setattr__(self, "_vec_smin", smin)
        object.__setattr__(self, "_vec_smax", smax)

    @property
    def dim(self) -> int:
        """Number of basis elements k."""
        return len(self.basis)

    @property
    def is_full_matrix_algebra(self) -> bool:
        return self.dim == self.ambient_dim**2

    def element(self, level: int, coords) -> "SpaceElement":
        return SpaceElement(self, level, np.asarray(coords, dtype=complex))

    def coords_of(self, matrix: np.ndarray) -> np.ndarray:
        """Least-squares coordinates of a d x d matrix (its projection onto V)."""
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatch(f"expected ({self.ambient_dim},)*2, got {m.shape}")
        return self._vec_pinv @ m.reshape(-1)


def make_space(ambient_dim: int, basis: Sequence[np.ndarray], label: str = "V") -> OperatorSpace:
    """Validate and construct an OperatorSpace from a basis list."""
    return OperatorSpace(int(ambient_dim), tuple(basis), label)


def full_matrix_space(d: int, label: str | None = None) -> OperatorSpace:
    """The full matrix algebra M_d with the matrix-unit basis, row-major order."""
    units = []
    for a in range(d):
        for b in range(d):
            m = np.zeros((d, d), dtype=complex)
            m[a, b] = 1.0
            units.append(m)
    return make_space(d, units, label or f"M{d}")


@dataclass(frozen=True)
class SpaceElement:
    """A level-n matrix over a space: (n, n, k) coordinate array."""

    space: OperatorSpace
    level: int
    coords: np.ndarray

    def __post_init__(self):
        if not isinstance(self.level, int) or self.level < 1:
            raise InvalidLevel(f"level must be a positive integer, got {self.level!r}")
        c = _readonly(self.coords)
        n, k = self.level, self.space.dim
        if c.shape != (n, n, k):
            raise DimensionMismatch(
                f"coords shape {c.shape} does not match (level, level, k) = ({n}, {n}, {k})"
            )
        object.__setattr__(self, "coords", c)


def realize(x: SpaceElement) -> np.ndarray:
    """The (nd) x (nd) matrix whose (i, j) block is the entry x_{ij} of V."""
    n, d = x.level, x.space.ambient_dim
    big = np.einsum("ijt,tab->iajb", x.coords, x.space._stack)
    return big.reshape(n * d, n * d)


def level_norm(x: SpaceElement) -> float:
    """Spectral norm of the realized element (the M_n(V) norm)."""
    return spectral_norm(realize(x))


def element_from_matrix(space: OperatorSpace, level: int, matrix: np.ndarray) -> SpaceElement:
    """Blockwise least-squares coordinates of an (nd) x (nd) matrix."""
    d = space.ambient_dim
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (level * d, level * d):
        raise DimensionMismatch(f"expected ({level * d},)*2, got {m.shape}")
    blocks = m.reshape(level, d, level, d).transpose(0, 2, 1, 3).reshape(level, level, d * d)
    coords = blocks @ space._vec_pinv.T
    return SpaceElement(space, level, coords)


def direct_sum(x: SpaceElement, y: SpaceElement) -> SpaceElement:
    """Block-diagonal sum in M_{m+n}(V)."""
    if x.space is not y.space and not _same_space(x.space, y.space):
        raise SpaceMismatch("direct_sum requires elements over the same space")
    m, n, k = x.level, y.level, x.space.dim
    coords = np.zeros((m + n, m + n, k), dtype=complex)
    coords[:m, :m] = x.coords
    coords[m:, m:] = y.coords
    return SpaceElement(x.space, m + n, coords)


def sandwich(alpha: np.ndarray, x: SpaceElement, beta: np.ndarray) -> SpaceElement:
    """Scalar-matrix product alpha * x * beta, landing in M_n(V).

    alpha is n x m, beta is m x n when x has level m.
    """
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    m = x.level
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != m or b.shape[0] != m or a.shape[0] != b.shape[1]:
        raise DimensionMismatch(f"incompatible scalar shapes {a.shape}, {b.shape} for level {m}")
    coords = np.einsum("ia,abt,bj->ijt", a, x.coords, b)
    return SpaceElement(x.space, a.shape[0], coords)


def pad_to(x: SpaceElement, level: int) -> SpaceElement:
    """Embed into a higher level by appending zero rows/columns."""
    if level < x.level:
        raise InvalidLevel(f"cannot pad level {x.level} down to {level}")
    if level == x.level:
        return x
    coords = np.zeros((level, level, x.space.dim), dtype=complex)
    coords[: x.level, : x.level] = x.coords
    return SpaceElement(x.space, level, coords)


def random_element(
    space: OperatorSpace, level: int, rng: np.random.Generator, unit: bool = False
) -> SpaceElement:
    """Element with iid complex-gaussian coordinates; unit realized norm if asked."""
    shape = (level, level, space.dim)
    coords = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    x = SpaceElement(space, level, coords)
    if unit:
        nrm = level_norm(x)
        if nrm > 0:
            x = SpaceElement(space, level, coords / nrm)
    return x


def random_subspace(
    ambient_dim: int, dim: int, rng: np.random.Generator, label: str = "random"
) -> OperatorSpace:
    """A random dim-dimensional subspace of M_{ambient_dim}."""
    d = ambient_dim
    mats = rng.standard_normal((dim, d, d)) + 1j * rng.standard_normal((dim, d, d))
    return make_space(d, list(mats), label)


def _same_space(a: OperatorSpace, b: OperatorSpace) -> bool:
    return (
        a.ambient_dim == b.ambient_dim
        and a.dim == b.dim
        and np.array_equal(a._stack, b._stack)
    )


# ---------------------------------------------------------------------------
# Axiom spot-checks (direct-sum maximum and scalar contraction)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of randomized M1/M2 checks on one space."""

    label: str
    samples: int
    m1_checked: int
    m2_checked: int
    m1_worst: float
    m2_worst: float
    failures: tuple

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "samples": self.samples,
            "m1_checked": self.m1_checked,
            "m2_checked": self.m2_checked,
            "m1_worst": self.m1_worst,
            "m2_worst": self.m2_worst,
            "failures": list(self.failures),
            "passed": self.passed,
        }


def verify_axioms(
    space: OperatorSpace,
    samples: int,
    seed: int,
    norm_fn: Callable[[SpaceElement], float] | None = None,
) -> AxiomReport:
    """Randomized check of the direct-sum (M1) and contraction (M2) rules.

    M1 is an equality tested to 1e-9 relative; M2 an inequality with 1e-9
    slack.  ``norm_fn`` exists as a test hook: substituting a corrupted norm
    must surface as reported failures.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    nf = norm_fn or level_norm
    rng = np.random.default_rng([abs(int(seed)), 0x4E50])
    failures = []
    m1_worst = 0.0
    m2_worst = 0.0
    for i in range(samples):
        # M1: ||v (+) w|| = max(||v||, ||w||), levels kept <= 4 after summing.
        lv, lw = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        v = random_element(space, lv, rng)
        w = random_element(space, lw, rng)
        got = nf(direct_sum(v, w))
        want = max(nf(v), nf(w))
        rel = abs(got - want) / max(want, 1e-300)
        m1_worst = max(m1_worst, rel)
        if rel > 1e-9:
            failures.append({"check": "M1", "sample": i, "violation": rel})
        # M2: ||alpha x beta|| <= |alpha| ||x|| |beta|.
        lx = int(rng.integers(1, 4))
        lo = int(rng.integers(1, 5))
        x = random_element(space, lx, rng)
        alpha = rng.standard_normal((lo, lx)) + 1j * rng.standard_normal((lo, lx))
        beta = rng.standard_normal((lx, lo)) + 1j * rng.standard_normal((lx, lo))
        lhs = nf(sandwich(alpha, x, beta))
        rhs = spectral_norm(alpha) * nf(x) * spectral_norm(beta)
        excess = lhs - rhs
        m2_worst = max(m2_worst, excess)
        if excess > 1e-9:
            failures.append({"check": "M2", "sample": i, "violation": excess})
    return AxiomReport(
        label=space.label,
        samples=samples,
        m1_checked=samples,
        m2_checked=samples,
        m1_worst=m1_worst,
        m2_worst=m2_worst,
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# JSON space files
# ---------------------------------------------------------------------------


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _pairs_to_matrix(rows, d: int) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.shape != (d, d, 2):
        raise ValueError(f"matrix entry has shape {arr.shape}, expected ({d}, {d}, 2)")
    return arr[..., 0] + 1j * arr[..., 1]


def space_to_dict(space: OperatorSpace) -> dict:
    return {
        "label": space.label,
        "ambient_dim": space.ambient_dim,
        "basis": [_matrix_to_pairs(b) for b in space.basis],
    }


def space_from_dict(data: dict) -> OperatorSpace:
    if not isinstance(data, dict):
        raise ValueError("space definition must be a JSON object")
    d = data["ambient_dim"]
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"ambient_dim must be a positive integer, got {d!r}")
    basis = [_pairs_to_matrix(m, d) for m in data["basis"]]
    return make_space(d, basis, str(data.get("label", "V")))


def load_space(path: str) -> OperatorSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return space_from_dict(json.load(fh))


def save_space(space: OperatorSpace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(space_to_dict(space), fh, indent=2)
        fh.write("\n")
