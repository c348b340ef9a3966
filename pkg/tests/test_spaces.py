"""Spaces: construction, realization, level norms, and the norm axioms."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npspace import (
    DependentBasis,
    DimensionMismatch,
    direct_sum,
    element_from_matrix,
    full_matrix_space,
    level_norm,
    make_space,
    pad_to,
    random_element,
    random_subspace,
    realize,
    sandwich,
    space_from_dict,
    space_to_dict,
    spectral_norm,
    verify_axioms,
)

I2 = np.eye(2, dtype=complex)


def _units(d):
    return [np.array(b) for b in full_matrix_space(d).basis]


# ---------------------------------------------------------------------------
# make_space
# ---------------------------------------------------------------------------


def test_make_space_identity_basis():
    sp = make_space(2, [I2], "scalars")
    assert sp.dim == 1
    assert not sp.is_full_matrix_algebra


def test_make_space_rejects_colinear_pair():
    with pytest.raises(DependentBasis):
        make_space(2, [I2, 2 * I2])


def test_make_space_matrix_units_is_full():
    sp = make_space(2, _units(2))
    assert sp.dim == 4
    assert sp.is_full_matrix_algebra


def test_make_space_rejects_wrong_shape():
    with pytest.raises(DimensionMismatch):
        make_space(2, [np.eye(3)])
    with pytest.raises(DimensionMismatch):
        make_space(2, [])


def test_make_space_rejects_overcomplete():
    with pytest.raises(DependentBasis):
        make_space(1, [np.array([[1.0]]), np.array([[2.0]])])


# ---------------------------------------------------------------------------
# realize
# ---------------------------------------------------------------------------


def test_realize_identity_level_one():
    sp = make_space(2, [I2])
    x = sp.element(1, [[[1.0]]])
    assert np.allclose(realize(x), I2)


def test_realize_block_diagonal():
    sp = full_matrix_space(2)
    rng = np.random.default_rng(3)
    v = random_element(sp, 1, rng)
    w = random_element(sp, 1, rng)
    big = realize(direct_sum(v, w))
    assert np.allclose(big[:2, :2], realize(v))
    assert np.allclose(big[2:, 2:], realize(w))
    assert np.allclose(big[:2, 2:], 0)
    assert np.allclose(big[2:, :2], 0)


def _naive_realize(x):
    # Independent oracle: plain double loop over blocks and basis terms.
    n, d = x.level, x.space.ambient_dim
    out = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            block = sum(
                x.coords[i, j, t] * np.asarray(x.space.basis[t])
                for t in range(x.space.dim)
            )
            out[i * d : (i + 1) * d, j * d : (j + 1) * d] = block
    return out


def test_realize_matches_naive_substitution_oracle(rng):
    for sp in (full_matrix_space(2), random_subspace(3, 4, rng)):
        for level in (1, 2, 3):
            x = random_element(sp, level, rng)
            got = realize(x)
            want = _naive_realize(x)
            scale = max(1.0, np.abs(want).max())
            assert np.abs(got - want).max() <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(
    a_re=st.floats(-3, 3), a_im=st.floats(-3, 3),
    b_re=st.floats(-3, 3), b_im=st.floats(-3, 3),
    seed=st.integers(0, 10_000),
)
def test_realize_is_linear_in_coords(a_re, a_im, b_re, b_im, seed):
    sp = full_matrix_space(2)
    gen = np.random.default_rng(seed)
    x = random_element(sp, 2, gen)
    y = random_element(sp, 2, gen)
    a = complex(a_re, a_im)
    b = complex(b_re, b_im)
    combo = sp.element(2, a * x.coords + b * y.coords)
    want = a * realize(x) + b * realize(y)
    scale = max(1.0, np.abs(want).max())
    assert np.abs(realize(combo) - want).max() <= 1e-12 * scale


def test_element_from_matrix_round_trip(rng):
    sp = full_matrix_space(2)
    x = random_element(sp, 2, rng)
    back = element_from_matrix(sp, 2, realize(x))
    assert np.allclose(back.coords, x.coords)


# ---------------------------------------------------------------------------
# level_norm
# ---------------------------------------------------------------------------


def test_level_norm_zero():
    sp = full_matrix_space(2)
    x = sp.element(2, np.zeros((2, 2, 4)))
    assert level_norm(x) == 0.0


def test_level_norm_direct_sum_is_max(rng):
    # The direct-sum rule is an equality for concrete spaces.
    sp = full_matrix_space(2)
    for _ in range(25):
        v = random_element(sp, int(rng.integers(1, 3)), rng)
        w = random_element(sp, int(rng.integers(1, 3)), rng)
        want = max(level_norm(v), level_norm(w))
        got = level_norm(direct_sum(v, w))
        assert abs(got - want) <= 1e-9 * max(want, 1.0)


def test_level_norm_scalar_contraction(rng):
    sp = full_matrix_space(2)
    for _ in range(25):
        x = random_element(sp, 2, rng)
        alpha = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        beta = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        lhs = level_norm(sandwich(alpha, x, beta))
        rhs = spectral_norm(alpha) * level_norm(x) * spectral_norm(beta)
        assert lhs <= rhs + 1e-9


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), extra=st.integers(1, 3))
def test_padding_leaves_level_norm_unchanged(seed, extra):
    sp = full_matrix_space(2)
    gen = np.random.default_rng(seed)
    x = random_element(sp, 2, gen)
    padded = pad_to(x, 2 + extra)
    assert abs(level_norm(padded) - level_norm(x)) <= 1e-12 * max(1.0, level_norm(x))


# ---------------------------------------------------------------------------
# verify_axioms
# ---------------------------------------------------------------------------


def test_verify_axioms_full_m2():
    report = verify_axioms(full_matrix_space(2), samples=100, seed=7)
    assert report.passed
    assert report.m1_worst <= 1e-9
    assert report.m2_worst <= 1e-9


def test_verify_axioms_scalar_space():
    report = verify_axioms(make_space(2, [I2], "scalars"), samples=10, seed=7)
    assert report.passed


def test_verify_axioms_corrupted_norm_reports_m1_failure():
    # Negative control: a norm that misreports level 2 must break M1.
    def corrupted(x):
        return level_norm(x) * (1.1 if x.level == 2 else 1.0)

    report = verify_axioms(full_matrix_space(2), samples=50, seed=7, norm_fn=corrupted)
    assert not report.passed
    assert any(f["check"] == "M1" for f in report.failures)


def test_verify_axioms_random_subspaces(rng):
    for d in (2, 3):
        sp = random_subspace(d, 2, rng, f"rand2_of_M{d}")
        report = verify_axioms(sp, samples=50, seed=5)
        assert report.passed, report.failures[:3]


# ---------------------------------------------------------------------------
# JSON space files
# ---------------------------------------------------------------------------


def test_space_json_round_trip(rng):
    sp = random_subspace(2, 3, rng, "roundtrip")
    back = space_from_dict(space_to_dict(sp))
    assert back.label == sp.label
    assert back.ambient_dim == sp.ambient_dim
    for a, b in zip(sp.basis, back.basis):
        assert np.array_equal(np.asarray(a), np.asarray(b))


def test_space_json_decimal_exactness(tmp_path):
    payload = {"label": "S", "ambient_dim": 1, "basis": [[[[0.1, -0.25]]]]}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(payload))
    from npspace import load_space

    sp = load_space(str(path))
    z = complex(sp.basis[0][0, 0])
    assert z.real == 0.1 and z.imag == -0.25


def test_space_json_rejects_bad_shapes():
    with pytest.raises(ValueError):
        space_from_dict({"label": "x", "ambient_dim": 2, "basis": [[[[1.0, 0.0]]]]})
    with pytest.raises(ValueError):
        space_from_dict({"label": "x", "ambient_dim": 0, "basis": []})
