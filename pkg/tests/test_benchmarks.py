import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import random_compositions
from subsimplex import benchmarks
from subsimplex.benchmarks import (
    TransformSpec,
    alr,
    alr_inv,
    clr,
    clr_inv,
    helmert_submatrix,
    ilr,
    ilr_inv,
    pca,
    power_transform,
    zero_replace,
)
from subsimplex.errors import (
    AllZeroMatrix,
    EmptyDataset,
    NonPositiveEntry,
    ValidationError,
)
from subsimplex.synthdata import generate_example1

LN2 = np.log(2.0)

positive_rows = arrays(
    np.float64, (3, 4),
    elements=st.floats(min_value=1e-6, max_value=1e3),
)


# --- transforms --------------------------------------------------------

def test_alr_hand_values():
    np.testing.assert_allclose(alr([[0.5, 0.25, 0.25]]), [[LN2, 0.0]],
                               rtol=0.0, atol=1e-15)
    # reference column zero, other columns keep their order
    np.testing.assert_allclose(alr([[0.5, 0.25, 0.25]], ref=0),
                               [[-LN2, -LN2]], rtol=0.0, atol=1e-15)


def test_clr_hand_values():
    out = clr([[0.5, 0.25, 0.25]])
    np.testing.assert_allclose(
        out, [[2.0 * LN2 / 3.0, -LN2 / 3.0, -LN2 / 3.0]], rtol=0.0, atol=1e-15)
    assert abs(out.sum()) <= 1e-15


def test_ilr_hand_values():
    out = ilr([[0.5, 0.25, 0.25]])
    np.testing.assert_allclose(
        out, [[LN2 / np.sqrt(2.0), LN2 / np.sqrt(6.0)]], rtol=0.0, atol=1e-15)


def test_log_ratio_transforms_reject_zeros():
    for transform in (clr, alr, ilr):
        with pytest.raises(NonPositiveEntry):
            transform([[0.5, 0.5, 0.0]])


def test_helmert_submatrix_is_orthonormal_and_zero_sum():
    for m in (2, 3, 5, 8):
        h = helmert_submatrix(m)
        assert h.shape == (m - 1, m)
        np.testing.assert_allclose(h @ h.T, np.eye(m - 1), rtol=0.0, atol=1e-15)
        np.testing.assert_allclose(h.sum(axis=1), 0.0, rtol=0.0, atol=1e-15)


def test_ilr_is_an_isometry_of_clr():
    rng = np.random.default_rng(5)
    X = random_compositions(rng, 6, 5)
    np.testing.assert_allclose(
        np.linalg.norm(ilr(X), axis=1), np.linalg.norm(clr(X), axis=1),
        rtol=1e-12)


def test_power_transform_unit_norm_at_half():
    out = power_transform([[0.25, 0.25, 0.5]])
    np.testing.assert_allclose(out, [[0.5, 0.5, np.sqrt(0.5)]],
                               rtol=0.0, atol=1e-15)
    assert float(np.linalg.norm(out)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NonPositiveEntry):
        power_transform([[-0.1, 1.1]])
    with pytest.raises(ValidationError):
        power_transform([[0.5, 0.5]], exponent=0.0)


@settings(max_examples=100, deadline=None)
@given(positive_rows)
def test_log_ratio_inverses_round_trip(raw):
    X = raw / raw.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(clr_inv(clr(X)), X, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(alr_inv(alr(X)), X, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(ilr_inv(ilr(X)), X, rtol=1e-9, atol=1e-12)


def test_alr_round_trip_with_interior_reference():
    rng = np.random.default_rng(9)
    X = random_compositions(rng, 5, 4)
    np.testing.assert_allclose(alr_inv(alr(X, ref=1), ref=1), X,
                               rtol=1e-9, atol=1e-12)


# --- zero replacement --------------------------------------------------

def test_zero_replace_hand_values():
    out = zero_replace([[0.0, 0.4, 0.6], [0.2, 0.8, 0.0]])
    assert out.replacement == pytest.approx(0.1, abs=0.0)
    np.testing.assert_allclose(
        out.values,
        np.array([[0.1, 0.4, 0.6], [0.2, 0.8, 0.1]]) / 1.1,
        rtol=0.0, atol=1e-15)
    np.testing.assert_array_equal(
        out.mask, [[True, False, False], [False, False, True]])
    assert out.renormalized


def test_zero_replace_half_smallest_positive():
    data = [[0.0026, 0.9974, 0.0], [0.5, 0.25, 0.25]]
    out = zero_replace(data)
    assert out.replacement == pytest.approx(0.0013, abs=1e-18)


def test_zero_replace_without_renormalization():
    out = zero_replace([[0.0, 0.5, 0.5]], renormalize=False)
    np.testing.assert_array_equal(out.values, [[0.25, 0.5, 0.5]])
    assert not out.renormalized


def test_zero_replace_rejects_bad_input():
    with pytest.raises(AllZeroMatrix):
        zero_replace(np.zeros((2, 2)))
    with pytest.raises(NonPositiveEntry):
        zero_replace(np.array([[-0.5, 1.5]]))
    with pytest.raises(ValidationError):
        zero_replace([[0.0, 1.0]], factor=0.0)


# --- PCA ---------------------------------------------------------------

def test_transform_spec_validation():
    with pytest.raises(ValidationError):
        TransformSpec("sqrt")
    with pytest.raises(ValidationError):
        TransformSpec("power", exponent=-1.0)
    assert TransformSpec("clr").is_logratio
    assert not TransformSpec("identity").is_logratio


def test_pca_requires_two_rows():
    with pytest.raises(EmptyDataset):
        pca([[0.5, 0.5]])


def test_pca_eigenvalues_descend_and_match_total_variance():
    rng = np.random.default_rng(3)
    X = random_compositions(rng, 25, 4)
    result = pca(X)
    assert np.all(np.diff(result.eigenvalues) <= 1e-15)
    assert result.eigenvalues.min() >= 0.0
    centered = X - X.mean(axis=0)
    total = float((centered ** 2).sum()) / (len(X) - 1)
    assert float(result.eigenvalues.sum()) == pytest.approx(total, rel=1e-10)


def test_pca_components_are_orthonormal_with_positive_peaks():
    rng = np.random.default_rng(7)
    X = random_compositions(rng, 20, 5)
    result = pca(X)
    np.testing.assert_allclose(result.components @ result.components.T,
                               np.eye(5), rtol=0.0, atol=1e-10)
    for row in result.components:
        assert row[int(np.argmax(np.abs(row)))] > 0.0


def test_pca_scores_reproduce_the_data_at_full_rank():
    rng = np.random.default_rng(11)
    X = random_compositions(rng, 15, 4)
    for kind in ("identity", "power", "clr", "alr", "ilr"):
        result = pca(X, TransformSpec(kind))
        np.testing.assert_allclose(result.approximations[-1],
                                   result.approximations[0]
                                   + result.scores @ result.components,
                                   rtol=0.0, atol=1e-12)


def test_identity_pca_full_rank_recovers_input():
    rng = np.random.default_rng(13)
    X = random_compositions(rng, 12, 4)
    result = pca(X)
    np.testing.assert_allclose(result.approximations[-1], X,
                               rtol=0.0, atol=1e-12)


def test_log_ratio_pca_simplex_approximations_recover_input():
    rng = np.random.default_rng(17)
    X = random_compositions(rng, 12, 4)
    for kind in ("clr", "alr", "ilr"):
        result = pca(X, TransformSpec(kind))
        assert len(result.simplex_approximations) == result.n_components + 1
        np.testing.assert_allclose(result.simplex_approximations[-1], X,
                                   rtol=0.0, atol=1e-10)


def test_clr_pca_keeps_unit_vector_in_null_space():
    rng = np.random.default_rng(19)
    X = random_compositions(rng, 30, 4)
    result = pca(X, TransformSpec("clr"))
    assert result.eigenvalues[-1] <= 1e-10
    last = result.components[-1]
    cosine = abs(float(last @ np.ones(4))) / np.sqrt(4.0)
    assert np.arccos(min(cosine, 1.0)) <= 1e-6


def test_clr_and_ilr_share_their_nonzero_spectrum():
    rng = np.random.default_rng(23)
    X = random_compositions(rng, 30, 5)
    by_clr = pca(X, TransformSpec("clr")).eigenvalues[:-1]
    by_ilr = pca(X, TransformSpec("ilr")).eigenvalues
    np.testing.assert_allclose(by_clr, by_ilr, rtol=0.0, atol=1e-9)


def test_identity_pca_flags_out_of_simplex_approximations():
    data = generate_example1(42)
    result = pca(data.values)
    counts = [int(flags.sum()) for flags in result.out_of_simplex]
    # the rank-1 line overshoots the simplex for the corner clusters;
    # rank 0 is the mean and full rank reproduces the data, both inside
    assert counts == [0, 14, 0, 0]


def test_power_pca_hyperplane_projections_sum_to_one():
    rng = np.random.default_rng(31)
    X = random_compositions(rng, 10, 3)
    result = pca(X, TransformSpec("power"))
    assert result.hyperplane_projections is not None
    for plane in result.hyperplane_projections:
        np.testing.assert_allclose(plane.sum(axis=1), 1.0, rtol=0.0, atol=1e-12)
    assert len(result.out_of_simplex) == len(result.hyperplane_projections)


def test_pca_zero_replacement_only_when_needed():
    rng = np.random.default_rng(37)
    X = random_compositions(rng, 10, 3)
    assert pca(X, TransformSpec("clr")).zero_replacement is None
    withzeros = X.copy()
    withzeros[0, 0] = 0.0
    withzeros /= withzeros.sum(axis=1, keepdims=True)
    result = pca(withzeros, TransformSpec("clr"))
    assert result.zero_replacement is not None
    assert result.zero_replacement.replacement == pytest.approx(
        0.5 * withzeros[withzeros > 0.0].min(), rel=1e-15)
    # identity PCA never substitutes
    assert pca(withzeros).zero_replacement is None


def test_part_loadings_shapes():
    rng = np.random.default_rng(41)
    X = random_compositions(rng, 10, 4)
    for kind in ("identity", "power", "clr", "alr", "ilr"):
        result = pca(X, TransformSpec(kind))
        loadings = result.part_loadings(4)
        assert loadings.shape == (result.n_components, 4)
    by_alr = pca(X, TransformSpec("alr"))
    assert np.all(by_alr.part_loadings(4)[:, -1] == 0.0)
