import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import eig2_closed
from wovenframes.errors import ConvergenceError, DataError, DimensionError, SingularityError
from wovenframes.linalg import (
    extreme_eigenvalues,
    jacobi_eigh,
    operator_norms,
    rank_tol,
    spectral_apply,
    sym_eigen,
)


def test_two_by_two_known_roots():
    dec = sym_eigen([[5.0, -2.0], [-2.0, 13.0]])
    np.testing.assert_allclose(dec.eigenvalues, [9 - 2 * np.sqrt(5), 9 + 2 * np.sqrt(5)], atol=1e-12)


def test_identity_and_diagonal():
    np.testing.assert_array_equal(sym_eigen(np.eye(2)).eigenvalues, [1.0, 1.0])
    dec = sym_eigen(np.diag([7.0, 2.0]))
    np.testing.assert_array_equal(dec.eigenvalues, [2.0, 7.0])
    np.testing.assert_allclose(np.abs(dec.eigenvectors), [[0, 1], [1, 0]])


def test_one_by_one():
    dec = sym_eigen([[3.5]])
    assert dec.lambda_min == dec.lambda_max == 3.5


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite)
def test_matches_quadratic_roots(a, b, c):
    lo, hi = eig2_closed(a, b, c)
    w = sym_eigen([[a, b], [b, c]]).eigenvalues
    scale = 1 + max(abs(a), abs(b), abs(c))
    assert abs(w[0] - lo) <= 1e-13 * scale
    assert abs(w[1] - hi) <= 1e-13 * scale


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 13])
def test_decomposition_invariants(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        a = rng.normal(size=(d, d)) * rng.uniform(0.1, 100)
        a = a + a.T
        dec = sym_eigen(a)
        q = dec.eigenvectors
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.abs(q.T @ q - np.eye(d)).max() <= 1e-10
        assert np.abs(dec.reconstruct() - a).max() <= 1e-9 * (1 + np.abs(a).max())
        np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10 * (1 + np.abs(a).max()))


def test_stack_matches_single_calls():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(40, 4, 4))
    a = a + a.transpose(0, 2, 1)
    w, v = jacobi_eigh(a)
    for k in range(40):
        np.testing.assert_allclose(w[k], sym_eigen(a[k]).eigenvalues, atol=1e-12)
    lo, hi = extreme_eigenvalues(a)
    np.testing.assert_array_equal(lo, w[:, 0])
    np.testing.assert_array_equal(hi, w[:, -1])


def test_small_asymmetry_is_absorbed():
    a = np.array([[2.0, 1.0 + 1e-10], [1.0, 2.0]])
    np.testing.assert_allclose(sym_eigen(a).eigenvalues, [1.0, 3.0], atol=1e-9)


def test_large_asymmetry_rejected():
    with pytest.raises(DataError):
        sym_eigen([[2.0, 1.0], [0.0, 2.0]])


def test_shape_and_value_errors():
    with pytest.raises(DimensionError):
        sym_eigen(np.ones((2, 3)))
    with pytest.raises(DataError):
        sym_eigen([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(DimensionError):
        operator_norms(np.ones((2, 3)))


def test_sweep_cap(monkeypatch):
    import wovenframes.linalg as la

    monkeypatch.setattr(la, "MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError):
        sym_eigen([[1.0, 0.5], [0.5, 2.0]])


def test_spectral_apply_examples():
    np.testing.assert_allclose(spectral_apply(np.eye(2), "inv_sqrt"), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(spectral_apply(np.diag([4.0, 9.0]), "inv_sqrt"), np.diag([0.5, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(
        spectral_apply([[8.0, 2.0], [2.0, 5.0]], "inverse"),
        np.array([[5.0, -2.0], [-2.0, 8.0]]) / 36,
        atol=1e-15,
    )


def test_spectral_apply_properties():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = int(rng.integers(1, 6))
        b = rng.normal(size=(d, d + 2))
        a = b @ b.T
        inv = spectral_apply(a, "inverse")
        assert np.abs(inv @ a - np.eye(d)).max() <= 1e-8
        root = spectral_apply(a, "inv_sqrt")
        assert np.abs(root - root.T).max() == 0
        assert np.linalg.eigvalsh(root)[0] > 0
        assert np.abs(root @ root @ a - np.eye(d)).max() <= 1e-7


def test_spectral_apply_singular():
    with pytest.raises(SingularityError) as info:
        spectral_apply(np.diag([1.0, 0.0]), "inverse")
    assert info.value.lambda_min == 0.0
    with pytest.raises(ValueError):
        spectral_apply(np.eye(2), "log")


def test_rank_tol_is_relative():
    assert rank_tol(0.5) == 1e-12
    assert rank_tol(1e6) == pytest.approx(1e-6)


def test_operator_norms():
    assert operator_norms(np.eye(2)) == (1.0, 1.0)
    norm, inv = operator_norms(3 * np.eye(2))
    assert norm == pytest.approx(3) and inv == pytest.approx(1 / 3)
    assert operator_norms([[1.0, 0.0], [0.0, 0.0]]) == (1.0, None)


def test_operator_norms_against_svd():
    rng = np.random.default_rng(5)
    for _ in range(50):
        e = rng.normal(size=(3, 3))
        s = np.linalg.svd(e, compute_uv=False)
        norm, inv = operator_norms(e)
        assert norm == pytest.approx(s[0], rel=1e-10)
        assert inv == pytest.approx(1 / s[-1], rel=1e-8)
