import numpy as np
import pytest

from _support import lapack_bounds, random_frame
from wovenframes import (
    Bounds,
    Frame,
    analysis_matrix,
    apply_operator,
    canonical_dual,
    canonical_tight,
    frame_operator,
    gram_matrix,
    optimal_bounds,
    synthesis_matrix,
)
from wovenframes.errors import DimensionError, NotAFrameError
from wovenframes.fixtures import planar_bank
from wovenframes.frames import reconstruct

F = planar_bank().frame("F")
G = planar_bank().frame("G")
ONB = Frame(np.eye(2))


def test_analysis_matrix():
    np.testing.assert_array_equal(analysis_matrix(ONB), np.eye(2))
    np.testing.assert_array_equal(analysis_matrix(F), [[2, 0], [-1, 2], [0, 3]])
    np.testing.assert_array_equal(analysis_matrix(Frame([[0.0, 0.0]])), [[0, 0]])
    np.testing.assert_array_equal(synthesis_matrix(F), analysis_matrix(F).T)


def test_analysis_gives_inner_products():
    f = np.array([0.3, -1.7])
    np.testing.assert_allclose(analysis_matrix(F) @ f, [f @ v for v in F.vectors])


def test_frame_operator_examples():
    np.testing.assert_array_equal(frame_operator(ONB), np.eye(2))
    np.testing.assert_array_equal(frame_operator(F), [[5, -2], [-2, 13]])
    np.testing.assert_array_equal(frame_operator(G), [[8, 2], [2, 5]])


def test_gram_examples():
    np.testing.assert_array_equal(gram_matrix(ONB), np.eye(2))
    np.testing.assert_array_equal(gram_matrix(Frame([[1.0, 0.0], [1.0, 0.0]])), [[1, 1], [1, 1]])
    np.testing.assert_array_equal(gram_matrix(G), [[4, 4, 0], [4, 5, 2], [0, 2, 4]])


def test_optimal_bounds_examples():
    b = optimal_bounds(G)
    assert b.lower == pytest.approx(4, abs=1e-12) and b.upper == pytest.approx(9, abs=1e-12)
    b = optimal_bounds(F)
    assert b.lower == pytest.approx(9 - 2 * np.sqrt(5), abs=1e-12)
    assert b.upper == pytest.approx(9 + 2 * np.sqrt(5), abs=1e-12)
    # the coarser bounds 4 and 17 remain valid
    assert 4 <= b.lower and b.upper <= 17
    b = optimal_bounds(ONB)
    assert b.is_parseval and b.is_tight and b.is_frame


def test_bounds_flags():
    assert not Bounds(0.0, 0.0).is_frame
    assert Bounds(2.0, 2.0).is_tight and not Bounds(2.0, 2.0).is_parseval
    assert not Bounds(1.0, 2.0).is_tight
    with pytest.raises(ValueError):
        Bounds(2.0, 1.0)
    with pytest.raises(ValueError):
        Bounds(-1.0, 1.0)


def test_zero_family_is_bessel_not_frame():
    b = optimal_bounds(Frame(np.zeros((3, 2))))
    assert b == Bounds(0.0, 0.0) and not b.is_frame


def test_frame_validation():
    with pytest.raises(DimensionError):
        Frame(np.zeros((0, 2)))
    with pytest.raises(DimensionError):
        Frame.from_vectors([[1.0, 0.0], [1.0]])
    assert Frame.from_vectors([[1, 2], [3, 4]]) == Frame(np.array([[1.0, 2.0], [3.0, 4.0]]))


def test_random_frame_identities():
    rng = np.random.default_rng(20)
    for _ in range(200):
        d, n = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        fr = Frame(rng.normal(size=(n, d)))
        u = analysis_matrix(fr)
        np.testing.assert_array_equal(frame_operator(fr), u.T @ u)
        s_eigs = np.linalg.eigvalsh(frame_operator(fr))
        g_eigs = np.linalg.eigvalsh(gram_matrix(fr))
        k = min(n, d)
        np.testing.assert_allclose(s_eigs[-k:], g_eigs[-k:], atol=1e-8)


def test_bounds_hold_on_random_unit_vectors():
    rng = np.random.default_rng(21)
    for _ in range(30):
        d, n = int(rng.integers(1, 5)), int(rng.integers(1, 8))
        fr = Frame(rng.normal(size=(n, d)))
        b = optimal_bounds(fr)
        f = rng.normal(size=(100, d))
        f /= np.linalg.norm(f, axis=1, keepdims=True)
        energy = np.sum((f @ fr.vectors.T) ** 2, axis=1)
        assert np.all(energy >= b.lower - 1e-9)
        assert np.all(energy <= b.upper + 1e-9)
        lo, hi = lapack_bounds(fr.vectors)
        assert b.lower == pytest.approx(max(lo, 0), abs=1e-10 * (1 + hi))
        assert b.upper == pytest.approx(hi, abs=1e-10 * (1 + hi))


def test_canonical_dual_examples():
    np.testing.assert_allclose(canonical_dual(ONB).vectors, ONB.vectors, atol=1e-15)
    tight = Frame(np.vstack([np.eye(2), np.eye(2)]) * np.sqrt(3))  # bound 6
    np.testing.assert_allclose(canonical_dual(tight).vectors, tight.vectors / 6, atol=1e-15)
    np.testing.assert_allclose(canonical_dual(G).vectors[0], [10 / 36, -4 / 36], atol=1e-15)


def test_dual_reconstruction_both_sides():
    rng = np.random.default_rng(22)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        fr = Frame(random_frame(rng, d, int(rng.integers(d, d + 4))))
        dual = canonical_dual(fr)
        f = rng.normal(size=d)
        tol = 1e-8 * np.linalg.norm(f)
        assert np.linalg.norm(reconstruct(f, fr, dual) - f) <= tol
        assert np.linalg.norm(reconstruct(f, dual, fr) - f) <= tol


def test_canonical_tight():
    np.testing.assert_allclose(canonical_tight(ONB).vectors, ONB.vectors, atol=1e-15)
    tight = Frame(np.vstack([np.eye(2), np.eye(2)]) * np.sqrt(3))
    np.testing.assert_allclose(canonical_tight(tight).vectors, tight.vectors / np.sqrt(6), atol=1e-15)
    b = optimal_bounds(canonical_tight(G))
    assert abs(b.lower - 1) <= 1e-8 and abs(b.upper - 1) <= 1e-8
    rng = np.random.default_rng(23)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        b = optimal_bounds(canonical_tight(random_frame(rng, d, int(rng.integers(d, d + 4)))))
        assert max(abs(b.lower - 1), abs(b.upper - 1)) <= 1e-8


def test_dual_of_non_frame():
    with pytest.raises(NotAFrameError) as info:
        canonical_dual(Frame([[1.0, 0.0], [2.0, 0.0]]))
    assert info.value.lambda_min == pytest.approx(0, abs=1e-12)
    with pytest.raises(NotAFrameError):
        canonical_tight(Frame(np.zeros((2, 2))))


def test_apply_operator():
    assert apply_operator(np.eye(2), G) == G
    b = optimal_bounds(apply_operator(2 * np.eye(2), ONB))
    assert b.lower == pytest.approx(4) and b.upper == pytest.approx(4)
    swapped = apply_operator([[0.0, 1.0], [1.0, 0.0]], G)
    np.testing.assert_array_equal(frame_operator(swapped), [[5, 2], [2, 8]])
    with pytest.raises(DimensionError):
        apply_operator(np.eye(3), G)


def test_apply_operator_conjugates_frame_operator():
    rng = np.random.default_rng(24)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        fr = Frame(rng.normal(size=(int(rng.integers(1, 7)), d)))
        e = rng.normal(size=(d, d))
        expected = e @ frame_operator(fr) @ e.T
        got = frame_operator(apply_operator(e, fr))
        assert np.abs(got - expected).max() <= 1e-9 * (1 + np.abs(expected).max())
