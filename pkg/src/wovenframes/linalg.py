"""Dense real linear algebra kernel.

Vectors and matrices are plain float64 numpy arrays. The symmetric
eigensolver is a cyclic Jacobi iteration that also runs on stacks of
matrices, which is what makes exhaustive scans over many weavings cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, DimensionError, SingularityError

RANK_RTOL = 1e-12
SYMMETRY_RTOL = 1e-8
JACOBI_RTOL = 1e-12
MAX_SWEEPS = 100


def rank_tol(lambda_max: float) -> float:
    """Relative threshold below which an eigenvalue counts as zero."""
    return RANK_RTOL * max(1.0, float(lambda_max))


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DataError("vector has non-finite entries")
    return v


def as_matrix(a, square: bool = False) -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DataError("matrix has non-finite entries")
    return m


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _readonly(self.eigenvectors))

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def _check_symmetric_stack(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    at = np.swapaxes(a, -1, -2)
    scale = np.abs(a).max(axis=(-2, -1)) if a.size else np.zeros(a.shape[:-2])
    defect = np.abs(a - at).max(axis=(-2, -1)) if a.size else np.zeros(a.shape[:-2])
    if np.any(defect > SYMMETRY_RTOL * (1.0 + scale)):
        raise DataError(
            f"matrix is not symmetric (defect {float(np.max(defect)):.3e})"
        )
    return 0.5 * (a + at)


def jacobi_eigh(stack) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a stack of symmetric matrices of shape (k, d, d).

    Returns ``(w, v)`` with ``w`` of shape (k, d) sorted ascending and
    ``v`` of shape (k, d, d) holding eigenvectors as columns. Every member
    of the stack is rotated on every step; members that have already
    converged see rotations with zero angle.
    """
    a = np.array(stack, dtype=np.float64)
    if a.ndim != 3:
        raise DimensionError(f"expected a (k, d, d) stack, got shape {a.shape}")
    a = _check_symmetric_stack(a)
    k, d, _ = a.shape
    v = np.broadcast_to(np.eye(d), (k, d, d)).copy()
    if k == 0:
        return np.zeros((0, d)), v

    limit = JACOBI_RTOL * (1.0 + np.sqrt(np.einsum("kij,kij->k", a, a)))
    off_mask = ~np.eye(d, dtype=bool)

    def off_norm(m):
        return np.sqrt(np.sum(m[:, off_mask] ** 2, axis=1))

    # the first sweep always runs, so 2x2 inputs are diagonalized exactly
    sweeps = 0
    while sweeps == 0 or np.any(off_norm(a) > limit):
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                # subnormal apq overflows theta to inf, which yields t = 0
                with np.errstate(over="ignore", invalid="ignore"):
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc, ss = c[:, None], s[:, None]

                col_p = a[:, :, p].copy()
                col_q = a[:, :, q]
                a[:, :, p] = cc * col_p - ss * col_q
                a[:, :, q] = ss * col_p + cc * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :]
                a[:, p, :] = cc * row_p - ss * row_q
                a[:, q, :] = ss * row_p + cc * row_q
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = cc * vp - ss * vq
                v[:, :, q] = ss * vp + cc * vq

    w = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def sym_eigen(a) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix.

    Inputs whose symmetry defect is within ``1e-8 * (1 + max|A|)`` are
    symmetrized first; larger defects raise :class:`DataError`.

    >>> sym_eigen([[2.0, 0.0], [0.0, 7.0]]).eigenvalues
    array([2., 7.])
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise DimensionError("empty matrix")
    w, v = jacobi_eigh(m[None])
    return SpectralDecomposition(w[0], v[0])


def extreme_eigenvalues(stack) -> tuple[np.ndarray, np.ndarray]:
    """Smallest and largest eigenvalue of every matrix in a (k, d, d) stack."""
    w, _ = jacobi_eigh(stack)
    return w[:, 0], w[:, -1]


_SPECTRAL_FUNCTIONS = {
    "inverse": lambda lam: 1.0 / lam,
    "inv_sqrt": lambda lam: 1.0 / np.sqrt(lam),
}


def spectral_apply(a, func: str) -> np.ndarray:
    """Apply ``inverse`` or ``inv_sqrt`` to a symmetric positive definite matrix."""
    try:
        phi = _SPECTRAL_FUNCTIONS[func]
    except KeyError:
        raise ValueError(f"unknown spectral function {func!r}") from None
    dec = sym_eigen(a)
    if dec.lambda_min <= rank_tol(dec.lambda_max):
        raise SingularityError(
            f"cannot apply {func}: matrix is not positive definite", dec.lambda_min
        )
    q = dec.eigenvectors
    out = (q * phi(dec.eigenvalues)) @ q.T
    return 0.5 * (out + out.T)


def operator_norms(e) -> tuple[float, float | None]:
    """Return ``(||E||, ||E^-1||)``; the second entry is None for singular E."""
    e = as_matrix(e, square=True)
    dec = sym_eigen(e.T @ e)
    lam_min = max(dec.lambda_min, 0.0)
    lam_max = max(dec.lambda_max, 0.0)
    norm = float(np.sqrt(lam_max))
    if lam_min > rank_tol(lam_max):
        return norm, float(1.0 / np.sqrt(lam_min))
    return norm, None
