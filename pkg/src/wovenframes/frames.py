"""Finite frames and their operators.

A frame here is an ordered family of ``n`` vectors in ``R^d``, stored as
an ``(n, d)`` array whose rows are the frame vectors. That array is the
analysis matrix: applied to ``f`` it yields the coefficients
``<f, f_i>``; its transpose is the synthesis matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotAFrameError, SingularityError
from .linalg import as_matrix, rank_tol, spectral_apply, sym_eigen

PARSEVAL_TOL = 1e-9
TIGHT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Frame:
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionError(f"frame needs an (n, d) array with n, d >= 1, got {v.shape}")
        as_matrix(v)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_vectors(cls, vectors, dim: int | None = None) -> "Frame":
        rows = [np.asarray(x, dtype=np.float64) for x in vectors]
        if not rows:
            raise DimensionError("a frame needs at least one vector")
        d = dim if dim is not None else rows[0].shape[0]
        for i, r in enumerate(rows):
            if r.shape != (d,):
                raise DimensionError(f"vector {i} has length {r.size}, expected {d}")
        return cls(np.stack(rows))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.vectors[i]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(
            np.array_equal(self.vectors, other.vectors)
        )

    def __hash__(self):
        return hash((self.vectors.shape, self.vectors.tobytes()))


@dataclass(frozen=True)
class Bounds:
    """Lower and upper frame bounds."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, up = float(self.lower), float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(up)) or lo < 0 or up < lo:
            raise ValueError(f"invalid bounds ({lo}, {up})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def is_frame(self) -> bool:
        return self.lower > rank_tol(self.upper)

    @property
    def is_parseval(self) -> bool:
        return max(abs(self.lower - 1.0), abs(self.upper - 1.0)) <= PARSEVAL_TOL

    @property
    def is_tight(self) -> bool:
        return self.upper - self.lower <= TIGHT_RTOL * (1.0 + self.upper)

    def contains(self, other: "Bounds", rtol: float = 0.0) -> bool:
        """True when ``other`` lies inside this interval (with relative slack)."""
        slack = rtol * max(1.0, self.upper)
        return other.lower >= self.lower - slack and other.upper <= self.upper + slack


def _frame(f) -> Frame:
    return f if isinstance(f, Frame) else Frame(f)


def analysis_matrix(frame) -> np.ndarray:
    """Matrix of the analysis operator; row ``i`` is ``f_i``."""
    return np.array(_frame(frame).vectors)


def synthesis_matrix(frame) -> np.ndarray:
    return analysis_matrix(frame).T


def frame_operator(frame) -> np.ndarray:
    u = _frame(frame).vectors
    return u.T @ u


def gram_matrix(frame) -> np.ndarray:
    u = _frame(frame).vectors
    return u @ u.T


def bounds_from_operator(s) -> Bounds:
    dec = sym_eigen(s)
    # round-off can push the smallest eigenvalue of a PSD matrix slightly negative
    lo = max(dec.lambda_min, 0.0)
    return Bounds(lo, max(dec.lambda_max, lo))


def optimal_bounds(frame) -> Bounds:
    """Extreme eigenvalues of the frame operator, the tightest frame bounds."""
    return bounds_from_operator(frame_operator(frame))


def is_frame(frame) -> bool:
    return optimal_bounds(frame).is_frame


def _apply_spectral(s, func):
    try:
        return spectral_apply(s, func)
    except SingularityError as exc:
        raise NotAFrameError("family does not span the space", exc.lambda_min) from None


def canonical_dual(frame) -> Frame:
    """The canonical dual ``{S^-1 f_i}``."""
    frame = _frame(frame)
    s_inv = _apply_spectral(frame_operator(frame), "inverse")
    return Frame(frame.vectors @ s_inv.T)


def canonical_tight(frame) -> Frame:
    """The Parseval frame ``{S^-1/2 f_i}``."""
    frame = _frame(frame)
    root = _apply_spectral(frame_operator(frame), "inv_sqrt")
    return Frame(frame.vectors @ root.T)


def apply_operator(e, frame) -> Frame:
    """Push every frame vector through the square matrix ``e``."""
    frame = _frame(frame)
    e = as_matrix(e, square=True)
    if e.shape[0] != frame.dim:
        raise DimensionError(f"operator of side {e.shape[0]} applied to a {frame.dim}-d frame")
    return Frame(frame.vectors @ e.T)


def reconstruct(f, frame, dual=None) -> np.ndarray:
    """Rebuild ``f`` as ``sum <f, dual_i> f_i`` (canonical dual by default)."""
    frame = _frame(frame)
    dual = canonical_dual(frame) if dual is None else _frame(dual)
    coeffs = dual.vectors @ np.asarray(f, dtype=np.float64)
    return frame.vectors.T @ coeffs
