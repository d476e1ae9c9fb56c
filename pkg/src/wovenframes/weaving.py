"""Woven frames: banks of frames over a shared index set, their weavings,
universal bounds, the woven operators and the constructions built on them.

Vector ``f_ij`` (index ``i``, frame ``j``) lives at ``bank.vectors[j, i]``.
A partition assigns every index to one frame; the weaving picks
``f_{i, assignment[i]}`` for each ``i``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BundleError,
    CapacityError,
    DimensionError,
    EmptyIntersectionError,
    InvertibilityError,
    NotAFrameError,
    PartitionError,
    SingularityError,
    SubspaceError,
)
from .frames import Bounds, Frame, bounds_from_operator, frame_operator
from .linalg import (
    RANK_RTOL,
    as_matrix,
    extreme_eigenvalues,
    operator_norms,
    rank_tol,
    spectral_apply,
    sym_eigen,
)

DEFAULT_ENUM_CAP = 2**24
CHUNK = 1 << 15
ORTHONORMAL_TOL = 1e-10
INTERSECTION_TOL = 1e-8


def enumeration_cap() -> int:
    """Exhaustive enumeration cap, overridable through ``WOVEN_ENUM_CAP``."""
    raw = os.environ.get("WOVEN_ENUM_CAP")
    if raw is None or not raw.strip():
        return DEFAULT_ENUM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"WOVEN_ENUM_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError("WOVEN_ENUM_CAP must be positive")
    return cap


# -- data types --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrameBank:
    """``m`` frames of ``n`` vectors each in ``R^d``; array shape (m, n, d)."""

    vectors: np.ndarray
    names: tuple = None

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim != 3 or min(v.shape) < 1:
            raise DimensionError(f"bank needs an (m, n, d) array with all sides >= 1, got {v.shape}")
        as_matrix(v.reshape(-1, v.shape[2]))
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        names = self.names
        if names is None:
            names = tuple(f"F{j}" for j in range(v.shape[0]))
        names = tuple(str(x) for x in names)
        if len(names) != v.shape[0]:
            raise DimensionError(f"{len(names)} names for {v.shape[0]} frames")
        if len(set(names)) != len(names):
            raise ValueError(f"frame names must be unique: {names}")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_frames(cls, frames: Sequence, names=None) -> "FrameBank":
        frames = [f if isinstance(f, Frame) else Frame(f) for f in frames]
        if not frames:
            raise DimensionError("a bank needs at least one frame")
        shape = frames[0].vectors.shape
        for j, f in enumerate(frames):
            if f.vectors.shape != shape:
                raise DimensionError(
                    f"frame {j} has shape {f.vectors.shape}, expected {shape}"
                )
        return cls(np.stack([f.vectors for f in frames]), names)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[2]

    @property
    def frames(self) -> tuple:
        return tuple(Frame(self.vectors[j]) for j in range(self.m))

    def frame(self, key) -> Frame:
        j = self.names.index(key) if isinstance(key, str) else int(key)
        return Frame(self.vectors[j])

    def map(self, matrix) -> "FrameBank":
        """Bank with every vector pushed through ``matrix`` (rows of the result may change dim)."""
        matrix = as_matrix(matrix)
        if matrix.shape[1] != self.dim:
            raise DimensionError(f"operator with {matrix.shape[1]} columns applied to a {self.dim}-d bank")
        return FrameBank(self.vectors @ matrix.T, self.names)

    def __eq__(self, other):
        if not isinstance(other, FrameBank):
            return NotImplemented
        return (
            self.names == other.names
            and self.vectors.shape == other.vectors.shape
            and bool(np.array_equal(self.vectors, other.vectors))
        )

    def __hash__(self):
        return hash((self.names, self.vectors.shape, self.vectors.tobytes()))


@dataclass(frozen=True)
class Partition:
    """Assignment of each index ``i`` to the block (frame) ``assignment[i]``."""

    assignment: tuple

    def __post_init__(self):
        a = tuple(int(x) for x in self.assignment)
        if not a:
            raise PartitionError("partition of an empty index set")
        if min(a) < 0:
            raise PartitionError(f"negative block label in {a}")
        object.__setattr__(self, "assignment", a)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        try:
            return cls(tuple(int(tok) for tok in text.split(",")))
        except ValueError:
            raise PartitionError(f"cannot parse partition {text!r}") from None

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: int) -> "Partition":
        """Build from index sets; indices covered by no block go to block 0."""
        a = [0] * n
        seen = set()
        for j, block in enumerate(blocks):
            for i in block:
                if i in seen or not 0 <= i < n:
                    raise PartitionError(f"index {i} repeated or out of range")
                seen.add(i)
                a[i] = j
        return cls(tuple(a))

    def __len__(self):
        return len(self.assignment)

    def blocks(self, m: int) -> list:
        out = [[] for _ in range(m)]
        for i, j in enumerate(self.assignment):
            out[j].append(i)
        return out

    def __str__(self):
        return ",".join(str(x) for x in self.assignment)


@dataclass(frozen=True, eq=False)
class CoefficientBundle:
    """Coefficients ``c_ij`` grouped by frame ``j``.

    The flat view concatenates the blocks in frame order, each block in
    ascending index order.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=np.float64).reshape(-1) for b in self.blocks)
        for b in blocks:
            if not np.all(np.isfinite(b)):
                raise BundleError("coefficients must be finite")
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_flat(cls, flat, n: int, m: int) -> "CoefficientBundle":
        flat = np.asarray(flat, dtype=np.float64).reshape(-1)
        if flat.size != n * m:
            raise BundleError(f"flat coefficient vector of length {flat.size}, expected {n * m}")
        return cls(tuple(flat[j * n:(j + 1) * n] for j in range(m)))

    @property
    def flat(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate(self.blocks)

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat))

    def inner(self, other: "CoefficientBundle") -> float:
        a, b = self.flat, other.flat
        if a.shape != b.shape:
            raise BundleError("bundles of different length")
        return float(a @ b)


@dataclass(frozen=True)
class WovenCertificate:
    universal_lower: float
    universal_upper: float
    partitions_checked: int
    mode: str
    witness_lower: Partition
    witness_upper: Partition
    is_woven: bool
    table: tuple = field(default=None, compare=False, repr=False)

    @property
    def bounds(self) -> Bounds:
        return Bounds(self.universal_lower, self.universal_upper)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``R^d`` given by a ``(d, k)`` matrix with orthonormal columns."""

    basis: np.ndarray

    def __post_init__(self):
        b = as_matrix(self.basis).copy()
        defect = np.abs(b.T @ b - np.eye(b.shape[1])).max()
        if defect > ORTHONORMAL_TOL:
            raise SubspaceError(f"basis columns are not orthonormal (defect {defect:.3e})")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_columns(cls, columns, tol: float = 1e-6) -> "Subspace":
        """Accept nearly orthonormal columns and clean them up.

        Columns within ``tol`` of orthonormal are replaced by the closest
        orthonormal set, ``B (B^T B)^-1/2``; anything further off is rejected.
        """
        b = as_matrix(np.asarray(columns, dtype=np.float64).T)
        defect = np.abs(b.T @ b - np.eye(b.shape[1])).max()
        if defect > tol:
            raise SubspaceError(f"basis columns are not orthonormal (defect {defect:.3e})")
        if defect > 0:
            b = b @ spectral_apply(b.T @ b, "inv_sqrt")
        return cls(b)

    @classmethod
    def coordinate(cls, dim: int, axes: Sequence[int]) -> "Subspace":
        return cls(np.eye(dim)[:, list(axes)])

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @property
    def columns(self) -> np.ndarray:
        return self.basis.T


# -- weavings and enumeration -------------------------------------------------


def _check_partition(bank: FrameBank, p) -> np.ndarray:
    p = p if isinstance(p, Partition) else Partition(tuple(p))
    if len(p) != bank.n:
        raise PartitionError(f"partition has length {len(p)}, bank has n = {bank.n}")
    a = np.array(p.assignment)
    if a.max() >= bank.m:
        raise PartitionError(f"block label {a.max()} out of range for m = {bank.m}")
    return a


def weave(bank: FrameBank, p) -> Frame:
    """The weaving ``{f_{i, p[i]}}`` as an ``n``-vector frame."""
    a = _check_partition(bank, p)
    return Frame(bank.vectors[a, np.arange(bank.n)])


def partition_count(n: int, m: int) -> int:
    return m**n


def enumerate_partitions(n: int, m: int, cap: int | None = None) -> Iterator[Partition]:
    """All ``m**n`` partitions, ordered as a base-``m`` counter whose least
    significant digit is index 0."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    cap = enumeration_cap() if cap is None else cap
    total = partition_count(n, m)
    if total > cap:
        raise CapacityError(total, cap)
    a = [0] * n
    for _ in range(total):
        yield Partition(tuple(a))
        for i in range(n):
            a[i] += 1
            if a[i] < m:
                break
            a[i] = 0


def _assignments(start: int, stop: int, n: int, m: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=np.int64)
    return (k[:, None] // (m ** np.arange(n, dtype=np.int64))) % m


def _weaving_bounds(bank: FrameBank, assignments: np.ndarray):
    picked = bank.vectors[assignments, np.arange(bank.n)]
    ops = np.einsum("kni,knj->kij", picked, picked)
    lo, hi = extreme_eigenvalues(ops)
    return np.maximum(lo, 0.0), np.maximum(hi, 0.0)


def _certificate(lo, hi, assignments_of, checked, mode, table=None) -> WovenCertificate:
    i_lo = int(np.argmin(lo))
    i_hi = int(np.argmax(hi))
    c, d = float(lo[i_lo]), float(hi[i_hi])
    return WovenCertificate(
        universal_lower=c,
        universal_upper=d,
        partitions_checked=int(checked),
        mode=mode,
        witness_lower=Partition(tuple(int(x) for x in assignments_of(i_lo))),
        witness_upper=Partition(tuple(int(x) for x in assignments_of(i_hi))),
        is_woven=c > RANK_RTOL * d,
        table=table,
    )


def universal_bounds_exhaustive(
    bank: FrameBank, cap: int | None = None, keep_table: bool = False
) -> WovenCertificate:
    """Universal bounds ``C = min lambda_min``, ``D = max lambda_max`` over every weaving.

    Ties for the witnesses resolve to the first partition in enumeration order.
    """
    cap = enumeration_cap() if cap is None else cap
    n, m = bank.n, bank.m
    total = partition_count(n, m)
    if total > cap:
        raise CapacityError(total, cap)
    los, his = [], []
    for start in range(0, total, CHUNK):
        lo, hi = _weaving_bounds(bank, _assignments(start, min(total, start + CHUNK), n, m))
        los.append(lo)
        his.append(hi)
    lo, hi = np.concatenate(los), np.concatenate(his)
    table = tuple(zip(lo.tolist(), hi.tolist())) if keep_table else None
    return _certificate(
        lo, hi, lambda k: _assignments(k, k + 1, n, m)[0], total, "exhaustive", table
    )


def universal_bounds_sampled(bank: FrameBank, trials: int, seed: int) -> WovenCertificate:
    """One-sided estimate of the universal bounds from random weavings.

    Each index picks its frame independently and uniformly using a Philox
    generator seeded with ``seed``. The estimate never undercuts the true
    lower bound nor exceeds the true upper bound.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.Generator(np.random.Philox(seed))
    chunks, los, his = [], [], []
    for start in range(0, trials, CHUNK):
        a = rng.integers(0, bank.m, size=(min(trials, start + CHUNK) - start, bank.n))
        lo, hi = _weaving_bounds(bank, a)
        chunks.append(a)
        los.append(lo)
        his.append(hi)
    a = np.concatenate(chunks)
    return _certificate(np.concatenate(los), np.concatenate(his), lambda k: a[k], trials, "sampled")


def weaving_bounds(bank: FrameBank, p) -> Bounds:
    return bounds_from_operator(frame_operator(weave(bank, p)))


# -- woven operators ------------------------------------------------------------


def concatenated_family(bank: FrameBank) -> Frame:
    """All ``n*m`` vectors, frame-major; the analysis matrix of this frame is ``U_F``."""
    return Frame(bank.vectors.reshape(bank.m * bank.n, bank.dim))


def woven_analysis(bank: FrameBank, f) -> CoefficientBundle:
    u = concatenated_family(bank).vectors
    return CoefficientBundle.from_flat(u @ np.asarray(f, dtype=np.float64), bank.n, bank.m)


def woven_synthesis(bank: FrameBank, c) -> np.ndarray:
    """``sum_ij c_ij f_ij`` for a bundle (or flat array) of ``n*m`` coefficients."""
    flat = c.flat if isinstance(c, CoefficientBundle) else np.asarray(c, dtype=np.float64).reshape(-1)
    if flat.size != bank.n * bank.m:
        raise BundleError(f"bundle has {flat.size} coefficients, expected {bank.n * bank.m}")
    return concatenated_family(bank).vectors.T @ flat


def woven_frame_operator(bank: FrameBank) -> np.ndarray:
    return frame_operator(concatenated_family(bank))


def synthesis_norm_bound(bank: FrameBank) -> tuple[float, float]:
    """``(||T_F||^2, sum_j lambda_max(S_j))``; the first never exceeds the second."""
    sq_norm = sym_eigen(woven_frame_operator(bank)).lambda_max
    total = sum(sym_eigen(frame_operator(f)).lambda_max for f in bank.frames)
    return sq_norm, total


def _map_through(bank: FrameBank, func: str) -> FrameBank:
    try:
        op = spectral_apply(woven_frame_operator(bank), func)
    except SingularityError as exc:
        raise NotAFrameError("woven frame operator is singular", exc.lambda_min) from None
    return bank.map(op)


def standard_dual_woven(bank: FrameBank) -> FrameBank:
    """``{S_F^-1 f_ij}``."""
    return _map_through(bank, "inverse")


def tighten_woven(bank: FrameBank) -> FrameBank:
    """``{S_F^-1/2 f_ij}``, whose concatenation is a Parseval frame."""
    return _map_through(bank, "inv_sqrt")


def transform_woven(e, bank: FrameBank, cap: int | None = None):
    """Apply an invertible ``e`` to every vector.

    Returns the new bank and the bounds ``(C ||E^-1||^-2, D ||E||^2)`` built
    from the exhaustive certificate of the input bank.
    """
    e = as_matrix(e, square=True)
    if e.shape[0] != bank.dim:
        raise DimensionError(f"operator of side {e.shape[0]} for a {bank.dim}-d bank")
    norm, inv_norm = operator_norms(e)
    if inv_norm is None:
        lam = sym_eigen(e.T @ e).lambda_min
        raise InvertibilityError("operator is not invertible", lam)
    cert = universal_bounds_exhaustive(bank, cap)
    lower, upper = cert.universal_lower / inv_norm**2, cert.universal_upper * norm**2
    # tight banks under near-orthogonal E can cross by one ulp
    bounds = Bounds(min(lower, upper), upper)
    return bank.map(e), bounds


def _check_pair(e1, bank_f: FrameBank, e2, bank_g: FrameBank):
    if bank_f.vectors.shape != bank_g.vectors.shape:
        raise DimensionError(
            f"banks differ in shape: {bank_f.vectors.shape} vs {bank_g.vectors.shape}"
        )
    e1, e2 = as_matrix(e1, square=True), as_matrix(e2, square=True)
    for e in (e1, e2):
        if e.shape[0] != bank_f.dim:
            raise DimensionError(f"operator of side {e.shape[0]} for a {bank_f.dim}-d bank")
    return e1, e2


def sum_bank(e1, bank_f: FrameBank, e2, bank_g: FrameBank) -> FrameBank:
    e1, e2 = _check_pair(e1, bank_f, e2, bank_g)
    return FrameBank(bank_f.vectors @ e1.T + bank_g.vectors @ e2.T, bank_f.names)


def sum_operator(e1, bank_f: FrameBank, e2, bank_g: FrameBank) -> np.ndarray:
    """Frame operator of ``{E1 f_ij + E2 g_ij}`` expanded in terms of the two banks."""
    e1, e2 = _check_pair(e1, bank_f, e2, bank_g)
    u_f = concatenated_family(bank_f).vectors
    u_g = concatenated_family(bank_g).vectors
    cross = e1 @ u_f.T @ u_g @ e2.T
    s = e1 @ (u_f.T @ u_f) @ e1.T + e2 @ (u_g.T @ u_g) @ e2.T + cross + cross.T
    return 0.5 * (s + s.T)


def sum_woven_check(e1, bank_f: FrameBank, e2, bank_g: FrameBank, cap: int | None = None):
    """Returns ``(sum bank, combined_rank_ok, certificate)``.

    ``combined_rank_ok`` is the injectivity test on ``U_F E1^T + U_G E2^T``:
    its smallest squared singular value must clear the rank threshold.
    """
    e1, e2 = _check_pair(e1, bank_f, e2, bank_g)
    k = concatenated_family(bank_f).vectors @ e1.T + concatenated_family(bank_g).vectors @ e2.T
    dec = sym_eigen(k.T @ k)
    ok = dec.lambda_min > rank_tol(dec.lambda_max)
    h = sum_bank(e1, bank_f, e2, bank_g)
    return h, bool(ok), universal_bounds_exhaustive(h, cap)


# -- subspaces ------------------------------------------------------------------


def project_bank(w: Subspace, bank: FrameBank, cap: int | None = None):
    """Project onto ``w`` and express the result in ``w``'s orthonormal coordinates."""
    if w.ambient_dim != bank.dim:
        raise DimensionError(f"subspace of R^{w.ambient_dim} for a {bank.dim}-d bank")
    projected = bank.map(w.basis.T)
    return projected, universal_bounds_exhaustive(projected, cap)


def subspace_intersection(v: Subspace, w: Subspace) -> Subspace:
    """Orthonormal basis of ``v & w`` from principal angles equal to zero."""
    if v.ambient_dim != w.ambient_dim:
        raise DimensionError("subspaces live in different ambient spaces")
    m = v.basis.T @ w.basis
    dec = sym_eigen(m.T @ m)
    keep = dec.eigenvalues >= (1.0 - INTERSECTION_TOL) ** 2
    if not np.any(keep):
        raise EmptyIntersectionError("subspaces intersect only in the origin")
    b = w.basis @ dec.eigenvectors[:, keep]
    # re-orthonormalize to absorb rounding from the eigenvectors
    b = b @ spectral_apply(b.T @ b, "inv_sqrt")
    return Subspace(b)
