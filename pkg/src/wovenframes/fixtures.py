"""Worked banks used by the tests, the acceptance suite and the shipped JSON files."""

import numpy as np

from .weaving import FrameBank, Partition, Subspace


def planar_bank() -> FrameBank:
    """Two frames of three vectors in R^2:
    F = {2e1, 2e2 - e1, 3e2} and G = {2e1, 2e1 + e2, 2e2}."""
    f = [[2.0, 0.0], [-1.0, 2.0], [0.0, 3.0]]
    g = [[2.0, 0.0], [2.0, 1.0], [0.0, 2.0]]
    return FrameBank(np.array([f, g]), ("F", "G"))


def axis_pair_bank(alpha: float) -> FrameBank:
    """Two Parseval frames of six vectors in R^3, built from ``alpha > 0`` and
    ``beta = 1/sqrt(1 + alpha^2)``.

    G = {b e1, ab e1, b e2, ab e2, b e3, ab e3}
    Q = {ab e1, b e1, ab e2, b e2, ab e3, b e3}
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    beta = 1.0 / np.sqrt(1.0 + alpha * alpha)
    e = np.eye(3)
    g, q = [], []
    for axis in range(3):
        g += [beta * e[axis], alpha * beta * e[axis]]
        q += [alpha * beta * e[axis], beta * e[axis]]
    return FrameBank(np.array([g, q]), ("G", "Q"))


def zero_bank(dim: int = 2, n: int = 3, m: int = 2) -> FrameBank:
    return FrameBank(np.zeros((m, n, dim)), tuple(f"Z{j}" for j in range(m)))


def one_based_blocks(first: set, n: int) -> Partition:
    """Partition with 1-based indices in ``first`` on frame 0, the rest on frame 1."""
    return Partition(tuple(0 if i + 1 in first else 1 for i in range(n)))


# planar bank: indices 1, 2 on F, index 3 on G
PLANAR_SIGMA = one_based_blocks({1, 2}, 3)
# axis-pair bank: G at {2, 4, 6}, and G at {1, 2}
AXIS_SIGMA_EVEN = one_based_blocks({2, 4, 6}, 6)
AXIS_SIGMA_FIRST = one_based_blocks({1, 2}, 6)

# Projection targets in R^3: span{e1, e2}, span{e2, e3} and their intersection.
V1 = Subspace.coordinate(3, [0, 1])
V2 = Subspace.coordinate(3, [1, 2])
V1_CAP_V2 = Subspace.coordinate(3, [1])
