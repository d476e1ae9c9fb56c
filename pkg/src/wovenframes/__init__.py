"""Numerical toolkit for woven frames in R^d."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .frames import (  # noqa: F401
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
from .linalg import SpectralDecomposition, operator_norms, spectral_apply, sym_eigen  # noqa: F401
from .weaving import (  # noqa: F401
    CoefficientBundle,
    FrameBank,
    Partition,
    Subspace,
    WovenCertificate,
    concatenated_family,
    enumerate_partitions,
    project_bank,
    standard_dual_woven,
    subspace_intersection,
    sum_operator,
    sum_woven_check,
    tighten_woven,
    transform_woven,
    universal_bounds_exhaustive,
    universal_bounds_sampled,
    weave,
    woven_synthesis,
)
