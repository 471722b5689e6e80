"""Approximate orthogonality preservation for finite-dimensional operators."""

from ._kernels import BACKEND
from .errors import *  # noqa: F401,F403
from .matrix import (
    OperatorMatrix,
    PolarDecomposition,
    SpectralData,
    as_operator,
    format_matrix,
    kernel_dims,
    min_modulus,
    operator_norm,
    parse_matrix,
    polar,
    random_orthogonal_pair,
    random_unit_vector,
    read_matrix,
    svd,
    write_matrix,
)
from .metrics import (
    EpsHatValue,
    OrthogonalPair,
    composition_bound,
    defect,
    delta_improved,
    delta_turnsek,
    eps_hat,
    min_modulus_from_eps,
    witness_pair,
)
from .nearness import (
    NearnessResult,
    dist_to_scalar_isometries,
    dist_to_scalar_unitaries,
    normalized_isometry_gap,
    scaled_isometry_gap,
    stability_certificate,
)
from .oracle import OracleEstimate, brute_force_dist_2x2, estimate_eps_hat, refine_pair

__version__ = "0.1.0"
