"""Geometric discord of multiqubit states under conditional measurement trees.

Two independent evaluation routes are exposed: a closed-form path built from
per-history 3x3 eigenproblems (`discord_closed`) and a brute-force distance
minimization over measurement trees (`discord_numeric`).  They cross-check
each other; neither is a wrapper over the other.
"""

from .bloch import BlochDecomposition, decompose, reconstruct, squared_norm_sum
from .closedform import (
    ClosedFormResult,
    GMatrixSet,
    build_conditional_G,
    build_root_G,
    discord_closed,
    family_discord,
    two_qubit_discord,
)
from .linalg import (
    EigenPair3,
    Sym3,
    UnsupportedSizeError,
    ValidationError,
    hermitian_eig,
    hs_dist_sq,
    partial_trace,
    sym3_top_eig,
    validate_density,
)
from .measurement import (
    DephasedState,
    MeasurementTree,
    dephase,
    distance_objective,
    tensor_objective,
)
from .numeric import NumericResult, OptimizerConfig, discord_numeric, refine
from .states import StateSpec, apply_local_unitaries, make, random_density

__version__ = "0.1.0"

__all__ = [
    "BlochDecomposition",
    "ClosedFormResult",
    "DephasedState",
    "EigenPair3",
    "GMatrixSet",
    "MeasurementTree",
    "NumericResult",
    "OptimizerConfig",
    "StateSpec",
    "Sym3",
    "UnsupportedSizeError",
    "ValidationError",
    "apply_local_unitaries",
    "build_conditional_G",
    "build_root_G",
    "decompose",
    "dephase",
    "discord_closed",
    "discord_numeric",
    "distance_objective",
    "family_discord",
    "hermitian_eig",
    "hs_dist_sq",
    "make",
    "partial_trace",
    "random_density",
    "reconstruct",
    "refine",
    "squared_norm_sum",
    "sym3_top_eig",
    "tensor_objective",
    "two_qubit_discord",
    "validate_density",
    "__version__",
]
