"""
Shared domain types, the positive-part algebra and the rate laws
"""

from .algebra import check_complementarity, complementarity_triple, positive_part, positive_part_triple
from .errors import (
    ConfigError,
    DomainError,
    FPFMError,
    MeshError,
    PreconditionError,
    RateLawRangeError,
    SolverError,
    SteadyWindowError,
)
from .params import (
    BoundaryTag,
    BoundaryTagging,
    MaterialParams,
    PlaneMode,
    ScenarioConfig,
    load_config,
)
from .rate_laws import LinearRateLaw, PowerRateLaw, TabulatedRateLaw, alpha_star, beta_star

__all__ = [
    "BoundaryTag",
    "BoundaryTagging",
    "ConfigError",
    "DomainError",
    "FPFMError",
    "LinearRateLaw",
    "MaterialParams",
    "MeshError",
    "PlaneMode",
    "PowerRateLaw",
    "PreconditionError",
    "RateLawRangeError",
    "ScenarioConfig",
    "SolverError",
    "SteadyWindowError",
    "TabulatedRateLaw",
    "alpha_star",
    "beta_star",
    "check_complementarity",
    "complementarity_triple",
    "load_config",
    "positive_part",
    "positive_part_triple",
]
