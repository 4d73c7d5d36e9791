"""
Exception hierarchy for the fracture toolkit

Every error raised on purpose by the package derives from FPFMError so the
scripts can catch one type and print a diagnosis.
"""

from typing import Optional


class FPFMError(Exception):
    """Base class for all toolkit errors"""


class DomainError(FPFMError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class RateLawRangeError(DomainError):
    """Tabulated rate law queried outside its table"""


class MeshError(FPFMError, ValueError):
    """Invalid mesh request or broken mesh invariant"""


class ConfigError(FPFMError, ValueError):
    """Scenario document could not be parsed or validated"""


class PreconditionError(FPFMError):
    """Operation called without the inputs it requires"""


class SteadyWindowError(FPFMError):
    """No steady propagation window could be detected"""


class SolverError(FPFMError, RuntimeError):
    """A linear solve or fixed-point loop did not reach its tolerance"""

    def __init__(self, message: str, residual: Optional[float] = None, iterations: Optional[int] = None):
        details = []
        if residual is not None:
            details.append(f"residual={residual:.3e}")
        if iterations is not None:
            details.append(f"iterations={iterations}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
