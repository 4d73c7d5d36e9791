"""
Scenario runners for the coupled simulation and the two canonical experiments
"""

from .base_runner import (
    STATUS_FAILED_IDENTITY,
    STATUS_FAILED_SOLVER,
    STATUS_FLAGGED,
    STATUS_OK,
    BaseRunner,
    RunResult,
)
from .checks import CheckResult, run_seed_checks
from .figure3 import Figure3Runner, run_figure3
from .fpfm_run import FPFMRunner, run_fpfm
from .traveling_wave import (
    TravelWaveRunner,
    TravelWaveSpec,
    fit_effective_energy_line,
    load_travelwave_spec,
    run_traveling_wave,
    strip_config,
)

__all__ = [
    "BaseRunner",
    "CheckResult",
    "FPFMRunner",
    "Figure3Runner",
    "RunResult",
    "STATUS_FAILED_IDENTITY",
    "STATUS_FAILED_SOLVER",
    "STATUS_FLAGGED",
    "STATUS_OK",
    "TravelWaveRunner",
    "TravelWaveSpec",
    "fit_effective_energy_line",
    "load_travelwave_spec",
    "run_fpfm",
    "run_figure3",
    "run_seed_checks",
    "run_traveling_wave",
    "strip_config",
]
