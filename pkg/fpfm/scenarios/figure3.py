"""
Crack-length curves of the Griffith ODE for a family of linear rate laws

G(l, t) = t (2 - ||l - 1| - 1|), G_c = 1, t in [0, 1.2]. As alpha -> 0 the
curves approach the quasi-static Griffith solution, which jumps from l = 1
to l = 3 at t = 1.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from fpfm.core import settings
from fpfm.core.errors import DomainError
from fpfm.core.rate_laws import LinearRateLaw
from fpfm.griffith_ode import (
    CrackTrajectory,
    figure3_energy_profile,
    integrate_crack_length,
    jump_fraction,
    ode_dissipation_check,
)
from fpfm.output import write_csv
from fpfm.scenarios.base_runner import STATUS_FLAGGED, STATUS_OK, BaseRunner, RunResult

DEFAULT_ALPHAS = (0.01, 0.05, 0.1, 0.2)
T_END = 1.2
JUMP_WINDOW = (0.95, 1.05)


def column_name(alpha: float) -> str:
    return f"L_alpha={alpha:g}"


def curves_ordered(trajectories: Sequence[CrackTrajectory], tol: float = 1e-12) -> bool:
    """True if L is pointwise nonincreasing along the list (sorted by increasing alpha)"""
    for smaller, larger in zip(trajectories[:-1], trajectories[1:]):
        if np.any(larger.length_at(smaller.t) > smaller.length + tol):
            return False
    return True


class Figure3Runner(BaseRunner):
    kind = "figure3"

    def __init__(
        self,
        alphas: Sequence[float] = DEFAULT_ALPHAS,
        dt: float = 1e-4,
        l0: float = 0.0,
        out_dir=None,
        t_end: float = T_END,
        g_c: float = 1.0,
        record: Optional[bool] = None,
        name: str = "figure3",
    ):
        if not alphas or any(a <= 0.0 for a in alphas):
            raise DomainError("alphas must be a non-empty list of positive values")
        out_dir = Path(out_dir) if out_dir is not None else Path(settings.OUTPUT_DIR) / name
        super().__init__(name, out_dir, record)
        self.alphas = sorted(float(a) for a in alphas)
        self.dt = dt
        self.l0 = l0
        self.t_end = t_end
        self.g_c = g_c
        self.profile = figure3_energy_profile()
        self.trajectories: List[CrackTrajectory] = []

    def config_document(self) -> Dict[str, Any]:
        return {"alphas": self.alphas, "dt": self.dt, "l0": self.l0, "t_end": self.t_end, "g_c": self.g_c}

    def execute(self) -> Dict[str, Any]:
        per_alpha = []
        for alpha in self.alphas:
            traj = integrate_crack_length(
                self.profile, self.g_c, LinearRateLaw(alpha=alpha), self.l0, (0.0, self.t_end), self.dt
            )
            residual = ode_dissipation_check(traj, self.profile)
            self.trajectories.append(traj)
            self.wrote(traj.to_csv(self.run_dir / f"trajectory_alpha={alpha:g}.csv"))
            if not traj.complete:
                self.stats["warnings"] += 1
            per_alpha.append({
                "alpha": alpha,
                "status": traj.status,
                "final_length": float(traj.length[-1]),
                "jump_fraction": jump_fraction(traj, *JUMP_WINDOW),
                "max_abs_residual": residual,
                "monotone": bool(np.all(np.diff(traj.length) >= 0.0)),
            })
            self.stats["steps"] += len(traj) - 1
            self.logger.info(f"alpha={alpha:g}: L(end)={traj.length[-1]:.4f}, residual={residual:.3e}")

        base = self.trajectories[0].t
        columns = [column_name(a) for a in self.alphas]
        table = np.column_stack([base] + [traj.length_at(base) for traj in self.trajectories])
        self.wrote(write_csv(self.run_dir / "figure3.csv", ["t"] + columns, table.tolist()))

        return {
            "alphas": self.alphas,
            "dt": self.dt,
            "l0": self.l0,
            "curves": per_alpha,
            "ordered": curves_ordered(self.trajectories),
            "max_abs_residual": max(c["max_abs_residual"] for c in per_alpha),
        }

    def classify(self, summary: Dict[str, Any]) -> str:
        complete = all(c["status"] == "complete" and c["monotone"] for c in summary["curves"])
        return STATUS_OK if complete and summary["ordered"] else STATUS_FLAGGED


def run_figure3(
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    dt: float = 1e-4,
    l0: float = 0.0,
    out_dir=None,
    record: Optional[bool] = None,
    verbose: bool = False,
) -> RunResult:
    """One ODE integration per alpha; figure3.csv holds t and one L column per alpha"""
    return Figure3Runner(alphas, dt, l0, out_dir, record=record).run(verbose=verbose)
