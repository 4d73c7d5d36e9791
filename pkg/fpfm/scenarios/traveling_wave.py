"""
Traveling-wave sweeps on a stretched strip

The strip is [0, W] x [-H, H] with u = (0, +-a) imposed on the top and bottom
edges (ramped to a, then held) and free ends. An initial crack is seeded
along the centerline from the middle of the left edge. Each (a, alpha) run
measures the steady crack speed V, beta and G_c^eps; across a sweep in a the
points (V, G_c^eps) should follow G_c + alpha*beta*V.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fpfm.core import settings
from fpfm.core.errors import ConfigError, DomainError, SolverError
from fpfm.core.params import (
    BoundaryTag,
    BoundaryTagging,
    DirichletLoad,
    LoadSpec,
    MaterialParams,
    MeshSpec,
    OutputSpec,
    PlaneMode,
    RampHoldProgram,
    ScenarioConfig,
    SeedCrack,
    TimeGrid,
)
from fpfm.core.rate_laws import LinearRateLaw
from fpfm.output import write_csv
from fpfm.scenarios.base_runner import (
    STATUS_FAILED_SOLVER,
    STATUS_FLAGGED,
    STATUS_OK,
    BaseRunner,
    RunResult,
)
from fpfm.scenarios.fpfm_run import FPFMRunner


class TravelWaveSpec(BaseModel):
    """Strip geometry, material and the (a, alpha) grid of a sweep"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "travelwave"
    half_height: float = Field(default=1.0, gt=0.0)
    width_factor: float = Field(default=10.0, gt=0.0)  # W = width_factor * H
    h: float = Field(default=0.05, gt=0.0)
    seed_length: float = Field(default=1.0, ge=0.0)
    lame_lambda: float = 1.0
    lame_mu: float = Field(default=1.0, gt=0.0)
    plane_mode: PlaneMode = PlaneMode.PLANE_STRESS
    g_c: float = Field(default=1.0, gt=0.0)
    epsilon: float = Field(default=0.1, gt=0.0)
    residual_stiffness: float = Field(default=1e-6, ge=0.0, lt=1.0)
    stretches: List[float] = Field(min_length=1)
    alphas: List[float] = Field(min_length=1)
    t_ramp: float = Field(default=1.0, gt=0.0)
    t1: float = Field(gt=0.0)
    dt: float = Field(gt=0.0)
    output: OutputSpec = OutputSpec(strip_diagnostics=True)


def load_travelwave_spec(path: Union[str, Path]) -> TravelWaveSpec:
    try:
        return TravelWaveSpec.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"invalid travelwave config {path}: {e}") from e


def strip_config(spec: TravelWaveSpec, stretch: float, alpha: float) -> ScenarioConfig:
    """Scenario for one (a, alpha) point of the sweep"""
    H = spec.half_height
    width = spec.width_factor * H
    tags = BoundaryTagging(bottom=BoundaryTag.DIRICHLET, top=BoundaryTag.DIRICHLET)
    return ScenarioConfig(
        name=f"{spec.name}_a={stretch:g}_alpha={alpha:g}",
        mesh=MeshSpec(width=width, height=2.0 * H, h=spec.h, origin=(0.0, -H), tags=tags),
        material=MaterialParams(
            lame_lambda=spec.lame_lambda,
            lame_mu=spec.lame_mu,
            plane_mode=spec.plane_mode,
            g_c=spec.g_c,
            epsilon=spec.epsilon,
            rate_law=LinearRateLaw(alpha=alpha),
            residual_stiffness=spec.residual_stiffness,
        ),
        loads=LoadSpec(
            dirichlet=DirichletLoad(
                gradient=((0.0, 0.0), (0.0, stretch / H)),
                program=RampHoldProgram(value=1.0, t_ramp=spec.t_ramp),
            )
        ),
        time=TimeGrid(t0=0.0, t1=spec.t1, dt=spec.dt),
        initial_damage=SeedCrack(start=(0.0, 0.0), end=(spec.seed_length, 0.0)),
        output=spec.output.model_copy(update={"strip_diagnostics": True}),
    )


def fit_effective_energy_line(velocities: Sequence[float], g_c_eps: Sequence[float]) -> Tuple[float, float]:
    """Least-squares (intercept, slope) of G_c^eps against V"""
    v = np.asarray(velocities, dtype=float)
    g = np.asarray(g_c_eps, dtype=float)
    if len(v) < 2 or len(np.unique(v)) < 2:
        raise DomainError("need at least two distinct velocities to fit a line")
    slope, intercept = np.polyfit(v, g, 1)
    return float(intercept), float(slope)


def _run_strip(job: Tuple[ScenarioConfig, str]) -> Dict[str, Any]:
    """One strip run; solver failures are reported in the row, not raised"""
    config, run_dir = job
    runner = FPFMRunner(config, run_dir, record=False)
    try:
        result = runner.run()
        return {"status": result.status, "summary": result.summary}
    except SolverError as e:
        return {"status": STATUS_FAILED_SOLVER, "summary": {"error": str(e)}}


class TravelWaveRunner(BaseRunner):
    kind = "travelwave"

    COLUMNS = (
        "a", "alpha", "V", "Gc_eps", "beta", "beta_spread", "Lrate_over_V", "ediv_residual", "max_abs_residual", "status",
    )

    def __init__(self, spec: TravelWaveSpec, out_dir=None, workers: Optional[int] = None, record: Optional[bool] = None):
        out_dir = Path(out_dir) if out_dir is not None else Path(settings.OUTPUT_DIR) / spec.name
        super().__init__(spec.name, out_dir, record)
        self.spec = spec
        self.workers = settings.WORKERS if workers is None else max(1, workers)

    def config_document(self) -> Dict[str, Any]:
        return self.spec.model_dump(mode="json")

    def jobs(self) -> List[Tuple[float, float, ScenarioConfig, str]]:
        jobs = []
        for alpha in self.spec.alphas:
            for stretch in self.spec.stretches:
                config = strip_config(self.spec, stretch, alpha)
                jobs.append((stretch, alpha, config, str(self.run_dir / f"a={stretch:g}_alpha={alpha:g}")))
        return jobs

    def execute(self) -> Dict[str, Any]:
        jobs = self.jobs()
        payload = [(config, run_dir) for _, _, config, run_dir in jobs]
        self.logger.info(f"Running {len(jobs)} strip runs with {self.workers} worker(s)")
        if self.workers > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                outcomes = list(pool.map(_run_strip, payload))
        else:
            outcomes = [_run_strip(job) for job in payload]

        rows = []
        for (stretch, alpha, _, _), outcome in zip(jobs, outcomes):
            strip = outcome["summary"].get("strip", {})
            row = {
                "a": stretch,
                "alpha": alpha,
                "V": strip.get("velocity"),
                "Gc_eps": strip.get("g_c_eps"),
                "beta": strip.get("beta_mean"),
                "beta_spread": strip.get("beta_spread"),
                "Lrate_over_V": strip.get("length_rate_ratio"),
                "ediv_residual": strip.get("ediv_residual"),
                "max_abs_residual": outcome["summary"].get("max_abs_residual"),
                "status": outcome["status"],
            }
            if outcome["status"] != STATUS_OK:
                self.stats["warnings"] += 1
                self.logger.warning(f"a={stretch:g}, alpha={alpha:g}: {outcome['status']}")
            rows.append(row)
            self.stats["steps"] += outcome["summary"].get("steps", 0) or 0

        table = [[_nan_if_none(r[c]) if c != "status" else r[c] for c in self.COLUMNS] for r in rows]
        self.wrote(write_csv(self.run_dir / "sweep.csv", self.COLUMNS, table))
        return {"runs": rows, "fits": self._fits(rows)}

    def _fits(self, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        fits = []
        for alpha in self.spec.alphas:
            good = [r for r in rows if r["alpha"] == alpha and r["status"] == STATUS_OK]
            fit = {"alpha": alpha, "n_points": len(good)}
            if len(good) >= 2:
                try:
                    intercept, slope = fit_effective_energy_line([r["V"] for r in good], [r["Gc_eps"] for r in good])
                except DomainError as e:
                    fit["error"] = str(e)
                else:
                    beta_mean = float(np.mean([r["beta"] for r in good]))
                    fit.update(
                        intercept=intercept,
                        slope=slope,
                        beta_mean=beta_mean,
                        predicted_slope=alpha * beta_mean,
                        intercept_rel_error=abs(intercept - self.spec.g_c) / self.spec.g_c,
                    )
            fits.append(fit)
        return fits

    def classify(self, summary: Dict[str, Any]) -> str:
        if all(r["status"] == STATUS_OK for r in summary["runs"]):
            return STATUS_OK
        return STATUS_FLAGGED


def _nan_if_none(value):
    return float("nan") if value is None else value


def run_traveling_wave(
    spec: TravelWaveSpec,
    out_dir=None,
    workers: Optional[int] = None,
    record: Optional[bool] = None,
    verbose: bool = False,
) -> RunResult:
    """Sweep (a, alpha); sweep.csv holds one row per run, summary.json the G_c^eps(V) fits"""
    return TravelWaveRunner(spec, out_dir, workers, record).run(verbose=verbose)
