"""
Coupled time loop: elasticity solve, energy ledger, phase-field step

At every time t_n the displacement is solved on the current damage z_n
(or advanced by one relaxed step when friction_alpha_u > 0), the ledger
entry for (t_n, z_n) is recorded, and z_n is advanced to z_n+1 with the
energy density of that displacement. One displacement solve per step.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from fpfm.core import settings
from fpfm.core.errors import SolverError
from fpfm.core.params import ScenarioConfig
from fpfm.elasticity import (
    LoadProgram,
    NodalField,
    elastic_energy,
    energy_density,
    power_input,
    relaxed_displacement_step,
    solve_displacement,
)
from fpfm.energy import EnergyLedger, LedgerEntry, StripDiagnostics
from fpfm.mesh import TriMesh, mesh_from_spec
from fpfm.output import write_vtk
from fpfm.phasefield import dissipation_rate, pinned_nodes, step_phase_field, surface_energy
from fpfm.scenarios.base_runner import (
    STATUS_FAILED_IDENTITY,
    STATUS_FLAGGED,
    STATUS_OK,
    BaseRunner,
    RunResult,
)

IRREVERSIBILITY_TOL = 0.0


def initial_damage(mesh: TriMesh, config: ScenarioConfig) -> np.ndarray:
    z = np.clip(config.initial_damage.evaluate(mesh.nodes, config.material.epsilon), 0.0, 1.0)
    z[pinned_nodes(mesh)] = 0.0
    return z


class FPFMRunner(BaseRunner):
    kind = "fpfm"

    def __init__(self, config: ScenarioConfig, out_dir, record: Optional[bool] = None):
        super().__init__(config.name, out_dir, record)
        self.config = config
        self.mesh = mesh_from_spec(config.mesh)
        self.ledger = EnergyLedger(config.output.identity_tolerance, config.output.identity_abs_floor)
        self.strip: Optional[StripDiagnostics] = None
        self.z: Optional[np.ndarray] = None
        self.violations = {"irreversibility": 0, "range": 0}

    def config_document(self) -> Dict[str, Any]:
        return self.config.model_dump(mode="json", by_alias=True)

    def _snapshot(self, step: int, u: NodalField, z: np.ndarray, w: np.ndarray):
        path = self.run_dir / "vtk" / f"step_{step:06d}.vtk"
        self.wrote(write_vtk(path, self.mesh, point_data={"z": z, "u": u.values}, cell_data={"w": w}))

    def _check_damage(self, z_new: np.ndarray, z_old: Optional[np.ndarray]):
        if z_old is not None and np.any(z_new < z_old - IRREVERSIBILITY_TOL):
            self.violations["irreversibility"] += 1
        if np.any(z_new < 0.0) or np.any(z_new > 1.0):
            self.violations["range"] += 1

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        mesh, mat, out = self.mesh, cfg.material, cfg.output
        mesh.validate()
        program = LoadProgram(mesh, cfg.loads)
        dt = cfg.time.dt
        relaxed = mat.friction_alpha_u > 0.0

        z = initial_damage(mesh, cfg)
        self.z = z
        if out.strip_diagnostics:
            self.strip = StripDiagnostics(
                mesh, mat, z,
                threshold=out.tip_threshold,
                margin=cfg.end_margin,
                rel_tol=out.steady_rel_tol,
                stride=out.steady_stride,
                min_samples=out.steady_min_samples,
                centerline=cfg.mesh.origin[1] + cfg.half_height,
            )

        z_prev: Optional[np.ndarray] = None
        u_prev: Optional[NodalField] = None
        self.logger.info(f"Mesh: {mesh.n_nodes} nodes, {mesh.n_triangles} triangles; {cfg.time.n_steps} steps")

        try:
            for n in range(cfg.time.n_steps + 1):
                t = cfg.time.time(n)
                loads = program.state(t)
                if relaxed and u_prev is not None:
                    u = relaxed_displacement_step(u_prev, dt, mesh, z, mat, loads)
                else:
                    u = solve_displacement(mesh, z, mat, loads)
                w = energy_density(mesh, u, mat)

                dissipation = 0.0
                if z_prev is not None:
                    dissipation = dissipation_rate(mesh, z, z_prev, dt, mat)
                    if relaxed:
                        velocity = (u.values - u_prev.values) / dt
                        velocity[loads.dirichlet_nodes] = 0.0
                        dissipation += mat.friction_alpha_u * float(
                            np.sum(mesh.lumped_mass[:, None] * velocity ** 2)
                        )
                self.ledger.append(LedgerEntry(
                    step=n,
                    t=t,
                    e_el=elastic_energy(mesh, u, z, mat, loads),
                    e_s=surface_energy(mesh, z, mat),
                    f_dot=power_input(mesh, u, z, mat, loads),
                    dissipation=dissipation,
                ))
                self._check_damage(z, z_prev)
                self.stats["steps"] = n

                if out.vtk_every and n % out.vtk_every == 0:
                    self._snapshot(n, u, z, w)
                if self.strip is not None:
                    self.strip.record(t, z, w)
                    if out.stop_at_margin and self.strip.tip_reached_margin():
                        self.logger.info(f"Crack tip reached the end margin at t={t:.4g}, stopping")
                        break
                if n == cfg.time.n_steps:
                    break

                z_prev, u_prev = z, u
                z = step_phase_field(mesh, z, w, dt, mat).values
                self.z = z
        finally:
            self._write_tables()

        return self._summary()

    def _write_tables(self):
        if self.config.output.ledger_csv and len(self.ledger):
            self.wrote(self.ledger.to_csv(self.run_dir / "ledger.csv"))
        if self.strip is not None and self.strip.samples:
            self.wrote(self.strip.to_csv(self.run_dir / "strip.csv"))

    def _summary(self) -> Dict[str, Any]:
        last = self.ledger.entries[-1] if len(self.ledger) else None
        summary: Dict[str, Any] = {
            "steps": self.stats["steps"],
            "final_time": last.t if last else None,
            "final_energies": {"E_el": last.e_el, "E_s": last.e_s, "E_tot": last.e_tot} if last else {},
            "max_abs_residual": self.ledger.max_abs_residual,
            "integrated_residual": self.ledger.integrated_residual(),
            "identity_violations": list(self.ledger.violations),
            "irreversibility_violations": self.violations["irreversibility"],
            "range_violations": self.violations["range"],
            "max_damage": float(self.z.max()) if self.z is not None and self.z.size else 0.0,
        }
        if self.strip is not None:
            summary["strip"] = self.strip.summarize().as_dict()
        return summary

    def partial_summary(self, error: Exception) -> Dict[str, Any]:
        summary = self._summary()
        summary["error"] = str(error)
        if isinstance(error, SolverError):
            summary["solver_residual"] = error.residual
        return summary

    def classify(self, summary: Dict[str, Any]) -> str:
        if summary["identity_violations"] or summary["irreversibility_violations"] or summary["range_violations"]:
            return STATUS_FAILED_IDENTITY
        if "strip" in summary and summary["strip"]["flagged"]:
            return STATUS_FLAGGED
        return STATUS_OK


def run_fpfm(config: ScenarioConfig, out_dir=None, record: Optional[bool] = None, verbose: bool = False) -> RunResult:
    """Run one coupled simulation into out_dir (default: FPFM_OUTPUT_DIR/<name>)"""
    out_dir = Path(out_dir) if out_dir is not None else Path(settings.OUTPUT_DIR) / config.name
    return FPFMRunner(config, out_dir, record).run(verbose=verbose)
