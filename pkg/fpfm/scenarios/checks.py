"""
Seed-check suite: quick invariant checks on a loaded scenario before a long run
"""

import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from fpfm.core.algebra import check_complementarity, complementarity_triple
from fpfm.core.errors import FPFMError
from fpfm.core.params import BoundaryTag, BoundaryTagging, DirichletLoad, LoadSpec, ScenarioConfig
from fpfm.elasticity import (
    LoadProgram,
    damaged_energy_integral,
    energy_density,
    minimal_elastic_energy,
    solve_displacement,
)
from fpfm.mesh import TriMesh, build_rect_mesh, mesh_from_spec
from fpfm.phasefield import driving_force, pinned_nodes, surface_energy
from fpfm.scenarios.fpfm_run import initial_damage

logger = logging.getLogger("fpfm.scenario.checks")

SEED = 20240601


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _mesh_valid(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    mesh.validate()
    return f"{mesh.n_nodes} nodes, {mesh.n_triangles} triangles"


def _load_rates(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    times = np.linspace(config.time.t0, config.time.t1, 11)
    LoadProgram(mesh, config.loads).verify_derivatives(times)
    return "analytic rates match central differences"


def _positive_part_lemma(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    pairs = rng.normal(size=(10000, 2))
    # Exercise the boundary cases a = 0 and b = 0 too
    pairs[::4, 0] = 0.0
    pairs[1::4, 1] = 0.0
    pairs[2::4, 0] = np.maximum(pairs[2::4, 0], 0.0)
    pairs[2::4, 1] = 0.0
    for a, b in pairs:
        if check_complementarity(a, b) != complementarity_triple(a, b):
            raise AssertionError(f"forms disagree at a={a}, b={b}")
    return f"{len(pairs)} pairs agree"


def _rate_law(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    law = config.material.rate_law
    samples = np.linspace(0.0, 1.0, 51)
    if hasattr(law, "velocities"):
        samples = np.linspace(0.0, float(law.velocities[-1]), 51)
    if not law.is_monotone(samples):
        raise AssertionError("rate law is not strictly increasing from 0")
    for v in samples[1:]:
        back = law.beta(law.alpha(float(v)))
        if abs(back - v) > 1e-8 * max(1.0, v):
            raise AssertionError(f"beta(alpha({v})) = {back}")
    return f"{law.kind} law monotone, beta inverts alpha"


def _driving_force_derivative(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    mat = config.material
    z = initial_damage(mesh, config)
    loads = LoadProgram(mesh, config.loads).state(config.time.t1)
    w = energy_density(mesh, solve_displacement(mesh, z, mat, loads), mat)

    def energy(field):
        return damaged_energy_integral(mesh, w, field, mat) + surface_energy(mesh, field, mat)

    force = driving_force(mesh, z, w, mat).values
    pinned = pinned_nodes(mesh)
    worst = 0.0
    for _ in range(10):
        direction = rng.normal(size=mesh.n_nodes)
        direction[pinned] = 0.0
        step = 1e-4
        fd = (energy(z + step * direction) - energy(z - step * direction)) / (2.0 * step)
        analytic = -float(np.sum(mesh.lumped_mass * force * direction))
        rel = abs(fd - analytic) / max(abs(analytic), 1e-12)
        worst = max(worst, rel)
        if rel > 1e-6:
            raise AssertionError(f"directional derivative off by {rel:.2e}")
    return f"10 directions, worst relative error {worst:.1e}"


def _affine_patch(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    spec = config.mesh
    patch = build_rect_mesh(spec.width, spec.height, spec.h, BoundaryTagging.uniform(BoundaryTag.DIRICHLET), spec.origin)
    gradient = rng.normal(size=(2, 2))
    offset = rng.normal(size=2)
    load_spec = LoadSpec(dirichlet=DirichletLoad(gradient=gradient.tolist(), offset=offset.tolist()))
    loads = LoadProgram(patch, load_spec).state(0.0)
    u = solve_displacement(patch, np.zeros(patch.n_nodes), config.material, loads)
    exact = patch.nodes @ gradient.T + offset
    error = float(np.max(np.abs(u.values - exact)))
    if error > 1e-10 * max(1.0, float(np.max(np.abs(exact)))):
        raise AssertionError(f"affine solution reproduced only to {error:.2e}")
    return f"affine data reproduced to {error:.1e}"


def _damage_monotonicity(config: ScenarioConfig, mesh: TriMesh, rng) -> str:
    mat = config.material
    loads = LoadProgram(mesh, config.loads).state(config.time.t1)
    for _ in range(2):
        z = rng.uniform(0.0, 0.5, size=mesh.n_nodes)
        z_more = np.minimum(z + rng.uniform(0.0, 0.5, size=mesh.n_nodes), 1.0)
        low, high = minimal_elastic_energy(mesh, z, mat, loads), minimal_elastic_energy(mesh, z_more, mat, loads)
        if high > low + 1e-10:
            raise AssertionError(f"more damage raised the minimal energy: {high} > {low}")
    return "2 nested pairs"


CHECKS: List[Callable] = [
    _mesh_valid,
    _load_rates,
    _positive_part_lemma,
    _rate_law,
    _driving_force_derivative,
    _affine_patch,
    _damage_monotonicity,
]


def run_seed_checks(config: ScenarioConfig, seed: int = SEED) -> List[CheckResult]:
    """Run every check; failures are collected, not raised"""
    rng = np.random.default_rng(seed)
    mesh = mesh_from_spec(config.mesh)
    results = []
    for check in CHECKS:
        name = check.__name__.lstrip("_")
        try:
            detail = check(config, mesh, rng)
            results.append(CheckResult(name, True, detail))
        except (AssertionError, FPFMError) as e:
            logger.warning(f"Check {name} failed: {e}")
            results.append(CheckResult(name, False, str(e)))
    return results
