import logging
import math

import numpy as np
import pytest

from fpfm import phasefield
from fpfm.core.errors import DomainError
from fpfm.core.params import BoundaryTag, BoundaryTagging, DirichletLoad, LoadSpec, LinearProgram
from fpfm.core.rate_laws import PowerRateLaw, TabulatedRateLaw
from fpfm.elasticity import LoadProgram, damaged_energy_integral, energy_density, minimal_elastic_energy, solve_displacement
from fpfm.mesh import build_rect_mesh
from fpfm.phasefield import (
    dissipation_rate,
    driving_force,
    pinned_nodes,
    stable_time_step,
    step_phase_field,
    surface_energy,
)


def total_energy(mesh, z, w, mat):
    return damaged_energy_integral(mesh, w, z, mat) + surface_energy(mesh, z, mat)


class TestSurfaceEnergy:
    def test_zero_field(self, clamped_square, material):
        assert surface_energy(clamped_square, np.zeros(clamped_square.n_nodes), material) == 0.0

    def test_constant_field(self, clamped_square, material):
        c = 0.3
        value = surface_energy(clamped_square, np.full(clamped_square.n_nodes, c), material)
        assert value == pytest.approx(material.g_c * c ** 2 / (2.0 * material.epsilon), rel=1e-12)

    def test_one_dimensional_profile_costs_g_c_per_unit_length(self, material):
        depth = 0.1
        mesh = build_rect_mesh(3.0, depth, 0.01, origin=(-1.5, 0.0))
        z = np.exp(-np.abs(mesh.nodes[:, 0]) / material.epsilon)
        per_length = surface_energy(mesh, z, material) / depth
        assert per_length == pytest.approx(material.g_c * (1.0 - math.exp(-30.0)), rel=1e-2)


class TestDrivingForce:
    def test_uniform_values(self, clamped_square, material):
        n, m_tri = clamped_square.n_nodes, clamped_square.n_triangles
        c = 0.7
        force = driving_force(clamped_square, np.zeros(n), np.full(m_tri, c), material)
        np.testing.assert_allclose(force.values, c, rtol=1e-12)

        # residual stiffness scales the elastic part
        stiff = material.model_copy(update={"residual_stiffness": 1e-3})
        force = driving_force(clamped_square, np.zeros(n), np.full(m_tri, c), stiff)
        np.testing.assert_allclose(force.values, (1.0 - 1e-3) * c, rtol=1e-12)

        force = driving_force(clamped_square, np.zeros(n), np.zeros(m_tri), material)
        np.testing.assert_allclose(force.values, 0.0, atol=1e-14)

        force = driving_force(clamped_square, np.ones(n), np.zeros(m_tri), material)
        np.testing.assert_allclose(force.values, -material.g_c / material.epsilon, rtol=1e-12)

    def test_matches_energy_derivative(self, clamped_square, material, rng):
        mesh = clamped_square
        z = rng.uniform(0.0, 1.0, mesh.n_nodes)
        w = rng.uniform(0.0, 2.0, mesh.n_triangles)
        gradient = -driving_force(mesh, z, w, material).values * mesh.lumped_mass
        step = 1e-6
        for _ in range(10):
            direction = rng.normal(size=mesh.n_nodes)
            fd = (
                total_energy(mesh, z + step * direction, w, material)
                - total_energy(mesh, z - step * direction, w, material)
            ) / (2.0 * step)
            assert fd == pytest.approx(gradient @ direction, rel=1e-6, abs=1e-9)

    def test_loaded_edges_are_pinned(self, material):
        tags = BoundaryTagging(top=BoundaryTag.NEUMANN_LOADED, bottom=BoundaryTag.DIRICHLET)
        mesh = build_rect_mesh(1.0, 1.0, 0.25, tags)
        pinned = pinned_nodes(mesh)
        assert len(pinned) == 5
        force = driving_force(mesh, np.zeros(mesh.n_nodes), np.ones(mesh.n_triangles), material)
        assert not force.values[pinned].any()
        z = step_phase_field(mesh, np.zeros(mesh.n_nodes), np.ones(mesh.n_triangles), 0.01, material)
        assert not z.values[pinned].any()
        assert z.values.max() > 0.0


class TestStep:
    def test_uniform_step_closed_form(self, clamped_square, material):
        c, dt = 0.5, 0.01
        z = step_phase_field(
            clamped_square, np.zeros(clamped_square.n_nodes), np.full(clamped_square.n_triangles, c), dt, material
        )
        alpha = material.rate_law.alpha_coefficient
        expected = c / (alpha / dt + c + material.g_c / material.epsilon)
        np.testing.assert_allclose(z.values, expected, rtol=1e-9)

    def test_unloaded_undamaged_stays_undamaged(self, clamped_square, material):
        z = step_phase_field(
            clamped_square, np.zeros(clamped_square.n_nodes), np.zeros(clamped_square.n_triangles), 0.1, material
        )
        assert not z.values.any()

    def test_fully_broken_is_absorbing(self, clamped_square, material, rng):
        w = rng.uniform(0.0, 1.0, clamped_square.n_triangles)
        z = step_phase_field(clamped_square, np.ones(clamped_square.n_nodes), w, 0.1, material)
        np.testing.assert_array_equal(z.values, 1.0)

    def test_irreversible_and_bounded(self, clamped_square, material, rng):
        z_old = rng.uniform(0.0, 1.0, clamped_square.n_nodes)
        w = rng.uniform(0.0, 50.0, clamped_square.n_triangles)
        z_new = step_phase_field(clamped_square, z_old, w, 0.05, material).values
        assert np.all(z_new >= z_old)
        assert np.all(z_new <= 1.0)

    def test_rejects_non_positive_dt(self, clamped_square, material):
        with pytest.raises(DomainError):
            step_phase_field(clamped_square, np.zeros(clamped_square.n_nodes), np.zeros(clamped_square.n_triangles), 0.0, material)

    def test_step_lowers_total_energy_for_frozen_load(self, clamped_square, material):
        spec = LoadSpec(dirichlet=DirichletLoad(gradient=((0.0, 0.0), (0.0, 0.5)), program=LinearProgram(rate=1.0)))
        loads = LoadProgram(clamped_square, spec).state(1.0)
        z0 = np.zeros(clamped_square.n_nodes)
        u = solve_displacement(clamped_square, z0, material, loads)
        w = energy_density(clamped_square, u, material)
        z1 = step_phase_field(clamped_square, z0, w, 0.01, material).values
        assert z1.max() > 0.0

        def relaxed(z):
            return minimal_elastic_energy(clamped_square, z, material, loads) + surface_energy(clamped_square, z, material)

        assert relaxed(z1) < relaxed(z0)

    def test_power_law_with_unit_exponent_matches_linear(self, stretched_square, material, rng):
        power = material.model_copy(update={"rate_law": PowerRateLaw(k=0.1, p=1.0)})
        z_old = rng.uniform(0.0, 0.3, stretched_square.n_nodes)
        w = rng.uniform(0.0, 5.0, stretched_square.n_triangles)
        linear_step = step_phase_field(stretched_square, z_old, w, 0.02, material).values
        power_step = step_phase_field(stretched_square, z_old, w, 0.02, power).values
        np.testing.assert_allclose(power_step, linear_step, rtol=0.0, atol=1e-12)

    def test_linear_table_matches_linear(self, stretched_square, material, rng):
        table = material.model_copy(update={"rate_law": TabulatedRateLaw(samples=[(0.0, 0.0), (1e6, 1e5)])})
        z_old = rng.uniform(0.0, 0.3, stretched_square.n_nodes)
        w = rng.uniform(0.0, 5.0, stretched_square.n_triangles)
        linear_step = step_phase_field(stretched_square, z_old, w, 0.02, material).values
        table_step = step_phase_field(stretched_square, z_old, w, 0.02, table).values
        np.testing.assert_allclose(table_step, linear_step, atol=1e-8)

    def test_stiffer_power_law_grows_less(self, stretched_square, material, rng):
        z_old = np.zeros(stretched_square.n_nodes)
        w = rng.uniform(1.0, 5.0, stretched_square.n_triangles)
        soft = material.model_copy(update={"rate_law": PowerRateLaw(k=0.05, p=2.0)})
        stiff = material.model_copy(update={"rate_law": PowerRateLaw(k=0.5, p=2.0)})
        z_soft = step_phase_field(stretched_square, z_old, w, 0.1, soft).values
        z_stiff = step_phase_field(stretched_square, z_old, w, 0.1, stiff).values
        assert np.all(z_soft >= 0.0) and np.all(z_stiff >= 0.0)
        assert z_soft.sum() > z_stiff.sum()

    def test_stability_warning_logged_once(self, clamped_square, material, caplog):
        phasefield._stability_warned.clear()
        w = np.full(clamped_square.n_triangles, 100.0)
        dt = 0.37
        assert dt > stable_time_step(w, material)
        with caplog.at_level(logging.WARNING, logger="fpfm.phasefield"):
            for _ in range(3):
                step_phase_field(clamped_square, np.zeros(clamped_square.n_nodes), w, dt, material)
        warnings = [r for r in caplog.records if "stability guideline" in r.getMessage()]
        assert len(warnings) == 1


def test_stable_time_step(material):
    assert stable_time_step(np.zeros(4), material) == math.inf
    assert stable_time_step(np.array([1.0, 2.0]), material) == pytest.approx(0.1 * 0.1 / 4.0)


def test_dissipation_rate_linear(clamped_square, material, rng):
    z_old = rng.uniform(0.0, 0.5, clamped_square.n_nodes)
    z_new = z_old + rng.uniform(0.0, 0.1, clamped_square.n_nodes)
    dt = 0.1
    v = (z_new - z_old) / dt
    expected = 0.1 * np.sum(clamped_square.lumped_mass * v ** 2)
    assert dissipation_rate(clamped_square, z_new, z_old, dt, material) == pytest.approx(expected, rel=1e-12)
