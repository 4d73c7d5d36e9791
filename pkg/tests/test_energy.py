import math

import numpy as np
import pytest

from fpfm.core.errors import DomainError, MeshError, SteadyWindowError
from fpfm.core.params import BoundaryTag, BoundaryTagging, SeedCrack
from fpfm.energy import (
    EnergyLedger,
    LedgerEntry,
    StripDiagnostics,
    beta_integral,
    dissipation_residual,
    effective_fracture_energy,
    estimate_crack_velocity,
    locate_crack_tip,
    regularized_crack_increment,
    steady_window,
    traveling_wave_residual,
)
from fpfm.mesh import build_rect_mesh
from fpfm.output import read_csv


@pytest.fixture
def strip_mesh():
    tags = BoundaryTagging(bottom=BoundaryTag.DIRICHLET, top=BoundaryTag.DIRICHLET)
    return build_rect_mesh(6.0, 2.0, 0.05, tags, origin=(0.0, -1.0))


@pytest.fixture
def wide_band(material):
    return material.model_copy(update={"epsilon": 0.25})


def crack_profile(mesh, tip, epsilon):
    return SeedCrack(start=(0.0, 0.0), end=(tip, 0.0)).evaluate(mesh.nodes, epsilon)


class TestLedger:
    def test_consistent_history_has_zero_residual(self):
        ledger = EnergyLedger()
        for n in range(5):
            t = 0.1 * n
            ledger.append(LedgerEntry(step=n, t=t, e_el=-t, e_s=0.0, f_dot=0.0, dissipation=1.0 if n else 0.0))
        np.testing.assert_allclose(ledger.residuals, 0.0, atol=1e-12)
        assert ledger.passed
        assert math.isnan(ledger.entries[0].residual)

    def test_frozen_state(self):
        ledger = EnergyLedger()
        for n in range(3):
            ledger.append(LedgerEntry(step=n, t=float(n), e_el=2.0, e_s=0.5, f_dot=0.0, dissipation=0.0))
        assert ledger.max_abs_residual == 0.0
        assert ledger.passed
        assert ledger.entries[-1].e_tot == 2.5

    def test_violation_is_recorded(self):
        ledger = EnergyLedger(tolerance=0.05)
        ledger.append(LedgerEntry(step=0, t=0.0, e_el=0.0, e_s=0.0, f_dot=0.0, dissipation=0.0))
        ledger.append(LedgerEntry(step=1, t=1.0, e_el=-1.0, e_s=0.0, f_dot=0.0, dissipation=2.0))
        assert ledger.entries[1].residual == pytest.approx(1.0)
        assert ledger.violations == [1]
        assert not ledger.passed
        assert ledger.integrated_residual() == pytest.approx(1.0)

    def test_midpoint_power(self):
        previous = LedgerEntry(step=0, t=0.0, e_el=0.0, e_s=0.0, f_dot=0.0, dissipation=0.0)
        current = LedgerEntry(step=1, t=0.5, e_el=0.25, e_s=0.0, f_dot=1.0, dissipation=0.0)
        assert dissipation_residual(previous, current) == pytest.approx(0.0)
        with pytest.raises(DomainError):
            dissipation_residual(current, previous)

    def test_csv(self, tmp_path):
        ledger = EnergyLedger()
        ledger.append(LedgerEntry(step=0, t=0.0, e_el=1.0, e_s=0.0, f_dot=0.0, dissipation=0.0))
        ledger.append(LedgerEntry(step=1, t=0.1, e_el=1.0, e_s=0.0, f_dot=0.0, dissipation=0.0))
        table = read_csv(ledger.to_csv(tmp_path / "ledger.csv"))
        assert list(table) == list(EnergyLedger.COLUMNS)
        np.testing.assert_allclose(table["t"], [0.0, 0.1])
        np.testing.assert_allclose(table["E_tot"], [1.0, 1.0])


class TestCrackQuantities:
    def test_increment_of_uniform_damage(self, clamped_square, material):
        mat = material.model_copy(update={"g_c": 2.0})
        c = 0.4
        z = np.full(clamped_square.n_nodes, c)
        increment = regularized_crack_increment(clamped_square, z, np.zeros(clamped_square.n_nodes), mat)
        assert increment == pytest.approx(c ** 2 / (2.0 * mat.epsilon), rel=1e-12)
        assert regularized_crack_increment(clamped_square, z, z, mat) == 0.0

    def test_translated_profile_adds_its_shift(self, strip_mesh, wide_band):
        z1 = crack_profile(strip_mesh, 1.5, wide_band.epsilon)
        z2 = crack_profile(strip_mesh, 2.5, wide_band.epsilon)
        assert regularized_crack_increment(strip_mesh, z2, z1, wide_band) == pytest.approx(1.0, rel=0.05)

    def test_beta_integral(self, clamped_square):
        assert beta_integral(clamped_square, np.full(clamped_square.n_nodes, 0.3)) == pytest.approx(0.0, abs=1e-14)
        assert beta_integral(clamped_square, clamped_square.nodes[:, 0]) == pytest.approx(1.0, rel=1e-12)
        assert beta_integral(clamped_square, clamped_square.nodes[:, 1]) == pytest.approx(0.0, abs=1e-14)


class TestCrackTip:
    @pytest.fixture
    def coarse_strip(self):
        return build_rect_mesh(4.0, 2.0, 0.25, origin=(0.0, -1.0))

    def test_interpolated_crossing(self, coarse_strip):
        z = np.clip(1.0 - coarse_strip.nodes[:, 0] / 2.2, 0.0, 1.0)
        assert locate_crack_tip(coarse_strip, z) == pytest.approx(1.1, abs=1e-12)

    def test_fully_broken_line_ends_at_last_node(self, coarse_strip):
        assert locate_crack_tip(coarse_strip, np.ones(coarse_strip.n_nodes)) == pytest.approx(4.0)

    def test_no_damage(self, coarse_strip):
        assert math.isnan(locate_crack_tip(coarse_strip, np.zeros(coarse_strip.n_nodes)))

    def test_missing_centerline(self, coarse_strip):
        with pytest.raises(MeshError):
            locate_crack_tip(coarse_strip, np.zeros(coarse_strip.n_nodes), y=0.3)


class TestVelocity:
    def test_linear_tip(self):
        t = np.linspace(0.0, 1.0, 10)
        estimate = estimate_crack_velocity(t, 0.5 + 2.0 * t)
        assert estimate.velocity == pytest.approx(2.0, rel=1e-12)
        assert estimate.intercept == pytest.approx(0.5, rel=1e-12)
        assert (estimate.start, estimate.stop) == (0, 10)

    def test_arrested_tip(self):
        t = np.linspace(0.0, 1.0, 10)
        assert estimate_crack_velocity(t, np.full(10, 3.0)).velocity == pytest.approx(0.0, abs=1e-12)

    def test_noisy_tip(self, rng):
        t = np.linspace(0.0, 5.0, 51)
        tips = 0.3 + 1.5 * t + rng.uniform(-1e-3, 1e-3, t.size)
        assert estimate_crack_velocity(t, tips).velocity == pytest.approx(1.5, abs=0.01)

    def test_transient_is_dropped(self):
        t = np.arange(20, dtype=float)
        tips = np.where(t < 5, 0.1 * t ** 2, 2.5 + 1.0 * (t - 5))
        estimate = estimate_crack_velocity(t, tips)
        assert estimate.start >= 4
        assert estimate.velocity == pytest.approx(1.0, rel=1e-12)

    def test_leading_missing_tips(self):
        t = np.arange(8, dtype=float)
        tips = np.array([np.nan, np.nan, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        assert estimate_crack_velocity(t, tips).velocity == pytest.approx(1.0)

    def test_too_few_samples(self):
        with pytest.raises(SteadyWindowError):
            estimate_crack_velocity([0.0], [1.0])
        with pytest.raises(SteadyWindowError):
            estimate_crack_velocity(np.arange(4.0), np.arange(4.0), min_samples=6)
        with pytest.raises(SteadyWindowError):
            steady_window(np.arange(3.0), stride=3)

    def test_effective_fracture_energy(self):
        assert effective_fracture_energy(-2.0, 1.0) == pytest.approx(2.0)
        # G_c = 1, alpha = 0.1, beta = 2, V = 3
        assert effective_fracture_energy(-(1.0 + 0.1 * 2.0 * 3.0) * 3.0, 3.0) == pytest.approx(1.6)
        with pytest.raises(DomainError):
            effective_fracture_energy(-1.0, 0.0)

    def test_traveling_wave_residual(self, material):
        # G_c = 1, alpha = 0.1, beta = 2, V = 3: dE/dt = -(G_c + alpha beta V) V
        assert traveling_wave_residual(-4.8, 3.0, 3.0, 2.0, material) == pytest.approx(0.0, abs=1e-12)
        # crack grows without elastic supply
        assert traveling_wave_residual(0.0, 3.0, 3.0, 2.0, material) == pytest.approx(1.0 + 1.8 / 3.0)
        assert traveling_wave_residual(-5.28, 3.0, 3.0, 2.0, material) == pytest.approx(-0.48 / 5.28)
        with pytest.raises(DomainError):
            traveling_wave_residual(-1.0, 1.0, 0.0, 2.0, material)


class TestStripDiagnostics:
    def test_translating_profile(self, strip_mesh, wide_band, tmp_path):
        h, x0 = 0.05, 1.2
        z_ref = crack_profile(strip_mesh, x0, wide_band.epsilon)
        diagnostics = StripDiagnostics(strip_mesh, wide_band, z_ref, margin=1.0)
        w = np.zeros(strip_mesh.n_triangles)
        for k in range(41):
            diagnostics.record(float(k), crack_profile(strip_mesh, x0 + h * k, wide_band.epsilon), w)

        summary = diagnostics.summarize()
        assert not summary.flagged
        assert summary.velocity == pytest.approx(h, rel=1e-9)
        assert summary.n_samples == 41
        assert abs(summary.length_rate_ratio - 1.0) <= 0.1
        assert summary.beta_spread == pytest.approx(0.0, abs=1e-8)
        assert summary.g_c_eps == pytest.approx(0.0, abs=1e-12)
        # no elastic energy feeds the translating crack
        assert summary.ediv_residual > 0.9
        assert not diagnostics.tip_reached_margin()

        table = read_csv(diagnostics.to_csv(tmp_path / "strip.csv"))
        assert list(table) == list(StripDiagnostics.COLUMNS)
        assert math.isnan(table["V"][0])
        np.testing.assert_allclose(table["V"][1:], h, rtol=1e-9)

    def test_no_crack_is_flagged(self, strip_mesh, wide_band):
        diagnostics = StripDiagnostics(strip_mesh, wide_band, np.zeros(strip_mesh.n_nodes), margin=1.0)
        for k in range(6):
            diagnostics.record(float(k), np.zeros(strip_mesh.n_nodes), np.zeros(strip_mesh.n_triangles))
        summary = diagnostics.summarize()
        assert summary.flagged
        assert summary.reason
        assert math.isnan(summary.g_c_eps)

    def test_tip_at_end_margin(self, strip_mesh, wide_band):
        diagnostics = StripDiagnostics(strip_mesh, wide_band, np.zeros(strip_mesh.n_nodes), margin=2.0)
        diagnostics.record(0.0, crack_profile(strip_mesh, 4.5, wide_band.epsilon), np.zeros(strip_mesh.n_triangles))
        assert diagnostics.tip_reached_margin()
