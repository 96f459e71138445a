"""Unit tests for the free-particle and well evolution and diagnostics."""

import math

import numpy as np
import pytest

from tfse import dynamics, fraccalc
from tfse.errors import InvalidOrder, SingularTime
from tfse.dynamics import GridField, RunConfig, SpectralPacket
from tfse.specfun import FractionalOrder


def cfg_of(nu, n_m=0.5, n_v=0.0):
    return RunConfig(FractionalOrder(nu), n_m=n_m, n_v=n_v)


def unit_packet(half_width=8.0, count=161, width=1.0):
    lam = np.linspace(-half_width, half_width, count)
    return dynamics.gaussian_packet(lam, width=width)


class TestTypes:
    def test_run_config_coefficients(self):
        cfg = cfg_of(0.5, n_m=2.0, n_v=3.0)
        assert cfg.beta == pytest.approx(0.25)
        assert cfg.alpha == pytest.approx(3.0)

    def test_packet_rejects_asymmetric_grid(self):
        lam = np.linspace(-1.0, 2.0, 31)
        with pytest.raises(ValueError):
            SpectralPacket(lam, np.ones_like(lam, dtype=complex))

    def test_box_field_rejects_wall_leak(self):
        x = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            GridField(x, np.ones_like(x, dtype=complex), domain="box",
                      box_width=1.0)


class TestFreeParticle:
    def test_gaussian_packet_is_normalized(self):
        packet = unit_packet()
        assert dynamics.spectral_probability(packet) == pytest.approx(
            1.0, abs=1e-9)

    def test_unit_order_preserves_probability(self):
        packet = unit_packet()
        cfg = cfg_of(1.0)
        for t in (0.5, 2.0, 10.0):
            out = dynamics.free_spectrum_evolve(packet, cfg, t)
            assert dynamics.spectral_probability(out) == pytest.approx(
                1.0, abs=1e-9)

    def test_split_sums_to_total(self):
        packet = unit_packet(count=81)
        out = dynamics.free_spectrum_evolve(packet, cfg_of(0.5), 1.5)
        assert np.allclose(out.amplitudes_s + out.amplitudes_d,
                           out.amplitudes)
        psi, psi_s, psi_d = dynamics.free_field(out)
        assert np.allclose(psi_s.values + psi_d.values, psi.values)

    def test_oscillatory_piece_density_is_static(self):
        # An even node count avoids lambda = 0, where the degenerate
        # sigma = 0 case bypasses the decomposition.
        packet = unit_packet(count=80)
        cfg = cfg_of(0.5)
        dens = []
        for t in (0.5, 3.0):
            out = dynamics.free_spectrum_evolve(packet, cfg, t)
            dens.append(np.abs(out.amplitudes_s) ** 2)
        assert np.allclose(dens[0], dens[1])
        # and the per-node value is |amp0|^2 / nu^2
        assert np.allclose(dens[0], np.abs(packet.amplitudes) ** 2 * 4.0)

    def test_probability_grows_toward_limit(self):
        packet = unit_packet(count=81)
        cfg = cfg_of(0.5)
        probs = [dynamics.spectral_probability(
            dynamics.free_spectrum_evolve(packet, cfg, t))
            for t in (1.0, 10.0, 100.0)]
        assert probs[0] < probs[1] < probs[2] < 4.0

    def test_field_at_zero_matches_initial(self):
        packet = unit_packet(count=81)
        out = dynamics.free_spectrum_evolve(packet, cfg_of(0.5), 0.0)
        psi0, _, _ = dynamics.free_field(packet)
        psi, _, _ = dynamics.free_field(out)
        assert np.allclose(psi.values, psi0.values, atol=1e-12)

    def test_high_order_reproduces_initial_state(self):
        packet = unit_packet(count=41)
        zero = SpectralPacket(packet.wavenumbers,
                              np.zeros_like(packet.amplitudes))
        out = dynamics.free_spectrum_high_order(packet, zero, cfg_of(1.5),
                                                0.0)
        assert np.allclose(out.amplitudes, packet.amplitudes, atol=1e-8)

    def test_high_order_rejects_sub_unit(self):
        packet = unit_packet(count=41)
        with pytest.raises(InvalidOrder):
            dynamics.free_spectrum_high_order(packet, packet, cfg_of(0.5),
                                              1.0)


class TestWell:
    def test_mode_eigenvalue(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        assert mode.lambda_n == pytest.approx(1.0)
        mode2 = dynamics.well_mode(2, math.pi, cfg)
        assert mode2.lambda_n == pytest.approx(4.0)

    def test_shape_normalization(self):
        mode = dynamics.well_mode(3, 2.0, cfg_of(0.5))
        x = np.linspace(0.0, 2.0, 2001)
        norm = np.trapezoid(dynamics.well_shape(mode, x) ** 2, x)
        assert norm == pytest.approx(1.0, abs=1e-6)

    def test_amplitude_initial_value(self):
        mode = dynamics.well_mode(1, math.pi, cfg_of(0.5))
        assert dynamics.well_amplitude(mode, cfg_of(0.5), 0.0) \
            == pytest.approx(1.0)

    def test_unit_order_unit_modulus(self):
        cfg = cfg_of(1.0)
        mode = dynamics.well_mode(1, math.pi, cfg)
        for t in (0.3, 5.0):
            assert abs(dynamics.well_amplitude(mode, cfg, t)) \
                == pytest.approx(1.0, abs=1e-12)

    def test_field_probability_tracks_amplitude(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        t = 2.0
        field = dynamics.well_field(mode, cfg, t, n_points=801)
        amp = dynamics.well_amplitude(mode, cfg, t)
        assert dynamics.total_probability(field) == pytest.approx(
            abs(amp) ** 2, rel=1e-5)

    def test_long_time_limit(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        amp = dynamics.well_amplitude(mode, cfg, 1e4)
        assert abs(amp) ** 2 == pytest.approx(4.0, abs=0.05)


class TestDiagnostics:
    def test_weighted_history_constant_field(self):
        x = np.linspace(-1.0, 1.0, 21)
        fields = [GridField(x, np.ones_like(x, dtype=complex))
                  for _ in range(11)]
        out = dynamics.weighted_history(fields, 0.1, FractionalOrder(0.6))
        assert np.abs(out.values).max() == 0.0

    def test_weighted_history_unit_order(self):
        x = np.linspace(-1.0, 1.0, 21)
        fields = [GridField(x, (k + 1.0) * np.ones_like(x, dtype=complex))
                  for k in range(5)]
        out = dynamics.weighted_history(fields, 0.1, FractionalOrder(1.0))
        assert np.allclose(out.values, 5.0)

    def test_current_vanishes_for_real_static_field(self):
        x = np.linspace(-1.0, 1.0, 101)
        f = GridField(x, np.exp(-x ** 2).astype(complex))
        j = dynamics.probability_current(f, f, cfg_of(1.0))
        assert np.abs(j.values.imag).max() < 1e-12
        # real symmetric field at nu=1: J = 2 beta Im(psi* dx psi) = 0
        assert np.abs(j.values.real).max() < 1e-12

    def test_source_zero_at_unit_order(self):
        cfg = cfg_of(1.0)
        mode = dynamics.well_mode(1, math.pi, cfg)
        t = 1.0
        x = np.linspace(0.0, math.pi, 201)
        shape = dynamics.well_shape(mode, x)
        amp = dynamics.well_amplitude(mode, cfg, t)
        f = GridField(x, amp * shape)
        init_cap = GridField(x, np.zeros_like(x, dtype=complex))
        s = dynamics.source_term(f, f, init_cap, cfg, t)
        total = np.trapezoid(s.values.real, x)
        assert abs(total) < 1e-10

    def test_source_singular_time(self):
        x = np.linspace(0.0, 1.0, 11)
        f = GridField(x, np.zeros_like(x, dtype=complex))
        with pytest.raises(SingularTime):
            dynamics.source_term(f, f, f, cfg_of(0.5), 0.0)

    def test_energy_average_is_norm_at_unit_order(self):
        x = np.linspace(0.0, math.pi, 801)
        mode = dynamics.well_mode(1, math.pi, cfg_of(1.0))
        f = GridField(x, dynamics.well_shape(mode, x).astype(complex))
        assert dynamics.energy_average(f, f).real == pytest.approx(
            1.0, abs=1e-5)

    def test_energy_level_unit_order_constant(self):
        cfg = cfg_of(1.0)
        mode = dynamics.well_mode(1, math.pi, cfg)
        for t in (0.5, 4.0):
            level = dynamics.energy_level(mode, cfg, t)
            assert level == pytest.approx(mode.omega_n, abs=1e-10)

    def test_energy_level_limit_value(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        assert dynamics.energy_level_limit(mode, cfg) == pytest.approx(4.0)

    def test_energy_level_singular_at_zero(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        with pytest.raises(SingularTime):
            dynamics.energy_level(mode, cfg, 0.0)

    def test_energy_spacing_unit(self):
        # lambda_n = n**2 at a = pi, N_m = 1/2, so the base unit is 1 at
        # nu = 1 and 4 at nu = 0.5.
        assert dynamics.energy_spacing_unit(math.pi, cfg_of(1.0)) \
            == pytest.approx(1.0)
        assert dynamics.energy_spacing_unit(math.pi, cfg_of(0.5)) \
            == pytest.approx(4.0)


class TestRecastResidual:
    def test_well_mode_sub_unit(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        hist = dynamics.well_amplitude_history(mode, cfg, 2.0, 1e-3)
        res = dynamics.hamiltonian_recast_residual(hist, mode.omega_n, cfg,
                                                   window=(0.1, 2.0))
        assert res.max_abs < 5e-3

    def test_unit_order_reduces_to_schrodinger(self):
        cfg = cfg_of(1.0)
        mode = dynamics.well_mode(1, math.pi, cfg)
        hist = dynamics.well_amplitude_history(mode, cfg, 2.0, 1e-3)
        res = dynamics.hamiltonian_recast_residual(hist, mode.omega_n, cfg,
                                                   window=(0.1, 2.0))
        assert res.max_abs < 1e-5

    def test_zero_history_zero_residual(self):
        times = np.linspace(0.0, 1.0, 101)
        hist = fraccalc.SampledSignal(times, np.zeros_like(times,
                                                           dtype=complex))
        res = dynamics.hamiltonian_recast_residual(hist, 1.0, cfg_of(0.5),
                                                   window=(0.1, 1.0),
                                                   initial_slope=0.0)
        assert res.max_abs == 0.0

    def test_super_unit_residual(self):
        from tfse.specfun import ml_two_ic
        cfg = cfg_of(1.5)
        times = np.arange(0.0, 2.0 + 5e-4, 1e-3)
        vals = np.array([ml_two_ic(1.0, cfg.nu, 1.0, 0.0, float(t))
                         for t in times])
        hist = fraccalc.SampledSignal(times, vals)
        res = dynamics.hamiltonian_recast_residual(hist, 1.0, cfg,
                                                   window=(0.1, 2.0),
                                                   initial_slope=0.0)
        assert res.max_abs < 5e-3


class TestContinuity:
    @pytest.mark.parametrize("nu", [0.5, 0.75])
    def test_source_balances_probability_change(self, nu):
        cfg = cfg_of(nu)
        mode = dynamics.well_mode(1, math.pi, cfg)
        samples = np.linspace(0.5, 5.0, 8)
        dpdt, int_s = dynamics.well_continuity_series(mode, cfg, samples)
        scale = np.abs(dpdt.values).max()
        assert np.abs(dpdt.values - int_s.values).max() < 0.02 * scale

    def test_rejects_zero_sample(self):
        cfg = cfg_of(0.5)
        mode = dynamics.well_mode(1, math.pi, cfg)
        with pytest.raises(SingularTime):
            dynamics.well_continuity_series(mode, cfg, np.array([0.0, 1.0]))
