import math

import numpy as np
import pytest
from scipy.special import dawsn

from qcnms import (
    DomainError,
    NoCrossingError,
    NoPeakError,
    OscillatorParams,
    ResolutionTooCoarseError,
    TimeGrid,
    evolve_closed,
    to_phase_space,
)
from qcnms.open_system import DampedParams, evolve_damped
from qcnms.spectrum import Convention, detect_comb, dft, measure_linewidth, spacing_estimate

E_INV = Convention.E_INVERSE
HALF = Convention.HALF_MAX


def p_series(params, grid, gamma=0.0):
    series = evolve_damped(DampedParams(params, gamma), grid)
    return to_phase_space(series)[1]


class TestDft:
    def test_pure_tone(self):
        grid = TimeGrid.span(400.0, 0.02)
        spec = dft(np.cos(3.0 * grid.times), grid)
        lw = measure_linewidth(spec, E_INV, quantity="magnitude")
        assert lw.peak_freq == pytest.approx(3.0, abs=spec.bin_width / 2)
        # transform-limited width of a 400-long record
        assert lw.width < 4 * 2 * math.pi / 400

    def test_definition(self):
        grid = TimeGrid(0.5, 0.1, 16)
        s = np.exp(-0.3j * grid.times) + 0.2 * grid.times
        spec = dft(s, grid, zero_pad_factor=2)
        k = 5
        direct = np.sum(s * np.exp(-1j * spec.freqs[k] * grid.times)) * grid.dt
        assert spec.amplitudes[k] == pytest.approx(direct, rel=1e-12)
        assert spec.freqs[1] == pytest.approx(2 * math.pi / (32 * 0.1))

    def test_parseval(self):
        grid = TimeGrid(0.0, 0.05, 1000)
        s = np.exp(-((grid.times - 20) ** 2) / 50) * np.exp(2j * grid.times)
        spec = dft(s, grid, zero_pad_factor=1)
        lhs = np.sum(np.abs(s) ** 2) * grid.dt
        rhs = np.sum(spec.magnitude**2) * spec.bin_width / (2 * math.pi)
        assert rhs == pytest.approx(lhs, rel=1e-9)

    def test_gaussian_line_against_continuous_transform(self):
        sigma, nu0 = 15.0, 3.0
        grid = TimeGrid.span(400.0, 0.02)
        s = np.exp(-grid.times**2 / (2 * sigma**2)) * np.cos(nu0 * grid.times)
        spec = dft(s, grid)
        band = (spec.freqs > 2.7) & (spec.freqs < 3.3)
        d = spec.freqs[band] - nu0
        # one-sided transform of a half-Gaussian: sqrt(pi/2) sigma e^{-x^2} - i sqrt2 sigma F(x)
        x = d * sigma / math.sqrt(2)
        analytic = 0.5 * (math.sqrt(math.pi / 2) * sigma * np.exp(-(x**2)) - 1j * math.sqrt(2) * sigma * dawsn(x))
        assert np.max(np.abs(spec.amplitudes[band] - analytic)) < 0.01 * abs(analytic).max()
        lw = measure_linewidth(spec, E_INV)
        assert lw.width == pytest.approx(2 * math.sqrt(2) / sigma, rel=0.01)

    def test_too_short(self):
        with pytest.raises(DomainError):
            dft(np.ones(15), TimeGrid(0, 1, 15))

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            dft(np.ones(20), TimeGrid(0, 1, 30))

    def test_hann_window_option(self):
        grid = TimeGrid.span(100.0, 0.05)
        spec = dft(np.cos(2.0 * grid.times), grid, window="hann")
        lw = measure_linewidth(spec, HALF, quantity="magnitude")
        assert lw.peak_freq == pytest.approx(2.0, abs=0.01)
        with pytest.raises(DomainError):
            dft(np.cos(grid.times), grid, window="kaiser")


class TestLinewidth:
    def test_fig2(self, fig2_params, fig2_grid):
        lw = measure_linewidth(dft(p_series(fig2_params, fig2_grid), fig2_grid), E_INV)
        assert 0.173 <= lw.width <= 0.193
        assert lw.peak_freq == pytest.approx(3.0, abs=0.02)
        assert lw.interpolated

    def test_fig3a(self, fig2_params, fig2_grid):
        lw = measure_linewidth(dft(p_series(fig2_params, fig2_grid, 0.0005), fig2_grid), E_INV)
        assert lw.width == pytest.approx(0.186, abs=0.01)

    def test_fig3b(self, fig2_params, fig2_grid):
        lw = measure_linewidth(dft(p_series(fig2_params, fig2_grid, 0.5), fig2_grid), HALF)
        assert lw.width == pytest.approx(1.0, abs=0.05)

    @pytest.mark.parametrize("gamma", [0.5, 0.75, 1.0])
    def test_lorentzian_width(self, fig2_params, gamma):
        # gamma tau_hbar >> 1: width approaches 2 gamma
        grid = TimeGrid.span(400.0, 0.02)
        lw = measure_linewidth(dft(p_series(fig2_params, grid, gamma), grid), HALF)
        assert 0.9 <= lw.width / (2 * gamma) <= 1.1

    def test_intermediate_damping_is_voigt(self, fig2_params):
        # gamma tau_hbar = 3: Gaussian and Lorentzian widths combine
        gamma, grid = 0.2, TimeGrid.span(400.0, 0.02)
        lw = measure_linewidth(dft(p_series(fig2_params, grid, gamma), grid), HALF)
        f_l = 2 * gamma
        f_g = 2 * math.sqrt(2 * math.log(2)) / 15.0
        voigt = 0.5346 * f_l + math.sqrt(0.2166 * f_l**2 + f_g**2)
        assert lw.width == pytest.approx(voigt, rel=0.03)

    @pytest.mark.parametrize("eps", [1 / 100, 1 / 400, 1 / 900, 1 / 3600])
    def test_quantum_width_across_family(self, eps):
        p = OscillatorParams.canonical(eps, 1.0)
        t_h = 1 / (2 * math.sqrt(eps))
        # stay below the revival time so the fine structure is unresolved
        grid = TimeGrid.span(min(400.0, 0.5 * math.pi / eps), 0.02)
        lw = measure_linewidth(dft(p_series(p, grid), grid), E_INV)
        assert 0.85 <= lw.width / (2 * math.sqrt(2) / t_h) <= 1.1

    @pytest.mark.parametrize("pad", [4, 8])
    def test_zero_padding_invariance(self, fig2_params, fig2_grid, pad):
        s = p_series(fig2_params, fig2_grid)
        ref = measure_linewidth(dft(s, fig2_grid, zero_pad_factor=4), E_INV).width
        assert measure_linewidth(dft(s, fig2_grid, zero_pad_factor=pad), E_INV).width == pytest.approx(ref, rel=0.01)

    def test_magnitude_measurement_is_available(self, fig2_params, fig2_grid):
        spec = dft(p_series(fig2_params, fig2_grid), fig2_grid)
        real = measure_linewidth(spec, E_INV, quantity="real").width
        mag = measure_linewidth(spec, E_INV, quantity="magnitude").width
        # the half-record dispersive part broadens the magnitude profile
        assert mag > real

    def test_no_peak_on_boundary(self):
        grid = TimeGrid(0.0, 0.1, 64)
        with pytest.raises(NoPeakError):
            measure_linewidth(dft(np.ones(64), grid), E_INV)

    def test_no_crossing(self):
        grid = TimeGrid(0.0, 1.0, 16)
        rng_free = np.cos(np.arange(16) * 2 * math.pi * 4 / 16) + 0.9
        spec = dft(rng_free + 0j, grid, zero_pad_factor=1)
        with pytest.raises((NoCrossingError, NoPeakError)):
            measure_linewidth(spec, E_INV, quantity="magnitude")

    def test_unknown_quantity(self, fig2_params, fig2_grid):
        spec = dft(p_series(fig2_params, fig2_grid), fig2_grid)
        with pytest.raises(DomainError):
            measure_linewidth(spec, E_INV, quantity="phase")


class TestComb:
    def test_resolved_comb(self, fig1_params):
        tau_r = math.pi / fig1_params.mu_bar
        grid = TimeGrid.span(4 * tau_r, 0.05)
        lines = detect_comb(dft(p_series(fig1_params, grid), grid), 2 * fig1_params.mu_bar)
        assert len(lines) >= 5
        assert spacing_estimate(lines) == pytest.approx(0.02, rel=0.1)

    def test_short_record(self, fig1_params):
        tau_r = math.pi / fig1_params.mu_bar
        grid = TimeGrid.span(0.5 * tau_r, 0.05)
        spec = dft(p_series(fig1_params, grid), grid)
        try:
            assert detect_comb(spec, 0.02) == []
        except ResolutionTooCoarseError:
            pass

    def test_coarse_resolution_raises(self, fig2_params, fig2_grid):
        spec = dft(p_series(fig2_params, fig2_grid), fig2_grid)
        with pytest.raises(ResolutionTooCoarseError):
            detect_comb(spec, 2 * fig2_params.mu_bar)

    def test_damped_has_no_comb(self, fig1_params):
        tau_r = math.pi / fig1_params.mu_bar
        grid = TimeGrid.span(4 * tau_r, 0.05)
        spec = dft(p_series(fig1_params, grid, 0.5), grid)
        assert detect_comb(spec, 0.02) == []

    def test_spacing_needs_two_lines(self):
        with pytest.raises(DomainError):
            spacing_estimate([1.0])
