import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcnms import DomainError, OscillatorParams, QuadratureError, TimeGrid, evolve_closed
from qcnms import open_system as osys
from qcnms.open_system import (
    BathSpec,
    DampedParams,
    DiscreteBath,
    Dominant,
    PowerLawCutoff,
    Tabulated,
    crossover_analysis,
    dephasing_factor,
    evolve_damped,
    evolve_open,
    gamma_classical,
    gamma_exact,
    mode_dephasing_factor,
    ohmic_test_bath,
    phase_drift_classical,
    phase_exact,
)

from conftest import at


def scaled(bath, **changes):
    fields = dict(
        hbar=bath.hbar, kT=bath.kT, omega=bath.omega, volume=bath.volume,
        dispersion=bath.dispersion, coupling=bath.coupling, q_max=bath.q_max,
    )
    fields.update(changes)
    return BathSpec(**fields)


class TestDamped:
    def test_zero_gamma(self, fig2_params, fig2_grid):
        damped = evolve_damped(DampedParams(fig2_params, 0.0), fig2_grid).values
        assert np.array_equal(damped, evolve_closed(fig2_params, fig2_grid).values)

    def test_modulus(self, fig2_params):
        v = evolve_damped(DampedParams(fig2_params, 0.5), at(2.0)).values[0]
        assert abs(v) == pytest.approx(abs(evolve_closed(fig2_params, at(2.0)).values[0]) * math.exp(-1))

    def test_validation(self, fig2_params):
        with pytest.raises(DomainError):
            DampedParams(fig2_params, -0.1)
        assert DampedParams(fig2_params, 0.0).tau_gamma == math.inf
        assert DampedParams(fig2_params, 0.0005).tau_gamma == pytest.approx(2000)


class TestModeFactor:
    def test_uncoupled(self):
        assert mode_dephasing_factor(1.0, 1.0, 1.0, 2.0, 0.0, 5.0) == 1.0

    def test_time_zero(self):
        assert mode_dephasing_factor(1.0, 1.0, 1.0, 2.0, 0.7, 0.0) == 1.0

    def test_recurrence(self):
        # hbar lambda tau / omega = 2 pi
        r = mode_dephasing_factor(0.5, 1.0, 2.0, 1.3, 3.0, 2 * math.pi * 2.0 / (0.5 * 3.0))
        assert r == pytest.approx(1.0, abs=1e-12)

    def test_frozen_mode(self):
        with pytest.raises(DomainError):
            mode_dephasing_factor(1.0, 1e-3, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            mode_dephasing_factor(1.0, 0.0, 1.0, 1.0, 1.0, 1.0)

    @given(st.floats(1e-3, 50.0), st.floats(-20.0, 20.0))
    @settings(max_examples=150, deadline=None)
    def test_stable_forms_match_literal(self, x, phi):
        r = mode_dephasing_factor(1.0, 1.0, 1.0, x, phi, 1.0)
        assert abs(r) <= 1 + 1e-12
        assert osys._log_abs_factor(x, phi) == pytest.approx(math.log(abs(r)), abs=1e-10)
        assert osys._arg_factor(x, phi) == pytest.approx(np.angle(r), abs=1e-10)


class TestDiscreteBath:
    def test_uncoupled_bath_is_closed(self, fig2_params):
        bath = DiscreteBath(((1.0, 0.0), (2.0, 0.0)), hbar=0.1, kT=1.0, omega=1.0)
        grid = TimeGrid(0.0, 0.5, 100)
        assert np.array_equal(evolve_open(fig2_params, bath, grid).values, evolve_closed(fig2_params, grid).values)

    def test_product_of_modes(self):
        modes = ((1.0, 0.3), (2.5, -0.7), (0.4, 1.1))
        bath = DiscreteBath(modes, hbar=0.8, kT=1.3, omega=1.0)
        taus = np.linspace(0, 20, 41)
        expected = np.prod([mode_dephasing_factor(0.8, 1.3, 1.0, w, l, taus) for w, l in modes], axis=0)
        assert np.allclose(dephasing_factor(bath, taus), expected, rtol=1e-12, atol=1e-14)

    def test_weights_are_powers(self):
        one = DiscreteBath(((1.0, 0.5, 3.0),), hbar=1.0, kT=1.0, omega=1.0)
        three = DiscreteBath(((1.0, 0.5),) * 3, hbar=1.0, kT=1.0, omega=1.0)
        taus = np.linspace(0, 5, 11)
        assert np.allclose(dephasing_factor(one, taus), dephasing_factor(three, taus), rtol=1e-13)

    def test_validation(self):
        with pytest.raises(DomainError):
            DiscreteBath((), hbar=1.0, kT=1.0, omega=1.0)
        with pytest.raises(DomainError):
            DiscreteBath(((0.0, 1.0),), hbar=1.0, kT=1.0, omega=1.0)

    @given(st.lists(st.tuples(st.floats(0.05, 5.0), st.floats(-3.0, 3.0)), min_size=1, max_size=6), st.floats(0, 50))
    @settings(max_examples=60, deadline=None)
    def test_modulus_bounded(self, modes, tau):
        bath = DiscreteBath(tuple(modes), hbar=0.5, kT=1.0, omega=1.0)
        r = dephasing_factor(bath, [0.0, tau])
        assert r[0] == 1.0
        assert abs(r[1]) <= 1 + 1e-12

    def test_riemann_converges_to_quadrature(self):
        bath = ohmic_test_bath()
        target = gamma_exact(bath, 10.0)
        errs = []
        for n in (100, 200, 400):
            r = dephasing_factor(DiscreteBath.riemann(bath, n), [10.0])[0]
            errs.append(abs(-math.log(abs(r)) - target))
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert min(orders) >= 1.0


class TestContinuum:
    def test_zero_time(self):
        bath = ohmic_test_bath()
        assert gamma_exact(bath, 0.0) == 0.0
        assert phase_exact(bath, 0.0) == 0.0
        assert phase_drift_classical(bath, 0.0) == 0.0

    def test_uncoupled(self):
        bath = scaled(ohmic_test_bath(), coupling=PowerLawCutoff(0.0))
        assert gamma_exact(bath, 3.0) == 0.0
        with pytest.raises(DomainError):
            gamma_classical(bath)

    def test_ohmic_bath_calibration(self):
        assert gamma_classical(ohmic_test_bath(tau_d=7.0)) == pytest.approx(7.0, rel=1e-8)

    def test_tau_d_scalings(self):
        bath = ohmic_test_bath()
        base = gamma_classical(bath)
        lam2 = scaled(bath, coupling=PowerLawCutoff(2 * bath.coupling.A, 0.0, bath.coupling.q_c))
        assert gamma_classical(lam2) == pytest.approx(base / 2, rel=1e-8)
        assert gamma_classical(scaled(bath, kT=2 * bath.kT)) == pytest.approx(base / 2, rel=1e-8)

    def test_divergent_small_q(self):
        bath = scaled(
            ohmic_test_bath(), dispersion=PowerLawCutoff(1.0, 2.0), coupling=PowerLawCutoff(1e-8, 0.0)
        )
        with pytest.raises(DomainError):
            gamma_classical(bath)

    def test_classical_gaussian(self):
        bath = ohmic_test_bath(hbar=1e-3)
        tau_d = gamma_classical(bath)
        for tau in (0.5 * tau_d, tau_d, 2 * tau_d):
            assert gamma_exact(bath, tau) == pytest.approx(tau**2 / (2 * tau_d**2), rel=1e-3)

    def test_gaussian_fit_recovers_tau_d(self):
        bath = ohmic_test_bath(hbar=1e-3)
        tau_d = gamma_classical(bath)
        taus = np.linspace(0.1, 1.0, 10) * tau_d
        gammas = np.array([gamma_exact(bath, t) for t in taus])
        # least squares Gamma = c tau^2
        c = np.sum(gammas * taus**2) / np.sum(taus**4)
        assert 1 / math.sqrt(2 * c) == pytest.approx(tau_d, rel=0.01)

    def test_classical_error_shrinks_with_hbar(self):
        errs = []
        for hbar in (1e-2, 5e-3):
            bath = ohmic_test_bath(hbar=hbar)
            tau_d = gamma_classical(bath)
            taus = np.linspace(0.2, 2.0, 10) * tau_d
            errs.append(max(abs(gamma_exact(bath, t) / (t**2 / (2 * tau_d**2)) - 1) for t in taus))
        assert errs[1] < errs[0]

    def test_phase_drift(self):
        bath = ohmic_test_bath()
        rates = [phase_drift_classical(bath, t) / t for t in (1.0, 10.0, 100.0)]
        assert max(rates) - min(rates) <= 1e-10 * abs(rates[0])
        flipped = scaled(bath, coupling=PowerLawCutoff(-bath.coupling.A, 0.0, bath.coupling.q_c))
        assert phase_drift_classical(flipped, 3.0) == pytest.approx(-phase_drift_classical(bath, 3.0), rel=1e-12)

    def test_exact_phase_tends_to_drift(self):
        bath = ohmic_test_bath(hbar=1e-4)
        assert phase_exact(bath, 10.0) == pytest.approx(phase_drift_classical(bath, 10.0), rel=1e-3)

    def test_continuum_factor_bounded(self):
        bath = ohmic_test_bath()
        r = dephasing_factor(bath, [0.0, 5.0, 10.0, 5.0])
        assert r[0] == 1.0 and np.all(np.abs(r) <= 1.0)
        assert r[1] == r[3]

    def test_tabulated_bath(self):
        q = np.linspace(0.0, 40.0, 4001)
        ref = ohmic_test_bath()
        tab = scaled(ref, coupling=Tabulated(q, ref.coupling(q)), q_max=40.0)
        assert gamma_classical(tab) == pytest.approx(gamma_classical(ref), rel=1e-4)

    def test_open_envelope_in_classical_limit(self, fig2_params):
        bath = ohmic_test_bath(hbar=1e-3)
        grid = TimeGrid(0.0, 1.0, 21)
        ratio = evolve_open(fig2_params, bath, grid).values / evolve_closed(fig2_params, grid).values
        gauss = np.exp(-grid.times**2 / (2 * gamma_classical(bath) ** 2))
        assert np.max(np.abs(np.abs(ratio) - gauss)) < 0.01

    def test_quadrature_failure_reports_estimate(self):
        with pytest.raises(QuadratureError) as info:
            osys._integrate(lambda q: math.sin(1e6 * q) * q, 10.0, "oscillatory")
        assert info.value.error is not None and info.value.estimate is not None

    def test_bath_validation(self):
        with pytest.raises(DomainError):
            scaled(ohmic_test_bath(), volume=0.0)
        with pytest.raises(DomainError):
            Tabulated((0.0, 0.0), (1.0, 2.0))


class TestCrossover:
    def test_fig3a(self, fig2_params):
        r = crossover_analysis(fig2_params, gamma=0.0005)
        assert r.dominant is Dominant.QUANTUM_WIDTH
        assert (r.tau_hbar, r.tau_env) == pytest.approx((15.0, 2000.0))

    def test_fig3b(self, fig2_params):
        assert crossover_analysis(fig2_params, gamma=0.5).dominant is Dominant.ENVIRONMENT_WIDTH

    def test_tie_goes_to_environment(self, fig2_params):
        assert crossover_analysis(fig2_params, gamma=1 / 15.0, margin=1.0).dominant is Dominant.ENVIRONMENT_WIDTH

    def test_bath(self, fig2_params):
        r = crossover_analysis(fig2_params, bath=ohmic_test_bath(tau_d=100.0))
        assert r.dominant is Dominant.QUANTUM_WIDTH and r.source == "tau_d"

    def test_exactly_one_source(self, fig2_params):
        with pytest.raises(DomainError):
            crossover_analysis(fig2_params)
        with pytest.raises(DomainError):
            crossover_analysis(fig2_params, bath=ohmic_test_bath(), gamma=0.1)
