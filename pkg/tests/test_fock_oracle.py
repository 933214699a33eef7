import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcnms import DomainError, OracleInfeasibleError, OscillatorParams, TimeGrid, evolve_closed
from qcnms.fock_oracle import (
    TruncationPolicy,
    oracle_alpha,
    oracle_number_moments,
    poisson_weights,
    truncation_order,
)
from scipy.stats import poisson

from conftest import at, first


def test_linear_limit():
    p = OscillatorParams.explicit(1.0, 0.0, 1.0)
    assert oracle_alpha(p, math.pi) == pytest.approx(-1.0, abs=1e-13)


def test_identity_at_zero(fig2_params):
    assert abs(oracle_alpha(fig2_params, 0.0) - fig2_params.alpha0) < 1e-13 * 30


@pytest.mark.parametrize("tau", [1.0, 15.0, 100.0])
def test_fig2_agreement(fig2_params, tau):
    closed = first(evolve_closed(fig2_params, at(tau)))
    assert abs(oracle_alpha(fig2_params, tau, TruncationPolicy.adaptive(1e-14)) - closed) < 1e-10


def test_array_input(fig2_params):
    taus = np.array([0.0, 1.0, 15.0])
    vals = oracle_alpha(fig2_params, taus)
    assert vals.shape == (3,)
    assert vals[2] == oracle_alpha(fig2_params, 15.0)


def test_poisson_weights_match_scipy():
    w = poisson_weights(900.0, 1200)
    assert np.allclose(w, poisson.pmf(np.arange(1201), 900.0), rtol=1e-10, atol=0)
    assert np.all(np.isfinite(w))


def test_adaptive_tail_below_tolerance():
    for lam in (1.0, 30.0, 900.0, 1e4):
        n = truncation_order(lam, TruncationPolicy.adaptive(1e-14))
        assert poisson.sf(n, lam) < 1e-14
        # not grossly oversized
        assert poisson.sf(n - 30, lam) > 1e-16 or n < 60


def test_hard_cap():
    p = OscillatorParams.explicit(1.0, 0.01, 2000.0)  # |alpha|^2 = 4e6
    with pytest.raises(OracleInfeasibleError):
        oracle_alpha(p, 1.0)
    small = TruncationPolicy.adaptive(1e-14, hard_cap=100)
    with pytest.raises(OracleInfeasibleError):
        oracle_alpha(OscillatorParams.explicit(1.0, 0.01, 10.0), 1.0, small)


def test_policy_validation():
    with pytest.raises(DomainError):
        TruncationPolicy.fixed(0)
    with pytest.raises(DomainError):
        TruncationPolicy.adaptive(1.5)


def test_fixed_truncation_monotone(fig2_params):
    closed = first(evolve_closed(fig2_params, at(15.0)))
    errs = [abs(oracle_alpha(fig2_params, 15.0, TruncationPolicy.fixed(n)) - closed) for n in range(850, 1100, 25)]
    floor = 1e-11
    for a, b in zip(errs, errs[1:]):
        assert b <= a or b < floor


def test_large_amplitude_stable():
    p = OscillatorParams.explicit(1.0, 1e-4, 100.0)  # |alpha|^2 = 1e4
    v = oracle_alpha(p, 50.0)
    assert cmath.isfinite(v)
    assert abs(v - first(evolve_closed(p, at(50.0)))) < 1e-9 * 100


@given(st.floats(1.0, 2000.0), st.floats(1e-4, 0.1), st.floats(0.0, 2.0), st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_series_matches_closed_form(n2, mu, frac, arg):
    alpha = math.sqrt(n2) * cmath.exp(1j * arg)
    p = OscillatorParams.explicit(1.0, mu, alpha)
    tau = frac * math.pi / mu
    closed = first(evolve_closed(p, at(tau)))
    assert abs(oracle_alpha(p, tau) - closed) < 1e-9 * abs(alpha)


class TestMoments:
    @pytest.mark.parametrize("tau", [0.0, 3.0, 900 * math.pi])
    def test_conserved(self, tau):
        p = OscillatorParams.explicit(1.0, 0.01, 10.0)
        assert oracle_number_moments(p, tau) == pytest.approx((100.0, 100.0), rel=1e-10)

    def test_vacuum(self):
        assert oracle_number_moments(OscillatorParams.explicit(1.0, 0.01, 0.0)) == (0.0, 0.0)

    def test_fig2_at_revival(self, fig2_params):
        assert oracle_number_moments(fig2_params, 900 * math.pi) == pytest.approx((900.0, 900.0), rel=1e-10)
