"""Closed-system observable dynamics of the quantum Kerr oscillator.

Everything here is dimensionless: time ``tau = omega t``, quantum
nonlinearity ``mu_bar = hbar mu / omega``, classical nonlinearity
``mu_cl = mu J / omega`` and quasi-classical parameter ``epsilon = hbar / J``.
The observable is ``alpha(tau) = <alpha| a(tau) |alpha>`` for an initial
coherent state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DomainError

_REL_TOL = 1e-12


def _close(a, b, rel=_REL_TOL):
    return abs(a - b) <= rel * max(abs(a), abs(b)) or a == b


@dataclass(frozen=True)
class OscillatorParams:
    """Kerr oscillator configuration.

    Use :meth:`canonical` for the quasi-classical family ``|alpha|^2 = 1/epsilon``
    and :meth:`explicit` for arbitrary amplitudes.
    """

    epsilon: float
    mu_bar: float
    mu_cl: float
    alpha0: complex
    canonical_mode: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        for name in ("epsilon", "mu_bar", "mu_cl"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not (cmath.isfinite(self.alpha0)):
            raise DomainError("alpha0 must be finite")
        if self.epsilon <= 0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not _close(self.mu_bar, self.epsilon * self.mu_cl):
            raise DomainError(
                f"mu_bar={self.mu_bar!r} != epsilon*mu_cl={self.epsilon * self.mu_cl!r}"
            )
        if self.canonical_mode and not _close(abs(self.alpha0) ** 2, 1.0 / self.epsilon):
            raise DomainError("canonical mode requires |alpha0|^2 = 1/epsilon")

    @classmethod
    def canonical(cls, epsilon: float, mu_cl: float, phase: float = 0.0) -> "OscillatorParams":
        if epsilon <= 0:
            raise DomainError(f"epsilon must be > 0, got {epsilon!r}")
        alpha = math.sqrt(1.0 / epsilon) * cmath.exp(1j * phase)
        return cls(epsilon, epsilon * mu_cl, mu_cl, alpha, canonical_mode=True)

    @classmethod
    def explicit(cls, epsilon: float, mu_bar: float, alpha: complex) -> "OscillatorParams":
        if epsilon <= 0:
            raise DomainError(f"epsilon must be > 0, got {epsilon!r}")
        return cls(epsilon, mu_bar, mu_bar / epsilon, alpha)

    @property
    def amplitude(self) -> float:
        return abs(self.alpha0)

    @property
    def n_mean(self) -> float:
        return abs(self.alpha0) ** 2


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    dt: float
    n_samples: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise DomainError(f"dt must be > 0, got {self.dt!r}")
        if self.t_start < 0 or not math.isfinite(self.t_start):
            raise DomainError(f"t_start must be >= 0, got {self.t_start!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise DomainError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @classmethod
    def span(cls, t_end: float, dt: float, t_start: float = 0.0) -> "TimeGrid":
        """Grid covering ``[t_start, t_end]`` inclusive (to within half a step)."""
        n = int(math.floor((t_end - t_start) / dt + 0.5)) + 1
        return cls(t_start, dt, n)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_samples)

    @property
    def duration(self) -> float:
        return self.dt * self.n_samples


@dataclass(frozen=True)
class ComplexSeries:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_samples,):
            raise DomainError(
                f"expected {self.grid.n_samples} values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def __len__(self):
        return self.grid.n_samples


@dataclass(frozen=True)
class ModulationDecomposition:
    envelope: np.ndarray
    phase: np.ndarray


def evolve_closed(params: OscillatorParams, grid: TimeGrid) -> ComplexSeries:
    """Exact quantum observable ``alpha(tau)`` of the closed oscillator."""
    tau = grid.times
    alpha = params.alpha0
    # |alpha|^2 (exp(-2i mu_bar tau) - 1); the real part is the log-envelope
    exponent = params.n_mean * np.expm1(-2j * params.mu_bar * tau)
    assert np.all(exponent.real <= 0.0), "log-envelope must be non-positive"
    values = alpha * np.exp(-1j * (1.0 + params.mu_bar) * tau) * np.exp(exponent)
    return ComplexSeries(grid, values)


def evolve_classical(params: OscillatorParams, grid: TimeGrid) -> ComplexSeries:
    """Classical trajectory: rotation at the nonlinear frequency ``1 + 2 mu_cl``."""
    tau = grid.times
    return ComplexSeries(grid, params.alpha0 * np.exp(-1j * (1.0 + 2.0 * params.mu_cl) * tau))


def tau_hbar(params: OscillatorParams) -> float:
    if params.mu_bar == 0 or params.amplitude == 0:
        raise DomainError("Ehrenfest time undefined for mu_bar = 0 or alpha = 0")
    return 1.0 / (2.0 * abs(params.mu_bar) * params.amplitude)


def evolve_gaussian_approx(params: OscillatorParams, grid: TimeGrid) -> ComplexSeries:
    """Short-time form: classical rotation under a Gaussian envelope of width tau_hbar.

    Only meaningful while ``mu_bar * tau << 1``; that is not checked.
    """
    t_h = tau_hbar(params)
    tau = grid.times
    classical = evolve_classical(params, grid).values
    return ComplexSeries(grid, classical * np.exp(-(tau**2) / (2.0 * t_h**2)))


def decompose_modulations(params: OscillatorParams, grid: TimeGrid) -> ModulationDecomposition:
    """Split the exact solution into amplitude and (unwrapped) phase modulation."""
    tau = grid.times
    mb, n = params.mu_bar, params.n_mean
    envelope = np.exp(-2.0 * n * np.sin(mb * tau) ** 2)
    phase = -(1.0 + mb) * tau - n * np.sin(2.0 * mb * tau)
    return ModulationDecomposition(envelope, phase)


def to_phase_space(series: ComplexSeries) -> tuple[np.ndarray, np.ndarray]:
    """Effective coordinate and momentum, ``x = (a* + a)/sqrt2``, ``p = i(a* - a)/sqrt2``."""
    v = series.values
    x = ((np.conj(v) + v) / math.sqrt(2.0)).real
    p = (1j * (np.conj(v) - v) / math.sqrt(2.0)).real
    return x, p


def pde_residual(params: OscillatorParams, tau: float, h: float, dps: int = 50) -> float:
    """Residual ``|df/dtau - K f|`` of the closed-form solution.

    ``f(alpha*, alpha, tau)`` is the exact solution regarded as a function of
    the initial point. The time derivative is analytic; the Wirtinger
    derivatives required by ``K`` come from central differences of step ``h``
    in Re(alpha) and Im(alpha), evaluated in ``dps``-digit arithmetic so that
    only the O(h^2) truncation error survives.
    """
    if not h > 0:
        raise DomainError(f"finite-difference step must be > 0, got {h!r}")
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    mb = ctx.mpf(params.mu_bar)
    t = ctx.mpf(tau)
    hh = ctx.mpf(h)
    a0 = ctx.mpc(params.alpha0.real, params.alpha0.imag)
    x0, y0 = a0.real, a0.imag
    rot = ctx.exp(-1j * (1 + mb) * t)
    bend = ctx.expm1(-2j * mb * t)

    def f(dx, dy):
        z = ctx.mpc(x0 + dx, y0 + dy)
        w = ctx.conj(z)
        return z * rot * ctx.exp(z * w * bend)

    f0 = f(0, 0)
    fx = (f(hh, 0) - f(-hh, 0)) / (2 * hh)
    fy = (f(0, hh) - f(0, -hh)) / (2 * hh)
    fxx = (f(hh, 0) - 2 * f0 + f(-hh, 0)) / hh**2
    fyy = (f(0, hh) - 2 * f0 + f(0, -hh)) / hh**2
    fxy = (f(hh, hh) - f(hh, -hh) - f(-hh, hh) + f(-hh, -hh)) / (4 * hh**2)

    d_a = (fx - 1j * fy) / 2
    d_ac = (fx + 1j * fy) / 2
    d_aa = (fxx - 2j * fxy - fyy) / 4
    d_acac = (fxx + 2j * fxy - fyy) / 4

    ac = ctx.conj(a0)
    n = a0 * ac
    k_f = 1j * (1 + mb + 2 * mb * n) * (ac * d_ac - a0 * d_a) + 1j * mb * (
        ac**2 * d_acac - a0**2 * d_aa
    )
    df_dt = f0 * (-1j * (1 + mb) - 2j * mb * n * ctx.exp(-2j * mb * t))
    return float(abs(df_dt - k_f))
