"""Open-system dynamics: phenomenological damping and exact pure dephasing.

The pure-dephasing model couples ``a^dagger a`` to the bath occupation
numbers, so the observable picks up a multiplicative factor
``R(tau) = prod_q R_q(tau)`` with

    R_q(tau) = (1 - exp(-x_q)) / (1 - exp(-x_q - i phi_q)),
    x_q = hbar omega_q / kT,  phi_q = hbar lambda_q tau / omega.

For a continuum bath the product becomes ``exp(V/(2 pi^2) int q^2 ln R_q dq)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .core import ComplexSeries, OscillatorParams, TimeGrid, evolve_closed, tau_hbar
from .errors import DomainError, QuadratureError

MAX_X = 700.0
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 500
QUAD_ACCEPT = 1e-8


@dataclass(frozen=True)
class DampedParams:
    base: OscillatorParams
    gamma: float

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be >= 0, got {self.gamma!r}")

    @property
    def tau_gamma(self) -> float:
        return math.inf if self.gamma == 0 else 1.0 / self.gamma


def evolve_damped(dp: DampedParams, grid: TimeGrid) -> ComplexSeries:
    closed = evolve_closed(dp.base, grid)
    return ComplexSeries(grid, closed.values * np.exp(-dp.gamma * grid.times))


# -- bath descriptions ------------------------------------------------------


@dataclass(frozen=True)
class PowerLawCutoff:
    """``A q^s exp(-q/q_c)``; ``q_c = inf`` disables the cutoff."""

    A: float
    s: float = 0.0
    q_c: float = math.inf

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        out = self.A * q**self.s
        if math.isfinite(self.q_c):
            out = out * np.exp(-q / self.q_c)
        return out


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation through samples ``(q_i, v_i)``; constant beyond the ends."""

    q: tuple
    values: tuple

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        vals = tuple(float(v) for v in self.values)
        if len(q) != len(vals) or len(q) < 2:
            raise DomainError("tabulated function needs >= 2 matching samples")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise DomainError("tabulated q must be strictly increasing")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "values", vals)
        # arrays for np.interp, which would otherwise convert the tuples on every call
        object.__setattr__(self, "_q_arr", np.array(q))
        object.__setattr__(self, "_v_arr", np.array(vals))

    def __call__(self, q):
        return np.interp(q, self._q_arr, self._v_arr)


@dataclass(frozen=True)
class BathSpec:
    hbar: float
    kT: float
    omega: float
    volume: float
    dispersion: Callable = field(compare=False)
    coupling: Callable = field(compare=False)
    q_max: Optional[float] = None

    def __post_init__(self):
        for name in ("hbar", "kT", "omega", "volume"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"bath {name} must be > 0, got {value!r}")
        if self.q_max is not None and not self.q_max > 0:
            raise DomainError(f"q_max must be > 0, got {self.q_max!r}")

    @property
    def density(self) -> float:
        """Mode density prefactor ``V / (2 pi^2)`` of the isotropic 3-D continuum."""
        return self.volume / (2.0 * math.pi**2)


@dataclass(frozen=True)
class DiscreteBath:
    """Finite set of bath modes ``(omega_q, lambda_q[, weight])``.

    ``weight`` is the number of physical modes a sample stands for (1 for a
    literal mode list); the product becomes ``prod R_q ** weight``.
    """

    modes: tuple
    hbar: float
    kT: float
    omega: float

    def __post_init__(self):
        modes = []
        for m in self.modes:
            if len(m) == 2:
                m = (m[0], m[1], 1.0)
            wq, lq, g = (float(v) for v in m)
            if not wq > 0:
                raise DomainError(f"bath mode frequency must be > 0, got {wq!r}")
            if not g >= 0:
                raise DomainError(f"mode weight must be >= 0, got {g!r}")
            modes.append((wq, lq, g))
        if not modes:
            raise DomainError("a discrete bath needs at least one mode")
        object.__setattr__(self, "modes", tuple(modes))
        for name in ("hbar", "kT", "omega"):
            if not getattr(self, name) > 0:
                raise DomainError(f"bath {name} must be > 0")

    @classmethod
    def riemann(cls, spec: BathSpec, n_modes: int, q_max: Optional[float] = None) -> "DiscreteBath":
        """Midpoint sampling of a continuum bath on ``(0, q_max]``."""
        q_max = q_max or default_q_max(spec)
        dq = q_max / n_modes
        q = (np.arange(n_modes) + 0.5) * dq
        weights = spec.density * q**2 * dq
        modes = tuple(zip(spec.dispersion(q), spec.coupling(q), weights))
        return cls(modes, spec.hbar, spec.kT, spec.omega)


Bath = Union[BathSpec, DiscreteBath]


# -- single-mode factor -----------------------------------------------------


def mode_dephasing_factor(hbar, kT, omega, omega_q, lambda_q, tau):
    """Thermal factor of one bath mode (vectorised over any argument)."""
    if not kT > 0:
        raise DomainError(f"kT must be > 0, got {kT!r}")
    omega_q = np.asarray(omega_q, dtype=float)
    if np.any(omega_q <= 0):
        raise DomainError("bath mode frequencies must be > 0")
    x = hbar * omega_q / kT
    if np.any(x > MAX_X):
        raise DomainError(f"hbar*omega_q/kT > {MAX_X}: outside the model's regime")
    phi = hbar * np.asarray(lambda_q, dtype=float) * np.asarray(tau, dtype=float) / omega
    out = np.expm1(-x) / np.expm1(-x - 1j * phi)
    return complex(out) if np.ndim(out) == 0 else out


def _log_abs_factor(x, phi):
    # |R_q|^2 = 1 / (1 + sin^2(phi/2) / sinh^2(x/2)); stable for x -> 0
    s = np.sin(0.5 * phi) / np.sinh(0.5 * x)
    return -0.5 * np.log1p(s * s)


def _arg_factor(x, phi):
    e = np.exp(-x)
    re = -np.expm1(-x) + 2.0 * e * np.sin(0.5 * phi) ** 2
    return -np.arctan2(e * np.sin(phi), re)


# -- continuum quadrature ---------------------------------------------------


def _breakpoints(spec, q_max):
    """Nodes of tabulated bath functions inside ``(0, q_max)``; kinks slow QUADPACK down."""
    nodes = set()
    for fn in (spec.dispersion, spec.coupling):
        if isinstance(fn, Tabulated):
            nodes.update(q for q in fn.q if 0.0 < q < q_max)
    return sorted(nodes)


POINTS_PER_CHUNK = 50


def _integrate(fn, q_max, what, points=()):
    # split long breakpoint lists into chunks; QUADPACK's breakpoint routine degrades with many
    edges = [0.0] + list(points) + [q_max]
    value = err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for i in range(0, len(edges) - 1, POINTS_PER_CHUNK):
            chunk = edges[i : i + POINTS_PER_CHUNK + 1]
            inner = chunk[1:-1]
            v, e, *rest = quad(
                fn,
                chunk[0],
                chunk[-1],
                epsabs=0.0,
                epsrel=QUAD_EPSREL,
                limit=max(QUAD_LIMIT, 4 * len(inner)),
                full_output=1,
                **({"points": inner} if inner else {}),
            )
            value += v
            err += e
    if not math.isfinite(value):
        raise QuadratureError(f"{what}: non-finite integral", value, err)
    if err > max(QUAD_ACCEPT * abs(value), 1e-300):
        raise QuadratureError(
            f"{what}: tolerance not reached (estimate {value:.6g} +- {err:.2g})", value, err
        )
    return value


def _classical_integrand(spec: BathSpec):
    def g(q):
        if q == 0.0:
            return 0.0
        w = float(spec.dispersion(q))
        lam = float(spec.coupling(q))
        return q * q * lam * lam / (w * w)

    return g


def _check_small_q(g, q_ref):
    # flags integrands growing faster than ~q^(-2/3) as q -> 0
    small, mid = g(1e-12 * q_ref), g(1e-3 * q_ref)
    if not math.isfinite(small) or small > 1e6 * max(mid, 1e-300):
        raise DomainError("classical dephasing integral diverges at q -> 0")


def default_q_max(spec: BathSpec, rel_tail: float = 1e-10, start: float = 1.0) -> float:
    """Cutoff whose neglected tail of ``q^2 lambda^2 / omega_q^2`` is below ``rel_tail``.

    The exact dephasing integrand is bounded by this classical one, so the
    same cutoff serves both.
    """
    if spec.q_max is not None:
        return spec.q_max
    g = _classical_integrand(spec)
    _check_small_q(g, start)
    q = start
    body = _integrate(g, q, "q_max search", _breakpoints(spec, q))
    for _ in range(200):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            tail = quad(g, q, 2 * q, epsabs=0.0, epsrel=1e-8, limit=QUAD_LIMIT)[0]
        if body > 0 and abs(tail) < rel_tail * body:
            return 2 * q
        body += tail
        q *= 2
    if body == 0.0:
        return start  # uncoupled bath: any cutoff gives exactly zero
    raise DomainError("could not find a cutoff: coupling integrand does not decay")


def _mode_xphi(spec: BathSpec, q, tau):
    w = float(spec.dispersion(q))
    if not w > 0:
        raise DomainError(f"dispersion must be > 0 on (0, q_max]; got {w!r} at q={q!r}")
    x = spec.hbar * w / spec.kT
    if x > MAX_X:
        raise DomainError(f"hbar*omega_q/kT > {MAX_X} at q={q!r}")
    phi = spec.hbar * float(spec.coupling(q)) * tau / spec.omega
    return x, phi


def gamma_exact(bath: BathSpec, tau: float) -> float:
    """Decoherence exponent ``Gamma(tau) = -V/(2 pi^2) int q^2 ln|R_q(tau)| dq``."""
    if tau == 0:
        return 0.0
    q_max = default_q_max(bath)

    def integrand(q):
        if q == 0.0:
            return 0.0
        x, phi = _mode_xphi(bath, q, tau)
        return -q * q * _log_abs_factor(x, phi)

    return max(0.0, bath.density * _integrate(integrand, q_max, "Gamma(tau)", _breakpoints(bath, q_max)))


def phase_exact(bath: BathSpec, tau: float) -> float:
    """Total bath phase ``V/(2 pi^2) int q^2 arg R_q(tau) dq``."""
    if tau == 0:
        return 0.0
    q_max = default_q_max(bath)

    def integrand(q):
        if q == 0.0:
            return 0.0
        x, phi = _mode_xphi(bath, q, tau)
        return q * q * _arg_factor(x, phi)

    return bath.density * _integrate(integrand, q_max, "phase(tau)", _breakpoints(bath, q_max))


def gamma_classical(bath: BathSpec) -> float:
    """Decoherence time ``tau_d`` of the classical (Gaussian) limit."""
    g = _classical_integrand(bath)
    _check_small_q(g, bath.q_max or 1.0)
    q_max = default_q_max(bath)
    integral = _integrate(g, q_max, "tau_d integral", _breakpoints(bath, q_max))
    inv_sq = bath.density * (bath.kT / bath.omega) ** 2 * integral
    if not inv_sq > 0:
        raise DomainError("bath is uncoupled: tau_d is infinite")
    return 1.0 / math.sqrt(inv_sq)


def phase_drift_classical(bath: BathSpec, tau: float) -> float:
    """Classical-limit bath phase, linear in ``tau``."""
    q_max = default_q_max(bath)

    def integrand(q):
        if q == 0.0:
            return 0.0
        return q * q * float(bath.coupling(q)) / float(bath.dispersion(q))

    rate = -bath.density * bath.kT / bath.omega * _integrate(integrand, q_max, "phase rate", _breakpoints(bath, q_max))
    return rate * tau


def dephasing_factor(bath: Bath, tau) -> np.ndarray:
    """``R(tau)`` for a discrete or continuum bath, on an array of times."""
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if isinstance(bath, DiscreteBath):
        log_r = np.zeros(taus.shape, dtype=complex)
        for wq, lq, g in bath.modes:
            if lq == 0.0 or g == 0.0:
                continue
            x = bath.hbar * wq / bath.kT
            if x > MAX_X:
                raise DomainError(f"hbar*omega_q/kT > {MAX_X}: outside the model's regime")
            phi = bath.hbar * lq * taus / bath.omega
            # log R_q from the stable forms; weakly coupled modes sit within
            # 1e-16 of 1 where log(R_q) of the literal ratio is pure rounding
            log_r += g * (_log_abs_factor(x, phi) + 1j * _arg_factor(x, phi))
        return np.exp(log_r)
    out = np.empty(taus.shape, dtype=complex)
    cache = {}
    for i, t in enumerate(taus):
        if t not in cache:
            cache[t] = np.exp(-gamma_exact(bath, t) + 1j * phase_exact(bath, t))
        out[i] = cache[t]
    return out


def evolve_open(params: OscillatorParams, bath: Bath, grid: TimeGrid) -> ComplexSeries:
    closed = evolve_closed(params, grid)
    return ComplexSeries(grid, closed.values * dephasing_factor(bath, grid.times))


# -- which mechanism sets the linewidth -------------------------------------


class Dominant(enum.Enum):
    QUANTUM_WIDTH = "quantum_width"
    ENVIRONMENT_WIDTH = "environment_width"


@dataclass(frozen=True)
class CrossoverReport:
    dominant: Dominant
    tau_hbar: float
    tau_env: float
    source: str


def crossover_analysis(
    params: OscillatorParams,
    bath: Optional[BathSpec] = None,
    gamma: Optional[float] = None,
    margin: float = 0.5,
) -> CrossoverReport:
    """QUANTUM_WIDTH iff ``tau_hbar < margin * tau_env`` (ties go to the environment)."""
    if (bath is None) == (gamma is None):
        raise DomainError("give exactly one of bath or gamma")
    t_hbar = tau_hbar(params)
    if bath is not None:
        tau_env, source = gamma_classical(bath), "tau_d"
    else:
        if not gamma >= 0:
            raise DomainError(f"gamma must be >= 0, got {gamma!r}")
        tau_env, source = (math.inf if gamma == 0 else 1.0 / gamma), "tau_gamma"
    dominant = Dominant.QUANTUM_WIDTH if t_hbar < margin * tau_env else Dominant.ENVIRONMENT_WIDTH
    return CrossoverReport(dominant, t_hbar, tau_env, source)


def ohmic_test_bath(
    hbar: float = 1e-2,
    kT: float = 1.0,
    omega: float = 1.0,
    volume: float = 2.5e17,
    c: float = 1.0,
    lambda0: Optional[float] = None,
    q_c: float = 1.0,
    tau_d: float = 10.0,
) -> BathSpec:
    """Ohmic-like bath ``omega_q = c q``, ``lambda_q = lambda0 exp(-q/q_c)``.

    When ``lambda0`` is omitted it is chosen so the classical decoherence time
    equals ``tau_d``. The large default volume keeps each mode weakly coupled,
    which is where the Gaussian classical limit applies.
    """
    if lambda0 is None:
        # 1/tau_d^2 = V/(2 pi^2) (kT/omega)^2 lambda0^2 q_c / (2 c^2)
        lambda0 = 1.0 / (tau_d * math.sqrt(volume / (4 * math.pi**2) * q_c) * kT / (omega * c))
    return BathSpec(
        hbar=hbar,
        kT=kT,
        omega=omega,
        volume=volume,
        dispersion=PowerLawCutoff(c, 1.0),
        coupling=PowerLawCutoff(lambda0, 0.0, q_c),
    )
