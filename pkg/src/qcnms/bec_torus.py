"""Single-mode Bose-Einstein condensate on a 1-D torus.

Dimensionless time is ``tau = hbar t / (2 m R^2)`` and the interaction
parameter is ``eps = 4 R a / S``. Physical estimates use CGS units.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .core import ComplexSeries, TimeGrid
from .errors import DomainError

# CGS constants
HBAR_CGS = 1.054571817e-27  # erg s
ATOMIC_MASS_UNIT_G = 1.66053906660e-24
RB87_MASS_G = 86.909180527 * ATOMIC_MASS_UNIT_G  # 1.443e-22 g


@dataclass(frozen=True)
class BecTorusParams:
    R: float  # torus radius, cm
    S: float  # cross-section area, cm^2
    a: float  # s-wave scattering length, cm
    m: float  # atomic mass, g
    N: int
    k: int = 0

    def __post_init__(self):
        for name in ("R", "S", "m"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.a > 0:
            raise DomainError("only repulsive interactions (a > 0) are supported")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if int(self.k) != self.k:
            raise DomainError(f"mode index k must be an integer, got {self.k!r}")


@dataclass(frozen=True)
class BecModeState:
    alpha_k: complex
    epsilon_int: float

    def __post_init__(self):
        object.__setattr__(self, "alpha_k", complex(self.alpha_k))
        if not math.isfinite(self.epsilon_int):
            raise DomainError("epsilon_int must be finite")

    @classmethod
    def coherent(cls, N: float, epsilon_int: float, phase: float = 0.0) -> "BecModeState":
        """All ``N`` atoms in one mode, ``alpha_k = sqrt(N) exp(-i phase)``."""
        if not N >= 0:
            raise DomainError(f"N must be >= 0, got {N!r}")
        return cls(math.sqrt(N) * cmath.exp(-1j * phase), epsilon_int)

    @classmethod
    def from_params(cls, p: BecTorusParams, phase: float = 0.0) -> "BecModeState":
        return cls.coherent(p.N, epsilon_param(p), phase)

    @property
    def N(self) -> float:
        return abs(self.alpha_k) ** 2


def epsilon_param(p: BecTorusParams) -> float:
    return 4.0 * p.R * p.a / p.S


def evolve_single_mode(state: BecModeState, k: int, grid: TimeGrid) -> ComplexSeries:
    """Exact single-mode quantum observable (finite-amplitude periodic wave)."""
    tau = grid.times
    eps = state.epsilon_int
    exponent = -1j * k**2 * tau + np.expm1(-1j * eps * tau) * state.N
    return ComplexSeries(grid, np.exp(exponent) * state.alpha_k)


def evolve_gp(state: BecModeState, k: int, grid: TimeGrid) -> ComplexSeries:
    """Gross-Pitaevskii (mean-field) rotation, constant modulus ``sqrt(N)``."""
    tau = grid.times
    phase = (k**2 + state.epsilon_int * state.N) * tau
    return ComplexSeries(grid, np.exp(-1j * phase) * state.alpha_k)


def bec_timescales(state: BecModeState) -> tuple[float, float]:
    eps = abs(state.epsilon_int)
    if eps == 0:
        raise DomainError("time-scales undefined for a non-interacting condensate")
    if state.N < 1:
        raise DomainError("time-scales need at least one atom")
    return 1.0 / (abs(state.alpha_k) * eps), 2.0 * math.pi / eps


def t_hbar_physical(p: BecTorusParams, hbar: float = HBAR_CGS) -> tuple[float, float]:
    """``(t_hbar in s, bandwidth 2 sqrt2 / t_hbar in Hz)``."""
    t_h = p.m * p.R * p.S / (2.0 * hbar * math.sqrt(p.N) * p.a)
    return t_h, 2.0 * math.sqrt(2.0) / t_h


def bec_pde_residual(state: BecModeState, k: int, tau: float, h: float, dps: int = 50) -> float:
    """Residual of the action-angle PDE on the closed-form solution.

    The solution is written as ``f(N, theta)`` via ``alpha_k = sqrt(N) e^{-i theta}``.
    Derivatives in ``theta`` are analytic (``d/dtheta = -i``), the ``N`` derivative
    is a central difference of step ``h`` in ``dps``-digit arithmetic.
    """
    if not h > 0:
        raise DomainError(f"finite-difference step must be > 0, got {h!r}")
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    eps = ctx.mpf(state.epsilon_int)
    t = ctx.mpf(tau)
    hh = ctx.mpf(h)
    n0 = ctx.mpf(abs(state.alpha_k)) ** 2
    theta = -ctx.mpf(cmath.phase(state.alpha_k)) if state.alpha_k != 0 else ctx.mpf(0)
    k2 = ctx.mpf(k) ** 2
    decay = 1 - ctx.exp(-1j * eps * t)

    def f(n):
        alpha = ctx.sqrt(n) * ctx.exp(-1j * theta)
        return ctx.exp(-1j * k2 * t - decay * n) * alpha

    f0 = f(n0)
    df_dn = (f(n0 + hh) - f(n0 - hh)) / (2 * hh)
    df_dtheta = -1j * f0
    d2f_dn_dtheta = -1j * df_dn
    rhs = (k2 - eps / 2 + eps * n0) * df_dtheta + eps * n0 * d2f_dn_dtheta
    df_dt = f0 * (-1j * k2 - 1j * eps * n0 * ctx.exp(-1j * eps * t))
    return float(abs(df_dt - rhs))
