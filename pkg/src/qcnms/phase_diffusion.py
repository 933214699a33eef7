"""Relative-phase diffusion of a condensate split into two wells."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

MAX_N = 10_000


@dataclass(frozen=True)
class SplitState:
    N: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.N + 1,):
            raise DomainError(f"need N+1={self.N + 1} amplitudes, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"state is not normalised (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def relative_number(self) -> np.ndarray:
        """``k - N/2`` for each amplitude."""
        return np.arange(self.N + 1) - self.N / 2


@dataclass(frozen=True)
class PhaseDistribution:
    phases: np.ndarray
    probabilities: np.ndarray


def build_split_state(N: int, phi: float = 0.0) -> SplitState:
    """Binomial two-mode coherent split with relative phase ``phi``."""
    if int(N) != N or N % 2 or not 2 <= N <= MAX_N:
        raise DomainError(f"N must be an even integer in [2, {MAX_N}], got {N!r}")
    N = int(N)
    k = np.arange(N + 1, dtype=float)
    log_w = gammaln(N + 1.0) - gammaln(k + 1.0) - gammaln(N - k + 1.0) - N * math.log(2.0)
    amps = np.exp(0.5 * log_w) * np.exp(1j * phi * k)
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return SplitState(N, amps)


def evolve_split_state(state: SplitState, xi: float, t: float) -> SplitState:
    """Apply the interaction phases ``exp(-i xi (k - N/2)^2 t)``; the global phase is dropped."""
    m = state.relative_number
    # count whole turns so the revival at xi t = 2 pi is exact for integer m^2
    turns = xi * t / (2.0 * math.pi)
    phase = 2.0 * math.pi * np.mod(turns * m**2, 1.0)
    return SplitState(state.N, state.amplitudes * np.exp(-1j * phase))


def phase_distribution(state: SplitState) -> PhaseDistribution:
    """Projection onto the ``N+1`` orthonormal phase states ``phi_p = 2 pi p/(N+1)``."""
    n1 = state.N + 1
    p = np.arange(-(state.N // 2), state.N // 2 + 1)
    # <phi_p|c> = (N+1)^{-1/2} sum_k exp(-i phi_p k) c_k, i.e. a DFT at index p mod (N+1)
    transform = np.fft.fft(state.amplitudes) / math.sqrt(n1)
    probs = np.abs(transform[p % n1]) ** 2
    return PhaseDistribution(2.0 * math.pi * p / n1, probs)


def circular_mean(dist: PhaseDistribution) -> float:
    resultant = np.sum(dist.probabilities * np.exp(1j * dist.phases))
    if abs(resultant) < 1e-12:
        return 0.0
    return float(np.angle(resultant))


def phase_dispersion(dist: PhaseDistribution) -> float:
    """Variance of the phase about its circular mean, offsets wrapped into (-pi, pi]."""
    mean = circular_mean(dist)
    d = np.angle(np.exp(1j * (dist.phases - mean)))
    d = np.where(d <= -math.pi, d + 2.0 * math.pi, d)
    return float(np.sum(dist.probabilities * d**2))


def diffusion_time(mu_bar: float, N: float) -> float:
    """Phase-diffusion time ``1/(2 mu_bar sqrt N)``, equal to the Ehrenfest time at ``|alpha|^2 = N``."""
    if not (mu_bar > 0 and N > 0):
        raise DomainError("diffusion_time needs mu_bar > 0 and N > 0")
    return 1.0 / (2.0 * mu_bar * math.sqrt(N))


def squeezed_variant(N: float, s: float, xi: float) -> tuple[float, float]:
    """Number-squeezed split: ``(s/N, s sqrt(N) xi)`` for initial dispersion and diffusion rate."""
    if not s >= 1:
        raise DomainError(f"squeezing parameter must be >= 1, got {s!r}")
    if not N > 0:
        raise DomainError(f"N must be > 0, got {N!r}")
    return s / N, s * math.sqrt(N) * xi


@dataclass(frozen=True)
class DiffusionFit:
    slope: float  # fitted R^2
    intercept: float  # fitted initial dispersion
    times: np.ndarray
    dispersions: np.ndarray

    @property
    def rate(self) -> float:
        return math.sqrt(max(self.slope, 0.0))


def dispersion_curve(N: int, xi: float, times, phi: float = 0.0) -> np.ndarray:
    state = build_split_state(N, phi)
    return np.array(
        [phase_dispersion(phase_distribution(evolve_split_state(state, xi, t))) for t in times]
    )


def fit_diffusion(N: int, xi: float, times, phi: float = 0.0) -> DiffusionFit:
    """Least-squares line through ``dispersion`` versus ``t^2``."""
    times = np.asarray(times, dtype=float)
    disp = dispersion_curve(N, xi, times, phi)
    slope, intercept = np.polyfit(times**2, disp, 1)
    return DiffusionFit(float(slope), float(intercept), times, disp)
