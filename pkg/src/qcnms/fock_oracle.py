"""Brute-force number-basis oracle for ``<alpha| a(tau) |alpha>``.

The Kerr Hamiltonian is diagonal in the number basis with dimensionless
eigenphases ``E_n = n + mu_bar n^2``, so

    <a(tau)> = alpha * sum_n P_n exp(-i (E_{n+1} - E_n) tau),

with Poisson weights ``P_n = exp(-|alpha|^2) |alpha|^{2n} / n!``. The sum is
evaluated term by term and never uses the closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import OscillatorParams
from .errors import DomainError, OracleInfeasibleError

DEFAULT_TAIL_TOL = 1e-14
DEFAULT_HARD_CAP = 1_000_000


class TruncationMode(enum.Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class TruncationPolicy:
    mode: TruncationMode = TruncationMode.ADAPTIVE
    n_max: int | None = None
    tail_tol: float = DEFAULT_TAIL_TOL
    hard_cap: int = DEFAULT_HARD_CAP

    def __post_init__(self):
        if self.mode is TruncationMode.FIXED:
            if self.n_max is None or int(self.n_max) != self.n_max or self.n_max < 1:
                raise DomainError(f"FIXED truncation needs n_max >= 1, got {self.n_max!r}")
        elif not 0 < self.tail_tol < 1:
            raise DomainError(f"tail_tol must lie in (0, 1), got {self.tail_tol!r}")

    @classmethod
    def fixed(cls, n_max: int) -> "TruncationPolicy":
        return cls(TruncationMode.FIXED, n_max=n_max)

    @classmethod
    def adaptive(cls, tail_tol: float = DEFAULT_TAIL_TOL, hard_cap: int = DEFAULT_HARD_CAP):
        return cls(TruncationMode.ADAPTIVE, tail_tol=tail_tol, hard_cap=hard_cap)


def _log_poisson(lam: float, n: np.ndarray) -> np.ndarray:
    if lam == 0:
        return np.where(n == 0, 0.0, -np.inf)
    return -lam + n * math.log(lam) - gammaln(n + 1.0)


def truncation_order(lam: float, policy: TruncationPolicy) -> int:
    """Largest index kept in the sum."""
    if policy.mode is TruncationMode.FIXED:
        n_max = int(policy.n_max)
        if n_max > policy.hard_cap:
            raise OracleInfeasibleError(f"n_max={n_max} exceeds hard cap {policy.hard_cap}")
        return n_max
    if lam == 0:
        return 0
    # Poisson tail beyond n is below w_{n+1} / (1 - lam/(n+2)) once n + 2 > lam
    log_tol = math.log(policy.tail_tol)
    start = int(math.floor(lam))
    chunk = max(64, int(10 * math.sqrt(lam)) + 64)
    while True:
        stop = start + chunk
        if start > policy.hard_cap:
            raise OracleInfeasibleError(
                f"|alpha|^2={lam:g} needs more than {policy.hard_cap} terms"
            )
        n = np.arange(start, stop, dtype=float)
        log_bound = _log_poisson(lam, n + 1) - np.log1p(-lam / (n + 2))
        ok = np.nonzero(log_bound < log_tol)[0]
        if ok.size:
            n_max = int(n[ok[0]])
            if n_max > policy.hard_cap:
                raise OracleInfeasibleError(
                    f"|alpha|^2={lam:g} needs {n_max} terms, above hard cap {policy.hard_cap}"
                )
            return n_max
        start = stop


NORMALISATION_TAIL = 1e-17


def poisson_weights(lam: float, n_max: int) -> np.ndarray:
    """Weights ``P_0..P_{n_max}`` built in the log domain (``exp(-900)`` underflows).

    Rounding in the log-weights (terms of size ~lam log lam cancel) leaves a
    common relative error near 1e-13, so the weights are rescaled to make the
    full distribution, summed until its tail is below 1e-17, add up to one.
    """
    if lam == 0:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
        return w
    n_full = truncation_order(lam, TruncationPolicy.adaptive(NORMALISATION_TAIL, hard_cap=2**62))
    n = np.arange(max(n_max, n_full) + 1, dtype=float)
    w = np.exp(_log_poisson(lam, n))
    w /= math.fsum(w)
    return w[: n_max + 1]


def oracle_alpha(params: OscillatorParams, tau, policy: TruncationPolicy | None = None):
    """Truncated number-basis sum for ``alpha(tau)``; ``tau`` may be scalar or array."""
    policy = policy or TruncationPolicy.adaptive()
    tau_arr = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(tau_arr)):
        raise DomainError("tau must be finite")
    lam = params.n_mean
    n_max = truncation_order(lam, policy)
    w = poisson_weights(lam, n_max)
    n = np.arange(n_max + 1, dtype=float)
    # E_{n+1} - E_n = 1 + mu_bar (2n + 1)
    gaps = 1.0 + params.mu_bar * (2.0 * n + 1.0)
    flat = tau_arr.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for i, t in enumerate(flat):
        out[i] = params.alpha0 * np.sum(w * np.exp(-1j * gaps * t))
    out = out.reshape(tau_arr.shape)
    return complex(out) if out.ndim == 0 else out


def oracle_number_moments(
    params: OscillatorParams, tau: float = 0.0, policy: TruncationPolicy | None = None
) -> tuple[float, float]:
    """Mean and variance of the photon number; ``[n, H] = 0`` so ``tau`` plays no role."""
    policy = policy or TruncationPolicy.adaptive()
    lam = params.n_mean
    if lam == 0:
        return 0.0, 0.0
    n_max = truncation_order(lam, policy)
    w = poisson_weights(lam, n_max)
    w = w / w.sum()
    n = np.arange(n_max + 1, dtype=float)
    mean = float(np.sum(n * w))
    var = float(np.sum((n - mean) ** 2 * w))
    return mean, var
