"""Observability estimates ``Theta = tau_gamma / tau_hbar`` for concrete platforms."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError

DEFAULT_THRESHOLD = 10.0


class Platform(enum.Enum):
    CANTILEVER = "cantilever"
    OPTICAL_CAVITY = "optical_cavity"
    GENERIC = "generic"


@dataclass(frozen=True)
class PlatformEstimate:
    platform: Platform
    theta: float
    inputs_echo: dict = field(default_factory=dict)
    satisfied: bool = False


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be > 0, got {value!r}")


def theta_generic(mu_cl: float, epsilon: float, tau_gamma: float) -> float:
    _positive(mu_cl=mu_cl, epsilon=epsilon, tau_gamma=tau_gamma)
    return 2.0 * mu_cl * math.sqrt(epsilon) * tau_gamma


def theta_cantilever(mu_cl: float, n_levels: float, Q: float) -> float:
    """Resonator with ``epsilon = 1/n`` and ``tau_gamma = 2 Q``."""
    _positive(mu_cl=mu_cl, Q=Q)
    if not n_levels >= 1:
        raise DomainError(f"n_levels must be >= 1, got {n_levels!r}")
    return 4.0 * mu_cl * Q / math.sqrt(n_levels)


def mu_cl_optical(chi: float, J_action: float, omega_cav: float) -> float:
    if not omega_cav > 0:
        raise DomainError(f"omega_cav must be > 0, got {omega_cav!r}")
    return chi * J_action / omega_cav


def estimate_generic(mu_cl, epsilon, tau_gamma, threshold=DEFAULT_THRESHOLD) -> PlatformEstimate:
    theta = theta_generic(mu_cl, epsilon, tau_gamma)
    echo = {"mu_cl": mu_cl, "epsilon": epsilon, "tau_gamma": tau_gamma}
    return PlatformEstimate(Platform.GENERIC, theta, echo, theta > threshold)


def estimate_cantilever(mu_cl, n_levels, Q, threshold=DEFAULT_THRESHOLD) -> PlatformEstimate:
    theta = theta_cantilever(mu_cl, n_levels, Q)
    echo = {"mu_cl": mu_cl, "n_levels": n_levels, "Q": Q}
    return PlatformEstimate(Platform.CANTILEVER, theta, echo, theta > threshold)


def estimate_optical(
    chi, J_action, omega_cav, n_photons, tau_gamma, threshold=DEFAULT_THRESHOLD
) -> PlatformEstimate:
    """Kerr cavity: ``mu_cl = chi J / omega_cav`` and ``epsilon = 1 / n_photons``."""
    if not n_photons >= 1:
        raise DomainError(f"n_photons must be >= 1, got {n_photons!r}")
    mu_cl = mu_cl_optical(chi, J_action, omega_cav)
    theta = theta_generic(mu_cl, 1.0 / n_photons, tau_gamma)
    echo = {
        "chi": chi,
        "J_action": J_action,
        "omega_cav": omega_cav,
        "n_photons": n_photons,
        "tau_gamma": tau_gamma,
        "mu_cl": mu_cl,
    }
    return PlatformEstimate(Platform.OPTICAL_CAVITY, theta, echo, theta > threshold)
