"""Characteristic time-scales of the Kerr oscillator and the mesoscopic-window test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import OscillatorParams, _close
from .errors import DomainError

# chain templates: sequence of (scale name, relation to the next scale)
RELAXATION_CHAIN = (("tau_d", "<<"), ("tau_cl", "<"), ("tau_hbar", "<"), ("tau_gamma", "<"), ("tau_R", None))
DEPHASING_CHAIN = (("tau_cl", "<"), ("tau_hbar", "<"), ("tau_d", "<"), ("tau_R", None))
CHAINS = {"relaxation": RELAXATION_CHAIN, "dephasing": DEPHASING_CHAIN}


@dataclass(frozen=True)
class TimescaleReport:
    tau_cl: float
    tau_hbar: float
    tau_R: float
    delta_nu_hbar: float
    tau_gamma: Optional[float] = None
    tau_d: Optional[float] = None
    theta: Optional[float] = None
    mesoscopic: bool = False
    chain: str = "relaxation"


def ordering_holds(scales: dict, template, margin: float = 0.1) -> bool:
    """Check an ordering chain; scales that are ``None`` are skipped.

    ``"<<"`` means ratio below ``margin``. When a scale is skipped the
    relation attached to it is dropped and the previous present scale is
    compared to the next one with the relation of that previous scale.
    """
    present = [(name, rel) for name, rel in template if scales.get(name) is not None]
    for (left, rel), (right, _) in zip(present, present[1:]):
        a, b = scales[left], scales[right]
        if rel == "<<":
            if not a / b < margin:
                return False
        elif not a < b:
            return False
    return True


def compute_timescales(
    params: OscillatorParams,
    tau_gamma: Optional[float] = None,
    tau_d: Optional[float] = None,
    ordering_margin: float = 0.1,
    chain: str = "relaxation",
) -> TimescaleReport:
    if params.mu_bar <= 0:
        raise DomainError(f"time-scales need mu_bar > 0, got {params.mu_bar!r}")
    if params.amplitude == 0:
        raise DomainError("time-scales need a non-vacuum initial state")
    if chain not in CHAINS:
        raise DomainError(f"unknown chain {chain!r}; expected one of {sorted(CHAINS)}")
    for name, value in (("tau_gamma", tau_gamma), ("tau_d", tau_d)):
        if value is not None and not value > 0:
            raise DomainError(f"{name} must be > 0, got {value!r}")

    tau_cl = 2.0 * math.pi / (1.0 + 2.0 * params.mu_cl)
    t_hbar = 1.0 / (2.0 * params.mu_bar * params.amplitude)
    tau_r = math.pi / params.mu_bar
    scales = {
        "tau_cl": tau_cl,
        "tau_hbar": t_hbar,
        "tau_R": tau_r,
        "tau_gamma": tau_gamma,
        "tau_d": tau_d,
    }
    return TimescaleReport(
        tau_cl=tau_cl,
        tau_hbar=t_hbar,
        tau_R=tau_r,
        delta_nu_hbar=2.0 * math.sqrt(2.0) / t_hbar,
        tau_gamma=tau_gamma,
        tau_d=tau_d,
        theta=None if tau_gamma is None else tau_gamma / t_hbar,
        mesoscopic=ordering_holds(scales, CHAINS[chain], ordering_margin),
        chain=chain,
    )


def canonical_ratios(params: OscillatorParams) -> tuple[float, float]:
    """Exact ``(tau_cl/tau_hbar, tau_hbar/tau_R)`` on the canonical family.

    Compare with the asymptotic forms ``pi sqrt(eps)`` and ``sqrt(eps)/(2 pi)``.
    """
    if not _close(params.n_mean * params.epsilon, 1.0):
        raise DomainError("canonical_ratios needs |alpha|^2 = 1/epsilon")
    report = compute_timescales(params)
    return report.tau_cl / report.tau_hbar, report.tau_hbar / report.tau_R
