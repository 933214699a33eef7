"""Exact observable dynamics and quantum linewidths of quasi-classical Kerr oscillators."""

__version__ = "0.1.0"

from .core import (
    ComplexSeries,
    ModulationDecomposition,
    OscillatorParams,
    TimeGrid,
    decompose_modulations,
    evolve_classical,
    evolve_closed,
    evolve_gaussian_approx,
    pde_residual,
    tau_hbar,
    to_phase_space,
)
from .errors import (
    ConfigError,
    DomainError,
    NoCrossingError,
    NoPeakError,
    NumericFailure,
    OracleInfeasibleError,
    QcnmsError,
    QuadratureError,
    ResolutionTooCoarseError,
)
from .fock_oracle import TruncationPolicy, oracle_alpha, oracle_number_moments
from .spectrum import Convention, SpectrumResult, detect_comb, dft, measure_linewidth
from .timescales import TimescaleReport, canonical_ratios, compute_timescales

__all__ = [
    "__version__",
    "ComplexSeries",
    "ConfigError",
    "Convention",
    "DomainError",
    "ModulationDecomposition",
    "NoCrossingError",
    "NoPeakError",
    "NumericFailure",
    "OracleInfeasibleError",
    "OscillatorParams",
    "QcnmsError",
    "QuadratureError",
    "ResolutionTooCoarseError",
    "SpectrumResult",
    "TimeGrid",
    "TimescaleReport",
    "TruncationPolicy",
    "canonical_ratios",
    "compute_timescales",
    "decompose_modulations",
    "detect_comb",
    "dft",
    "evolve_classical",
    "evolve_closed",
    "evolve_gaussian_approx",
    "measure_linewidth",
    "oracle_alpha",
    "oracle_number_moments",
    "pde_residual",
    "tau_hbar",
    "to_phase_space",
]
