"""Scenario execution: builds model objects from a config, writes tables and a manifest."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from . import __version__
from . import bec_torus, open_system, phase_diffusion, regime
from .config import ExperimentConfig
from .core import (
    ComplexSeries,
    OscillatorParams,
    TimeGrid,
    decompose_modulations,
    evolve_closed,
    pde_residual,
    to_phase_space,
)
from .errors import ResolutionTooCoarseError
from .fock_oracle import TruncationPolicy, oracle_alpha
from .io import export_series, export_spectrum, write_table
from .spectrum import Convention, detect_comb, dft, measure_linewidth
from .timescales import compute_timescales

MANIFEST = "manifest.json"
DERIVED = "derived.json"


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_s: float
    outputs: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value"):  # enums
        return value.value
    raise TypeError(f"not JSON serialisable: {type(value).__name__}")


def _clean(obj):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return repr(float(obj))
    return obj


def thread_count() -> int:
    """Inner worker threads, capped by ``QCNMS_THREADS`` when set."""
    n = os.cpu_count() or 1
    env = os.environ.get("QCNMS_THREADS", "").strip()
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            pass
    return n


# -- building blocks ---------------------------------------------------------


def _oscillator(block: dict) -> OscillatorParams:
    if block["mode"] == "canonical":
        return OscillatorParams.canonical(block["epsilon"], block["mu_cl"], block["phase"])
    alpha = complex(block["alpha_re"], block["alpha_im"])
    return OscillatorParams.explicit(block["epsilon"], block["mu_bar"], alpha)


def _grid(block: dict) -> TimeGrid:
    if block.get("n_samples") is not None:
        return TimeGrid(block["t_start"], block["dt"], block["n_samples"])
    return TimeGrid.span(block["t_end"], block["dt"], block["t_start"])


def _bath(block: dict) -> open_system.BathSpec:
    return open_system.BathSpec(
        hbar=block["hbar"],
        kT=block["kT"],
        omega=block["omega"],
        volume=block["volume"],
        dispersion=open_system.PowerLawCutoff(
            block["dispersion_A"], block["dispersion_s"], block["dispersion_qc"]
        ),
        coupling=open_system.PowerLawCutoff(
            block["coupling_A"], block["coupling_s"], block["coupling_qc"]
        ),
        q_max=block["q_max"],
    )


def _observable(series: ComplexSeries, which: str):
    if which == "alpha":
        return series.values
    x, p = to_phase_space(series)
    return p if which == "p" else x


def _spectrum(cfg, series, out, fmt, comb_spacing) -> dict:
    sb = cfg.block("spectrum")
    spec = dft(
        _observable(series, sb["observable"]),
        series.grid,
        zero_pad_factor=sb["zero_pad_factor"],
        window=None if sb["window"] == "none" else sb["window"],
    )
    lw = measure_linewidth(spec, Convention(sb["convention"]), quantity=sb["quantity"])
    out.append(export_spectrum(spec, Path(cfg_dir(cfg)) / f"{cfg.name}_spectrum.{fmt}", fmt))
    result = {
        "observable": sb["observable"],
        "convention": sb["convention"],
        "peak_freq": lw.peak_freq,
        "width": lw.width,
        "bin_width": spec.bin_width,
    }
    if sb["comb"]:
        try:
            lines = detect_comb(spec, comb_spacing, tolerance=sb["comb_tolerance"])
            result["comb_lines"] = lines
        except ResolutionTooCoarseError:
            result["comb_lines"] = "unresolved"
    return result


def cfg_dir(cfg) -> str:
    return cfg.blocks["_out"]


def _timescale_dict(report) -> dict:
    d = asdict(report)
    return {k: v for k, v in d.items() if v is not None}


# -- scenarios ---------------------------------------------------------------


def _run_oscillator(cfg: ExperimentConfig, outputs: list, fmt: str) -> dict:
    params = _oscillator(cfg.block("oscillator"))
    grid = _grid(cfg.block("grid"))
    derived: dict = {}
    if cfg.scenario == "closed":
        series = evolve_closed(params, grid)
        report = compute_timescales(params)
    elif cfg.scenario == "damped":
        dp = open_system.DampedParams(params, cfg.block("damping")["gamma"])
        series = open_system.evolve_damped(dp, grid)
        report = compute_timescales(params, tau_gamma=dp.tau_gamma if dp.gamma > 0 else None)
        cr = open_system.crossover_analysis(params, gamma=dp.gamma)
        derived["crossover"] = {"dominant": cr.dominant.value, "tau_env": cr.tau_env, "source": cr.source}
    else:
        bath = _bath(cfg.block("bath"))
        tau_d = open_system.gamma_classical(bath)
        series = open_system.evolve_open(params, bath, grid)
        report = compute_timescales(params, tau_d=tau_d, chain="dephasing")
        cr = open_system.crossover_analysis(params, bath=bath)
        derived["crossover"] = {"dominant": cr.dominant.value, "tau_env": cr.tau_env, "source": cr.source}
    derived["timescales"] = _timescale_dict(report)

    out_dir = Path(cfg_dir(cfg))
    outputs.append(export_series(series, out_dir / f"{cfg.name}_series.{fmt}", fmt, "complex"))
    if cfg.block("output")["phase_space"]:
        outputs.append(
            export_series(series, out_dir / f"{cfg.name}_phase_space.{fmt}", fmt, "phase_space")
        )
    if cfg.scenario == "closed":
        dec = decompose_modulations(params, grid)
        outputs.append(
            write_table(
                out_dir / f"{cfg.name}_modulations.{fmt}",
                {"tau": grid.times, "envelope": dec.envelope, "phase": dec.phase},
                fmt,
            )
        )
    if "spectrum" in cfg.blocks:
        derived["spectrum"] = _spectrum(cfg, series, outputs, fmt, 2.0 * params.mu_bar)
    return derived


def _run_bec(cfg: ExperimentConfig, outputs: list, fmt: str) -> dict:
    b = cfg.block("bec")
    mass = bec_torus.RB87_MASS_G if b["species"] == "Rb87" else b["m"]
    p = bec_torus.BecTorusParams(b["R"], b["S"], b["a"], mass, b["N"], b["k"])
    state = bec_torus.BecModeState.from_params(p, b["phase"])
    t_h, bandwidth = bec_torus.t_hbar_physical(p)
    tau_h, tau_r = bec_torus.bec_timescales(state)
    derived = {
        "epsilon": bec_torus.epsilon_param(p),
        "mass_g": mass,
        "t_hbar_s": t_h,
        "t_hbar_ms": 1e3 * t_h,
        "bandwidth_hz": bandwidth,
        "bandwidth_khz": 1e-3 * bandwidth,
        "tau_hbar": tau_h,
        "tau_R": tau_r,
    }
    if "grid" in cfg.blocks:
        grid = _grid(cfg.block("grid"))
        quantum = bec_torus.evolve_single_mode(state, p.k, grid)
        gp = bec_torus.evolve_gp(state, p.k, grid)
        outputs.append(
            write_table(
                Path(cfg_dir(cfg)) / f"{cfg.name}_series.{fmt}",
                {
                    "tau": grid.times,
                    "re": quantum.values.real,
                    "im": quantum.values.imag,
                    "gp_re": gp.values.real,
                    "gp_im": gp.values.imag,
                },
                fmt,
            )
        )
        if "spectrum" in cfg.blocks:
            derived["spectrum"] = _spectrum(cfg, quantum, outputs, fmt, state.epsilon_int)
    return derived


def _run_phasediff(cfg: ExperimentConfig, outputs: list, fmt: str) -> dict:
    b = cfg.block("phase")
    times = np.linspace(0.0, b["t_max"], b["n_times"])
    fit = phase_diffusion.fit_diffusion(b["N"], b["xi"], times, b["phi"])
    out_dir = Path(cfg_dir(cfg))
    outputs.append(
        write_table(
            out_dir / f"{cfg.name}_dispersion.{fmt}",
            {"t": fit.times, "t2": fit.times**2, "dispersion": fit.dispersions},
            fmt,
        )
    )
    if b["snapshots"]:
        state = phase_diffusion.build_split_state(b["N"], b["phi"])
        cols = {"t": [], "phi": [], "probability": []}
        for t in b["snapshots"]:
            dist = phase_diffusion.phase_distribution(
                phase_diffusion.evolve_split_state(state, b["xi"], t)
            )
            cols["t"].extend([t] * dist.phases.size)
            cols["phi"].extend(dist.phases)
            cols["probability"].extend(dist.probabilities)
        outputs.append(write_table(out_dir / f"{cfg.name}_distributions.{fmt}", cols, fmt))
    expected_slope = b["N"] * b["xi"] ** 2
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "expected_slope": expected_slope,
        "expected_intercept": 1.0 / b["N"],
        "slope_rel_error": abs(fit.slope - expected_slope) / expected_slope,
        "intercept_rel_error": abs(fit.intercept * b["N"] - 1.0),
        "rate": fit.rate,
        # with xi = 2 mu_bar this is the Ehrenfest time of the matching oscillator
        "diffusion_time": phase_diffusion.diffusion_time(b["xi"] / 2.0, b["N"]),
    }


def _run_estimate(cfg: ExperimentConfig, outputs: list, fmt: str) -> dict:
    b = cfg.block("estimate")
    platform = b["platform"]
    if platform == "generic":
        est = regime.estimate_generic(b["mu_cl"], b["epsilon"], b["tau_gamma"], b["threshold"])
    elif platform == "cantilever":
        est = regime.estimate_cantilever(b["mu_cl"], b["n_levels"], b["Q"], b["threshold"])
    else:
        est = regime.estimate_optical(
            b["chi"], b["J_action"], b["omega_cav"], b["n_photons"], b["tau_gamma"], b["threshold"]
        )
    return {
        "platform": est.platform.value,
        "theta": est.theta,
        "threshold": b["threshold"],
        "satisfied": est.satisfied,
        "inputs": est.inputs_echo,
    }


def halton_parameter_sets(n_sets: int, n2_range, mu_range, tau_revivals: float):
    """Deterministic low-discrepancy draws of ``(|alpha|^2, mu_bar, tau, arg alpha)``.

    ``|alpha|^2`` is uniform, ``mu_bar`` log-uniform and ``tau`` uniform on ``[0, tau_revivals * tau_R]``.
    """
    u = qmc.Halton(d=4, scramble=False).random(n_sets + 1)[1:]  # skip the all-zero point
    n2 = n2_range[0] + u[:, 0] * (n2_range[1] - n2_range[0])
    log_mu = np.log(mu_range[0]) + u[:, 1] * (np.log(mu_range[1]) - np.log(mu_range[0]))
    mu = np.exp(log_mu)
    tau = u[:, 2] * tau_revivals * math.pi / mu
    arg = 2.0 * math.pi * u[:, 3]
    return [(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(n2, mu, tau, arg)]


def oracle_check(n2, mu_bar, tau, arg, tail_tol) -> tuple[float, float]:
    """``(|closed - oracle|, |alpha|)`` at one parameter set."""
    alpha = math.sqrt(n2) * complex(math.cos(arg), math.sin(arg))
    params = OscillatorParams.explicit(1.0, mu_bar, alpha)
    grid = TimeGrid(tau, 1.0, 2)
    closed = evolve_closed(params, grid).values[0]
    oracle = oracle_alpha(params, tau, TruncationPolicy.adaptive(tail_tol))
    return abs(closed - oracle), abs(alpha)


def pde_cases() -> list:
    """Reference cases ``(name, residual_fn)`` with residual functions of the step ``h``."""
    fig1 = OscillatorParams.canonical(0.01, 1.0)
    fig2 = OscillatorParams.canonical(1.0 / 900.0, 1.0)
    bec_state = bec_torus.BecModeState.coherent(900, 1.0 / 900.0)
    return [
        ("fig1", fig1.amplitude, lambda h: pde_residual(fig1, 1.0, h)),
        ("fig2", fig2.amplitude, lambda h: pde_residual(fig2, 15.0, h)),
        ("bec", abs(bec_state.alpha_k), lambda h: bec_torus.bec_pde_residual(bec_state, 1, 10.0, h)),
    ]


def identity_checks() -> dict:
    """Exact identities, each reported as a max relative deviation."""
    fig2 = OscillatorParams.canonical(1.0 / 900.0, 1.0)
    grid = TimeGrid.span(400.0, 0.5)
    closed = evolve_closed(fig2, grid).values
    dec = decompose_modulations(fig2, grid)
    recon = fig2.alpha0 * dec.envelope * np.exp(1j * dec.phase)
    rep = compute_timescales(fig2)
    revival = [
        abs(abs(evolve_closed(fig2, TimeGrid(n * rep.tau_R, 1.0, 2)).values[0]) / fig2.amplitude - 1.0)
        for n in (1, 2, 3)
    ]
    state = bec_torus.BecModeState.coherent(900, 1.0 / 900.0)
    eps = state.epsilon_int
    mapped = OscillatorParams.explicit(eps / 2.0, eps / 2.0, state.alpha_k)
    single = bec_torus.evolve_single_mode(state, 0, grid).values
    closed_b = evolve_closed(mapped, grid).values * np.exp(1j * (1.0 + mapped.mu_bar) * grid.times)
    return {
        "decomposition": float(np.max(np.abs(closed - recon)) / fig2.amplitude),
        "revival_modulus": float(max(revival)),
        "tau_cl_period": abs(rep.tau_cl * (1 + 2 * fig2.mu_cl) / (2 * math.pi) - 1.0),
        "width_product": abs(rep.delta_nu_hbar * rep.tau_hbar / (2 * math.sqrt(2)) - 1.0),
        "cantilever_theta": abs(
            regime.theta_cantilever(1.0, 1e4, 5e3) / regime.theta_generic(1.0, 1e-4, 1e4) - 1.0
        ),
        "bec_mapping": float(np.max(np.abs(single - closed_b)) / abs(state.alpha_k)),
    }


def _run_verify(cfg: ExperimentConfig, outputs: list, fmt: str) -> dict:
    b = cfg.block("verify")
    sets = halton_parameter_sets(
        b["n_sets"], (b["n2_min"], b["n2_max"]), (b["mu_min"], b["mu_max"]), b["tau_max_revivals"]
    )
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(lambda s: oracle_check(*s, b["tail_tol"]), sets))
    errs = np.array([r[0] for r in results])
    amps = np.array([r[1] for r in results])
    out_dir = Path(cfg_dir(cfg))
    outputs.append(
        write_table(
            out_dir / f"{cfg.name}_oracle.{fmt}",
            {
                "n_mean": [s[0] for s in sets],
                "mu_bar": [s[1] for s in sets],
                "tau": [s[2] for s in sets],
                "arg_alpha": [s[3] for s in sets],
                "abs_error": errs,
                "rel_error": errs / amps,
            },
            fmt,
        )
    )

    h = b["fd_step"]
    pde_rows = {"case": [], "h": [], "residual": [], "residual_half": [], "ratio": [], "rel_residual": []}
    for name, amp, fn in pde_cases():
        r1, r2 = fn(h), fn(h / 2.0)
        pde_rows["case"].append(name)
        pde_rows["h"].append(h)
        pde_rows["residual"].append(r1)
        pde_rows["residual_half"].append(r2)
        pde_rows["ratio"].append(r1 / r2 if r2 > 0 else math.inf)
        pde_rows["rel_residual"].append(r1 / amp)
    outputs.append(write_table(out_dir / f"{cfg.name}_pde.{fmt}", pde_rows, fmt))

    ids = identity_checks()
    outputs.append(
        write_table(
            out_dir / f"{cfg.name}_identities.{fmt}",
            {"identity": list(ids), "deviation": list(ids.values())},
            fmt,
        )
    )
    return {
        "n_sets": len(sets),
        "max_abs_error": float(errs.max()),
        "max_rel_error": float((errs / amps).max()),
        "pde_ratios": dict(zip(pde_rows["case"], pde_rows["ratio"])),
        "pde_rel_residuals": dict(zip(pde_rows["case"], pde_rows["rel_residual"])),
        "identities": ids,
    }


SCENARIO_RUNNERS = {
    "closed": _run_oscillator,
    "damped": _run_oscillator,
    "open-bath": _run_oscillator,
    "bec": _run_bec,
    "phasediff": _run_phasediff,
    "estimate": _run_estimate,
    "verify": _run_verify,
}


def run(config: ExperimentConfig, out_dir=".") -> RunManifest:
    """Execute one scenario; writes data files, ``derived.json`` and ``manifest.json`` into ``out_dir``."""
    start = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = config.block("output")["format"]
    internal = ExperimentConfig(
        config.scenario, config.name, {**config.blocks, "_out": str(out_dir)}, config.source
    )
    outputs: list = []
    derived = _clean(SCENARIO_RUNNERS[config.scenario](internal, outputs, fmt))
    derived_path = out_dir / DERIVED
    derived_path.write_text(
        json.dumps(derived, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8"
    )
    outputs.append(derived_path)
    manifest = RunManifest(
        config=_clean(config.echo()),
        version=__version__,
        duration_s=time.perf_counter() - start,
        outputs=[Path(p).name for p in outputs] + [MANIFEST],
        derived=derived,
    )
    (out_dir / MANIFEST).write_text(manifest.to_json(), encoding="utf-8")
    return manifest
