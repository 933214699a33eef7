"""Experiment configuration: INI files with ``[section]`` blocks and ``key = value`` pairs.

Numeric values accept plain literals and small arithmetic expressions such as
``1/900`` or ``100*pi``. Every problem found while validating is collected and
reported at once, keyed by ``section.key``.
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError

SCENARIOS = ("closed", "damped", "open-bath", "bec", "phasediff", "estimate", "verify")

# sections each scenario must provide; [run] and [output] are always allowed
REQUIRED_SECTIONS = {
    "closed": ("oscillator", "grid"),
    "damped": ("oscillator", "grid", "damping"),
    "open-bath": ("oscillator", "grid", "bath"),
    "bec": ("bec",),
    "phasediff": ("phase",),
    "estimate": ("estimate",),
    "verify": (),
}
OPTIONAL_SECTIONS = {
    "closed": ("spectrum",),
    "damped": ("spectrum",),
    "open-bath": ("spectrum",),
    "bec": ("grid", "spectrum"),
    "phasediff": (),
    "estimate": (),
    "verify": ("verify",),
}

# key -> (kind, default); a default of REQUIRED means the key must be given
REQUIRED = object()
SCHEMA = {
    "run": {"scenario": ("str", REQUIRED), "name": ("str", "")},
    "output": {"format": ("choice:csv,jsonl", "csv"), "phase_space": ("bool", True)},
    "oscillator": {
        "mode": ("choice:canonical,explicit", "canonical"),
        "epsilon": ("float", REQUIRED),
        "mu_cl": ("float", None),
        "phase": ("float", 0.0),
        "mu_bar": ("float", None),
        "alpha_re": ("float", None),
        "alpha_im": ("float", 0.0),
    },
    "grid": {
        "t_start": ("float", 0.0),
        "dt": ("float", REQUIRED),
        "t_end": ("float", None),
        "n_samples": ("int", None),
    },
    "spectrum": {
        "observable": ("choice:p,x,alpha", "p"),
        "zero_pad_factor": ("int", 4),
        "convention": ("choice:e_inverse,half_max", "e_inverse"),
        "quantity": ("choice:real,magnitude", "real"),
        "window": ("choice:none,hann", "none"),
        "comb": ("bool", False),
        "comb_tolerance": ("float", 0.1),
    },
    "damping": {"gamma": ("float", REQUIRED)},
    "bath": {
        "hbar": ("float", REQUIRED),
        "kT": ("float", REQUIRED),
        "omega": ("float", REQUIRED),
        "volume": ("float", REQUIRED),
        "dispersion_A": ("float", 1.0),
        "dispersion_s": ("float", 1.0),
        "dispersion_qc": ("float", math.inf),
        "coupling_A": ("float", REQUIRED),
        "coupling_s": ("float", 0.0),
        "coupling_qc": ("float", math.inf),
        "q_max": ("float", None),
    },
    "bec": {
        "species": ("choice:Rb87,custom", "Rb87"),
        "m": ("float", None),
        "R": ("float", REQUIRED),
        "S": ("float", REQUIRED),
        "a": ("float", REQUIRED),
        "N": ("int", REQUIRED),
        "k": ("int", 0),
        "phase": ("float", 0.0),
    },
    "phase": {
        "N": ("int", REQUIRED),
        "xi": ("float", REQUIRED),
        "t_max": ("float", REQUIRED),
        "n_times": ("int", 20),
        "phi": ("float", 0.0),
        "snapshots": ("floats", ()),
    },
    "estimate": {
        "platform": ("choice:generic,cantilever,optical_cavity", REQUIRED),
        "threshold": ("float", 10.0),
        "mu_cl": ("float", None),
        "epsilon": ("float", None),
        "tau_gamma": ("float", None),
        "n_levels": ("float", None),
        "Q": ("float", None),
        "chi": ("float", None),
        "J_action": ("float", None),
        "omega_cav": ("float", None),
        "n_photons": ("float", None),
    },
    "verify": {
        "n_sets": ("int", 50),
        "n2_min": ("float", 1.0),
        "n2_max": ("float", 2000.0),
        "mu_min": ("float", 1e-4),
        "mu_max": ("float", 1e-1),
        "tau_max_revivals": ("float", 2.0),
        "tail_tol": ("float", 1e-14),
        "fd_step": ("float", 1e-4),
    },
}

PLATFORM_KEYS = {
    "generic": ("mu_cl", "epsilon", "tau_gamma"),
    "cantilever": ("mu_cl", "n_levels", "Q"),
    "optical_cavity": ("chi", "J_action", "omega_cav", "n_photons", "tau_gamma"),
}

_BIN_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}
_FUNCS = {"sqrt": math.sqrt}


def parse_number(text: str) -> float:
    """Evaluate a literal or a small arithmetic expression (``+ - * / **``, ``pi``, ``sqrt``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"not a number: {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError, OverflowError, ValueError, TypeError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def _convert(kind: str, raw: str):
    if kind == "str":
        return raw.strip()
    if kind == "float":
        return parse_number(raw)
    if kind == "int":
        value = parse_number(raw)
        if value != int(value):
            raise ValueError(f"not an integer: {raw!r}")
        return int(value)
    if kind == "bool":
        lowered = raw.strip().lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "floats":
        return tuple(parse_number(part) for part in raw.split(",") if part.strip())
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split(",")
        value = raw.strip()
        if value not in choices:
            raise ValueError(f"expected one of {choices}, got {value!r}")
        return value
    raise AssertionError(kind)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration: ``blocks[section][key]`` holds typed values with defaults filled in."""

    scenario: str
    name: str
    blocks: dict = field(default_factory=dict)
    source: str = ""

    def block(self, section: str) -> dict:
        return self.blocks.get(section, {})

    def echo(self) -> dict:
        """JSON-friendly copy of the configuration."""
        out = {"scenario": self.scenario, "name": self.name}
        for section, values in self.blocks.items():
            out[section] = {
                k: (repr(v) if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in values.items()
            }
        return out


def from_mapping(raw: dict, name: str = "", source: str = "") -> ExperimentConfig:
    """Validate ``{section: {key: text}}`` into an :class:`ExperimentConfig`."""
    problems: dict[str, str] = {}
    run = raw.get("run", {})
    scenario = str(run.get("scenario", "")).strip()
    if not scenario:
        problems["run.scenario"] = "missing"
    elif scenario not in SCENARIOS:
        problems["run.scenario"] = f"unknown scenario {scenario!r}; expected one of {list(SCENARIOS)}"
        scenario = ""

    allowed = {"run", "output"}
    if scenario:
        allowed |= set(REQUIRED_SECTIONS[scenario]) | set(OPTIONAL_SECTIONS[scenario])
        for section in REQUIRED_SECTIONS[scenario]:
            if section not in raw:
                problems[section] = f"section required by scenario {scenario!r}"
    for section in raw:
        if section not in SCHEMA:
            problems[section] = "unknown section"
        elif scenario and section not in allowed:
            problems[section] = f"section not used by scenario {scenario!r}"

    blocks: dict[str, dict] = {}
    present = [s for s in raw if s in SCHEMA]
    if scenario == "verify" and "verify" not in present:
        present.append("verify")
    for section in present:
        schema = SCHEMA[section]
        values = {}
        given = raw.get(section, {})
        for key in given:
            if key not in schema:
                problems[f"{section}.{key}"] = "unknown key"
        for key, (kind, default) in schema.items():
            if key in given:
                try:
                    values[key] = _convert(kind, str(given[key]))
                except ValueError as exc:
                    problems[f"{section}.{key}"] = str(exc)
            elif default is REQUIRED:
                problems[f"{section}.{key}"] = "missing"
            else:
                values[key] = default
        blocks[section] = values

    _cross_checks(scenario, blocks, problems)
    if problems:
        raise ConfigError(problems)
    cfg_name = blocks.get("run", {}).get("name") or name or scenario
    blocks.setdefault("output", {k: d for k, (_, d) in SCHEMA["output"].items()})
    return ExperimentConfig(scenario, cfg_name, blocks, source)


def _cross_checks(scenario: str, blocks: dict, problems: dict) -> None:
    osc = blocks.get("oscillator")
    if osc:
        if osc.get("mode") == "canonical" and osc.get("mu_cl") is None:
            problems.setdefault("oscillator.mu_cl", "required in canonical mode")
        if osc.get("mode") == "explicit":
            for key in ("mu_bar", "alpha_re"):
                if osc.get(key) is None:
                    problems.setdefault(f"oscillator.{key}", "required in explicit mode")
    grid = blocks.get("grid")
    if grid and (grid.get("t_end") is None) == (grid.get("n_samples") is None):
        problems.setdefault("grid.t_end", "give exactly one of t_end or n_samples")
    bec = blocks.get("bec")
    if bec and bec.get("species") == "custom" and bec.get("m") is None:
        problems.setdefault("bec.m", "required when species = custom")
    est = blocks.get("estimate")
    if est and est.get("platform") in PLATFORM_KEYS:
        for key in PLATFORM_KEYS[est["platform"]]:
            if est.get(key) is None:
                problems.setdefault(f"estimate.{key}", f"required for platform {est['platform']!r}")


def bundled_names() -> list[str]:
    root = resources.files("qcnms") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_config(path_or_name) -> ExperimentConfig:
    """Read a config file, or a bundled config by name (for example ``"fig2"``)."""
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
        stem, source = path.stem, str(path)
    else:
        bundled = resources.files("qcnms") / "configs" / f"{path_or_name}.ini"
        if not bundled.is_file():
            raise ConfigError(
                {"config": f"no such file or bundled config {str(path_or_name)!r} "
                 f"(bundled: {', '.join(bundled_names())})"}
            )
        text = bundled.read_text(encoding="utf-8")
        stem, source = str(path_or_name), f"bundled:{path_or_name}"
    return loads(text, name=stem, source=source)


def loads(text: str, name: str = "", source: str = "") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (kT, Q, ...)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError({"config": f"cannot parse: {exc}"}) from exc
    raw = {s: dict(parser.items(s)) for s in parser.sections()}
    return from_mapping(raw, name=name, source=source)
