"""TOML run configuration: defaults, overrides, validation and echo."""
from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from pathlib import Path

import tomli
import tomli_w

from .ansatz import FAMILIES, AnsatzSpec
from .evolver import EvolutionConfig, Regularization
from .maxwell import MaxwellConfig
from .mclachlan import EvaluationMode
from .state_prep import SpsaConfig

DEFAULTS: dict = {
    "seed": 0,
    "maxwell": {
        "n_grid": 16,
        "domain_length": 1.0,
        "c": 1.0,
        "dt": 0.0,  # 0 means 0.1 * dx / c
        "boundary": "periodic",
        "center": 0.5,
        "width": 0.08,
    },
    "ansatz": {
        "family": "RyCRy-Linear",
        "n_qubits": 6,
        "layers": 3,
    },
    "evolution": {
        "dt": 0.0,  # 0 means the Maxwell dt
        "t_final": 0.5,
        "regularization": "svd",
        "rho": 1e-8,
        "ridge": 0.0,
        "mode": "exact",
        "snapshot_stride": 1,
        "norm_correction": False,
    },
    "state_prep": {
        "iterations": 2000,
        "a": 2.0,
        "c": 0.1,
        "A": 200.0,
        "alpha": 0.602,
        "gamma": 0.101,
        "restarts": 3,
        "init_scale": 0.5,
        "polish": False,
        "eps_init": 1e-2,
        "eps_discretization": 1e-3,
    },
    "sweep": {
        "max_layers": 6,
    },
    "output": {
        "directory": "out",
        "formats": ["csv", "json"],
    },
}


class ConfigError(ValueError):
    """Invalid configuration; ``str(err)`` is prefixed with ``path:line:`` when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path, self.line = path, line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


def _locate(text: str | None, section: str, key: str | None) -> int | None:
    """Line number (1-based) of ``key`` inside ``[section]``, or of the section header."""
    if not text:
        return None
    current = ""
    header_line = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if current == section:
                header_line = no
            continue
        if current == section and key is not None and re.match(rf"^{re.escape(key)}\s*=", line):
            return no
    return header_line


def _parse_value(text: str):
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def _merge(base: dict, extra: dict, path: str | None, text: str | None, prefix: str = "") -> None:
    for key, value in extra.items():
        if key not in base:
            section = prefix or ""
            raise ConfigError(f"unknown key {prefix + '.' if prefix else ''}{key}", path,
                              _locate(text, section, key))
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must be a table", path, _locate(text, key, None))
            _merge(base[key], value, path, text, key)
        else:
            base[key] = value


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``raw`` is the effective nested dictionary."""

    raw: dict
    maxwell: MaxwellConfig
    ansatz: AnsatzSpec
    evolution: EvolutionConfig
    spsa: SpsaConfig
    seed: int

    @property
    def center(self) -> float:
        return float(self.raw["maxwell"]["center"]) * self.maxwell.domain_length

    @property
    def width(self) -> float:
        return float(self.raw["maxwell"]["width"]) * self.maxwell.domain_length

    @property
    def eps_init(self) -> float:
        return float(self.raw["state_prep"]["eps_init"])

    @property
    def polish(self) -> bool:
        return bool(self.raw["state_prep"]["polish"])

    @property
    def output_dir(self) -> Path:
        return Path(self.raw["output"]["directory"])

    @property
    def formats(self) -> tuple[str, ...]:
        return tuple(self.raw["output"]["formats"])

    def echo(self) -> str:
        """Effective configuration as TOML text."""
        return tomli_w.dumps(self.raw)

    def with_layers(self, layers: int) -> "RunConfig":
        raw = copy.deepcopy(self.raw)
        raw["ansatz"]["layers"] = layers
        return build(raw)


def build(raw: dict, path: str | None = None, text: str | None = None) -> RunConfig:
    """Validate a merged dictionary and construct the typed configuration."""

    def fail(msg, section, key=None):
        raise ConfigError(msg, path, _locate(text, section, key))

    mx = raw["maxwell"]
    try:
        maxwell = MaxwellConfig(int(mx["n_grid"]), float(mx["domain_length"]), float(mx["c"]),
                                float(mx["dt"]) or None, str(mx["boundary"]))
    except (ValueError, TypeError) as err:
        fail(str(err), "maxwell", "n_grid")
    if not 0 < float(mx["width"]):
        fail("width must be positive", "maxwell", "width")

    az = raw["ansatz"]
    if az["family"] not in FAMILIES:
        fail(f"unknown ansatz family {az['family']!r}; choose from {FAMILIES}", "ansatz", "family")
    try:
        spec = AnsatzSpec(str(az["family"]), int(az["n_qubits"]), int(az["layers"]))
    except (ValueError, TypeError) as err:
        fail(str(err), "ansatz", "layers")
    if 4 * maxwell.n_grid != 2**spec.n_qubits:
        fail(f"n_qubits = {spec.n_qubits} does not match 4 * n_grid = {4 * maxwell.n_grid} amplitudes",
             "ansatz", "n_qubits")

    ev = raw["evolution"]
    seed = int(raw["seed"])
    if not 0 <= seed < 2**64:
        fail("seed must be a 64-bit unsigned integer", "", "seed")
    try:
        mode = EvaluationMode.parse(str(ev["mode"]), seed)
    except ValueError as err:
        fail(str(err), "evolution", "mode")
    try:
        reg = Regularization(str(ev["regularization"]), float(ev["rho"]), float(ev["ridge"]))
    except ValueError as err:
        fail(str(err), "evolution", "regularization")
    try:
        evolution = EvolutionConfig(float(ev["dt"]) or maxwell.dt, float(ev["t_final"]), reg, mode,
                                    int(ev["snapshot_stride"]), bool(ev["norm_correction"]))
    except ValueError as err:
        fail(str(err), "evolution", None)

    sp = raw["state_prep"]
    try:
        spsa = SpsaConfig(int(sp["iterations"]), float(sp["a"]), float(sp["c"]), float(sp["A"]),
                          float(sp["alpha"]), float(sp["gamma"]), int(sp["restarts"]), seed,
                          float(sp["init_scale"]))
    except ValueError as err:
        fail(str(err), "state_prep", None)
    if not 0 < float(sp["eps_init"]) < 1:
        fail("eps_init must lie in (0, 1)", "state_prep", "eps_init")
    if int(raw["sweep"]["max_layers"]) < 1:
        fail("max_layers must be >= 1", "sweep", "max_layers")
    bad = set(raw["output"]["formats"]) - {"csv", "json"}
    if bad:
        fail(f"unknown output formats {sorted(bad)}", "output", "formats")
    return RunConfig(raw, maxwell, spec, evolution, spsa, seed)


def load(path: str | Path | None = None, overrides: list[str] = ()) -> RunConfig:
    """Defaults, then the TOML file at ``path``, then ``section.key=value`` overrides."""
    raw = copy.deepcopy(DEFAULTS)
    text = None
    spath = None
    if path is not None:
        spath = str(path)
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read config: {err.strerror}", spath) from err
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as err:
            m = re.search(r"line (\d+)", str(err))
            raise ConfigError(str(err), spath, int(m.group(1)) if m else None) from err
        _merge(raw, data, spath, text)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value", "--set")
        parts = key.strip().split(".")
        node = raw
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(f"unknown section {p!r}", "--set")
            node = node[p]
        if parts[-1] not in node or isinstance(node[parts[-1]], dict):
            raise ConfigError(f"unknown key {key.strip()!r}", "--set")
        node[parts[-1]] = _parse_value(value.strip())
    return build(raw, spath, text)
