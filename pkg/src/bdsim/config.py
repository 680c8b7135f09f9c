"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored; every other line must be
``key = value`` with a key from :data:`KEYS`. Unknown keys are errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError
from .solver import InitialDataSpec, SolverConfig


class ConfigError(InvalidInputError):
    pass


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _opt_float(v: str):
    return None if v.strip().lower() in ("", "none") else float(v)


def _opt_str(v: str):
    return None if v.strip().lower() in ("", "none") else v.strip()


def _floats(v: str) -> tuple:
    return tuple(float(x) for x in v.split(",") if x.strip())


def _ints(v: str) -> tuple:
    return tuple(int(x) for x in v.split(",") if x.strip())


# key -> (target, field name, parser)
KEYS = {
    "n": ("solver", "n", int),
    "period": ("solver", "period", float),
    "dt": ("solver", "dt", _opt_float),
    "cfl": ("solver", "cfl", _opt_float),
    "t_end": ("solver", "t_end", float),
    "nu": ("solver", "nu", float),
    "eta": ("solver", "eta", float),
    "sobolev_s": ("solver", "sobolev_s", int),
    "integrator": ("solver", "integrator", str.strip),
    "dealias": ("solver", "dealias", str.strip),
    "diagnostics_stride": ("solver", "diagnostics_stride", int),
    "nonlinear": ("solver", "nonlinear", _bool),
    "e2_index": ("solver", "e2_index", float),
    "quartic_diagnostics": ("solver", "quartic_diagnostics", _bool),
    "init_kind": ("init", "kind", str.strip),
    "amplitude": ("init", "amplitude", float),
    "seed": ("init", "seed", int),
    "band_lo": ("init", "band_lo", float),
    "band_hi": ("init", "band_hi", float),
    "spectral_decay": ("init", "spectral_decay", float),
    "mode1": ("init", "mode1", int),
    "mode2": ("init", "mode2", int),
    "region": ("init", "region", _opt_str),
    "init_path": ("init", "path", _opt_str),
    "snapshot_every": ("run", "snapshot_every", int),
    "decay_samples": ("run", "decay_samples", int),
    "sweep_amplitudes": ("run", "sweep_amplitudes", _floats),
    "kernel_lattice_bound": ("run", "kernel_lattice_bound", int),
    "kernel_times": ("run", "kernel_times", _floats),
    "identity_seeds": ("run", "identity_seeds", int),
    "identity_sizes": ("run", "identity_sizes", _ints),
}

RUN_DEFAULTS = {
    "snapshot_every": 0,
    "decay_samples": 101,
    "sweep_amplitudes": (1e-4, 1e-3, 1e-2),
    "kernel_lattice_bound": 8,
    "kernel_times": (0.1, 1.0, 10.0),
    "identity_seeds": 20,
    "identity_sizes": (32, 64, 128),
}


@dataclass
class RunConfig:
    solver: SolverConfig
    init: InitialDataSpec
    run: dict = field(default_factory=lambda: dict(RUN_DEFAULTS))
    raw: dict = field(default_factory=dict)


def parse_config_text(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return build_config(raw)


def build_config(raw: dict) -> RunConfig:
    parts = {"solver": {}, "init": {}, "run": {}}
    for key, value in raw.items():
        target, name, parse = KEYS[key]
        try:
            parts[target][name] = parse(str(value))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    init = parts["init"]
    band = (init.pop("band_lo", 1.0), init.pop("band_hi", 4.0))
    mode = (init.pop("mode1", 1), init.pop("mode2", 1))
    try:
        solver = SolverConfig(**parts["solver"])
        spec = InitialDataSpec(band=band, mode=mode, **init)
    except (InvalidInputError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    run = {**RUN_DEFAULTS, **parts["run"]}
    if run["snapshot_every"] < 0 or run["decay_samples"] < 2 or run["identity_seeds"] < 1:
        raise ConfigError("snapshot_every, decay_samples or identity_seeds out of range")
    return RunConfig(solver, spec, run, dict(raw))


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)
