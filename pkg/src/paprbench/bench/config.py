"""Experiment configuration: TOML documents, validation, sweep expansion.

A configuration is a TOML file with scalar keys at the top level, one
optional table named after the technique holding its parameters, and an
optional ``[sweep]`` table with exactly one list-valued key::

    n_subcarriers = 256
    oversampling = 4
    n_symbols = 10000
    master_seed = 1
    technique = "slm"
    output = "slm.csv"

    [slm]
    u_count = 4
    alphabet = "pm1"

    [sweep]
    u_count = [2, 4, 8]

Validation collects every problem before reporting, rejects unknown keys
(with a closest-match suggestion) and lists all missing required keys.
"""
from __future__ import annotations

import difflib
from dataclasses import dataclass, field, replace

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from ..core import default_thresholds

TECHNIQUES = ("none", "clipping", "slm", "pts", "tr", "sap", "ops")

_TOP_LEVEL = {
    "n_subcarriers": (int, None),
    "oversampling": (int, 4),
    "modulation": (str, "qpsk"),
    "n_symbols": (int, 10_000),
    "master_seed": (int, 0),
    "technique": (str, None),
    "output": (str, None),
    "grid_start": (float, 4.0),
    "grid_stop": (float, 13.0),
    "grid_step": (float, 0.1),
}
_REQUIRED = ("n_subcarriers", "technique")

_TECH_PARAMS = {
    "none": {},
    "clipping": {
        "clip_ratio_db": (float, 5.0),
        "iterations": (int, 1),
    },
    "slm": {
        "u_count": (int, 4),
        "alphabet": (str, "pm1"),
        "seed": (int, 0),
    },
    "pts": {
        "v_count": (int, 4),
        "scheme": (str, "adjacent"),
        "w_alphabet": (int, 2),
        "search": (str, "iterative"),
        "seed": (int, 0),
    },
    "tr": {
        "r_count": (int, 8),
        "placement": (str, "equispaced"),
        "target_db": (float, 6.0),
        "max_iters": (int, 20),
        "cap": (float, None),
        "seed": (int, 0),
    },
    "sap": {
        "alpha": (float, 1.55),
        "l_count": (int, 16),
        "p_exponent": (float, 2.0),
        "threshold_db": (float, 6.0),
        "k_cap": (int, 8),
    },
    "ops": {
        "n_pilots": (int, 16),
        "m_count": (int, 8),
        "pilot_snr_db": (float, 10.0),
    },
}

#: top-level keys that a sweep may vary in addition to technique parameters
_SWEEPABLE_TOP = ("n_subcarriers", "oversampling", "n_symbols")


class ConfigError(ValueError):
    """Carries every validation problem found in a configuration document."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    n_subcarriers: int
    technique: str
    oversampling: int = 4
    modulation: str = "qpsk"
    n_symbols: int = 10_000
    master_seed: int = 0
    params: dict = field(default_factory=dict)
    grid_start: float = 4.0
    grid_stop: float = 13.0
    grid_step: float = 0.1
    output: str = None

    def thresholds(self) -> np.ndarray:
        return default_thresholds(self.grid_start, self.grid_stop, self.grid_step)

    def describe(self) -> dict:
        """Stable flat summary used for CSV comment echoes."""
        d = {
            "technique": self.technique,
            "n_subcarriers": self.n_subcarriers,
            "oversampling": self.oversampling,
            "modulation": self.modulation,
            "n_symbols": self.n_symbols,
            "master_seed": self.master_seed,
        }
        for key in sorted(self.params):
            d[f"{self.technique}.{key}"] = self.params[key]
        return d


def _suggest(key: str, pool) -> str:
    close = difflib.get_close_matches(key, list(pool), n=1)
    return f" (did you mean {close[0]!r}?)" if close else ""


def _coerce(value, want, where, key, errors):
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{where}.{key}: expected an integer, got {value!r}")
            return None
        return value
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{where}.{key}: expected a number, got {value!r}")
            return None
        return float(value)
    if want is str:
        if not isinstance(value, str):
            errors.append(f"{where}.{key}: expected a string, got {value!r}")
            return None
        return value
    raise AssertionError(want)


def _validate(doc: dict):
    errors = []
    if not isinstance(doc, dict):
        raise ConfigError(["configuration root must be a table"])

    top = {}
    tables = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            tables[key] = value
        elif key in _TOP_LEVEL:
            want, _ = _TOP_LEVEL[key]
            got = _coerce(value, want, "top level", key, errors)
            if got is not None:
                top[key] = got
        else:
            errors.append(f"unknown key {key!r}{_suggest(key, _TOP_LEVEL)}")

    missing = [k for k in _REQUIRED if k not in top]
    if missing:
        errors.append("missing required keys: " + ", ".join(sorted(missing)))

    technique = top.get("technique")
    if technique is not None and technique not in TECHNIQUES:
        errors.append(
            f"unknown technique {technique!r}{_suggest(technique, TECHNIQUES)}"
        )
        technique = None

    params = {}
    sweep = None
    for name, table in tables.items():
        if name == "sweep":
            sweep = table
            continue
        if name not in _TECH_PARAMS:
            errors.append(f"unknown section [{name}]{_suggest(name, _TECH_PARAMS)}")
            continue
        if technique is not None and name != technique:
            errors.append(
                f"section [{name}] does not belong to technique {technique!r}"
            )
            continue
        schema = _TECH_PARAMS[name]
        for key, value in table.items():
            if key not in schema:
                errors.append(f"[{name}] unknown key {key!r}{_suggest(key, schema)}")
                continue
            want, _ = schema[key]
            got = _coerce(value, want, f"[{name}]", key, errors)
            if got is not None:
                params[key] = got

    sweep_key = None
    sweep_values = None
    if sweep is not None:
        if technique is None:
            errors.append("[sweep] requires a valid technique")
        else:
            allowed = set(_TECH_PARAMS[technique]) | set(_SWEEPABLE_TOP)
            keys = list(sweep)
            if len(keys) != 1:
                errors.append("[sweep] must contain exactly one key")
            elif keys[0] not in allowed:
                errors.append(
                    f"[sweep] key {keys[0]!r} is not sweepable for technique "
                    f"{technique!r}{_suggest(keys[0], allowed)}"
                )
            elif not isinstance(sweep[keys[0]], list) or not sweep[keys[0]]:
                errors.append(f"[sweep] {keys[0]} must be a nonempty list")
            else:
                sweep_key = keys[0]
                sweep_values = sweep[keys[0]]

    if errors:
        raise ConfigError(errors)

    filled = {k: (top[k] if k in top else d) for k, (_, d) in _TOP_LEVEL.items()}
    schema = _TECH_PARAMS[filled["technique"]]
    full_params = {k: (params[k] if k in params else d) for k, (_, d) in schema.items()}
    cfg = ExperimentConfig(
        n_subcarriers=filled["n_subcarriers"],
        technique=filled["technique"],
        oversampling=filled["oversampling"],
        modulation=filled["modulation"],
        n_symbols=filled["n_symbols"],
        master_seed=filled["master_seed"],
        params=full_params,
        grid_start=filled["grid_start"],
        grid_stop=filled["grid_stop"],
        grid_step=filled["grid_step"],
        output=filled["output"],
    )
    _check_semantics(cfg)
    return cfg, sweep_key, sweep_values


def _check_semantics(cfg: ExperimentConfig):
    errors = []
    n = cfg.n_subcarriers
    if n < 2 or n & (n - 1):
        errors.append(f"n_subcarriers must be a power of two >= 2, got {n}")
    if cfg.oversampling < 1:
        errors.append("oversampling must be >= 1")
    if cfg.n_symbols < 1:
        errors.append("n_symbols must be >= 1")
    if cfg.modulation != "qpsk":
        errors.append(f"unsupported modulation {cfg.modulation!r}")
    if cfg.grid_step <= 0 or cfg.grid_stop <= cfg.grid_start:
        errors.append("threshold grid needs stop > start and step > 0")
    if errors:
        raise ConfigError(errors)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate one experiment; rejects documents with a sweep table."""
    doc = _load(text)
    cfg, sweep_key, _ = _validate(doc)
    if sweep_key is not None:
        raise ConfigError(
            ["document contains a [sweep] table; expand it with parse_sweep"]
        )
    return cfg


def parse_sweep(text: str) -> list[tuple[str, ExperimentConfig]]:
    """Expand a sweep document into (label, config) children sharing the seed."""
    doc = _load(text)
    cfg, sweep_key, sweep_values = _validate(doc)
    if sweep_key is None:
        return [(cfg.technique, cfg)]
    if sweep_key in _SWEEPABLE_TOP:
        want, _ = _TOP_LEVEL[sweep_key]
    else:
        want, _ = _TECH_PARAMS[cfg.technique][sweep_key]
    children = []
    errors = []
    coerced = [_coerce(v, want, "[sweep]", sweep_key, errors) for v in sweep_values]
    if errors:
        raise ConfigError(errors)
    for value in coerced:
        if sweep_key in _SWEEPABLE_TOP:
            child = replace(cfg, **{sweep_key: value})
        else:
            child = replace(cfg, params={**cfg.params, sweep_key: value})
        _check_semantics(child)
        children.append((f"{sweep_key}={value}", child))
    return children


def _load(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"not valid TOML: {exc}"]) from exc


def build_config(
    technique: str, n_subcarriers: int, params: dict = None, **overrides
) -> ExperimentConfig:
    """Construct a validated config programmatically, filling parameter defaults."""
    if technique not in _TECH_PARAMS:
        raise ConfigError([f"unknown technique {technique!r}"])
    schema = _TECH_PARAMS[technique]
    params = params or {}
    unknown = set(params) - set(schema)
    if unknown:
        raise ConfigError([f"[{technique}] unknown key {k!r}" for k in sorted(unknown)])
    full = {k: d for k, (_, d) in schema.items()}
    full.update(params)
    cfg = ExperimentConfig(
        n_subcarriers=n_subcarriers, technique=technique, params=full, **overrides
    )
    _check_semantics(cfg)
    return cfg
