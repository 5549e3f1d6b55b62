"""Declarative experiment configuration: strict flat key=value files.

A config file holds ``key = value`` lines grouped under ``[section]``
headers; blank lines and ``#`` comments are ignored.  Parsing is strict:
an unknown section or key is an error, so a config that loads is fully
understood.  Command-line flags override file values; the resolved
configuration is what ``run.meta`` records.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import CapacityError, ConfigError

EXPERIMENT_KINDS = ("growth", "omega", "zeros", "tail-decay", "random-model", "verify")

MAX_RANGE = 10**12
RANDOM_MAX_X = 10**7
RANDOM_MAX_TRIALS = 10**4

_SCHEMA = {
    "experiment": {
        "kind": str,
        "q": int,
        "char": int,
        "max": int,
        "threads": int,
        "out": str,
        "seed": int,
        "trials": int,
        "t_max": float,
        "sigmas": "floats",
        "tail_t": float,
        "tail_m_min_exp": int,
        "tail_m_max_exp": int,
        "split": str,
        "figures": "bool",
        "all_ones": "bool",
        "goldens": str,
    },
    "checkpoints": {
        "extras": "ints",
    },
    "tolerances": {
        "noncancel_threshold": float,
        "phi_c": float,
    },
}


@dataclass
class ExperimentConfig:
    kind: str
    q: int = 3
    char: int = 0
    max: int = 10**6
    threads: int = 1
    out: str = "runs/out"
    seed: int | None = None
    trials: int = 1
    t_max: float = 30.0
    sigmas: tuple[float, ...] = (0.75, 1.0)
    tail_t: float = 0.0
    tail_m_min_exp: int = 10
    tail_m_max_exp: int = 17
    split: str = "default"
    figures: bool = True
    all_ones: bool = False
    goldens: str | None = None
    extras: tuple[int, ...] = ()
    noncancel_threshold: float = 1e-3
    phi_c: float = 1.0

    def validate(self) -> "ExperimentConfig":
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.q < 3:
            raise ConfigError("q must be >= 3")
        if self.char < 0:
            raise ConfigError("character index must be >= 0")
        if not 1 <= self.max <= MAX_RANGE:
            raise CapacityError(f"max must lie in [1, {MAX_RANGE}]")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.kind == "random-model":
            if self.seed is None:
                raise ConfigError("random-model experiments require a seed")
            if self.max > RANDOM_MAX_X:
                raise CapacityError(f"random-model range capped at {RANDOM_MAX_X}")
            if not 1 <= self.trials <= RANDOM_MAX_TRIALS:
                raise CapacityError(f"trials must lie in [1, {RANDOM_MAX_TRIALS}]")
        if self.kind == "tail-decay":
            if not self.sigmas:
                raise ConfigError("tail-decay needs at least one sigma")
            if any(s <= 0.5 for s in self.sigmas):
                raise ConfigError("tail sigmas must exceed 1/2")
            if not 1 <= self.tail_m_min_exp <= self.tail_m_max_exp <= 26:
                raise ConfigError("need 1 <= tail_m_min_exp <= tail_m_max_exp <= 26")
        if self.kind in ("omega", "zeros") and not 0 < self.t_max <= 5000:
            raise CapacityError("t_max must lie in (0, 5000]")
        if self.noncancel_threshold <= 0:
            raise ConfigError("noncancel_threshold must be positive")
        if self.split != "default":
            parts = self.split.split(":")
            if len(parts) != 2 or not all(p.isdigit() and int(p) >= 1 for p in parts):
                raise ConfigError("split must be 'default' or 'D:M' with integers >= 1")
        return self

    def split_for(self, x: int):
        from .sieve import HyperbolaSplit

        if self.split == "default":
            return HyperbolaSplit.default(x)
        d, m = (int(p) for p in self.split.split(":"))
        return HyperbolaSplit(x, d, m)

    def resolved_items(self) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(e) for e in v)
            out.append((f.name, "" if v is None else str(v)))
        return out


def _parse_value(key: str, kind, raw: str):
    raw = raw.strip()
    try:
        if kind is str:
            return raw
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "ints":
            return tuple(int(p) for p in raw.split(",") if p.strip()) if raw else ()
        if kind == "floats":
            return tuple(float(p) for p in raw.split(",") if p.strip()) if raw else ()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    raise ConfigError(f"unhandled schema type for {key!r}")


def parse_config_file(path: str | Path) -> dict[str, object]:
    """Strictly parse a config file into a flat {field: value} dict."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, object] = {}
    section = "experiment"
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith(";"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SCHEMA[section]:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} in [{section}]")
        values[key] = _parse_value(key, _SCHEMA[section][key], raw)
    return values


def build_config(kind: str, config_path: str | Path | None, **overrides) -> ExperimentConfig:
    """Merge file values and CLI overrides into a validated config."""
    values: dict[str, object] = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
    file_kind = values.pop("kind", None)
    if file_kind is not None and file_kind != kind:
        raise ConfigError(f"config file declares kind {file_kind!r}, command is {kind!r}")
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    cfg = ExperimentConfig(kind=kind, **values)
    return cfg.validate()
