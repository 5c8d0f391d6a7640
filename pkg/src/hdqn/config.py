"""Experiment configuration: a flat key=value text format and its schema.

A file that sets nothing reproduces the six-state chain experiment with
the two-level agent on tabular value functions. Shipped configs override
only what differs.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

from hdqn.errors import ConfigError

ENVS = ("chain", "keydoor")
AGENTS = ("hdqn", "flat")
BACKENDS = ("tabular", "mlp")


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "chain"
    agent: str = "hdqn"
    backend: str = "tabular"
    seeds: tuple = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9)
    episodes: int = 50_000
    pretrain_steps: int = 0
    learning_rate: float = 0.00025
    gamma: float = 0.99
    eps1_horizon: int = 50_000
    eps2_horizon: int = 50_000
    eps_floor: float = 0.1
    d1_capacity: int = 100_000
    d2_capacity: int = 100_000
    d1_warmup: int = 100
    d2_warmup: int = 100
    batch_size: int = 32
    tracker_window: int = 100
    hidden: int = 64
    target_sync: int = 1000
    reward_window: int = 1000
    visit_window: int = 1000
    step_limit: int = 500
    layout: str = ""
    workers: int = 0
    eval_episodes: int = 100
    eval_epsilon: float = 0.1
    out_dir: str = "results"

    def validate(self) -> "ExperimentConfig":
        def bad(msg):
            return ConfigError(f"invalid config: {msg}")

        if self.env not in ENVS:
            raise bad(f"env must be one of {ENVS}, got {self.env!r}")
        if self.agent not in AGENTS:
            raise bad(f"agent must be one of {AGENTS}, got {self.agent!r}")
        if self.backend not in BACKENDS:
            raise bad(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.agent == "flat" and self.env != "chain":
            raise bad("the flat baseline is defined for the chain environment only")
        if self.agent == "flat" and self.backend != "tabular":
            raise bad("the flat baseline is tabular only")
        if not self.seeds:
            raise bad("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise bad("seeds must be distinct")
        if any(s < 0 for s in self.seeds):
            raise bad("seeds must be non-negative")
        for name in (
            "episodes",
            "eps1_horizon",
            "eps2_horizon",
            "d1_capacity",
            "d2_capacity",
            "d1_warmup",
            "d2_warmup",
            "batch_size",
            "tracker_window",
            "hidden",
            "target_sync",
            "reward_window",
            "visit_window",
            "step_limit",
            "eval_episodes",
        ):
            if getattr(self, name) < 1:
                raise bad(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.pretrain_steps < 0:
            raise bad(f"pretrain_steps must be >= 0, got {self.pretrain_steps}")
        if self.workers < 0:
            raise bad(f"workers must be >= 0 (0 means auto), got {self.workers}")
        if self.learning_rate <= 0:
            raise bad(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 <= self.gamma <= 1.0:
            raise bad(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.eps_floor <= 1.0:
            raise bad(f"eps_floor must be in [0, 1], got {self.eps_floor}")
        if not 0.0 <= self.eval_epsilon <= 1.0:
            raise bad(f"eval_epsilon must be in [0, 1], got {self.eval_epsilon}")
        if self.layout and self.env != "keydoor":
            raise bad("layout applies to the keydoor environment only")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_seeds(raw: str):
    seeds = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        lo, dash, hi = part.partition("-")
        try:
            if dash:
                a, b = int(lo), int(hi)
                if b < a:
                    raise ValueError
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ValueError(f"bad seed entry {part!r} (want N or A-B)") from None
    return tuple(seeds)


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if key == "seeds":
        return _parse_seeds(raw)
    if kind in ("int", int):
        return int(raw)
    if kind in ("float", float):
        return float(raw)
    return raw


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse flat key=value lines into a field dict.

    Lines are `key = value`; `#` starts a comment; blank lines ignored.
    Diagnostics carry the source name and 1-based line number.
    """
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, eq, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not eq or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        try:
            out[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return out


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a config file, apply overrides, validate."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    settings = parse_config(text, source=path)
    if overrides:
        settings.update(overrides)
    return ExperimentConfig(**settings).validate()


def default_config(**overrides) -> ExperimentConfig:
    return replace(ExperimentConfig(), **overrides).validate()
