"""Experiment configuration: flat ``key = value`` files, env overrides, flags."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .centrality import MEASURES

ENV_PREFIX = "SPREADRANK_"


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in _tokens(text)]


def _tokens(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_measures(text: str) -> list[str]:
    tokens = _tokens(text)
    if tokens == ["all"]:
        return list(MEASURES)
    bad = [t for t in tokens if t not in MEASURES]
    if bad or not tokens:
        raise ConfigError(
            f"unknown measure(s) {', '.join(bad) or '(none)'}; "
            f"valid tokens: {', '.join(MEASURES)}, all"
        )
    return tokens


def parse_networks(text: str) -> list[tuple[str, str]]:
    """``name=path`` or bare ``path`` (named after the file stem), comma separated."""
    out = []
    for tok in _tokens(text):
        name, sep, path = tok.partition("=")
        if not sep:
            name, path = Path(tok).stem, tok
        out.append((name.strip(), path.strip()))
    return out


@dataclass
class ExperimentConfig:
    networks: list[tuple[str, str]] = field(default_factory=list)
    measures: list[str] = field(default_factory=lambda: list(MEASURES))
    beta_percent: list[float] = field(default_factory=list)
    beta_multiple: list[float] = field(default_factory=list)
    p: list[float] = field(default_factory=list)
    x: str = "p"
    runs: int = 1000
    seed: int | None = None
    workers: int = 1
    out: str = "results"
    pagerank_variant: str = "damped"
    damping: float = 0.85
    diff: list[str] = field(default_factory=lambda: ["kshell-eigenvector"])

    _PARSERS = {
        "networks": parse_networks,
        "measures": parse_measures,
        "beta_percent": _floats,
        "beta_multiple": _floats,
        "p": _floats,
        "x": str,
        "runs": int,
        "seed": lambda s: None if s in ("", "none") else int(s),
        "workers": int,
        "out": str,
        "pagerank_variant": str,
        "damping": float,
        "diff": _tokens,
    }

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def set_text(self, key: str, text: str) -> None:
        if key not in self._PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            setattr(self, key, self._PARSERS[key](text.strip()))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None

    def to_text(self) -> str:
        def fmt(key, value):
            if key == "networks":
                return ",".join(f"{n}={p}" for n, p in value)
            if isinstance(value, list):
                return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            if value is None:
                return "none"
            return repr(value) if isinstance(value, float) else str(value)

        return "".join(f"{k} = {fmt(k, getattr(self, k))}\n" for k in self.keys())

    def dump(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        cfg.update_from_text(text)
        return cfg

    def update_from_text(self, text: str) -> None:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"config line {lineno}: expected 'key = value'")
            self.set_text(key.strip().replace("-", "_"), value)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def update_from_env(self, environ=None) -> None:
        environ = os.environ if environ is None else environ
        for key in self.keys():
            value = environ.get(ENV_PREFIX + key.upper())
            if value is not None:
                self.set_text(key, value)

    def validate(self, *, need_seed: bool = False) -> None:
        for name, path in self.networks:
            if not Path(path).is_file():
                raise ConfigError(f"network {name!r}: no such file {path}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if need_seed and self.seed is None:
            raise ConfigError("a master seed is required (--seed)")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.x not in ("p", "beta"):
            raise ConfigError("x must be 'p' or 'beta'")
        if self.pagerank_variant not in ("pure", "damped"):
            raise ConfigError("pagerank_variant must be 'pure' or 'damped'")
        if self.beta_percent and self.beta_multiple:
            raise ConfigError("give beta_percent or beta_multiple, not both")
        for v in self.beta_percent:
            if not 0 <= v <= 100:
                raise ConfigError(f"beta percent {v} outside [0, 100]")
        for v in self.p:
            if not 0 < v <= 100:
                raise ConfigError(f"p {v} outside (0, 100]")
