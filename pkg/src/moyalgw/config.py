"""Flat key-value run configuration.

The config file format is one ``key = value`` pair per line; ``#`` starts
a comment.  Keys use dotted names for grouped settings (``grid.extent``).
Unknown keys and unparsable values raise ConfigError naming the key.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "load_config"]


@dataclass(frozen=True)
class RunConfig:
    theta: float = 2.0
    omega: float = 1.0
    msq: float = 0.0
    lam: float = 6.0
    dim: int = 2
    trunc: int = 8
    grid_extent: float = 10.0
    grid_points: int = 128
    lam_extent: float = 6.283185307179586
    lam_points: int = 1024
    mollifier_h: float = 0.5
    mollifier_scales: tuple = (0.2, 0.1, 0.05, 0.025)
    solve_k: int = 0
    solve_l: int = 0
    suite: str = "all"
    out_dir: str = "out"
    seed: int = 1234


_KEY_MAP = {
    "theta": ("theta", float),
    "omega": ("omega", float),
    "msq": ("msq", float),
    "lambda": ("lam", float),
    "dim": ("dim", int),
    "trunc": ("trunc", int),
    "grid.extent": ("grid_extent", float),
    "grid.points": ("grid_points", int),
    "lam.extent": ("lam_extent", float),
    "lam.points": ("lam_points", int),
    "mollifier.h": ("mollifier_h", float),
    "mollifier.scales": ("mollifier_scales", "floats"),
    "solve.k": ("solve_k", int),
    "solve.l": ("solve_l", int),
    "suite": ("suite", str),
    "out": ("out_dir", str),
    "seed": ("seed", int),
}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_MAP:
            raise ConfigError(f"unknown config key {key!r}")
        attr, kind = _KEY_MAP[key]
        try:
            if kind == "floats":
                parsed = tuple(float(v) for v in value.replace(",", " ").split())
            elif kind is str:
                parsed = value
            else:
                parsed = kind(value)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: cannot parse {value!r}") from exc
        updates[attr] = parsed
    out = replace(cfg, **updates)
    _validate(out)
    return out


def _validate(cfg: RunConfig):
    if cfg.theta <= 0:
        raise ConfigError("config key 'theta': must be positive")
    if cfg.dim not in (2, 4):
        raise ConfigError("config key 'dim': must be 2 or 4")
    if cfg.trunc < 2:
        raise ConfigError("config key 'trunc': must be >= 2")
    if cfg.grid_points % 2 or cfg.grid_points < 8:
        raise ConfigError("config key 'grid.points': must be even and >= 8")
    if not 0.0 < cfg.mollifier_h < 1.0:
        raise ConfigError("config key 'mollifier.h': must lie in (0, 1)")
    if cfg.lam < 0:
        raise ConfigError("config key 'lambda': must be positive")


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def config_dict(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}
