"""Simulation configuration, named RNG streams, and the flat config-file loader."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import ConfigError

DEFAULT_SEED = 42


class Placement(str, Enum):
    """Spatial arrangement of the random-trader population on the lattice."""

    UNIFORM = "uniform"
    ONE_COMMUNITY = "one_community"
    FOUR_COMMUNITIES = "four_communities"


# Stream tags enter the RNG seed material so that equal integer seeds on
# different streams still produce independent sequences.
_STREAM_TAGS = {"topology": 1, "drive": 2, "bets": 3, "capital": 4}


class Seeds(BaseModel):
    """Seeds for the four labeled RNG streams.

    topology: lattice rewiring and random-trader placement.
    drive:    initial information levels and the daily information pressure.
    bets:     coin-flip predictions (random-trader seeds and warm-up days).
    capital:  initial capital endowments.

    Keeping the streams separate guarantees that market-dependent draws never
    advance the drive stream, so avalanche sizes depend on topology and drive
    alone.
    """

    model_config = ConfigDict(frozen=True)

    topology: int = DEFAULT_SEED
    drive: int = DEFAULT_SEED
    bets: int = DEFAULT_SEED
    capital: int = DEFAULT_SEED

    def stream(self, name: str, run_index: int = 0) -> np.random.Generator:
        """Generator for one named stream; run sub-seeds are seed + run index."""
        return np.random.default_rng([_STREAM_TAGS[name], getattr(self, name) + run_index])


class SimConfig(BaseModel):
    """Every free parameter of the model. The defaults are the baseline setup:

    a 40 x 40 open-boundary lattice (1600 traders) rewired with probability
    0.02, information threshold 1.0, transfer fraction 0.84, RSI window 14,
    no random traders, and normal(1000, 100) initial capital.
    """

    model_config = ConfigDict(frozen=True)

    rows: int = Field(default=40, ge=2)
    cols: int = Field(default=40, ge=2)
    rewire_prob: float = Field(default=0.02, ge=0.0, le=1.0)
    threshold: float = Field(default=1.0, gt=0.0)
    # Fraction of a toppling agent's information passed to its neighborhood;
    # 1.0 is the conservative case, smaller values dissipate.
    dissipation: float = Field(default=0.84, ge=0.0, le=1.0)
    rsi_window: int = Field(default=14, ge=1)
    random_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    placement: Placement = Placement.UNIFORM
    win_bet_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    loss_bet_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)
    initial_capital_mean: float = Field(default=1000.0, gt=0.0)
    initial_capital_sd_fraction: float = Field(default=0.1, ge=0.0)
    # Alternative reading of the neighbor rule: give the share that would go
    # to random neighbors to the technical ones instead of dissipating it.
    redistribute_random_share: bool = False
    max_topplings: int = Field(default=1_000_000, gt=0)
    seeds: Seeds = Seeds()

    @property
    def n_agents(self) -> int:
        return self.rows * self.cols

    @property
    def n_random(self) -> int:
        return int(round(self.random_fraction * self.n_agents))

    def updated(self, **changes) -> "SimConfig":
        """Copy with field overrides, re-running validation."""
        data = self.model_dump()
        seeds = changes.pop("seeds", None)
        data.update(changes)
        if seeds is not None:
            data["seeds"] = seeds
        return SimConfig(**data)


_SEED_KEYS = {"seed_topology", "seed_drive", "seed_bets", "seed_capital"}


def load_config_file(path: str | Path) -> SimConfig:
    """Load a flat ``key = value`` config file.

    Blank lines and ``#`` comments are ignored. Keys mirror SimConfig field
    names; seeds use ``seed_topology`` etc. An empty file yields the defaults.
    """
    path = Path(path)
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in fields:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        fields[key] = value

    try:
        return config_from_mapping(fields)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_mapping(data: Mapping[str, object]) -> SimConfig:
    """Build a SimConfig from a flat mapping with ``seed_*`` seed keys.

    This is the inverse of flattening a config for files and manifests;
    values may be strings, which pydantic coerces.
    """
    fields = dict(data)
    seed_overrides = {
        key.removeprefix("seed_"): int(fields.pop(key))  # type: ignore[arg-type]
        for key in list(fields)
        if key in _SEED_KEYS
    }
    known = set(SimConfig.model_fields) - {"seeds"}
    unknown = set(fields) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = SimConfig(**fields)
        if seed_overrides:
            cfg = cfg.updated(seeds=Seeds(**{**cfg.seeds.model_dump(), **seed_overrides}))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg
