"""Request and response bodies for the HTTP API.

The service is stateless: every request carries its full inputs, including
the price series inline, and responses carry everything the client needs to
write files locally. Response models mirror the dict shapes produced by
finquakes.orchestrate.
"""

from __future__ import annotations

import datetime as dt

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import Placement, SimConfig
from ..market import MarketSeries


class SeriesPayload(BaseModel):
    """Inline daily-close series; dates and closes are index-aligned."""

    dates: list[dt.date]
    closes: list[float]

    def to_series(self) -> MarketSeries:
        return MarketSeries(
            dates=tuple(self.dates), closes=np.asarray(self.closes, dtype=float)
        )


class FitPayload(BaseModel):
    # A field literally named "model" is meaningful here, silence the
    # pydantic namespace warning rather than rename a domain term.
    model_config = ConfigDict(protected_namespaces=())

    model: str
    exponent: float
    intercept: float
    fit_range: list[float]
    goodness: float
    n_points: int
    preferred: bool | None = None


class MlePayload(BaseModel):
    alpha: float
    ccdf_exponent: float
    stderr: float
    s_min: float
    n_tail: int


class SizesSummary(BaseModel):
    mean: float
    max: int
    per_run_max: list[int]
    power_law: FitPayload | None
    exponential: FitPayload | None
    preferred_model: str | None
    mle: MlePayload | None


class RandomKindFits(BaseModel):
    power_law: FitPayload | None
    exponential: FitPayload | None
    preferred_model: str | None


class WealthBlock(BaseModel):
    counts: dict[str, int]
    mean_capital: dict[str, float | None]
    fraction_above_initial: dict[str, float | None]
    fraction_technical_below_worst_random: float | None
    fraction_technical_above_best_random: float | None
    tail_power_law: FitPayload | None
    random_kind_fits: RandomKindFits | None


class RunSummary(BaseModel):
    config: dict
    n_runs: int
    n_quakes: int
    win_rate: float
    sizes: SizesSummary
    wealth: WealthBlock


class QuakeRow(BaseModel):
    run: int
    day: int
    size: int
    signed_size: int
    prediction: str
    actual: str
    seed_agent: int
    seed_kind: str


class WealthRow(BaseModel):
    run: int
    agent_id: int
    kind: str
    capital: float
    bets: int
    wins: int
    losses: int


class RunRequest(BaseModel):
    config: SimConfig = SimConfig()
    series: SeriesPayload
    n_runs: int = Field(default=1, ge=1, le=10_000)
    jobs: int = Field(default=1, ge=1)
    fit_min: float | None = None
    fit_max: float | None = None
    include_quakes: bool = False
    include_wealth: bool = False


class RunResponse(BaseModel):
    summary: RunSummary
    quakes: list[QuakeRow] | None = None
    wealth: list[WealthRow] | None = None


class SweepRequest(BaseModel):
    config: SimConfig = SimConfig()
    series: SeriesPayload
    fractions: list[float] = Field(min_length=1)
    placements: list[Placement] = [Placement.UNIFORM]
    n_runs: int = Field(default=1, ge=1, le=10_000)
    jobs: int = Field(default=1, ge=1)
    fit_min: float | None = None
    fit_max: float | None = None


class SweepCell(BaseModel):
    placement: str
    random_fraction: float
    n_runs: int
    n_quakes: int
    win_rate: float
    mean_size: float
    per_run_max: list[int]
    mean_max_size: float
    sd_max_size: float
    power_law: FitPayload | None
    exponential: FitPayload | None
    preferred_model: str | None
    mean_capital: dict[str, float | None]


class SweepResponse(BaseModel):
    config: dict
    n_runs_per_cell: int
    n_days: int
    cells: list[SweepCell]


class StatsRequest(BaseModel):
    samples: list[float] = Field(min_length=1)
    fit_min: float | None = None
    fit_max: float | None = None
    discrete: bool = True
    include_points: bool = True


class DistributionPayload(BaseModel):
    values: list[float]
    ccdf: list[float]


class StatsResponse(BaseModel):
    n_samples: int
    mean: float
    max: float
    power_law: FitPayload | None
    exponential: FitPayload | None
    preferred_model: str | None
    mle: MlePayload | None
    distribution: DistributionPayload | None = None


class HealthResponse(BaseModel):
    status: str
    version: str
