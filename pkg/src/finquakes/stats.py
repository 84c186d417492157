"""Distribution estimates and tail-model fits for quake sizes and wealth.

The central diagnostic is the empirical complementary CDF, P(X >= x), fitted
in log space against two rival tail models:

  power law    ln P = intercept + exponent * ln x
  exponential  ln P = intercept + exponent * x

Both are ordinary least squares over the same points, so the RMS log-space
residual is directly comparable between them and decides which model the
data prefer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .dynamics import AgentKind
from .errors import ConfigError, InsufficientDataError


@dataclass(frozen=True)
class CumulativeDistribution:
    """P(X >= x) on ascending support values, a non-increasing staircase.

    Instances built by cumulative_distribution also start at ccdf = 1;
    synthetic inputs (for fit oracles) need not.
    """

    values: np.ndarray
    ccdf: np.ndarray
    n_samples: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        ccdf = np.asarray(self.ccdf, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ccdf", ccdf)
        if values.size == 0 or values.shape != ccdf.shape:
            raise InsufficientDataError("support and ccdf must align and be non-empty")
        if np.any(np.diff(values) <= 0.0):
            raise ConfigError("support values must strictly increase")
        if np.any(ccdf <= 0.0) or np.any(ccdf > 1.0):
            raise ConfigError("ccdf values must lie in (0, 1]")
        if np.any(np.diff(ccdf) > 0.0):
            raise ConfigError("ccdf must be non-increasing")


def cumulative_distribution(samples: Sequence[float]) -> CumulativeDistribution:
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise InsufficientDataError("no samples to build a distribution from")
    if not np.all(np.isfinite(arr)):
        raise InsufficientDataError("samples must be finite")
    sorted_arr = np.sort(arr)
    values = np.unique(sorted_arr)
    above = arr.size - np.searchsorted(sorted_arr, values, side="left")
    return CumulativeDistribution(
        values=values, ccdf=above / arr.size, n_samples=arr.size
    )


class FitModel(str, Enum):
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class FitResult:
    """One least-squares tail fit; goodness is the RMS ln-space residual.

    preferred is None until the fit has been compared against a rival by
    compare_fits.
    """

    model: FitModel
    exponent: float
    intercept: float
    fit_range: tuple[float, float]
    goodness: float
    n_points: int
    preferred: bool | None = None


def default_fit_range(dist: CumulativeDistribution) -> tuple[float, float]:
    """Fit window excluding the noisy extreme tail.

    The top half-decade of values is dropped: up there the ccdf rests on a
    handful of samples and its scatter drags the slope. If fewer than 5
    distinct values survive the cut the full range is used instead.
    """
    lo = float(dist.values[0])
    hi = float(dist.values[-1])
    cut = hi / np.sqrt(10.0)
    if np.count_nonzero(dist.values <= cut) >= 5:
        return (lo, cut)
    return (lo, hi)


def _fit_points(
    dist: CumulativeDistribution, fit_range: tuple[float | None, float | None] | None
) -> tuple[np.ndarray, np.ndarray, tuple[float, float]]:
    if fit_range is None:
        fit_range = default_fit_range(dist)
    # A half-open request pins one bound and takes the other from the data.
    lo = float(dist.values[0]) if fit_range[0] is None else float(fit_range[0])
    hi = float(dist.values[-1]) if fit_range[1] is None else float(fit_range[1])
    if lo > hi:
        raise ConfigError(f"empty fit range ({lo}, {hi})")
    mask = (dist.values >= lo) & (dist.values <= hi)
    x = dist.values[mask]
    y = dist.ccdf[mask]
    if x.size < 5:
        raise InsufficientDataError(
            f"fit range ({lo}, {hi}) holds {x.size} support points, need >= 5"
        )
    return x, y, (float(lo), float(hi))


def _least_squares(x: np.ndarray, log_y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, log_y, 1)
    residuals = log_y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(residuals**2)))
    return float(slope), float(intercept), rms


def fit_power_law(
    dist: CumulativeDistribution,
    fit_range: tuple[float | None, float | None] | None = None,
) -> FitResult:
    """Least-squares line through (ln x, ln ccdf); exponent is the slope."""
    x, y, fit_range = _fit_points(dist, fit_range)
    if x[0] <= 0.0:
        raise InsufficientDataError("power-law fit needs strictly positive values")
    slope, intercept, rms = _least_squares(np.log(x), np.log(y))
    return FitResult(
        model=FitModel.POWER_LAW,
        exponent=slope,
        intercept=intercept,
        fit_range=fit_range,
        goodness=rms,
        n_points=int(x.size),
    )


def fit_exponential(
    dist: CumulativeDistribution,
    fit_range: tuple[float | None, float | None] | None = None,
) -> FitResult:
    """Least-squares line through (x, ln ccdf); exponent is the decay rate."""
    x, y, fit_range = _fit_points(dist, fit_range)
    slope, intercept, rms = _least_squares(x, np.log(y))
    return FitResult(
        model=FitModel.EXPONENTIAL,
        exponent=slope,
        intercept=intercept,
        fit_range=fit_range,
        goodness=rms,
        n_points=int(x.size),
    )


def model_preference(power: FitResult, exponential: FitResult) -> FitModel:
    """The model with the smaller RMS residual; power law wins exact ties."""
    if exponential.goodness < power.goodness:
        return FitModel.EXPONENTIAL
    return FitModel.POWER_LAW


def compare_fits(power: FitResult, exponential: FitResult) -> tuple[FitResult, FitResult]:
    """Copies of both fits with their preferred flags filled in."""
    winner = model_preference(power, exponential)
    return (
        replace(power, preferred=winner is FitModel.POWER_LAW),
        replace(exponential, preferred=winner is FitModel.EXPONENTIAL),
    )


@dataclass(frozen=True)
class MleFit:
    """Maximum-likelihood power-law tail estimate for integer-valued data.

    Uses the continuous approximation with the half-integer offset, valid
    for discrete sizes with s_min >= 1. alpha is the density exponent;
    ccdf_exponent = -(alpha - 1) matches the least-squares convention.
    """

    alpha: float
    ccdf_exponent: float
    stderr: float
    s_min: float
    n_tail: int


def power_law_mle(samples: Sequence[float], s_min: float = 1.0) -> MleFit:
    if s_min < 1.0:
        raise ConfigError(f"s_min must be >= 1 for discrete data, got {s_min}")
    arr = np.asarray(samples, dtype=float)
    tail = arr[arr >= s_min]
    if tail.size < 2:
        raise InsufficientDataError(
            f"only {tail.size} samples at or above s_min={s_min}, need >= 2"
        )
    denom = np.log(tail / (s_min - 0.5)).sum()
    alpha = 1.0 + tail.size / denom
    stderr = (alpha - 1.0) / np.sqrt(tail.size)
    return MleFit(
        alpha=float(alpha),
        ccdf_exponent=float(-(alpha - 1.0)),
        stderr=float(stderr),
        s_min=float(s_min),
        n_tail=int(tail.size),
    )


def max_size_sweep(
    per_run_max: Mapping[tuple[float, str], Sequence[int]],
) -> list[dict]:
    """Mean and spread of the per-run largest quake, per sweep cell.

    Keys are (random_fraction, placement) pairs. Rows come out sorted by
    placement then fraction. The standard deviation is the sample one
    (ddof=1), zero for a single run.
    """
    rows = []
    for fraction, placement in sorted(per_run_max, key=lambda k: (k[1], k[0])):
        maxima = np.asarray(per_run_max[(fraction, placement)], dtype=float)
        if maxima.size == 0:
            raise InsufficientDataError(
                f"no runs recorded at ({fraction}, {placement})"
            )
        sd = float(maxima.std(ddof=1)) if maxima.size > 1 else 0.0
        rows.append(
            {
                "random_fraction": float(fraction),
                "placement": str(placement),
                "mean_max_size": float(maxima.mean()),
                "sd_max_size": sd,
                "n_runs": int(maxima.size),
            }
        )
    return rows


def wealth_summary(
    capitals: Sequence[float],
    initial_capitals: Sequence[float],
    kinds: Sequence[int],
) -> dict:
    """Group means and head-to-head comparisons of final capitals.

    fraction_above_initial counts strict gains over the agent's own start.
    The cross-kind fractions compare technical traders against the worst
    and best random trader; they are None when either kind is absent.
    """
    caps = np.asarray(capitals, dtype=float)
    init = np.asarray(initial_capitals, dtype=float)
    kind_arr = np.asarray(kinds, dtype=int)
    if caps.size == 0:
        raise InsufficientDataError("no agents in wealth summary")
    if caps.shape != init.shape or caps.shape != kind_arr.shape:
        raise ConfigError("capitals, initial capitals, and kinds must align")
    technical = kind_arr == AgentKind.TECHNICAL
    random = kind_arr == AgentKind.RANDOM
    groups = {"all": np.ones(caps.size, dtype=bool), "technical": technical, "random": random}
    mean_capital: dict[str, float | None] = {}
    fraction_above_initial: dict[str, float | None] = {}
    counts: dict[str, int] = {}
    for name, mask in groups.items():
        counts[name] = int(mask.sum())
        if counts[name] == 0:
            mean_capital[name] = None
            fraction_above_initial[name] = None
        else:
            mean_capital[name] = float(caps[mask].mean())
            fraction_above_initial[name] = float(
                np.mean(caps[mask] > init[mask])
            )
    below_worst = above_best = None
    if counts["technical"] and counts["random"]:
        below_worst = float(np.mean(caps[technical] < caps[random].min()))
        above_best = float(np.mean(caps[technical] > caps[random].max()))
    return {
        "counts": counts,
        "mean_capital": mean_capital,
        "fraction_above_initial": fraction_above_initial,
        "fraction_technical_below_worst_random": below_worst,
        "fraction_technical_above_best_random": above_best,
    }
