"""Shared analysis pipelines behind the CLI and the HTTP service.

Everything here takes plain inputs (config, price series, samples) and
returns JSON-ready dicts, so the two front ends stay thin and agree on
output shapes. Fits that cannot be computed (degenerate or tiny samples)
come back as None rather than failing the whole report.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import stats
from .config import Placement, SimConfig
from .dynamics import AgentKind, SimulationResult, run_ensemble
from .errors import ConfigError, InsufficientDataError
from .market import MarketSeries
from .stats import FitResult


def fit_range_from_bounds(
    fit_min: float | None, fit_max: float | None
) -> tuple[float | None, float | None] | None:
    """Explicit fit window from CLI/API bounds; None means use the default."""
    if fit_min is None and fit_max is None:
        return None
    return (fit_min, fit_max)


def _fit_dict(fit: FitResult | None) -> dict | None:
    if fit is None:
        return None
    return {
        "model": fit.model.value,
        "exponent": fit.exponent,
        "intercept": fit.intercept,
        "fit_range": list(fit.fit_range),
        "goodness": fit.goodness,
        "n_points": fit.n_points,
        "preferred": fit.preferred,
    }


def _try_fits(
    samples: np.ndarray, fit_range: tuple[float | None, float | None] | None
) -> tuple[FitResult | None, FitResult | None, str | None]:
    """Both tail fits, or Nones where the sample cannot support them."""
    try:
        dist = stats.cumulative_distribution(samples)
    except InsufficientDataError:
        return None, None, None
    try:
        power = stats.fit_power_law(dist, fit_range)
    except InsufficientDataError:
        power = None
    try:
        exponential = stats.fit_exponential(dist, fit_range)
    except InsufficientDataError:
        exponential = None
    preferred = None
    if power is not None and exponential is not None:
        power, exponential = stats.compare_fits(power, exponential)
        preferred = stats.model_preference(power, exponential).value
    return power, exponential, preferred


def pooled_sizes(results: Sequence[SimulationResult]) -> np.ndarray:
    return np.concatenate([r.sizes() for r in results])


def pooled_capitals(
    results: Sequence[SimulationResult],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Final capitals, initial capitals, and kinds across all runs."""
    caps = np.concatenate([np.asarray(r.ledger.capital) for r in results])
    init = np.concatenate([np.asarray(r.ledger.initial_capital) for r in results])
    kinds = np.concatenate([np.asarray(r.kinds, dtype=int) for r in results])
    return caps, init, kinds


def distribution_report(
    samples: Sequence[float],
    fit_range: tuple[float, float] | None = None,
    discrete: bool = True,
    include_points: bool = True,
) -> dict:
    """Tail characterization of one sample: ccdf, both fits, preference.

    `discrete` additionally runs the maximum-likelihood power-law estimate,
    which assumes integer-valued data such as quake sizes.
    """
    dist = stats.cumulative_distribution(samples)
    power, exponential, preferred = _try_fits(np.asarray(samples, float), fit_range)
    mle = None
    if discrete:
        try:
            mle_fit = stats.power_law_mle(samples)
            mle = {
                "alpha": mle_fit.alpha,
                "ccdf_exponent": mle_fit.ccdf_exponent,
                "stderr": mle_fit.stderr,
                "s_min": mle_fit.s_min,
                "n_tail": mle_fit.n_tail,
            }
        except (InsufficientDataError, ConfigError):
            mle = None
    report = {
        "n_samples": dist.n_samples,
        "mean": float(np.asarray(samples, dtype=float).mean()),
        "max": float(dist.values[-1]),
        "power_law": _fit_dict(power),
        "exponential": _fit_dict(exponential),
        "preferred_model": preferred,
        "mle": mle,
    }
    if include_points:
        report["distribution"] = {
            "values": dist.values.tolist(),
            "ccdf": dist.ccdf.tolist(),
        }
    return report


def summarize_ensemble(
    results: Sequence[SimulationResult],
    fit_range: tuple[float, float] | None = None,
) -> dict:
    """Ensemble-level report: size tail, wealth outcome, win rate."""
    if not results:
        raise InsufficientDataError("no runs to summarize")
    cfg = results[0].config
    sizes = pooled_sizes(results)
    power, exponential, preferred = _try_fits(sizes.astype(float), fit_range)
    try:
        mle_fit = stats.power_law_mle(sizes)
        mle = {
            "alpha": mle_fit.alpha,
            "ccdf_exponent": mle_fit.ccdf_exponent,
            "stderr": mle_fit.stderr,
            "s_min": mle_fit.s_min,
            "n_tail": mle_fit.n_tail,
        }
    except InsufficientDataError:
        mle = None
    caps, init, kinds = pooled_capitals(results)
    wealth = stats.wealth_summary(caps, init, kinds)
    # Wealth tail above the common starting level, where gains accumulate.
    tail_range = (cfg.initial_capital_mean, float(caps.max()))
    tail_power, _, _ = _try_fits(caps, tail_range)
    wealth["tail_power_law"] = _fit_dict(tail_power)
    random_mask = kinds == AgentKind.RANDOM
    if random_mask.any():
        r_power, r_exp, r_pref = _try_fits(caps[random_mask], None)
        wealth["random_kind_fits"] = {
            "power_law": _fit_dict(r_power),
            "exponential": _fit_dict(r_exp),
            "preferred_model": r_pref,
        }
    else:
        wealth["random_kind_fits"] = None
    n_quakes = int(sizes.size)
    wins = sum(q.won for r in results for q in r.quakes)
    per_run_max = [int(r.sizes().max()) for r in results]
    return {
        "config": config_dict(cfg),
        "n_runs": len(results),
        "n_quakes": n_quakes,
        "win_rate": wins / n_quakes,
        "sizes": {
            "mean": float(sizes.mean()),
            "max": int(sizes.max()),
            "per_run_max": per_run_max,
            "power_law": _fit_dict(power),
            "exponential": _fit_dict(exponential),
            "preferred_model": preferred,
            "mle": mle,
        },
        "wealth": wealth,
    }


def config_dict(cfg: SimConfig) -> dict:
    """Flat JSON form of a config, seeds inlined as seed_* keys."""
    data = cfg.model_dump()
    seeds = data.pop("seeds")
    for name, value in seeds.items():
        data[f"seed_{name}"] = value
    data["placement"] = cfg.placement.value
    return data


def run_and_summarize(
    cfg: SimConfig,
    series: MarketSeries,
    n_runs: int,
    jobs: int = 1,
    fit_range: tuple[float, float] | None = None,
) -> tuple[list[SimulationResult], dict]:
    results = run_ensemble(cfg, series, n_runs, jobs=jobs)
    return results, summarize_ensemble(results, fit_range)


def sweep_report(
    cfg: SimConfig,
    series: MarketSeries,
    fractions: Sequence[float],
    placements: Sequence[Placement],
    n_runs: int,
    jobs: int = 1,
    fit_range: tuple[float, float] | None = None,
) -> dict:
    """Grid of ensembles over random-trader levels and placements.

    Cells run sequentially and are reduced to one summary row each, so the
    peak memory footprint is a single ensemble regardless of grid size.
    Placement is irrelevant at fraction 0, so such cells run once under the
    first placement and are reported with placement "uniform".
    """
    if not fractions:
        raise ConfigError("sweep needs at least one random_fraction")
    if not placements:
        raise ConfigError("sweep needs at least one placement")
    rows = []
    seen_zero = False
    for placement in placements:
        for fraction in fractions:
            if fraction == 0.0:
                if seen_zero:
                    continue
                seen_zero = True
                cell_cfg = cfg.updated(
                    random_fraction=0.0, placement=Placement.UNIFORM
                )
            else:
                cell_cfg = cfg.updated(
                    random_fraction=fraction, placement=placement
                )
            results = run_ensemble(cell_cfg, series, n_runs, jobs=jobs)
            summary = summarize_ensemble(results, fit_range)
            maxima = summary["sizes"]["per_run_max"]
            rows.append(
                {
                    "placement": cell_cfg.placement.value,
                    "random_fraction": cell_cfg.random_fraction,
                    "n_runs": n_runs,
                    "n_quakes": summary["n_quakes"],
                    "win_rate": summary["win_rate"],
                    "mean_size": summary["sizes"]["mean"],
                    "per_run_max": maxima,
                    "mean_max_size": float(np.mean(maxima)),
                    "sd_max_size": float(np.std(maxima, ddof=1))
                    if len(maxima) > 1
                    else 0.0,
                    "power_law": summary["sizes"]["power_law"],
                    "exponential": summary["sizes"]["exponential"],
                    "preferred_model": summary["sizes"]["preferred_model"],
                    "mean_capital": summary["wealth"]["mean_capital"],
                }
            )
    return {
        "config": config_dict(cfg),
        "n_runs_per_cell": n_runs,
        "n_days": len(series),
        "cells": rows,
    }
