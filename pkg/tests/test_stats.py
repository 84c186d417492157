"""Distribution building, the two fit families, preference, summaries."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finquakes.errors import ConfigError, InsufficientDataError
from finquakes.stats import (
    CumulativeDistribution,
    FitModel,
    compare_fits,
    cumulative_distribution,
    default_fit_range,
    fit_exponential,
    fit_power_law,
    max_size_sweep,
    model_preference,
    power_law_mle,
    wealth_summary,
)


def dist_from(values, ccdf):
    values = np.asarray(values, dtype=float)
    return CumulativeDistribution(
        values=values, ccdf=np.asarray(ccdf, dtype=float), n_samples=values.size
    )


# --- ccdf construction ---------------------------------------------------------


def test_identical_samples_collapse_to_one_point():
    d = cumulative_distribution([1, 1, 1])
    assert d.values.tolist() == [1.0]
    assert d.ccdf.tolist() == [1.0]
    assert d.n_samples == 3


def test_counting_three_distinct_sizes():
    d = cumulative_distribution([1, 2, 4])
    assert d.values.tolist() == [1.0, 2.0, 4.0]
    assert d.ccdf == pytest.approx([1.0, 2 / 3, 1 / 3])


def test_single_sample():
    d = cumulative_distribution([5])
    assert d.values.tolist() == [5.0]
    assert d.ccdf.tolist() == [1.0]


def test_empty_input_rejected():
    with pytest.raises(InsufficientDataError):
        cumulative_distribution([])


def test_first_ccdf_value_is_one_and_nonincreasing():
    d = cumulative_distribution([3, 1, 4, 1, 5, 9, 2, 6])
    assert d.ccdf[0] == 1.0
    assert all(a >= b for a, b in zip(d.ccdf, d.ccdf[1:]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 500), min_size=1, max_size=200))
def test_ccdf_is_permutation_invariant(samples):
    rng = np.random.default_rng(0)
    shuffled = list(rng.permutation(samples))
    a = cumulative_distribution(samples)
    b = cumulative_distribution(shuffled)
    assert a.values.tolist() == b.values.tolist()
    assert a.ccdf.tolist() == b.ccdf.tolist()


def test_invalid_distribution_shapes_rejected():
    with pytest.raises(InsufficientDataError):
        dist_from([], [])
    with pytest.raises(ConfigError):
        dist_from([1.0, 1.0], [1.0, 0.5])  # support not increasing
    with pytest.raises(ConfigError):
        dist_from([1.0, 2.0], [0.5, 1.0])  # ccdf increasing
    with pytest.raises(ConfigError):
        dist_from([1.0, 2.0], [1.0, 1.5])  # ccdf above 1


# --- fitting ----------------------------------------------------------------------


def test_power_law_fit_recovers_slope():
    s = np.arange(1.0, 101.0)
    fit = fit_power_law(dist_from(s, s**-2.0), (1.0, 100.0))
    assert fit.model is FitModel.POWER_LAW
    assert fit.exponent == pytest.approx(-2.0, abs=0.01)
    assert fit.goodness == pytest.approx(0.0, abs=1e-9)


def test_exponential_fit_recovers_rate():
    s = np.arange(1.0, 51.0)
    fit = fit_exponential(dist_from(s, np.exp(-0.2 * s)), (1.0, 50.0))
    assert fit.exponent == pytest.approx(-0.2, abs=0.005)
    assert fit.goodness == pytest.approx(0.0, abs=1e-9)


def test_constant_ccdf_fits_flat():
    s = np.arange(1.0, 11.0)
    flat = np.full(10, 1.0)
    assert fit_power_law(dist_from(s, flat), (1.0, 10.0)).exponent == pytest.approx(0.0)
    assert fit_exponential(dist_from(s, flat), (1.0, 10.0)).exponent == pytest.approx(
        0.0
    )


def test_fits_demand_five_support_points():
    d = dist_from([1.0, 2.0], [1.0, 0.5])
    with pytest.raises(InsufficientDataError):
        fit_power_law(d, (1.0, 2.0))
    with pytest.raises(InsufficientDataError):
        fit_exponential(d, (1.0, 2.0))
    four = dist_from([1.0, 2.0, 3.0, 4.0], [1.0, 0.8, 0.6, 0.4])
    with pytest.raises(InsufficientDataError):
        fit_power_law(four, None)


def test_fit_range_restricts_points():
    s = np.arange(1.0, 21.0)
    fit = fit_power_law(dist_from(s, s**-1.5), (5.0, 15.0))
    assert fit.n_points == 11
    assert fit.fit_range == (5.0, 15.0)


def test_half_open_range_takes_other_bound_from_data():
    s = np.arange(1.0, 21.0)
    fit = fit_power_law(dist_from(s, s**-1.5), (3.0, None))
    assert fit.fit_range == (3.0, 20.0)
    assert fit.n_points == 18


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(0.05, 1.0), seed=st.integers(0, 10_000))
def test_power_law_slope_ignores_ccdf_scaling(scale, seed):
    rng = np.random.default_rng(seed)
    s = np.unique(np.sort(rng.uniform(1.0, 50.0, size=30)))
    ccdf = np.minimum(1.0, 2.0 * s**-1.3)
    lo, hi = float(s[0]), float(s[-1])
    base = fit_power_law(dist_from(s, ccdf), (lo, hi))
    scaled = fit_power_law(dist_from(s, ccdf * scale), (lo, hi))
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-9)
    assert scaled.goodness == pytest.approx(base.goodness, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(shift=st.floats(0.0, 100.0), seed=st.integers(0, 10_000))
def test_exponential_rate_ignores_support_shift(shift, seed):
    rng = np.random.default_rng(seed)
    s = np.unique(np.sort(rng.uniform(1.0, 40.0, size=25)))
    ccdf = np.exp(-0.35 * s)
    ccdf = ccdf / ccdf[0] * 0.999  # keep values inside (0, 1]
    base = fit_exponential(dist_from(s, ccdf), (float(s[0]), float(s[-1])))
    shifted = fit_exponential(
        dist_from(s + shift, ccdf), (float(s[0]) + shift, float(s[-1]) + shift)
    )
    assert shifted.exponent == pytest.approx(base.exponent, abs=1e-9)


# --- model preference ---------------------------------------------------------------


def test_preference_picks_power_law_on_power_data():
    s = np.arange(1.0, 101.0)
    d = dist_from(s, s**-2.0)
    rng = (1.0, 100.0)
    assert model_preference(fit_power_law(d, rng), fit_exponential(d, rng)) is (
        FitModel.POWER_LAW
    )


def test_preference_picks_exponential_on_exponential_data():
    s = np.arange(1.0, 51.0)
    d = dist_from(s, np.exp(-0.2 * s))
    rng = (1.0, 50.0)
    assert model_preference(fit_power_law(d, rng), fit_exponential(d, rng)) is (
        FitModel.EXPONENTIAL
    )


def test_preference_tie_goes_to_power_law():
    s = np.arange(1.0, 11.0)
    flat = dist_from(s, np.full(10, 1.0))
    power = fit_power_law(flat, (1.0, 10.0))
    expo = fit_exponential(flat, (1.0, 10.0))
    assert power.goodness == expo.goodness == pytest.approx(0.0)
    assert model_preference(power, expo) is FitModel.POWER_LAW


def test_compare_fits_marks_the_winner():
    s = np.arange(1.0, 101.0)
    d = dist_from(s, s**-2.0)
    rng = (1.0, 100.0)
    power, expo = compare_fits(fit_power_law(d, rng), fit_exponential(d, rng))
    assert power.preferred is True
    assert expo.preferred is False


def test_family_recovery_from_sampled_data():
    # Samples actually drawn from each family must be classified correctly
    # once the sample is large (2000 here).
    rng = np.random.default_rng(42)
    pareto = (1.0 - rng.random(2000)) ** (-1.0 / 1.5)  # ccdf x^-1.5, x >= 1
    expo = 1.0 + rng.exponential(scale=5.0, size=2000)

    d_pareto = cumulative_distribution(pareto)
    d_expo = cumulative_distribution(expo)

    p_fit = fit_power_law(d_pareto, None)
    e_fit = fit_exponential(d_pareto, None)
    assert model_preference(p_fit, e_fit) is FitModel.POWER_LAW

    p_fit = fit_power_law(d_expo, None)
    e_fit = fit_exponential(d_expo, None)
    assert model_preference(p_fit, e_fit) is FitModel.EXPONENTIAL


def test_default_range_trims_top_half_decade():
    samples = np.concatenate([np.arange(1, 100), [1000.0]])
    d = cumulative_distribution(samples)
    lo, hi = default_fit_range(d)
    assert lo == 1.0
    assert hi == pytest.approx(1000.0 / np.sqrt(10.0))


def test_default_range_falls_back_when_too_narrow():
    d = cumulative_distribution([1.0, 2.0, 3.0, 100.0, 200.0, 300.0])
    lo, hi = default_fit_range(d)
    assert (lo, hi) == (1.0, 300.0)


def test_mle_estimates_pareto_exponent():
    # The closed-form estimator uses the discrete half-shift correction, so
    # it is evaluated on integer sizes and well inside the tail, where the
    # approximation is good.
    rng = np.random.default_rng(7)
    samples = np.floor((1.0 - rng.random(400_000)) ** (-1.0 / 1.5))
    fit = power_law_mle(samples, s_min=20.0)
    assert fit.alpha == pytest.approx(2.5, abs=0.06)  # density exponent
    assert fit.ccdf_exponent == pytest.approx(-1.5, abs=0.06)
    assert fit.stderr < 0.03


# --- summaries -------------------------------------------------------------------------


def test_max_size_sweep_single_run():
    # one run whose largest quake had size 5
    table = max_size_sweep({(0.0, "uniform"): [max([1, 5, 3])]})
    (row,) = table
    assert row["mean_max_size"] == 5.0
    assert row["sd_max_size"] == 0.0
    assert row["n_runs"] == 1


def test_max_size_sweep_averages_runs():
    table = max_size_sweep({(0.05, "uniform"): [10, 20]})
    (row,) = table
    assert row["mean_max_size"] == 15.0
    assert row["random_fraction"] == 0.05
    assert row["n_runs"] == 2


def test_max_size_sweep_orders_rows():
    table = max_size_sweep(
        {
            (0.10, "uniform"): [4],
            (0.02, "uniform"): [9],
            (0.02, "one_community"): [7],
        }
    )
    keys = [(r["placement"], r["random_fraction"]) for r in table]
    assert keys == sorted(keys)


def test_wealth_summary_flat_population():
    caps = np.full(6, 1000.0)
    init = np.full(6, 1000.0)
    kinds = np.array([0, 0, 0, 1, 1, 1])
    out = wealth_summary(caps, init, kinds)
    assert out["mean_capital"]["all"] == pytest.approx(1000.0)
    assert out["mean_capital"]["technical"] == pytest.approx(1000.0)
    assert out["mean_capital"]["random"] == pytest.approx(1000.0)
    assert out["fraction_above_initial"]["technical"] == 0.0
    assert out["fraction_above_initial"]["random"] == 0.0


def test_wealth_summary_extreme_fractions():
    # Technical 500 and 2000 against a lone random trader at 900:
    # half the technical agents sit below the worst random trader and half
    # sit above the best one.
    caps = np.array([500.0, 2000.0, 900.0])
    init = np.full(3, 1000.0)
    kinds = np.array([0, 0, 1])
    out = wealth_summary(caps, init, kinds)
    assert out["fraction_technical_below_worst_random"] == pytest.approx(0.5)
    assert out["fraction_technical_above_best_random"] == pytest.approx(0.5)
    assert out["mean_capital"]["random"] == pytest.approx(900.0)
    assert out["counts"] == {"all": 3, "technical": 2, "random": 1}


def test_wealth_summary_handles_missing_kind():
    caps = np.array([800.0, 1200.0])
    init = np.full(2, 1000.0)
    kinds = np.zeros(2, dtype=int)
    out = wealth_summary(caps, init, kinds)
    assert out["mean_capital"]["random"] is None
    assert out["fraction_technical_below_worst_random"] is None
    assert out["fraction_technical_above_best_random"] is None
    assert out["fraction_above_initial"]["technical"] == pytest.approx(0.5)
