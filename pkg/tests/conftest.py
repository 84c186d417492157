"""Shared test fixtures: tiny price series and paths to bundled data."""

from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np
import pytest

from finquakes.market import MarketSeries

REPO_ROOT = Path(__file__).resolve().parent.parent
SAMPLE_CSV = REPO_ROOT / "data" / "sample_closes.csv"


def make_series(closes) -> MarketSeries:
    """MarketSeries over consecutive weekdays starting 2020-01-02."""
    dates = []
    day = dt.date(2020, 1, 2)
    while len(dates) < len(closes):
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)
    return MarketSeries(dates=tuple(dates), closes=np.asarray(closes, dtype=float))


@pytest.fixture(scope="session")
def sample_csv_path() -> Path:
    assert SAMPLE_CSV.is_file(), "bundled sample series missing"
    return SAMPLE_CSV
