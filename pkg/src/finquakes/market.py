"""Price series handling and the RSI-based direction signal.

Traders judge tomorrow's move from the Relative Strength Index computed on
daily closes. The signal is contrarian: RSI below the 50 midline (recent
losses dominate) predicts Up, above predicts Down, exactly 50 predicts a
continuation of the latest daily move.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import InsufficientHistoryError, SeriesParseError, SeriesValidationError


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"


@dataclass(frozen=True)
class MarketSeries:
    """Daily closing prices in chronological order.

    dates and closes are index-aligned; closes must be finite and positive.
    """

    dates: tuple[dt.date, ...]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        closes = np.asarray(self.closes, dtype=float)
        closes.setflags(write=False)
        object.__setattr__(self, "closes", closes)
        if closes.ndim != 1:
            raise SeriesValidationError("closes must be one-dimensional")
        if len(self.dates) != closes.size:
            raise SeriesValidationError(
                f"{len(self.dates)} dates but {closes.size} closes"
            )
        if closes.size < 2:
            raise SeriesValidationError("series needs at least 2 closes")
        if not np.all(np.isfinite(closes)):
            raise SeriesValidationError("closes must be finite")
        if np.any(closes <= 0.0):
            raise SeriesValidationError("closes must be positive")
        for earlier, later in zip(self.dates, self.dates[1:]):
            if later <= earlier:
                raise SeriesValidationError(
                    f"dates must strictly increase, got {earlier} then {later}"
                )

    def __len__(self) -> int:
        return self.closes.size


def load_series(path: str | Path) -> MarketSeries:
    """Load a ``date,close`` CSV into a MarketSeries.

    An optional header row is detected by a non-numeric second field. Parse
    errors report the offending 1-based line number.
    """
    path = Path(path)
    text = path.read_text()
    dates: list[dt.date] = []
    closes: list[float] = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise SeriesParseError(f"expected 2 fields, got {len(row)}", lineno)
        date_field, close_field = row[0].strip(), row[1].strip()
        if lineno == 1 and not dates:
            try:
                float(close_field)
            except ValueError:
                continue  # header row
        try:
            date = dt.date.fromisoformat(date_field)
        except ValueError:
            raise SeriesParseError(f"bad date {date_field!r}", lineno) from None
        try:
            close = float(close_field)
        except ValueError:
            raise SeriesParseError(f"bad close {close_field!r}", lineno) from None
        if not math.isfinite(close):
            raise SeriesParseError(f"close {close_field!r} is not finite", lineno)
        dates.append(date)
        closes.append(close)
    if len(closes) < 2:
        raise SeriesValidationError(f"{path}: series needs at least 2 closes")
    return MarketSeries(dates=tuple(dates), closes=np.array(closes))


def compute_returns(series: MarketSeries) -> np.ndarray:
    """Daily fractional returns, (E[j+1] - E[j]) / E[j]; length len-1."""
    closes = series.closes
    return np.diff(closes) / closes[:-1]


def actual_sign(series: MarketSeries, day: int) -> Direction:
    """Realized direction of the close-to-close move ending on `day`."""
    if day < 1 or day >= len(series):
        raise InsufficientHistoryError(f"day {day} has no preceding close")
    delta = series.closes[day] - series.closes[day - 1]
    if delta > 0.0:
        return Direction.UP
    if delta < 0.0:
        return Direction.DOWN
    return Direction.FLAT


def rsi(series: MarketSeries, day: int, window: int = 14) -> float:
    """Relative Strength Index over the last `window` daily changes.

    Uses simple (unsmoothed) averages of the up and down moves among the
    `window` changes ending on `day`. All-up windows give 100, all-down give
    0, and a window with no movement at all gives the neutral 50.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if day - window < 0 or day >= len(series):
        raise InsufficientHistoryError(
            f"day {day} lacks {window} prior changes"
        )
    changes = np.diff(series.closes[day - window : day + 1])
    gains = changes[changes > 0.0].sum()
    losses = -changes[changes < 0.0].sum()
    if gains == 0.0 and losses == 0.0:
        return 50.0
    if losses == 0.0:
        return 100.0
    return 100.0 - 100.0 / (1.0 + gains / losses)


def rsi_prediction(
    series: MarketSeries, day: int, window: int = 14
) -> Direction | None:
    """Contrarian next-day call from the RSI on `day`, or None in warm-up.

    RSI under the 50 midline signals an oversold market and predicts Up;
    over 50 predicts Down. Exactly 50 predicts the latest move continuing,
    with a flat latest move read as Up.
    """
    if day - window < 0:
        return None  # not enough history yet; caller falls back to chance
    value = rsi(series, day, window)
    if value < 50.0:
        return Direction.UP
    if value > 50.0:
        return Direction.DOWN
    last = actual_sign(series, day)
    if last is Direction.FLAT:
        return Direction.UP
    return last


def synthetic_series(
    n_days: int,
    seed: int,
    start_price: float = 1000.0,
    drift: float = 0.0003,
    volatility: float = 0.011,
) -> MarketSeries:
    """Geometric-Brownian daily closes for tests and demos.

    Log returns are i.i.d. Normal(drift, volatility). Dates are consecutive
    weekdays so the series resembles an exchange calendar.
    """
    if n_days < 2:
        raise SeriesValidationError("series needs at least 2 closes")
    rng = np.random.default_rng(seed)
    log_returns = rng.normal(drift, volatility, size=n_days - 1)
    closes = start_price * np.exp(np.concatenate([[0.0], np.cumsum(log_returns)]))
    dates = []
    day = dt.date(2000, 1, 3)
    while len(dates) < n_days:
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)
    return MarketSeries(dates=tuple(dates), closes=closes)
