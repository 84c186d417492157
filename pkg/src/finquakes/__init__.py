"""Agent-based simulator of herding avalanches among market traders.

Traders on a small-world network accumulate information until one trades,
dragging neighbors into an avalanche of imitative trades (a financial
quake). Each quake bets on an RSI market call, compounding per-agent
capital. The package exposes the core model plus ensemble statistics, a
command-line front end, and an HTTP service.
"""

__version__ = "0.1.0"

from .config import DEFAULT_SEED, Placement, Seeds, SimConfig, load_config_file
from .dynamics import (
    AgentKind,
    HerdingEngine,
    QuakeRecord,
    SimulationResult,
    place_random_traders,
    run_ensemble,
    run_simulation,
)
from .errors import (
    ConfigError,
    FinquakesError,
    InsufficientDataError,
    InsufficientHistoryError,
    NonTerminationError,
    SeriesParseError,
    SeriesValidationError,
)
from .market import Direction, MarketSeries, load_series, rsi, rsi_prediction, synthetic_series
from .network import TraderNetwork, build_lattice, rewire
from .stats import (
    CumulativeDistribution,
    FitModel,
    FitResult,
    compare_fits,
    cumulative_distribution,
    fit_exponential,
    fit_power_law,
    max_size_sweep,
    model_preference,
    power_law_mle,
    wealth_summary,
)
from .wealth import CapitalLedger, Outcome

__all__ = [
    "AgentKind",
    "CapitalLedger",
    "ConfigError",
    "CumulativeDistribution",
    "DEFAULT_SEED",
    "Direction",
    "FinquakesError",
    "FitModel",
    "FitResult",
    "HerdingEngine",
    "InsufficientDataError",
    "InsufficientHistoryError",
    "MarketSeries",
    "NonTerminationError",
    "Outcome",
    "Placement",
    "QuakeRecord",
    "Seeds",
    "SeriesParseError",
    "SeriesValidationError",
    "SimConfig",
    "SimulationResult",
    "TraderNetwork",
    "build_lattice",
    "compare_fits",
    "cumulative_distribution",
    "fit_exponential",
    "fit_power_law",
    "load_config_file",
    "load_series",
    "max_size_sweep",
    "model_preference",
    "place_random_traders",
    "power_law_mle",
    "rewire",
    "rsi",
    "rsi_prediction",
    "run_ensemble",
    "run_simulation",
    "synthetic_series",
    "wealth_summary",
]
