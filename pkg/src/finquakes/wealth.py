"""Per-agent capital accounting.

Every trader holds a capital account and bets a fixed fraction of it on each
trade: half the capital while riding a win, a tenth after a loss or before
the first outcome is known. Bets settle sequentially in toppling order, so an
agent toppling twice inside one avalanche stakes its updated capital the
second time.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError


class Outcome(IntEnum):
    NONE = 0
    WIN = 1
    LOSS = 2


class CapitalLedger:
    """Mutable capital, streak, and bet-count state for one simulation run."""

    __slots__ = (
        "capital",
        "initial_capital",
        "last_outcome",
        "bets",
        "wins",
        "losses",
        "win_fraction",
        "loss_fraction",
    )

    def __init__(
        self,
        capitals: Sequence[float],
        win_fraction: float = 0.5,
        loss_fraction: float = 0.1,
    ) -> None:
        if not 0.0 < win_fraction < 1.0 or not 0.0 < loss_fraction < 1.0:
            raise ConfigError("bet fractions must lie strictly inside (0, 1)")
        self.capital: list[float] = [float(c) for c in capitals]
        if any(c <= 0.0 for c in self.capital):
            raise ConfigError("initial capitals must be positive")
        self.initial_capital: list[float] = list(self.capital)
        n = len(self.capital)
        self.last_outcome: list[int] = [Outcome.NONE] * n
        self.bets: list[int] = [0] * n
        self.wins: list[int] = [0] * n
        self.losses: list[int] = [0] * n
        self.win_fraction = win_fraction
        self.loss_fraction = loss_fraction

    @classmethod
    def init_capitals(
        cls,
        n_agents: int,
        rng: np.random.Generator,
        mean: float = 1000.0,
        sd_fraction: float = 0.1,
        win_fraction: float = 0.5,
        loss_fraction: float = 0.1,
    ) -> "CapitalLedger":
        """Draw starting capitals from Normal(mean, sd_fraction * mean).

        Draws at or below 1% of the mean are resampled so no trader starts
        effectively broke; at sd_fraction = 0.1 that is a >9 sigma event.
        """
        if mean <= 0.0:
            raise ConfigError(f"capital mean must be positive, got {mean}")
        if sd_fraction < 0.0:
            raise ConfigError(f"capital sd fraction must be >= 0, got {sd_fraction}")
        floor = 0.01 * mean
        capitals = rng.normal(mean, sd_fraction * mean, size=n_agents)
        bad = capitals <= floor
        while bad.any():
            capitals[bad] = rng.normal(mean, sd_fraction * mean, size=int(bad.sum()))
            bad = capitals <= floor
        return cls(capitals.tolist(), win_fraction, loss_fraction)

    def __len__(self) -> int:
        return len(self.capital)

    def bet_amount(self, agent: int) -> float:
        """Stake for the agent's next trade given its current streak."""
        if self.last_outcome[agent] == Outcome.WIN:
            return self.win_fraction * self.capital[agent]
        return self.loss_fraction * self.capital[agent]

    def settle(self, agent: int, won: bool) -> float:
        """Resolve one trade at the current bet size; returns the stake."""
        stake = self.bet_amount(agent)
        self.bets[agent] += 1
        if won:
            self.capital[agent] += stake
            self.wins[agent] += 1
            self.last_outcome[agent] = Outcome.WIN
        else:
            self.capital[agent] -= stake
            self.losses[agent] += 1
            self.last_outcome[agent] = Outcome.LOSS
        # Stakes are proper fractions of capital, so this cannot trip.
        assert self.capital[agent] > 0.0
        return stake

    def settle_quake(self, topple_order: Iterable[int], won: bool) -> list[float]:
        """Settle one avalanche's trades sequentially in toppling order.

        Each toppling is a separate trade, so repeat participants compound:
        after the first settlement the streak flips and the next stake is
        taken from the updated capital. Returns the stake of each trade in
        order.
        """
        return [self.settle(agent, won) for agent in topple_order]

    def above_initial(self) -> list[bool]:
        return [c > c0 for c, c0 in zip(self.capital, self.initial_capital)]
