"""Herding avalanches of trades on the trader network.

Each trader i carries an information load I_i in [0, threshold]. Every
trading day all loads rise by a common-range uniform influx, the most loaded
trader is pushed to the threshold and trades, and trading relaxes the load
to zero while passing a fraction ``dissipation / n_neighbors`` of it to each
network neighbor. Neighbors driven past the threshold trade in turn, and the
resulting avalanche of imitations is one "financial quake" whose size is the
number of trades it contains.

Random traders short-circuit the herding: they pass on nothing when they
trade and absorb nothing from trading neighbors, so the information carried
by an avalanche dies at their sites.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .config import Placement, SimConfig
from .errors import ConfigError, InsufficientDataError, NonTerminationError
from .market import Direction, MarketSeries, actual_sign, rsi_prediction
from .network import TraderNetwork, build_lattice, lattice_block, rewire
from .wealth import CapitalLedger


class AgentKind(IntEnum):
    TECHNICAL = 0
    RANDOM = 1


@dataclass(frozen=True)
class QuakeRecord:
    """One day's avalanche and the bet it resolved.

    participants holds (agent, stake) per toppling in toppling order;
    repeat topplers appear once per toppling with their recomputed stake.
    """

    day: int  # index of the close on which the prediction was made
    seed_agent: int
    seed_kind: AgentKind
    prediction: Direction
    actual: Direction
    size: int
    participants: tuple[tuple[int, float], ...]
    won: bool

    @property
    def signed_size(self) -> int:
        return self.size if self.won else -self.size

    def topple_order(self) -> list[int]:
        return [agent for agent, _ in self.participants]


def place_random_traders(
    cfg: SimConfig, net: TraderNetwork, rng: np.random.Generator
) -> list[AgentKind]:
    """Assign agent kinds, marking cfg.n_random sites as random traders.

    Uniform placement scatters them anywhere; community placements carve
    contiguous patches out of the underlying lattice (one patch, or four of
    near-equal size at disjoint random anchors).
    """
    n = net.n_nodes
    kinds = [AgentKind.TECHNICAL] * n
    m = cfg.n_random
    if m == 0:
        return kinds
    if m > n:
        raise ConfigError(f"{m} random traders exceed {n} agents")
    if cfg.placement is Placement.UNIFORM:
        for k in rng.choice(n, size=m, replace=False):
            kinds[int(k)] = AgentKind.RANDOM
        return kinds
    if cfg.placement is Placement.ONE_COMMUNITY:
        anchor = int(rng.integers(n))
        for k in lattice_block(net, anchor, m):
            kinds[k] = AgentKind.RANDOM
        return kinds
    base, rem = divmod(m, 4)
    sizes = [base + 1] * rem + [base] * (4 - rem)
    placed: set[int] = set()
    for size in sizes:
        if size == 0:
            continue
        for _ in range(1000):
            anchor = int(rng.integers(n))
            block = lattice_block(net, anchor, size)
            if placed.isdisjoint(block):
                placed.update(block)
                break
        else:
            raise ConfigError(
                "could not fit four disjoint communities; lower random_fraction"
            )
    for k in placed:
        kinds[k] = AgentKind.RANDOM
    return kinds


class HerdingEngine:
    """Threshold-relaxation dynamics bound to one network and kind layout.

    Transfer coefficients are precomputed per node: a technical trader
    spreads dissipation/degree of its load to each neighbor, a random trader
    spreads nothing. Shares aimed at random traders are normally lost with
    the rest of the dissipation; with redistribute_random_share the whole
    transferable fraction is split among technical neighbors only.
    """

    def __init__(
        self, net: TraderNetwork, kinds: list[AgentKind], cfg: SimConfig
    ) -> None:
        if len(kinds) != net.n_nodes:
            raise ConfigError(f"{len(kinds)} kinds for {net.n_nodes} nodes")
        self.net = net
        self.kinds = list(kinds)
        self.threshold = cfg.threshold
        self.max_topplings = cfg.max_topplings
        self.recipients: list[tuple[int, ...]] = []
        self.coeff: list[float] = []
        for k, nbrs in enumerate(net.adjacency):
            tech = tuple(j for j in nbrs if kinds[j] == AgentKind.TECHNICAL)
            self.recipients.append(tech)
            if kinds[k] == AgentKind.RANDOM or not tech:
                self.coeff.append(0.0)
            elif cfg.redistribute_random_share:
                self.coeff.append(cfg.dissipation / len(tech))
            else:
                self.coeff.append(cfg.dissipation / len(nbrs))

    @property
    def n_nodes(self) -> int:
        return self.net.n_nodes

    def seed_information(self, rng: np.random.Generator) -> list[float]:
        """Fresh sub-threshold information state, uniform on [0, threshold)."""
        return rng.uniform(0.0, self.threshold, self.n_nodes).tolist()

    def drive(self, info: list[float], rng: np.random.Generator) -> None:
        """Add the daily influx, uniform on [0, threshold - max(info)) per agent.

        The common range shrinks as the most loaded trader nears the
        threshold, so the influx alone never pushes anyone over.
        """
        arr = np.asarray(info)
        gap = self.threshold - float(arr.max())
        if gap > 0.0:
            info[:] = (arr + rng.uniform(0.0, gap, arr.size)).tolist()

    def trigger(self, info: list[float]) -> int:
        """Force the most loaded trader (lowest id on ties) to the threshold."""
        k = int(np.asarray(info).argmax())
        info[k] = self.threshold
        return k

    def run_quake(self, info: list[float], start: int) -> list[int]:
        """Relax the avalanche seeded at `start`; returns the toppling order.

        Topplings proceed in synchronous sweeps: the set of over-threshold
        sites is frozen, swept in ascending id order, and sites loaded past
        the threshold during the sweep join the next one. A site transfers
        its live load at the moment it topples, so repeat topplings of the
        same site within one avalanche are counted individually.
        """
        threshold = self.threshold
        coeff = self.coeff
        recipients = self.recipients
        limit = self.max_topplings
        order: list[int] = []
        sweep = [start]
        while sweep:
            touched: set[int] = set()
            for k in sweep:
                amount = info[k]
                info[k] = 0.0
                order.append(k)
                c = coeff[k]
                if c != 0.0:
                    share = c * amount
                    for j in recipients[k]:
                        info[j] += share
                        touched.add(j)
            if len(order) > limit:
                raise NonTerminationError(
                    f"avalanche exceeded {limit} topplings; "
                    "dissipation too close to conservative"
                )
            sweep = sorted(j for j in touched if info[j] >= threshold)
        return order


@dataclass(frozen=True)
class SimulationResult:
    """Everything one run produced: quake log, final capitals, layout."""

    config: SimConfig
    run_index: int
    network: TraderNetwork
    kinds: tuple[AgentKind, ...]
    quakes: tuple[QuakeRecord, ...]
    ledger: CapitalLedger = field(repr=False)
    final_information: tuple[float, ...] = field(repr=False)

    def sizes(self) -> np.ndarray:
        return np.array([q.size for q in self.quakes], dtype=np.int64)

    def signed_sizes(self) -> np.ndarray:
        return np.array([q.signed_size for q in self.quakes], dtype=np.int64)


def run_simulation(
    cfg: SimConfig, series: MarketSeries, run_index: int = 0
) -> SimulationResult:
    """Simulate one trading history over the given price series.

    Day j (for j = 0 .. len(series)-2) drives the network, forces one quake,
    and bets every toppling on the RSI call for the move from close j to
    close j+1. Quakes seeded by a random trader, and all quakes during the
    RSI warm-up, bet on a fair coin flip instead. A flat move loses either
    way. Deterministic given (cfg.seeds, run_index).
    """
    n_days = len(series)
    if n_days < cfg.rsi_window + 2:
        raise InsufficientDataError(
            f"need at least rsi_window + 2 = {cfg.rsi_window + 2} closes, "
            f"got {n_days}"
        )
    topology_rng = cfg.seeds.stream("topology", run_index)
    net = rewire(build_lattice(cfg.rows, cfg.cols), cfg.rewire_prob, topology_rng)
    kinds = place_random_traders(cfg, net, topology_rng)
    engine = HerdingEngine(net, kinds, cfg)

    drive_rng = cfg.seeds.stream("drive", run_index)
    bets_rng = cfg.seeds.stream("bets", run_index)
    capital_rng = cfg.seeds.stream("capital", run_index)
    ledger = CapitalLedger.init_capitals(
        cfg.n_agents,
        capital_rng,
        mean=cfg.initial_capital_mean,
        sd_fraction=cfg.initial_capital_sd_fraction,
        win_fraction=cfg.win_bet_fraction,
        loss_fraction=cfg.loss_bet_fraction,
    )

    info = engine.seed_information(drive_rng)
    records: list[QuakeRecord] = []
    window = cfg.rsi_window
    for day in range(n_days - 1):
        engine.drive(info, drive_rng)
        seed_agent = engine.trigger(info)
        seed_kind = kinds[seed_agent]
        if seed_kind == AgentKind.RANDOM or day < window:
            prediction = (
                Direction.UP if bets_rng.random() < 0.5 else Direction.DOWN
            )
        else:
            prediction = rsi_prediction(series, day, window)
        order = engine.run_quake(info, seed_agent)
        actual = actual_sign(series, day + 1)
        won = prediction == actual
        stakes = ledger.settle_quake(order, won)
        records.append(
            QuakeRecord(
                day=day,
                seed_agent=seed_agent,
                seed_kind=seed_kind,
                prediction=prediction,
                actual=actual,
                size=len(order),
                participants=tuple(zip(order, stakes)),
                won=won,
            )
        )
    return SimulationResult(
        config=cfg,
        run_index=run_index,
        network=net,
        kinds=tuple(kinds),
        quakes=tuple(records),
        ledger=ledger,
        final_information=tuple(info),
    )


def _run_indexed(args: tuple[SimConfig, MarketSeries, int]) -> SimulationResult:
    cfg, series, run_index = args
    return run_simulation(cfg, series, run_index)


def run_ensemble(
    cfg: SimConfig, series: MarketSeries, n_runs: int, jobs: int = 1
) -> list[SimulationResult]:
    """Independent runs with sub-seeded streams, run_index = 0 .. n_runs-1."""
    if n_runs < 1:
        raise ConfigError(f"n_runs must be >= 1, got {n_runs}")
    tasks = [(cfg, series, i) for i in range(n_runs)]
    if jobs <= 1 or n_runs == 1:
        return [run_simulation(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, n_runs)) as pool:
        return list(pool.map(_run_indexed, tasks))
