"""File outputs: CSV logs, JSON summaries, and the reproducibility manifest.

All writers emit LF line endings and no timestamps, so rerunning the same
seeded job produces byte-identical files. The manifest records the exact
config, the input series digest, and the digests of every written output;
a later run can replay it and verify nothing drifted.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .config import SimConfig
from .dynamics import AgentKind, SimulationResult
from .errors import ConfigError
from .network import TraderNetwork, write_edge_list
from .orchestrate import config_dict

QUAKE_COLUMNS = [
    "run",
    "day",
    "size",
    "signed_size",
    "prediction",
    "actual",
    "seed_agent",
    "seed_kind",
]
WEALTH_COLUMNS = ["run", "agent_id", "kind", "capital", "bets", "wins", "losses"]


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_json(data: object, path: str | Path) -> None:
    """Canonical JSON: sorted keys, 2-space indent, trailing newline."""
    text = json.dumps(data, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def quake_rows(results: Sequence[SimulationResult]) -> list[dict]:
    """Per-quake rows across all runs, in (run, day) order."""
    return [
        {
            "run": result.run_index,
            "day": q.day,
            "size": q.size,
            "signed_size": q.signed_size,
            "prediction": q.prediction.value,
            "actual": q.actual.value,
            "seed_agent": q.seed_agent,
            "seed_kind": q.seed_kind.name.lower(),
        }
        for result in results
        for q in result.quakes
    ]


def wealth_rows(results: Sequence[SimulationResult]) -> list[dict]:
    """Final account state of every agent in every run."""
    return [
        {
            "run": result.run_index,
            "agent_id": agent_id,
            "kind": AgentKind(kind).name.lower(),
            "capital": result.ledger.capital[agent_id],
            "bets": result.ledger.bets[agent_id],
            "wins": result.ledger.wins[agent_id],
            "losses": result.ledger.losses[agent_id],
        }
        for result in results
        for agent_id, kind in enumerate(result.kinds)
    ]


def write_quakes_csv(rows: Sequence[Mapping], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(QUAKE_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in QUAKE_COLUMNS])


def write_wealth_csv(rows: Sequence[Mapping], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(WEALTH_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row["run"],
                    row["agent_id"],
                    row["kind"],
                    f"{row['capital']:.10g}",
                    row["bets"],
                    row["wins"],
                    row["losses"],
                ]
            )


def write_distribution_csv(
    values: Sequence[float], ccdf: Sequence[float], path: str | Path
) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["value", "ccdf"])
        for v, p in zip(values, ccdf):
            writer.writerow([f"{v:.10g}", f"{p:.10g}"])


def write_sweep_csv(cells: Sequence[Mapping], path: str | Path) -> None:
    """Flat per-cell table; fit columns are blank where a fit was impossible."""
    columns = [
        "placement",
        "random_fraction",
        "n_runs",
        "n_quakes",
        "win_rate",
        "mean_size",
        "mean_max_size",
        "sd_max_size",
        "power_law_exponent",
        "power_law_goodness",
        "exponential_exponent",
        "exponential_goodness",
        "preferred_model",
    ]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for cell in cells:
            power = cell.get("power_law") or {}
            exponential = cell.get("exponential") or {}
            writer.writerow(
                [
                    cell["placement"],
                    f"{cell['random_fraction']:.10g}",
                    cell["n_runs"],
                    cell["n_quakes"],
                    f"{cell['win_rate']:.10g}",
                    f"{cell['mean_size']:.10g}",
                    f"{cell['mean_max_size']:.10g}",
                    f"{cell['sd_max_size']:.10g}",
                    _opt(power.get("exponent")),
                    _opt(power.get("goodness")),
                    _opt(exponential.get("exponent")),
                    _opt(exponential.get("goodness")),
                    cell.get("preferred_model") or "",
                ]
            )


def _opt(value: float | None) -> str:
    return "" if value is None else f"{value:.10g}"


def export_network(net: TraderNetwork, path: str | Path) -> None:
    write_edge_list(net, path)


def build_manifest(
    kind: str,
    cfg: SimConfig,
    n_runs: int,
    series_path: str | Path,
    n_days: int,
    outputs: Mapping[str, str | Path],
    fit_range: tuple[float, float] | None = None,
    extra: Mapping[str, object] | None = None,
) -> dict:
    """Self-contained record of a job: inputs, config, output digests."""
    manifest: dict = {
        "kind": kind,
        "package": {"name": "finquakes", "version": __version__},
        "config": config_dict(cfg),
        "n_runs": n_runs,
        "fit_range": list(fit_range) if fit_range else None,
        "series": {
            "path": str(series_path),
            "sha256": file_sha256(series_path),
            "n_days": n_days,
        },
        "outputs": {name: file_sha256(p) for name, p in sorted(outputs.items())},
    }
    if extra:
        manifest.update(extra)
    return manifest


def load_manifest(path: str | Path) -> dict:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    for key in ("kind", "config", "n_runs", "series", "outputs"):
        if key not in manifest:
            raise ConfigError(f"{path}: manifest missing {key!r}")
    return manifest
