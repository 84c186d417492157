"""Command-line front end.

By default commands compute in-process; pass --server URL to delegate the
same request to a running HTTP service and write identical files locally.
Every shared option can also be set through a FINQUAKES_* environment
variable.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from . import __version__, reports
from .config import Placement, Seeds, SimConfig, config_from_mapping, load_config_file
from .errors import FinquakesError
from .market import MarketSeries, load_series
from .orchestrate import (
    distribution_report,
    fit_range_from_bounds,
    run_and_summarize,
    sweep_report,
)

DEFAULT_FRACTIONS = "0,0.02,0.05,0.08,0.1"


def _require_file(path: str | Path | None, what: str) -> Path:
    if path is None:
        raise click.ClickException(f"missing required --{what} option")
    p = Path(path)
    if not p.is_file():
        raise click.ClickException(f"{what} file not found: {p}")
    return p


def _load_config(config_path: str | None) -> SimConfig:
    if config_path is None:
        return SimConfig()
    try:
        return load_config_file(_require_file(config_path, "config"))
    except FinquakesError as exc:
        raise click.ClickException(str(exc)) from exc


def _load_series(series_path: str | Path | None) -> MarketSeries:
    try:
        return load_series(_require_file(series_path, "series"))
    except FinquakesError as exc:
        raise click.ClickException(str(exc)) from exc


def _apply_overrides(
    cfg: SimConfig,
    seed: int | None,
    random_fraction: float | None,
    placement: str | None,
) -> SimConfig:
    try:
        if seed is not None:
            cfg = cfg.updated(
                seeds=Seeds(topology=seed, drive=seed, bets=seed, capital=seed)
            )
        changes: dict = {}
        if random_fraction is not None:
            changes["random_fraction"] = random_fraction
        if placement is not None:
            changes["placement"] = Placement(placement)
        return cfg.updated(**changes) if changes else cfg
    except (FinquakesError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


def _series_payload(series: MarketSeries) -> dict:
    return {
        "dates": [d.isoformat() for d in series.dates],
        "closes": series.closes.tolist(),
    }


def _post(server: str, route: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + route
    try:
        response = httpx.post(url, json=payload, timeout=None)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach server at {url}: {exc}") from exc
    if response.status_code != 200:
        try:
            detail = response.json().get("detail")
        except ValueError:
            detail = response.text
        raise click.ClickException(f"server returned {response.status_code}: {detail}")
    return response.json()


def _echo_json(data: dict) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _parse_fractions(text: str) -> list[float]:
    try:
        fractions = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.ClickException(f"bad fraction list {text!r}: {exc}") from exc
    if not fractions:
        raise click.ClickException("empty fraction list")
    return fractions


def _parse_placements(text: str) -> list[Placement]:
    try:
        return [Placement(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _verify_replay(expected: dict, outputs: dict[str, Path]) -> None:
    """Compare freshly written outputs against the manifest's digests."""
    mismatched = []
    for name, digest in expected.items():
        if name not in outputs:
            mismatched.append(f"{name}: not regenerated")
        elif reports.file_sha256(outputs[name]) != digest:
            mismatched.append(f"{name}: contents differ")
    if mismatched:
        raise click.ClickException("replay mismatch: " + "; ".join(mismatched))
    click.echo(f"replay verified: {len(expected)} outputs byte-identical")


@click.group()
@click.version_option(__version__, prog_name="finquakes")
def main() -> None:
    """Simulate herding avalanches of trades and analyze their statistics."""


@main.command()
@click.option("--config", "config_path", envvar="FINQUAKES_CONFIG", default=None,
              help="Flat key = value config file.")
@click.option("--series", "series_path", envvar="FINQUAKES_SERIES", default=None,
              help="CSV of date,close rows driving the bets.")
@click.option("--out", "out_dir", envvar="FINQUAKES_OUT", default=None,
              help="Directory for quakes.csv, wealth.csv, summary.json, manifest.json.")
@click.option("--seed", type=int, envvar="FINQUAKES_SEED", default=None,
              help="Override all four stream seeds at once.")
@click.option("--runs", "n_runs", type=int, default=1, envvar="FINQUAKES_RUNS",
              show_default=True, help="Independent runs to pool.")
@click.option("--jobs", type=int, default=1, envvar="FINQUAKES_JOBS",
              show_default=True, help="Worker processes for the ensemble.")
@click.option("--fit-min", type=float, default=None, envvar="FINQUAKES_FIT_MIN",
              help="Lower bound of the tail-fit window.")
@click.option("--fit-max", type=float, default=None, envvar="FINQUAKES_FIT_MAX",
              help="Upper bound of the tail-fit window.")
@click.option("--random-fraction", type=float, default=None,
              help="Override the random-trader fraction.")
@click.option("--placement", type=click.Choice([p.value for p in Placement]),
              default=None, help="Override the random-trader placement.")
@click.option("--server", envvar="FINQUAKES_SERVER", default=None,
              help="Delegate computation to a running service.")
@click.option("--manifest", "manifest_path", default=None,
              help="Replay a recorded manifest.json and verify outputs match.")
@click.option("--export-network", "export_net", is_flag=True, default=False,
              help="Also write each run's rewired network as an edge list.")
def run(
    config_path: str | None,
    series_path: str | None,
    out_dir: str | None,
    seed: int | None,
    n_runs: int,
    jobs: int,
    fit_min: float | None,
    fit_max: float | None,
    random_fraction: float | None,
    placement: str | None,
    server: str | None,
    manifest_path: str | None,
    export_net: bool,
) -> None:
    """Run a seeded ensemble and report quake and wealth statistics."""
    fit_range = fit_range_from_bounds(fit_min, fit_max)
    expected_outputs: dict | None = None

    if manifest_path is not None:
        try:
            manifest = reports.load_manifest(_require_file(manifest_path, "manifest"))
        except FinquakesError as exc:
            raise click.ClickException(str(exc)) from exc
        if manifest["kind"] != "run":
            raise click.ClickException(
                f"manifest records a {manifest['kind']} job; use the matching command"
            )
        try:
            cfg = config_from_mapping(manifest["config"])
        except FinquakesError as exc:
            raise click.ClickException(f"manifest config invalid: {exc}") from exc
        n_runs = int(manifest["n_runs"])
        recorded_range = manifest.get("fit_range")
        fit_range = tuple(recorded_range) if recorded_range else None
        series_path = manifest["series"]["path"]
        series_file = _require_file(series_path, "series")
        if reports.file_sha256(series_file) != manifest["series"]["sha256"]:
            raise click.ClickException(
                f"series file {series_file} changed since the manifest was recorded"
            )
        expected_outputs = manifest["outputs"]
        export_net = any(name.startswith("network_run") for name in expected_outputs)
        if out_dir is None:
            out_dir = str(Path(manifest_path).parent)
    else:
        series_file = _require_file(series_path, "series")
        cfg = _apply_overrides(
            _load_config(config_path), seed, random_fraction, placement
        )

    series = _load_series(series_file)
    if server is not None and export_net:
        raise click.ClickException("--export-network needs in-process mode")

    want_tables = out_dir is not None
    if server is not None:
        payload = {
            "config": cfg.model_dump(mode="json"),
            "series": _series_payload(series),
            "n_runs": n_runs,
            "jobs": jobs,
            "fit_min": fit_range[0] if fit_range else None,
            "fit_max": fit_range[1] if fit_range else None,
            "include_quakes": want_tables,
            "include_wealth": want_tables,
        }
        response = _post(server, "/run", payload)
        summary = response["summary"]
        quakes = response.get("quakes")
        wealth = response.get("wealth")
        results = None
    else:
        try:
            results, summary = run_and_summarize(
                cfg, series, n_runs, jobs=jobs, fit_range=fit_range
            )
        except FinquakesError as exc:
            raise click.ClickException(str(exc)) from exc
        quakes = reports.quake_rows(results) if want_tables else None
        wealth = reports.wealth_rows(results) if want_tables else None

    if out_dir is None:
        _echo_json(summary)
        return

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {
        "quakes.csv": out / "quakes.csv",
        "wealth.csv": out / "wealth.csv",
        "summary.json": out / "summary.json",
    }
    reports.write_quakes_csv(quakes, outputs["quakes.csv"])
    reports.write_wealth_csv(wealth, outputs["wealth.csv"])
    reports.write_json(summary, outputs["summary.json"])
    if export_net and results is not None:
        for result in results:
            name = f"network_run{result.run_index}.edges"
            outputs[name] = out / name
            reports.export_network(result.network, outputs[name])

    if expected_outputs is not None:
        _verify_replay(expected_outputs, outputs)
        return

    manifest = reports.build_manifest(
        kind="run",
        cfg=cfg,
        n_runs=n_runs,
        series_path=series_file,
        n_days=len(series),
        outputs=outputs,
        fit_range=fit_range,
    )
    reports.write_json(manifest, out / "manifest.json")
    for name in [*outputs, "manifest.json"]:
        click.echo(f"wrote {out / name}")
    sizes = summary["sizes"]
    click.echo(
        f"{summary['n_quakes']} quakes over {n_runs} run(s); "
        f"max size {sizes['max']}, preferred tail model: {sizes['preferred_model']}"
    )


@main.command()
@click.option("--config", "config_path", envvar="FINQUAKES_CONFIG", default=None,
              help="Flat key = value config file.")
@click.option("--series", "series_path", envvar="FINQUAKES_SERIES", default=None,
              help="CSV of date,close rows driving the bets.")
@click.option("--out", "out_dir", envvar="FINQUAKES_OUT", default=None,
              help="Directory for sweep.csv, sweep.json, manifest.json.")
@click.option("--seed", type=int, envvar="FINQUAKES_SEED", default=None,
              help="Override all four stream seeds at once.")
@click.option("--runs", "n_runs", type=int, default=1, envvar="FINQUAKES_RUNS",
              show_default=True, help="Runs per sweep cell.")
@click.option("--jobs", type=int, default=1, envvar="FINQUAKES_JOBS",
              show_default=True, help="Worker processes per ensemble.")
@click.option("--fit-min", type=float, default=None, envvar="FINQUAKES_FIT_MIN",
              help="Lower bound of the tail-fit window.")
@click.option("--fit-max", type=float, default=None, envvar="FINQUAKES_FIT_MAX",
              help="Upper bound of the tail-fit window.")
@click.option("--fractions", default=DEFAULT_FRACTIONS, show_default=True,
              help="Comma-separated random-trader fractions.")
@click.option("--placements", default="uniform", show_default=True,
              help="Comma-separated placements to cross with the fractions.")
@click.option("--server", envvar="FINQUAKES_SERVER", default=None,
              help="Delegate computation to a running service.")
@click.option("--manifest", "manifest_path", default=None,
              help="Replay a recorded manifest.json and verify outputs match.")
def sweep(
    config_path: str | None,
    series_path: str | None,
    out_dir: str | None,
    seed: int | None,
    n_runs: int,
    jobs: int,
    fit_min: float | None,
    fit_max: float | None,
    fractions: str,
    placements: str,
    server: str | None,
    manifest_path: str | None,
) -> None:
    """Grid over random-trader fractions and placements."""
    fit_range = fit_range_from_bounds(fit_min, fit_max)
    expected_outputs: dict | None = None

    if manifest_path is not None:
        try:
            manifest = reports.load_manifest(_require_file(manifest_path, "manifest"))
        except FinquakesError as exc:
            raise click.ClickException(str(exc)) from exc
        if manifest["kind"] != "sweep":
            raise click.ClickException(
                f"manifest records a {manifest['kind']} job; use the matching command"
            )
        try:
            cfg = config_from_mapping(manifest["config"])
        except FinquakesError as exc:
            raise click.ClickException(f"manifest config invalid: {exc}") from exc
        n_runs = int(manifest["n_runs"])
        recorded_range = manifest.get("fit_range")
        fit_range = tuple(recorded_range) if recorded_range else None
        fraction_list = [float(f) for f in manifest["fractions"]]
        placement_list = [Placement(p) for p in manifest["placements"]]
        series_path = manifest["series"]["path"]
        series_file = _require_file(series_path, "series")
        if reports.file_sha256(series_file) != manifest["series"]["sha256"]:
            raise click.ClickException(
                f"series file {series_file} changed since the manifest was recorded"
            )
        expected_outputs = manifest["outputs"]
        if out_dir is None:
            out_dir = str(Path(manifest_path).parent)
    else:
        series_file = _require_file(series_path, "series")
        cfg = _apply_overrides(_load_config(config_path), seed, None, None)
        fraction_list = _parse_fractions(fractions)
        placement_list = _parse_placements(placements)

    series = _load_series(series_file)
    if server is not None:
        payload = {
            "config": cfg.model_dump(mode="json"),
            "series": _series_payload(series),
            "fractions": fraction_list,
            "placements": [p.value for p in placement_list],
            "n_runs": n_runs,
            "jobs": jobs,
            "fit_min": fit_range[0] if fit_range else None,
            "fit_max": fit_range[1] if fit_range else None,
        }
        report = _post(server, "/sweep", payload)
    else:
        try:
            report = sweep_report(
                cfg, series, fraction_list, placement_list, n_runs,
                jobs=jobs, fit_range=fit_range,
            )
        except FinquakesError as exc:
            raise click.ClickException(str(exc)) from exc

    if out_dir is None:
        _echo_json(report)
        return

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {
        "sweep.csv": out / "sweep.csv",
        "sweep.json": out / "sweep.json",
    }
    reports.write_sweep_csv(report["cells"], outputs["sweep.csv"])
    reports.write_json(report, outputs["sweep.json"])

    if expected_outputs is not None:
        _verify_replay(expected_outputs, outputs)
        return

    manifest = reports.build_manifest(
        kind="sweep",
        cfg=cfg,
        n_runs=n_runs,
        series_path=series_file,
        n_days=len(series),
        outputs=outputs,
        fit_range=fit_range,
        extra={
            "fractions": fraction_list,
            "placements": [p.value for p in placement_list],
        },
    )
    reports.write_json(manifest, out / "manifest.json")
    for name in [*outputs, "manifest.json"]:
        click.echo(f"wrote {out / name}")
    for cell in report["cells"]:
        click.echo(
            f"{cell['placement']:>16s} f={cell['random_fraction']:<5g} "
            f"mean_max={cell['mean_max_size']:8.1f} "
            f"preferred={cell['preferred_model']}"
        )


def _read_samples(path: Path, column: str) -> list[float]:
    """Numeric samples from a one-column file or a headered CSV column."""
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and any(f.strip() for f in row)]
    if not rows:
        raise click.ClickException(f"{path}: no data rows")
    header = rows[0]
    try:
        float(header[0])
        has_header = False
    except ValueError:
        has_header = True
    if has_header:
        if column not in header:
            raise click.ClickException(
                f"{path}: no column {column!r}; header is {header}"
            )
        index = header.index(column)
        rows = rows[1:]
    elif len(header) == 1:
        index = 0
    else:
        raise click.ClickException(
            f"{path}: multi-column file needs a header naming column {column!r}"
        )
    samples = []
    for lineno, row in enumerate(rows, start=2 if has_header else 1):
        try:
            samples.append(float(row[index]))
        except (ValueError, IndexError) as exc:
            raise click.ClickException(f"{path}:{lineno}: bad value: {exc}") from exc
    if not samples:
        raise click.ClickException(f"{path}: no samples in column {column!r}")
    return samples


@main.command()
@click.argument("input_file", envvar="FINQUAKES_STATS_INPUT")
@click.option("--column", default="size", show_default=True,
              help="Column to read from a headered CSV.")
@click.option("--out", "out_dir", envvar="FINQUAKES_OUT", default=None,
              help="Directory for distribution.csv and stats.json.")
@click.option("--fit-min", type=float, default=None, envvar="FINQUAKES_FIT_MIN",
              help="Lower bound of the tail-fit window.")
@click.option("--fit-max", type=float, default=None, envvar="FINQUAKES_FIT_MAX",
              help="Upper bound of the tail-fit window.")
@click.option("--discrete/--continuous", default=True, show_default=True,
              help="Discrete data also get the maximum-likelihood estimate.")
@click.option("--server", envvar="FINQUAKES_SERVER", default=None,
              help="Delegate computation to a running service.")
def stats(
    input_file: str,
    column: str,
    out_dir: str | None,
    fit_min: float | None,
    fit_max: float | None,
    discrete: bool,
    server: str | None,
) -> None:
    """Fit tail models to a sample read from a CSV file."""
    samples = _read_samples(_require_file(input_file, "input"), column)
    fit_range = fit_range_from_bounds(fit_min, fit_max)
    if server is not None:
        report = _post(
            server,
            "/stats",
            {
                "samples": samples,
                "fit_min": fit_min,
                "fit_max": fit_max,
                "discrete": discrete,
                "include_points": True,
            },
        )
    else:
        try:
            report = distribution_report(
                samples, fit_range=fit_range, discrete=discrete, include_points=True
            )
        except FinquakesError as exc:
            raise click.ClickException(str(exc)) from exc

    points = report.pop("distribution", None)
    if out_dir is None:
        _echo_json(report)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports.write_distribution_csv(points["values"], points["ccdf"], out / "distribution.csv")
    reports.write_json(report, out / "stats.json")
    click.echo(f"wrote {out / 'distribution.csv'}")
    click.echo(f"wrote {out / 'stats.json'}")
    _echo_json(report)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, envvar="FINQUAKES_HOST")
@click.option("--port", default=8000, show_default=True, type=int, envvar="FINQUAKES_PORT")
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("finquakes.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
