"""HTTP layer: request validation, summaries, and error mapping."""

from __future__ import annotations

import datetime as dt

import pytest
from fastapi.testclient import TestClient

from finquakes import __version__
from finquakes.market import synthetic_series
from finquakes.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def series_payload(n_days=40, seed=11):
    series = synthetic_series(n_days, seed=seed)
    return {
        "dates": [d.isoformat() for d in series.dates],
        "closes": [float(c) for c in series.closes],
    }


def small_config(**extra):
    cfg = {"rows": 8, "cols": 8}
    cfg.update(extra)
    return cfg


def test_health_reports_version(client):
    res = client.get("/health")
    assert res.status_code == 200
    body = res.json()
    assert body["status"] == "ok"
    assert body["version"] == __version__


def test_defaults_echo_baseline_parameters(client):
    res = client.get("/config/defaults")
    assert res.status_code == 200
    body = res.json()
    assert body["rows"] == 40
    assert body["cols"] == 40
    assert body["dissipation"] == 0.84
    assert body["rewire_prob"] == 0.02
    assert body["rsi_window"] == 14
    assert body["seed_topology"] == 42


def test_run_returns_summary(client):
    res = client.post(
        "/run",
        json={
            "config": small_config(),
            "series": series_payload(),
            "n_runs": 2,
        },
    )
    assert res.status_code == 200
    body = res.json()
    assert body["summary"]["n_runs"] == 2
    assert body["summary"]["n_quakes"] == 2 * 39
    assert body["summary"]["sizes"]["mean"] >= 1.0
    assert 0.0 <= body["summary"]["win_rate"] <= 1.0
    assert body["quakes"] is None
    assert body["wealth"] is None


def test_run_can_include_rows(client):
    res = client.post(
        "/run",
        json={
            "config": small_config(random_fraction=0.25),
            "series": series_payload(),
            "include_quakes": True,
            "include_wealth": True,
        },
    )
    assert res.status_code == 200
    body = res.json()
    assert len(body["quakes"]) == 39
    assert len(body["wealth"]) == 64
    kinds = {row["kind"] for row in body["wealth"]}
    assert kinds == {"technical", "random"}
    assert all(row["capital"] > 0 for row in body["wealth"])


def test_run_is_deterministic_across_requests(client):
    req = {"config": small_config(), "series": series_payload(), "include_quakes": True}
    a = client.post("/run", json=req).json()
    b = client.post("/run", json=req).json()
    assert a == b


def test_run_with_too_short_series_is_domain_error(client):
    closes = [100.0, 101.0, 102.0]
    dates = [(dt.date(2020, 1, 1) + dt.timedelta(days=i)).isoformat() for i in range(3)]
    res = client.post(
        "/run",
        json={"config": small_config(), "series": {"dates": dates, "closes": closes}},
    )
    assert res.status_code == 400
    assert "closes" in res.json()["detail"]


def test_run_rejects_malformed_body(client):
    res = client.post("/run", json={"series": {"dates": [], "closes": "oops"}})
    assert res.status_code == 422


def test_run_rejects_bad_config_values(client):
    res = client.post(
        "/run",
        json={
            "config": {"rows": 1},  # below the minimum lattice size
            "series": series_payload(),
        },
    )
    assert res.status_code == 422


def test_sweep_grid_cells(client):
    res = client.post(
        "/sweep",
        json={
            "config": small_config(),
            "series": series_payload(),
            "fractions": [0.0, 0.25],
            "placements": ["uniform", "one_community"],
            "n_runs": 1,
        },
    )
    assert res.status_code == 200
    body = res.json()
    # fraction 0 collapses to a single uniform cell
    assert len(body["cells"]) == 3
    for cell in body["cells"]:
        assert cell["n_runs"] == 1
        assert cell["mean_max_size"] >= 1.0
    fractions = {(c["placement"], c["random_fraction"]) for c in body["cells"]}
    assert ("uniform", 0.0) in fractions
    assert ("one_community", 0.25) in fractions


def test_sweep_requires_fractions(client):
    res = client.post(
        "/sweep",
        json={"config": small_config(), "series": series_payload(), "fractions": []},
    )
    assert res.status_code == 422


def test_stats_characterizes_samples(client):
    samples = [1, 2, 4]
    res = client.post("/stats", json={"samples": samples})
    assert res.status_code == 200
    body = res.json()
    assert body["n_samples"] == 3
    assert body["mean"] == pytest.approx(7 / 3)
    assert body["max"] == 4
    assert body["distribution"]["values"] == [1.0, 2.0, 4.0]
    assert body["distribution"]["ccdf"] == pytest.approx([1.0, 2 / 3, 1 / 3])
    # only three support points: both fits decline rather than fabricate
    assert body["power_law"] is None
    assert body["exponential"] is None
    assert body["preferred_model"] is None


def test_stats_fits_larger_sample(client):
    samples = list(range(1, 30)) * 3
    res = client.post("/stats", json={"samples": samples, "include_points": False})
    assert res.status_code == 200
    body = res.json()
    assert body["power_law"] is not None
    assert body["exponential"] is not None
    assert body["preferred_model"] in ("power_law", "exponential")
    assert "distribution" not in body or body["distribution"] is None


def test_stats_rejects_empty_samples(client):
    res = client.post("/stats", json={"samples": []})
    assert res.status_code == 422
