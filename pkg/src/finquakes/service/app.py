"""HTTP API over the simulator.

Endpoints map one-to-one onto the orchestration pipelines: /run executes a
seeded ensemble, /sweep grids over random-trader levels and placements, and
/stats characterizes a caller-supplied sample. Domain errors surface as 400s
with the exception message, request-shape problems as FastAPI's usual 422s.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import SimConfig
from ..errors import FinquakesError
from ..orchestrate import (
    config_dict,
    distribution_report,
    fit_range_from_bounds,
    run_and_summarize,
    sweep_report,
)
from ..reports import quake_rows, wealth_rows
from .schemas import (
    HealthResponse,
    RunRequest,
    RunResponse,
    StatsRequest,
    StatsResponse,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="finquakes",
        version=__version__,
        description="Herding-avalanche market simulator",
    )

    @app.exception_handler(FinquakesError)
    async def domain_error(request: Request, exc: FinquakesError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/config/defaults")
    def config_defaults() -> dict:
        return config_dict(SimConfig())

    @app.post("/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        series = req.series.to_series()
        fit_range = fit_range_from_bounds(req.fit_min, req.fit_max)
        results, summary = run_and_summarize(
            req.config, series, req.n_runs, jobs=req.jobs, fit_range=fit_range
        )
        return RunResponse(
            summary=summary,
            quakes=quake_rows(results) if req.include_quakes else None,
            wealth=wealth_rows(results) if req.include_wealth else None,
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        report = sweep_report(
            req.config,
            req.series.to_series(),
            req.fractions,
            req.placements,
            req.n_runs,
            jobs=req.jobs,
            fit_range=fit_range_from_bounds(req.fit_min, req.fit_max),
        )
        return SweepResponse(**report)

    @app.post("/stats", response_model=StatsResponse)
    def stats(req: StatsRequest) -> StatsResponse:
        report = distribution_report(
            req.samples,
            fit_range=fit_range_from_bounds(req.fit_min, req.fit_max),
            discrete=req.discrete,
            include_points=req.include_points,
        )
        return StatsResponse(**report)

    return app


app = create_app()
