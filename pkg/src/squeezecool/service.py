"""HTTP service wrapping the experiment runner.

One generic endpoint executes any schema-validated experiment config and
returns the result rows plus the run manifest; clients (the bundled CLI in
particular) render CSV/JSON files from the response.

Run standalone with ``uvicorn squeezecool.service:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .experiments import ExperimentConfig, ExperimentResult, run_experiment

app = FastAPI(
    title="squeezecool",
    version=__version__,
    description="Dissipative squeezing simulator: single-mode cavity and 1D waveguide",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/version")
def version() -> dict:
    return {"version": __version__}


@app.post("/experiments", response_model=ExperimentResult)
def experiments(config: ExperimentConfig) -> ExperimentResult:
    try:
        return run_experiment(config)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
