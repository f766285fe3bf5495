"""FastAPI service exposing the simulation campaigns.

Endpoints accept the full run configuration as the request body (defaults
apply for omitted sections) and return rows plus the rendered CSV, so a
thin client can persist byte-identical artifacts.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__
from .config import RunConfig
from .errors import ConfigurationError, NumericalError
from .experiments import SWEEPS, simulate_trajectory, spectrum_report

app = FastAPI(title="berrysim", version=__version__)


class SweepRequest(BaseModel):
    config: RunConfig = RunConfig()


class SweepResponse(BaseModel):
    axis: str
    rows: list[dict]
    csv: str


class SpectrumResponse(BaseModel):
    ej_over_ec: float
    omega01_ghz: float
    alpha_mhz_charge_basis: list[float]
    alpha_mhz_effective: list[float]
    asymptotic_omega01_ghz: float
    detuning_mhz: float
    k: float


class SimulateRequest(BaseModel):
    config: RunConfig = RunConfig()
    contour: str = "-+"


class SimulateResponse(BaseModel):
    gamma_rad: float
    gamma_ideal_rad: float
    bloch_length: float
    p2_max: float
    fidelity: float
    csv: str


def _json_safe(rows: list[dict]) -> list[dict]:
    out = []
    for row in rows:
        out.append(
            {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
        )
    return out


def _wrap_errors(fn, *args):
    try:
        return fn(*args)
    except ConfigurationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/spectrum", response_model=SpectrumResponse)
def spectrum(request: SweepRequest) -> SpectrumResponse:
    report = _wrap_errors(spectrum_report, request.config)
    return SpectrumResponse(**report)


@app.post("/sweep/{axis}", response_model=SweepResponse)
def sweep(axis: str, request: SweepRequest) -> SweepResponse:
    if axis not in SWEEPS:
        raise HTTPException(status_code=404, detail=f"unknown sweep axis {axis!r}")
    config = request.config.model_copy(deep=True)
    config.sweep.axis = axis  # path wins over the body
    result = _wrap_errors(SWEEPS[axis], config)
    return SweepResponse(axis=result.axis, rows=_json_safe(result.rows), csv=result.to_csv())


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    if request.contour not in ("-+", "+-", "++", "--"):
        raise HTTPException(status_code=422, detail=f"unknown contour {request.contour!r}")
    run, csv_text = _wrap_errors(simulate_trajectory, request.config, request.contour)
    return SimulateResponse(
        gamma_rad=run.gamma,
        gamma_ideal_rad=run.gamma_ideal,
        bloch_length=run.bloch,
        p2_max=run.p2_max,
        fidelity=run.fidelity,
        csv=csv_text,
    )
