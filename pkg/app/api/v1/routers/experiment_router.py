from fastapi import APIRouter, Depends, status

from app.application.experiments.dto import (
    FigureRequest, FigureResult, PulseOptimizationResult, RunConfig, RunRecord, SweepRequest, SweepResult
)
from app.application.experiments.services.figure_service import FigureService
from app.application.experiments.services.run_service import RunService
from app.application.experiments.services.sweep_service import SweepService
from app.api.v1.dependencies import get_figure_service, get_run_service, get_sweep_service

router = APIRouter(prefix="/experiments", tags=["experiments"])

# Численные прогоны блокируют CPU: обычные def-эндпоинты уходят в threadpool


@router.post("/runs", response_model=RunRecord, status_code=status.HTTP_201_CREATED)
def create_run(
    config: RunConfig,
    service: RunService = Depends(get_run_service)
):
    return service.run(config)


@router.post("/runs/optimize-pulse", response_model=PulseOptimizationResult, status_code=status.HTTP_201_CREATED)
def optimize_pulse(
    config: RunConfig,
    service: RunService = Depends(get_run_service)
):
    return service.optimize_pulse(config)


@router.get("/runs/{run_id}", response_model=RunRecord)
def get_run(
    run_id: str,
    service: RunService = Depends(get_run_service)
):
    return service.get_run(run_id)


@router.post("/sweeps", response_model=SweepResult, status_code=status.HTTP_201_CREATED)
def create_sweep(
    request: SweepRequest,
    service: SweepService = Depends(get_sweep_service)
):
    return service.sweep(request)


@router.post("/figures/{name}", response_model=FigureResult, status_code=status.HTTP_201_CREATED)
def render_figure(
    name: str,
    request: FigureRequest,
    service: FigureService = Depends(get_figure_service)
):
    return service.render(name, request)
