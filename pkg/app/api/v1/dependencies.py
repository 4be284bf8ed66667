from fastapi import Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from app import container
from app.application.experiments.exceptions import RecipeNotFoundError, RunNotFoundError
from app.application.experiments.services.figure_service import FigureService
from app.application.experiments.services.run_service import RunService
from app.application.experiments.services.sweep_service import SweepService
from app.core.exceptions import DomainError

from loguru import logger


def get_run_service() -> RunService:
    """Dependency для получения сервиса прогонов."""
    return container.build_run_service()


def get_sweep_service() -> SweepService:
    """Dependency для получения сервиса свипов."""
    return container.build_sweep_service()


def get_figure_service() -> FigureService:
    """Dependency для получения сервиса рецептов рисунков."""
    return container.build_figure_service()


def run_not_found_handler(request: Request, exc: RunNotFoundError) -> JSONResponse:
    """Handler для RunNotFoundError."""
    logger.warning(f"Run not found: {exc.run_id} | path: {request.url.path}")
    return JSONResponse(
        status_code=status.HTTP_404_NOT_FOUND,
        content={"detail": f"Run with id {exc.run_id} not found"}
    )


def recipe_not_found_handler(request: Request, exc: RecipeNotFoundError) -> JSONResponse:
    """Handler для RecipeNotFoundError."""
    logger.warning(f"Unknown figure recipe: {exc.name} | path: {request.url.path}")
    return JSONResponse(
        status_code=status.HTTP_404_NOT_FOUND,
        content={"detail": str(exc), "known": list(exc.known)}
    )


def domain_error_handler(request: Request, exc: DomainError) -> JSONResponse:
    """Handler для остальных доменных ошибок (некорректные параметры, численные сбои)."""
    logger.warning(f"{type(exc).__name__}: {exc} | path: {request.url.path}")
    return JSONResponse(
        status_code=status.HTTP_400_BAD_REQUEST,
        content={"detail": str(exc), "type": type(exc).__name__}
    )


async def pydantic_validation_error_handler(
    request: Request, exc: ValidationError | RequestValidationError
) -> JSONResponse:
    """Handler для Pydantic ValidationError с красивым форматированием."""
    errors = []
    for error in exc.errors():
        errors.append({
            "field": " -> ".join(str(loc) for loc in error["loc"]),
            "message": error["msg"],
            "type": error["type"]
        })

    logger.warning(f"Pydantic validation error: {errors} | path: {request.url.path}")
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": errors}
    )
