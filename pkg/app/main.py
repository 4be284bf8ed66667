from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from pydantic import ValidationError

from app.lifespan import lifespan
from app.config.settings import settings
from app.api.v1.routers.experiment_router import router as experiment_router
from app.api.v1.dependencies import (
    domain_error_handler,
    pydantic_validation_error_handler,
    recipe_not_found_handler,
    run_not_found_handler,
)
from app.application.experiments.exceptions import RecipeNotFoundError, RunNotFoundError
from app.core.exceptions import DomainError


app = FastAPI(
    lifespan=lifespan,
    title=settings.APP_NAME,
    version="1.0.0",
    description="One-axis twisting and spin-cat generation in 1D two-component condensates",
    debug=settings.DEBUG,
)

app.include_router(experiment_router, prefix="/api/v1")

# Глобальные обработчики исключений; более конкретные классы ищутся первыми по MRO
app.add_exception_handler(RunNotFoundError, run_not_found_handler)
app.add_exception_handler(RecipeNotFoundError, recipe_not_found_handler)
app.add_exception_handler(DomainError, domain_error_handler)
app.add_exception_handler(ValidationError, pydantic_validation_error_handler)
app.add_exception_handler(RequestValidationError, pydantic_validation_error_handler)
