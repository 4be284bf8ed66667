from contextlib import asynccontextmanager
from fastapi import FastAPI
from loguru import logger

from app.config.settings import settings
from app.shared.logging import setup_logging


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Управление жизненным циклом приложения."""
    # Startup
    setup_logging()
    logger.info("Application startup initiated")
    logger.info(f"App: {app.title} v{app.version}")
    settings.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    logger.info(f"Run records directory: {settings.OUTPUT_DIR.resolve()}")

    yield

    # Shutdown
    logger.info("Application shutdown complete")
