"""Общие фикстуры для всех тестов."""
from pathlib import Path
from typing import AsyncGenerator

import numpy as np
import pytest
import pytest_asyncio
from httpx import AsyncClient, ASGITransport

from app.main import app
from app.api.v1.dependencies import get_figure_service, get_run_service, get_sweep_service
from app.application.experiments.dto import GridConfig, RunConfig
from app.application.experiments.engines import DickeEngine, MultimodeEngine, TruncatedWignerEngine
from app.application.experiments.services.figure_service import FigureService
from app.application.experiments.services.run_service import RunService
from app.application.experiments.services.sweep_service import SweepService
from app.container import run_member
from app.core.field.ground_state import GroundState, solve_ground_state
from app.core.field.grid import Grid1D
from app.infrastructure.persistence.experiments.run_repository import FileRunRepository
from app.infrastructure.persistence.experiments.snapshot_store import NpzSnapshotStore


# === Флаг многочасовых прогонов ===
def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--long-runs",
        action="store_true",
        default=False,
        help="Запускать тесты с маркером long (асимметричный μ = 0.6, подбор импульса)",
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--long-runs"):
        return
    skip_long = pytest.mark.skip(reason="нужен флаг --long-runs")
    for item in items:
        if item.get_closest_marker("long") is not None:
            item.add_marker(skip_long)


# === Сетки и основные состояния ===
@pytest.fixture(scope="session")
def small_grid() -> Grid1D:
    """Грубая сетка для быстрых многомодовых проверок."""
    return Grid1D(n_points=64, half_width=8.0)


@pytest.fixture(scope="session")
def weak_ground(small_grid: Grid1D) -> GroundState:
    """Основное состояние N=6 со слабым взаимодействием."""
    return solve_ground_state(0.2, 6, small_grid)


# === Конфигурации прогонов ===
@pytest.fixture
def dicke_config(tmp_path: Path) -> RunConfig:
    """Точная OAT при χ = 1: ось τ совпадает с χt."""
    return RunConfig(
        name="dicke-n20",
        engine="dicke",
        n_atoms=20,
        chi=1.0,
        t_final=np.pi,
        sample_count=201,
        output_dir=tmp_path,
    )


@pytest.fixture
def small_multimode_config(tmp_path: Path) -> RunConfig:
    """Многомодовый прогон N=6 с явным g₀ на грубой сетке."""
    return RunConfig(
        name="multimode-n6",
        engine="multimode",
        n_atoms=6,
        g0=0.2,
        grid=GridConfig(n_points=64, half_width=8.0),
        t_final=2.0,
        sample_count=21,
        output_dir=tmp_path,
    )


# === Сервисы с временным хранилищем ===
@pytest.fixture
def repository(tmp_path: Path) -> FileRunRepository:
    return FileRunRepository(tmp_path)


@pytest.fixture
def run_service(repository: FileRunRepository) -> RunService:
    """Сервис прогонов с настоящими движками и файловым хранилищем во временном каталоге."""
    snapshots = NpzSnapshotStore()
    engines = {
        "dicke": DickeEngine(),
        "tw": TruncatedWignerEngine(),
        "multimode": MultimodeEngine(snapshots),
    }
    return RunService(engines, repository, snapshots)


@pytest.fixture
def sweep_service(repository: FileRunRepository) -> SweepService:
    return SweepService(run_member, repository, default_workers=1)


@pytest_asyncio.fixture(scope="function")
async def client(
    run_service: RunService, sweep_service: SweepService, repository: FileRunRepository
) -> AsyncGenerator[AsyncClient, None]:
    """HTTP клиент для E2E тестов с подменой хранилища."""
    app.dependency_overrides[get_run_service] = lambda: run_service
    app.dependency_overrides[get_sweep_service] = lambda: sweep_service
    app.dependency_overrides[get_figure_service] = lambda: FigureService(
        run_service, sweep_service, repository, tw_trajectories=2_000
    )

    async with AsyncClient(
        transport=ASGITransport(app=app),
        base_url="http://test"
    ) as ac:
        yield ac

    app.dependency_overrides.clear()
