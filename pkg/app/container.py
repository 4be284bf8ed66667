"""Сборка сервисов из настроек; общая для CLI, HTTP-слоя и процессов свипа."""
from app.application.experiments.dto import RunConfig, RunRecord
from app.application.experiments.engines import DickeEngine, MultimodeEngine, TruncatedWignerEngine
from app.application.experiments.services.figure_service import FigureService
from app.application.experiments.services.run_service import RunService
from app.application.experiments.services.sweep_service import SweepService
from app.config.settings import settings
from app.infrastructure.persistence.experiments.run_repository import FileRunRepository
from app.infrastructure.persistence.experiments.snapshot_store import NpzSnapshotStore


def build_repository() -> FileRunRepository:
    return FileRunRepository(settings.OUTPUT_DIR)


def build_run_service() -> RunService:
    snapshots = NpzSnapshotStore()
    engines = {
        "dicke": DickeEngine(settings.FFT_WORKERS),
        "tw": TruncatedWignerEngine(settings.FFT_WORKERS),
        "multimode": MultimodeEngine(snapshots, settings.FFT_WORKERS),
    }
    return RunService(engines, build_repository(), snapshots)


def run_member(config: RunConfig) -> RunRecord:
    """Точка входа процесса-исполнителя свипа (должна импортироваться по имени)."""
    return build_run_service().run(config)


def build_sweep_service() -> SweepService:
    return SweepService(run_member, build_repository(), settings.WORKER_COUNT)


def build_figure_service() -> FigureService:
    return FigureService(
        build_run_service(),
        build_sweep_service(),
        build_repository(),
        tw_trajectories=settings.TW_TRAJECTORIES,
        fft_workers=settings.FFT_WORKERS,
    )
