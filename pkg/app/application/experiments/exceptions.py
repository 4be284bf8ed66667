from pathlib import Path

from app.core.exceptions import DomainError


class RunNotFoundError(DomainError):
    def __init__(self, run_id: str):
        self.run_id = run_id
        super().__init__(f"Run with id={run_id} not found")


class RecipeNotFoundError(DomainError):
    def __init__(self, name: str, known: tuple[str, ...]):
        self.name = name
        self.known = known
        super().__init__(f"Unknown figure recipe '{name}'; known recipes: {', '.join(known)}")


class PulseOptimizationError(DomainError):
    """Поиск времени импульса невозможен для данной конфигурации."""

    def __init__(self, message: str):
        super().__init__(message)


class SnapshotFormatError(DomainError):
    def __init__(self, path: Path, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"Snapshot {path} is unreadable: {detail}")


class SeriesAnalysisError(DomainError):
    """Ряд непригоден для анализа (мало точек, нет колебаний)."""

    def __init__(self, message: str):
        super().__init__(message)
