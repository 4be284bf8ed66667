from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from app.application.experiments.dto import RunConfig, RunDiagnostics, RunRecord, SweepResult, TimeSeries
from app.core.multimode.entities import MultimodeState


@dataclass
class EngineResult:
    series: TimeSeries
    diagnostics: RunDiagnostics
    final_state: MultimodeState | None = None


class SimulationEngine(Protocol):
    name: str
    integrity_tolerance: float

    def simulate(self, config: RunConfig, pulse_times: Sequence[float]) -> EngineResult: ...


class RunRepository(Protocol):
    def save(self, record: RunRecord) -> Path: ...

    def load(self, run_id: str) -> RunRecord: ...

    def save_sweep(self, result: SweepResult, name: str) -> Path: ...

    def write_table(self, path: Path, columns: dict[str, Sequence[float]]) -> Path: ...


class SnapshotStore(Protocol):
    def save(self, state: MultimodeState, path: Path) -> Path: ...

    def load(self, path: Path) -> MultimodeState: ...
