import hashlib
import re
import time
from collections.abc import Mapping, Sequence

import numpy as np
from loguru import logger

from app.application.experiments.analysis import find_peak
from app.application.experiments.dto import (
    PeakSummary,
    PulseOptimizationResult,
    RunConfig,
    RunDiagnostics,
    RunRecord,
    TimeSeries,
)
from app.application.experiments.exceptions import RunNotFoundError
from app.application.experiments.ports import RunRepository, SimulationEngine, SnapshotStore
from app.application.experiments.services.pulse_service import PulseService
from app.core.exceptions import NumericalIntegrityError


def make_run_id(config: RunConfig) -> str:
    """Имя прогона + хеш канонического JSON конфигурации (без output_dir)."""
    payload = config.model_dump_json(by_alias=True, exclude={"output_dir"})
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]
    slug = re.sub(r"[^A-Za-z0-9_.-]+", "-", config.name).strip("-") or "run"
    return f"{slug}-{digest}"


def pulse_times_for(config: RunConfig) -> list[float]:
    if config.pulse.mode == "fixed":
        return [float(config.pulse.tau)]
    return []


def integrity_messages(series: TimeSeries, n_atoms: int, tolerance: float) -> list[str]:
    """Границы 0 ≤ F ≤ N², −N² ≤ F₁ ≤ 0, |F₂| ≤ N²/2 в каждой точке ряда.

    F₂ = 2(⟨J_y²⟩ − ⟨J_x²⟩) отрицательна при нечётном N и при расстройке ω ≠ 0.
    """
    scale = float(n_atoms) ** 2
    slack = tolerance * scale
    qfi, f1, f2 = (np.asarray(values, dtype=float) for values in (series.qfi, series.f1, series.f2))
    checks = {
        "qfi": (qfi, 0.0, scale),
        "f1": (f1, -scale, 0.0),
        "f2": (f2, -scale / 2.0, scale / 2.0),
    }
    messages = []
    for name, (values, lower, upper) in checks.items():
        if not np.all(np.isfinite(values)):
            messages.append(f"{name} contains non-finite samples")
            continue
        outside = (values < lower - slack) | (values > upper + slack)
        if np.any(outside):
            index = int(np.argmax(outside))
            messages.append(
                f"{name}={values[index]:.10g} at tau={series.tau[index]:.6g} outside [{lower:.6g}, {upper:.6g}]"
            )
    return messages


class RunService:
    def __init__(
        self,
        engines: Mapping[str, SimulationEngine],
        repository: RunRepository | None = None,
        snapshot_store: SnapshotStore | None = None,
    ):
        self.engines = engines
        self.repository = repository
        self.snapshot_store = snapshot_store

    def run(self, config: RunConfig) -> RunRecord:
        """Один прогон; ошибки движка превращаются в запись со status='failed'."""
        if config.pulse.mode == "optimize":
            return self.optimize_pulse(config).record
        return self.execute(config, pulse_times_for(config))

    def optimize_pulse(self, config: RunConfig) -> PulseOptimizationResult:
        return PulseService(self).optimize(config)

    def execute(self, config: RunConfig, pulse_times: Sequence[float], persist: bool = True) -> RunRecord:
        run_id = make_run_id(config)
        logger.info(
            f"Starting run {run_id}: engine={config.engine} N={config.n_atoms} mu={config.mu_target} "
            f"lambda={config.lambda_} kappa={config.kappa} pulses={list(pulse_times)}"
        )
        started = time.perf_counter()
        try:
            engine = self.engines[config.engine]
            result = engine.simulate(config, pulse_times)
            messages = result.diagnostics.integrity_messages + integrity_messages(
                result.series, config.n_atoms, engine.integrity_tolerance
            )
            peak = find_peak(result.series.tau, result.series.qfi)
            if peak.at_boundary:
                logger.warning(f"Run {run_id}: QFI maximum at the series boundary tau={peak.tau_peak:.6g}")
            if messages:
                logger.warning(f"Run {run_id} failed integrity checks: {'; '.join(messages)}")
            if config.snapshot_path is not None:
                self._save_snapshot(config, result.final_state)
            record = RunRecord(
                run_id=run_id,
                config=config,
                status="ok",
                series=result.series,
                peak=PeakSummary(tau_peak=peak.tau_peak, f_peak=peak.f_peak, at_boundary=peak.at_boundary),
                diagnostics=result.diagnostics.model_copy(
                    update={"integrity_ok": not messages, "integrity_messages": messages}
                ),
            )
        except Exception as exc:
            logger.exception(f"Run {run_id} failed: {exc}")
            record = RunRecord(
                run_id=run_id,
                config=config,
                status="failed",
                error=f"{type(exc).__name__}: {exc}",
                diagnostics=RunDiagnostics(
                    pulse_times=list(pulse_times),
                    integrity_ok=False,
                    integrity_messages=[str(exc)],
                ),
            )

        record.diagnostics.wall_clock_s = time.perf_counter() - started
        if persist:
            record = self.persist(record)
        logger.info(
            f"Run {run_id} finished: status={record.status} wall_clock={record.diagnostics.wall_clock_s:.2f}s"
            + (f" tau_peak={record.peak.tau_peak:.6g} f_peak={record.peak.f_peak:.6g}" if record.peak else "")
        )
        return record

    def persist(self, record: RunRecord) -> RunRecord:
        if self.repository is None:
            return record
        path = self.repository.save(record)
        return record.model_copy(update={"output_path": path})

    def get_run(self, run_id: str) -> RunRecord:
        if self.repository is None:
            raise RunNotFoundError(run_id)
        return self.repository.load(run_id)

    def _save_snapshot(self, config: RunConfig, state) -> None:
        if state is None:
            raise NumericalIntegrityError("snapshot", f"engine '{config.engine}' does not produce a field state")
        if self.snapshot_store is None:
            raise NumericalIntegrityError("snapshot", "no snapshot store configured")
        path = self.snapshot_store.save(state, config.snapshot_path)
        logger.info(f"Saved snapshot at tau={state.time:.6g} to {path}")
