from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor

from loguru import logger

from app.application.experiments.analysis import gamma2_period
from app.application.experiments.dto import RunConfig, RunDiagnostics, RunRecord, SweepParameter, SweepRequest, SweepResult, SweepRow
from app.application.experiments.ports import RunRepository
from app.application.experiments.services.run_service import make_run_id
from app.core.field.thomas_fermi import tf_tcat, twisting_factor

RunMember = Callable[[RunConfig], RunRecord]

FIELD_BY_PARAMETER: dict[str, str] = {"mu": "mu_target", "lambda": "lambda_", "kappa": "kappa", "n": "n_atoms"}


def member_config(base: RunConfig, vary: SweepParameter, value: float) -> RunConfig:
    """Копия базовой конфигурации с заменённым параметром (с повторной валидацией)."""
    field = FIELD_BY_PARAMETER[vary]
    data = base.model_dump()
    data[field] = int(value) if vary == "n" else float(value)
    data["name"] = f"{base.name}-{vary}{value:g}"
    return RunConfig.model_validate(data)


def summary_row(value: float, record: RunRecord) -> SweepRow:
    config = record.config
    n = config.n_atoms
    mu = record.diagnostics.mu if record.diagnostics.mu is not None else config.mu_target
    tau_cat_tf = None
    if twisting_factor(config.lambda_, config.kappa) > 0:
        tau_cat_tf = tf_tcat(config.mu_target, n, config.lambda_, config.kappa)
    series = record.series
    return SweepRow(
        value=value,
        run_id=record.run_id,
        status=record.status,
        n_atoms=n,
        mu=mu,
        mu_over_n=mu / n,
        f_peak_over_n2=record.peak.f_peak / n**2 if record.peak else None,
        tau_peak=record.peak.tau_peak if record.peak else None,
        tau_cat_tf=tau_cat_tf,
        gamma2_period=gamma2_period(series.tau, series.gamma_aa2) if series is not None else None,
        at_boundary=record.peak.at_boundary if record.peak else None,
    )


class SweepService:
    def __init__(self, run_member: RunMember, repository: RunRepository | None = None, default_workers: int = 1):
        self.run_member = run_member
        self.repository = repository
        self.default_workers = default_workers

    def sweep(self, request: SweepRequest) -> SweepResult:
        configs = [member_config(request.base, request.vary, value) for value in request.values]
        return self.run_members(
            request.vary, request.values, configs, workers=request.workers, name=request.base.name
        )

    def run_members(
        self,
        vary: SweepParameter,
        values: Sequence[float],
        configs: Sequence[RunConfig],
        *,
        workers: int | None = None,
        name: str = "sweep",
    ) -> SweepResult:
        """Прогоны в пуле процессов; порядок строк совпадает с порядком values."""
        workers = workers or self.default_workers
        logger.info(f"Starting sweep '{name}' over {vary}={list(values)} with {workers} worker(s)")
        if workers <= 1 or len(configs) == 1:
            records = [self._guarded(config) for config in configs]
        else:
            with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
                futures = [pool.submit(self.run_member, config) for config in configs]
                records = [self._collect(future, config) for future, config in zip(futures, configs)]

        for value, record in zip(values, records):
            if record.status != "ok":
                logger.warning(f"Sweep member {vary}={value} failed: {record.error}")
        result = SweepResult(
            vary=vary,
            rows=[summary_row(value, record) for value, record in zip(values, records)],
            records=records,
        )
        if self.repository is not None:
            result = result.model_copy(update={"summary_path": self.repository.save_sweep(result, name)})
        logger.info(f"Sweep '{name}' finished: {sum(r.status == 'ok' for r in records)}/{len(records)} runs ok")
        return result

    def _guarded(self, config: RunConfig) -> RunRecord:
        try:
            return self.run_member(config)
        except Exception as exc:
            return _failed(config, exc)

    @staticmethod
    def _collect(future, config: RunConfig) -> RunRecord:
        try:
            return future.result()
        except Exception as exc:
            logger.error(f"Sweep worker crashed for {config.name}: {exc}")
            return _failed(config, exc)


def _failed(config: RunConfig, exc: Exception) -> RunRecord:
    return RunRecord(
        run_id=make_run_id(config),
        config=config,
        status="failed",
        error=f"{type(exc).__name__}: {exc}",
        diagnostics=RunDiagnostics(integrity_ok=False, integrity_messages=[str(exc)]),
    )
