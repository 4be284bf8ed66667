"""Подбор времени π-импульса по пиковой QFI завершённого прогона."""
from collections.abc import Sequence
from typing import Protocol

from loguru import logger
from scipy import optimize

from app.application.experiments.dto import PulseOptimizationResult, PulseSchedule, RunConfig, RunRecord
from app.application.experiments.exceptions import PulseOptimizationError
from app.core.field.thomas_fermi import tf_tcat

SEARCH_WINDOW = (0.3, 0.7)
TOLERANCE_FRACTION = 0.01


class RunExecutor(Protocol):
    def execute(self, config: RunConfig, pulse_times: Sequence[float], persist: bool = True) -> RunRecord: ...

    def persist(self, record: RunRecord) -> RunRecord: ...


class PulseService:
    def __init__(self, executor: RunExecutor):
        self.executor = executor

    def optimize(self, config: RunConfig) -> PulseOptimizationResult:
        """Ограниченный метод Брента по τ_p ∈ [0.3, 0.7]·τ_cat^TF, цель: F_peak прогона.

        Остановка при ширине интервала < 1% τ_cat^TF; при исчерпании бюджета
        возвращается лучший из посчитанных прогонов с флагом budget_exhausted.
        """
        if config.engine != "multimode":
            raise PulseOptimizationError(f"Pulse optimisation needs the multimode engine, got '{config.engine}'")
        tcat = config.pulse.reference_tcat or tf_tcat(config.mu_target, config.n_atoms, config.lambda_, config.kappa)
        lower = SEARCH_WINDOW[0] * tcat
        upper = min(SEARCH_WINDOW[1] * tcat, config.t_final * (1.0 - 1e-9))
        if upper <= lower:
            raise PulseOptimizationError(
                f"t_final={config.t_final} leaves no room for a pulse in [{lower:.6g}, {SEARCH_WINDOW[1] * tcat:.6g}]"
            )
        if config.lambda_ == 1.0:
            logger.warning("Pulse optimisation on a symmetric condensate: the objective is expected to be flat")

        evaluations: dict[float, RunRecord] = {}

        def objective(tau_pulse: float) -> float:
            tau_pulse = float(tau_pulse)
            if tau_pulse not in evaluations:
                trial = config.model_copy(update={"pulse": PulseSchedule(mode="fixed", tau=tau_pulse)})
                evaluations[tau_pulse] = self.executor.execute(trial, [tau_pulse], persist=False)
                logger.debug(f"Pulse trial tau_p={tau_pulse:.6g}: f_peak={_f_peak(evaluations[tau_pulse])}")
            return -_f_peak(evaluations[tau_pulse])

        logger.info(
            f"Optimising pulse time in [{lower:.6g}, {upper:.6g}] (tau_cat_tf={tcat:.6g}, budget={config.pulse.budget})"
        )
        result = optimize.minimize_scalar(
            objective,
            bounds=(lower, upper),
            method="bounded",
            options={"xatol": TOLERANCE_FRACTION * tcat, "maxiter": config.pulse.budget},
        )
        budget_exhausted = not result.success
        if budget_exhausted:
            logger.warning(f"Pulse search stopped after {len(evaluations)} runs without converging; using best so far")

        best_tau = max(evaluations, key=lambda tau: _f_peak(evaluations[tau]))
        best = self.executor.persist(evaluations[best_tau])
        logger.info(f"Best pulse time tau_p={best_tau:.6g} with f_peak={_f_peak(best):.6g}")
        return PulseOptimizationResult(
            tau_pulse=best_tau,
            record=best,
            evaluations=len(evaluations),
            converged=bool(result.success),
            budget_exhausted=budget_exhausted,
            objective_by_tau={f"{tau:.10g}": _f_peak(record) for tau, record in sorted(evaluations.items())},
        )


def _f_peak(record: RunRecord) -> float:
    return record.peak.f_peak if record.succeeded and record.peak is not None else 0.0
