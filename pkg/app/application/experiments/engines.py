"""Адаптеры движков: точная одномодовая модель, truncated Wigner и многомодовый движок.

Все движки отдают общий TimeSeries на сетке τ из sample_count точек и применяют
π-импульсы в моменты pulse_times (импульс в момент отсчёта применяется после него).
"""
from collections.abc import Callable, Iterator, Sequence
from pathlib import Path

import numpy as np
from loguru import logger

from app.application.experiments.dto import RunConfig, RunDiagnostics, TimeSeries
from app.application.experiments.ports import EngineResult, SnapshotStore
from app.core.dicke.entities import DickeState, css_amplitudes
from app.core.dicke.qfi import qfi_from_moments
from app.core.field.ground_state import GroundState, calibrate_ground_state, solve_ground_state
from app.core.field.grid import Grid1D
from app.core.field.propagation import substeps
from app.core.field.thomas_fermi import tf_tcat, twisting_factor
from app.core.field.twisting import chi_instantaneous, single_mode_rates
from app.core.multimode.dynamics import apply_pi_pulse, component_energies, init_state, step_all
from app.core.multimode.entities import MultimodeState
from app.core.multimode.exceptions import InvalidMultimodeStateError
from app.core.multimode.observables import assemble_moments, decompose, mode_overlap, overlaps, qfi_multimode
from app.core.wigner.entities import TwEnsemble

EQUATOR = (np.pi / 2.0, np.pi / 2.0)
EXACT_TOLERANCE = 1e-8
STATISTICAL_TOLERANCE = 0.05
NORM_DRIFT_PER_1000_STEPS = 1e-8
ENERGY_DRIFT_BOUND = 1e-6


def prepare_ground_state(config: RunConfig, workers: int | None = None) -> GroundState:
    """Основное состояние с полным N: явное g₀ или калибровка по μ."""
    grid = Grid1D.for_chemical_potential(config.mu_target, config.grid.n_points, config.grid.half_width)
    if config.g0 is not None:
        return solve_ground_state(config.g0, config.n_atoms, grid, workers=workers)
    return calibrate_ground_state(config.mu_target, config.n_atoms, grid, workers=workers)


def sample_times(start: float, config: RunConfig) -> np.ndarray:
    return np.linspace(start, config.t_final, config.sample_count)


def walk_schedule(times: np.ndarray, pulse_times: Sequence[float]) -> Iterator[tuple[str, float]]:
    """События ("sample" | "pulse", τ) в хронологическом порядке."""
    pending = sorted(t for t in pulse_times if times[0] <= t < times[-1])
    for t in times:
        while pending and pending[0] < t:
            yield "pulse", pending.pop(0)
        yield "sample", float(t)


def tf_cat_time(config: RunConfig) -> float | None:
    if twisting_factor(config.lambda_, config.kappa) <= 0:
        return None
    return tf_tcat(config.mu_target, config.n_atoms, config.lambda_, config.kappa)


class _SingleModeRates:
    """(χ, ω, диагностика) одномодовой модели из конфигурации."""

    def __init__(self, config: RunConfig, workers: int | None):
        self.g0: float | None = None
        self.mu: float | None = None
        if config.chi is not None:
            self.chi, self.detuning = float(config.chi), 0.0
            return
        ground = prepare_ground_state(config, workers)
        self.chi, self.detuning = single_mode_rates(ground, config.lambda_, config.kappa)
        self.g0, self.mu = ground.g0, ground.mu


class DickeEngine:
    name = "dicke"
    integrity_tolerance = EXACT_TOLERANCE

    def __init__(self, fft_workers: int | None = None):
        self.fft_workers = fft_workers

    def simulate(self, config: RunConfig, pulse_times: Sequence[float]) -> EngineResult:
        rates = _SingleModeRates(config, self.fft_workers)
        logger.debug(f"Dicke engine: chi={rates.chi:.8g} detuning={rates.detuning:.6g}")
        state = DickeState.make_css(config.n_atoms, *EQUATOR)
        clock = 0.0
        columns: dict[str, list[float]] = {k: [] for k in ("tau", "qfi", "f0", "f1", "f2")}
        norm_drift = 0.0
        for kind, t in walk_schedule(sample_times(0.0, config), pulse_times):
            elapsed = t - clock
            state = state.evolve_oat(rates.chi * elapsed).rotate("z", rates.detuning * elapsed)
            clock = t
            if kind == "pulse":
                state = state.rotate("x", np.pi)
                continue
            moments = state.spin_moments()
            _, qfi = qfi_from_moments(moments)
            _append(columns, t, qfi, moments.decomposition())
            norm_drift = max(norm_drift, abs(state.norm() - 1.0))

        return EngineResult(
            series=TimeSeries(**columns, chi=[rates.chi] * len(columns["tau"])),
            diagnostics=RunDiagnostics(
                g0=rates.g0,
                mu=rates.mu,
                chi=rates.chi,
                detuning=rates.detuning,
                norm_drift=norm_drift,
                tau_cat_tf=tf_cat_time(config) if config.chi is None else None,
                pulse_times=list(pulse_times),
            ),
        )


class TruncatedWignerEngine:
    name = "tw"
    integrity_tolerance = STATISTICAL_TOLERANCE

    def __init__(self, fft_workers: int | None = None):
        self.fft_workers = fft_workers

    def simulate(self, config: RunConfig, pulse_times: Sequence[float]) -> EngineResult:
        rates = _SingleModeRates(config, self.fft_workers)
        c_a, c_b = css_amplitudes(*EQUATOR)
        ensemble = TwEnsemble.sample_css(config.n_atoms, c_a, c_b, config.n_traj, config.seed)
        logger.debug(f"TW engine: {config.n_traj} trajectories, {ensemble.rng_algorithm} seed={config.seed}")
        clock = 0.0
        columns: dict[str, list[float]] = {k: [] for k in ("tau", "qfi", "f0", "f1", "f2")}
        for kind, t in walk_schedule(sample_times(0.0, config), pulse_times):
            ensemble = ensemble.evolve(rates.chi, t - clock, rates.detuning)
            clock = t
            if kind == "pulse":
                ensemble = ensemble.apply_pi_pulse()
                continue
            moments = ensemble.moments()
            _, qfi = qfi_from_moments(moments)
            _append(columns, t, qfi, moments.decomposition())

        return EngineResult(
            series=TimeSeries(**columns, chi=[rates.chi] * len(columns["tau"])),
            diagnostics=RunDiagnostics(
                g0=rates.g0,
                mu=rates.mu,
                chi=rates.chi,
                detuning=rates.detuning,
                rng_algorithm=ensemble.rng_algorithm,
                seed=config.seed,
                pulse_times=list(pulse_times),
            ),
        )


class MultimodeEngine:
    name = "multimode"
    integrity_tolerance = EXACT_TOLERANCE

    def __init__(self, snapshot_store: SnapshotStore | None = None, fft_workers: int | None = None):
        self.snapshot_store = snapshot_store
        self.fft_workers = fft_workers

    def simulate(self, config: RunConfig, pulse_times: Sequence[float]) -> EngineResult:
        ground = prepare_ground_state(config, self.fft_workers)
        g0, lam, kappa = ground.g0, config.lambda_, config.kappa
        state = self._initial_state(config, ground)
        dt = config.resolved_dt()
        logger.info(
            f"Multimode engine: N={config.n_atoms} mu={ground.mu:.6g} g0={g0:.6g} "
            f"lambda={lam} kappa={kappa} dt={dt} t0={state.time} t_final={config.t_final}"
        )

        def energies(current: MultimodeState) -> np.ndarray:
            return component_energies(current, g0, lam, kappa, self.fft_workers)

        reference_energy = energies(state)
        reference_jz = abs(_probability_moment(state, 1))
        reference_jz_sq = _probability_moment(state, 2)
        columns: dict[str, list[float]] = {
            k: []
            for k in (
                "tau", "qfi", "f0", "f1", "f2", "chi",
                "gamma_ab0", "gamma_aa2", "gamma_bb1_pow", "gamma_bb2_pow", "gamma_bb3_pow",
            )
        }
        messages: list[str] = []
        norm_drift = energy_drift = 0.0
        total_steps = 0
        used_dt = dt

        for kind, t in walk_schedule(sample_times(state.time, config), pulse_times):
            if t > state.time:
                n_steps, used_dt = substeps(t - state.time, dt)
                state = step_all(state, used_dt, n_steps, g0, lam, kappa, workers=self.fft_workers)
                total_steps += n_steps
            if kind == "pulse":
                logger.debug(f"Applying pi-pulse at tau={t:.6g}")
                state = apply_pi_pulse(state)
                reference_energy = energies(state)
                continue

            self._measure(state, g0, lam, kappa, columns)
            current_energy = energies(state)
            energy_drift = max(
                energy_drift,
                float(np.max(np.abs(current_energy - reference_energy) / np.maximum(np.abs(reference_energy), 1.0))),
            )
            norm_drift = max(norm_drift, float(np.max(np.abs(state.field_norms() - 1.0))))
            jz, jz_sq = abs(_probability_moment(state, 1)), _probability_moment(state, 2)
            if abs(jz - reference_jz) > EXACT_TOLERANCE * config.n_atoms or abs(jz_sq - reference_jz_sq) > EXACT_TOLERANCE * config.n_atoms**2:
                messages.append(f"conserved Jz/Jz^2 drifted at tau={t:.6g}")

        allowed = NORM_DRIFT_PER_1000_STEPS * max(1.0, total_steps / 1000.0)
        if norm_drift > allowed:
            messages.append(f"field norm drift {norm_drift:.3e} exceeds {allowed:.3e} over {total_steps} steps")
        if energy_drift > ENERGY_DRIFT_BOUND:
            logger.warning(
                f"Relative energy drift {energy_drift:.3e} exceeds {ENERGY_DRIFT_BOUND:.0e} "
                f"(dt={used_dt:.3g}, {total_steps} steps)"
            )

        return EngineResult(
            series=TimeSeries(**columns),
            diagnostics=RunDiagnostics(
                dt=used_dt,
                n_steps=total_steps,
                g0=g0,
                mu=ground.mu,
                chi=float(chi_instantaneous(ground.phi0, ground.phi0, ground.grid, g0, lam, kappa)),
                tau_cat_tf=tf_cat_time(config),
                pulse_times=list(pulse_times),
                norm_drift=norm_drift,
                energy_drift=energy_drift,
                integrity_messages=messages,
            ),
            final_state=state,
        )

    def _initial_state(self, config: RunConfig, ground: GroundState) -> MultimodeState:
        if config.resume_from is None:
            return init_state(config.n_atoms, ground)
        if self.snapshot_store is None:
            raise InvalidMultimodeStateError("Resuming a run requires a snapshot store")
        state = self.snapshot_store.load(Path(config.resume_from))
        if (state.n_atoms, state.grid.n_points, state.grid.half_width) != (
            config.n_atoms,
            ground.grid.n_points,
            ground.grid.half_width,
        ):
            raise InvalidMultimodeStateError(
                f"Snapshot (N={state.n_atoms}, n_points={state.grid.n_points}, L={state.grid.half_width}) "
                "does not match the run configuration"
            )
        if state.time >= config.t_final:
            raise InvalidMultimodeStateError(f"Snapshot time {state.time} is not before t_final={config.t_final}")
        logger.info(f"Resuming from snapshot {config.resume_from} at tau={state.time}")
        return state

    @staticmethod
    def _measure(
        state: MultimodeState,
        g0: float,
        lambda_: float,
        kappa: float,
        columns: dict[str, list[float]],
    ) -> None:
        table = overlaps(state)
        table.verify()
        moments = assemble_moments(state, table)
        _, qfi = qfi_multimode(moments)
        _append(columns, state.time, qfi, decompose(moments))

        center = state.n_atoms // 2
        m_center = float(state.m_values[center])
        columns["chi"].append(
            float(chi_instantaneous(state.fields[0, center], state.fields[1, center], state.grid, g0, lambda_, kappa))
        )
        columns["gamma_ab0"].append(float(abs(table.get("a", "b", 0)[center])))
        columns["gamma_aa2"].append(_overlap_or_none(lambda: abs(mode_overlap(state, "a", "a", 2, m_center))))
        for order in (1, 2, 3):
            columns[f"gamma_bb{order}_pow"].append(
                _overlap_or_none(lambda: abs(mode_overlap(state, "b", "b", order, m_center)) ** (state.n_atoms / 2.0))
            )


def _append(columns: dict[str, list[float]], tau: float, qfi: float, parts: tuple[float, float, float]) -> None:
    columns["tau"].append(float(tau))
    columns["qfi"].append(float(qfi))
    for name, value in zip(("f0", "f1", "f2"), parts):
        columns[name].append(float(value))


def _probability_moment(state: MultimodeState, power: int) -> float:
    return float(np.sum(state.probabilities * state.m_values**power))


def _overlap_or_none(compute: Callable[[], float]) -> float | None:
    try:
        return float(compute())
    except InvalidMultimodeStateError:
        return None
