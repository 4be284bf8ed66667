import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln, xlogy

from app.core.field.exceptions import FieldInstabilityError
from app.core.field.ground_state import GroundState
from app.core.field.propagation import Couplings, energy, split_step
from app.core.multimode.entities import MultimodeState
from app.core.multimode.exceptions import ComponentInstabilityError, InvalidMultimodeStateError

DEFAULT_C_A = 1.0 / np.sqrt(2.0)
DEFAULT_C_B = 1j / np.sqrt(2.0)
AMPLITUDE_TOLERANCE = 1e-12


def init_state(
    n_atoms: int,
    ground: GroundState,
    c_a: complex = DEFAULT_C_A,
    c_b: complex = DEFAULT_C_B,
) -> MultimodeState:
    """Все компоненты делят φ₀; d_m = √(N!/(n_a!n_b!)) c_a^{n_a} c_b^{n_b} в лог-пространстве."""
    if n_atoms < 1:
        raise InvalidMultimodeStateError(f"n_atoms must be positive, got {n_atoms}")
    if abs(abs(c_a) ** 2 + abs(c_b) ** 2 - 1.0) > AMPLITUDE_TOLERANCE:
        raise InvalidMultimodeStateError(f"|c_a|^2 + |c_b|^2 must be 1, got c_a={c_a}, c_b={c_b}")
    n_a = np.arange(n_atoms + 1)
    n_b = n_atoms - n_a
    log_binom = gammaln(n_atoms + 1) - gammaln(n_a + 1) - gammaln(n_b + 1)
    log_abs = 0.5 * log_binom + xlogy(n_a, abs(c_a)) + xlogy(n_b, abs(c_b))
    phase = n_a * np.angle(c_a) + n_b * np.angle(c_b)

    fields = np.broadcast_to(ground.phi0, (2, n_atoms + 1, ground.grid.n_points)).astype(np.complex128)
    state = MultimodeState(
        n_atoms=n_atoms,
        log_abs=log_abs,
        phase=np.mod(phase, 2.0 * np.pi),
        fields=fields,
        action=np.zeros(n_atoms + 1),
        grid=ground.grid,
        time=0.0,
    )
    state.validate()
    return state


def component_couplings(state: MultimodeState, g0: float, lambda_: float, kappa: float) -> Couplings:
    return Couplings.for_populations(state.n_a, state.n_b, g0, lambda_, kappa)


def action_rates(
    fields: NDArray[np.complex128],
    state: MultimodeState,
    g0: float,
    lambda_: float,
    kappa: float,
) -> NDArray[np.float64]:
    """dA_m/dτ = −[(g̃_aa/2)n_a(n_a−1)∫|φ_a|⁴ + (g̃_bb/2)n_b(n_b−1)∫|φ_b|⁴ + g̃_ab n_a n_b ∫|φ_a|²|φ_b|²]."""
    n_a = state.n_a.astype(float)
    n_b = state.n_b.astype(float)
    density_a = np.abs(fields[0]) ** 2
    density_b = np.abs(fields[1]) ** 2
    grid = state.grid
    return -(
        0.5 * g0 * n_a * (n_a - 1.0) * grid.integrate(density_a**2)
        + 0.5 * lambda_ * g0 * n_b * (n_b - 1.0) * grid.integrate(density_b**2)
        + kappa * g0 * n_a * n_b * grid.integrate(density_a * density_b)
    )


def component_energies(
    state: MultimodeState,
    g0: float,
    lambda_: float,
    kappa: float,
    workers: int | None = None,
) -> NDArray[np.float64]:
    """Энергия каждой компоненты (сохраняется между импульсами)."""
    couplings = component_couplings(state, g0, lambda_, kappa)
    return energy(state.fields, state.grid, couplings, (state.n_a, state.n_b), workers)


def step_all(
    state: MultimodeState,
    dt: float,
    n_steps: int,
    g0: float,
    lambda_: float,
    kappa: float,
    *,
    workers: int | None = None,
) -> MultimodeState:
    """Одновременный split-step всех компонент; A_m накапливается по средней точке шага, d_m не меняются."""
    couplings = component_couplings(state, g0, lambda_, kappa)
    action = state.action.copy()

    def accumulate(fields: NDArray[np.complex128], _time: float) -> None:
        action[:] += dt * action_rates(fields, state, g0, lambda_, kappa)

    try:
        fields = split_step(
            state.fields,
            state.grid,
            couplings,
            dt,
            n_steps,
            on_midpoint=accumulate,
            workers=workers,
            start_time=state.time,
        )
    except FieldInstabilityError as exc:
        index = exc.batch_index if exc.batch_index is not None else 0
        raise ComponentInstabilityError(m=float(state.m_values[index]), step=exc.step, time=exc.time) from exc
    return state.with_fields(fields, action, state.time + n_steps * dt)


def apply_pi_pulse(state: MultimodeState) -> MultimodeState:
    """Мгновенный exp(−iJ_xπ): компонента −m получает (φ_{b,m}, φ_{a,m}, A_m), d'_{−m} = (−i)^N d_m."""
    return MultimodeState(
        n_atoms=state.n_atoms,
        log_abs=state.log_abs[::-1].copy(),
        phase=np.mod(state.phase[::-1] - state.n_atoms * np.pi / 2.0, 2.0 * np.pi),
        fields=state.fields[::-1, ::-1].copy(),
        action=state.action[::-1].copy(),
        grid=state.grid,
        time=state.time,
    )
