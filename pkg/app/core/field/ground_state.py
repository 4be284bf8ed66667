"""Основное состояние φ₀ уравнения (H₀ + N g|φ₀|²)φ₀ = μφ₀ и калибровка g₀ по μ."""
from dataclasses import dataclass

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from scipy import linalg, optimize

from app.core.field.exceptions import GridError, GroundStateConvergenceError, InvalidParameterError
from app.core.field.grid import Grid1D
from app.core.field.thomas_fermi import tf_g0

DEFAULT_TOLERANCE = 1e-12
MAX_ITERATIONS = 1_000_000
MAX_IMAGINARY_STEP = 1e-2
STEP_PER_MU = 0.1
LADDER_REFINEMENT = 10.0
RESIDUAL_BOUND = 1e-8
NEWTON_ITERATIONS = 20
LINE_SEARCH_HALVINGS = 12
RADIUS_FRACTION = 0.8
NON_INTERACTING_MU = 0.5


@dataclass(frozen=True, eq=False)
class GroundState:
    phi0: NDArray[np.complex128]
    mu: float
    g0: float
    n_atoms: int
    grid: Grid1D
    residual: float
    iterations: int


def solve_ground_state(
    g_eff: float,
    n_atoms: int,
    grid: Grid1D,
    tol: float = DEFAULT_TOLERANCE,
    *,
    initial: NDArray[np.complex128] | None = None,
    max_iterations: int = MAX_ITERATIONS,
    workers: int | None = None,
) -> GroundState:
    """Распространение в мнимом времени с перенормировкой и доводка методом Ньютона.

    Мнимое время идёт по лестнице из двух шагов: dτ = min(1e-2, 0.1/μ_TF) и dτ/10.
    Каждый уровень получает собственный бюджет max_iterations и идёт до относительного
    изменения энергии < tol; исчерпанный бюджет уровня не останавливает лестницу.
    Ньютон с дроблением шага решает вещественную окаймлённую систему для (φ, μ)
    до невязки ‖(H₀ + Ng|φ|² − μ)φ‖ ≤ 1e-8‖φ‖.
    """
    if not np.isfinite(g_eff) or g_eff < 0:
        raise InvalidParameterError(f"g_eff must be non-negative, got {g_eff}")
    if n_atoms < 1:
        raise InvalidParameterError(f"n_atoms must be positive, got {n_atoms}")

    interaction = n_atoms * g_eff
    mu_guess = _tf_chemical_potential(interaction)
    phi = _initial_guess(grid, interaction, mu_guess) if initial is None else np.abs(np.asarray(initial)).astype(float)
    phi = phi / np.sqrt(grid.norm(phi))

    iterations = 0
    for dtau in imaginary_time_ladder(mu_guess):
        phi, used, converged = _imaginary_time(phi, grid, interaction, dtau, tol, max_iterations, workers)
        iterations += used
        if not converged:
            logger.warning(
                f"Imaginary time at dtau={dtau:.3g} used its budget of {max_iterations} steps without converging"
            )

    phi, mu = _newton_polish(phi, grid, interaction)
    residual = _relative_residual(phi, grid, interaction, mu, workers)
    if residual > RESIDUAL_BOUND:
        raise GroundStateConvergenceError(iterations=iterations, residual=residual)

    radius = np.sqrt(2.0 * mu)
    if not grid.fits_radius(radius, RADIUS_FRACTION):
        raise GridError(
            f"Grid half-width {grid.half_width:.3f} too small for TF radius {radius:.3f} "
            f"(needs radius <= {RADIUS_FRACTION} * half_width)"
        )

    logger.debug(f"Ground state solved: g={g_eff:.6g} N={n_atoms} mu={mu:.8g} iterations={iterations}")
    return GroundState(
        phi0=phi.astype(np.complex128),
        mu=float(mu),
        g0=float(g_eff),
        n_atoms=n_atoms,
        grid=grid,
        residual=float(residual),
        iterations=iterations,
    )


def calibrate_ground_state(
    mu_target: float,
    n_atoms: int,
    grid: Grid1D,
    tol: float = 1e-8,
    *,
    workers: int | None = None,
) -> GroundState:
    """Подбор g₀ ≥ 0 с μ(g₀) = mu_target: brentq в скобке [0, g_TF] с расширением вверх."""
    if not np.isfinite(mu_target) or mu_target < NON_INTERACTING_MU:
        raise InvalidParameterError(f"mu_target must be >= 1/2, got {mu_target}")
    if n_atoms < 1:
        raise InvalidParameterError(f"n_atoms must be positive, got {n_atoms}")

    if mu_target - NON_INTERACTING_MU <= tol * max(1.0, mu_target):
        return solve_ground_state(0.0, n_atoms, grid, workers=workers)

    cache: dict[float, GroundState] = {}
    warm: list[NDArray[np.complex128]] = []

    def mismatch(g: float) -> float:
        if g not in cache:
            state = solve_ground_state(g, n_atoms, grid, initial=warm[-1] if warm else None, workers=workers)
            cache[g] = state
            warm.append(state.phi0)
        return cache[g].mu - mu_target

    upper = tf_g0(mu_target, n_atoms)
    while mismatch(upper) < 0.0:
        upper *= 2.0

    g0 = optimize.brentq(mismatch, 0.0, upper, xtol=1e-14, rtol=1e-12)
    state = cache.get(g0) or solve_ground_state(g0, n_atoms, grid, initial=warm[-1], workers=workers)
    if abs(state.mu - mu_target) > tol * max(1.0, mu_target):
        raise GroundStateConvergenceError(iterations=len(cache), residual=abs(state.mu - mu_target))
    logger.info(f"Calibrated g0={g0:.8g} for mu={mu_target} N={n_atoms} ({len(cache)} solves)")
    return state


def calibrate_g0(
    mu_target: float,
    n_atoms: int,
    grid: Grid1D,
    tol: float = 1e-8,
    *,
    workers: int | None = None,
) -> float:
    return calibrate_ground_state(mu_target, n_atoms, grid, tol, workers=workers).g0


def imaginary_time_ladder(mu_estimate: float) -> tuple[float, float]:
    """Шаги мнимого времени: грубый dτ ≤ 0.1/μ и уточняющий в 10 раз мельче."""
    coarse = min(MAX_IMAGINARY_STEP, STEP_PER_MU / max(mu_estimate, 1.0))
    return coarse, coarse / LADDER_REFINEMENT


def _tf_chemical_potential(interaction: float) -> float:
    """μ_TF = (3Ng/(4√2))^{2/3}; для свободного газа 1/2."""
    if interaction == 0.0:
        return NON_INTERACTING_MU
    return max(NON_INTERACTING_MU, (3.0 * interaction / (4.0 * np.sqrt(2.0))) ** (2.0 / 3.0))


def _initial_guess(grid: Grid1D, interaction: float, mu_tf: float) -> NDArray[np.float64]:
    gaussian = np.exp(-(grid.xi**2) / 2.0)
    if interaction == 0.0:
        return gaussian
    tf = np.sqrt(np.maximum(mu_tf - grid.potential, 0.0) / interaction)
    return tf + 1e-3 * gaussian


def _imaginary_time(
    phi: NDArray[np.float64],
    grid: Grid1D,
    interaction: float,
    dtau: float,
    tol: float,
    budget: int,
    workers: int | None,
) -> tuple[NDArray[np.float64], int, bool]:
    half_kinetic = np.exp(-0.5 * dtau * grid.kinetic)
    previous = _energy_per_particle(phi, grid, interaction, workers)
    for iteration in range(1, budget + 1):
        phi = grid.backward(half_kinetic * grid.forward(phi, workers), workers).real
        phi = phi * np.exp(-dtau * (grid.potential + interaction * phi**2))
        phi = grid.backward(half_kinetic * grid.forward(phi, workers), workers).real
        phi = phi / np.sqrt(grid.norm(phi))
        current = _energy_per_particle(phi, grid, interaction, workers)
        if abs(current - previous) <= tol * abs(current):
            return phi, iteration, True
        previous = current
    return phi, budget, False


def _newton_polish(
    phi: NDArray[np.float64],
    grid: Grid1D,
    interaction: float,
) -> tuple[NDArray[np.float64], float]:
    """Ньютон для F(φ, μ) = [(H₀ + Ngφ² − μ)φ, ∫φ² − 1] на вещественном φ.

    Шаг дробится пополам, пока ‖F‖ не уменьшится; без уменьшения итерации прекращаются.
    """
    n = grid.n_points
    h0 = grid.kinetic_matrix() + np.diag(grid.potential)
    dxi = grid.spacing

    def system(phi: NDArray[np.float64], mu: float) -> tuple[NDArray[np.float64], float]:
        return h0 @ phi + interaction * phi**3 - mu * phi, float(np.sum(phi**2) * dxi - 1.0)

    mu = _chemical_potential(phi, grid, interaction)
    equation, constraint = system(phi, mu)
    for _ in range(NEWTON_ITERATIONS):
        if np.linalg.norm(equation) <= 1e-3 * RESIDUAL_BOUND * np.linalg.norm(phi) and abs(constraint) < 1e-14:
            break
        jacobian = np.zeros((n + 1, n + 1))
        jacobian[:n, :n] = h0 + np.diag(3.0 * interaction * phi**2 - mu)
        jacobian[:n, n] = -phi
        jacobian[n, :n] = 2.0 * phi * dxi
        update = linalg.solve(jacobian, -np.concatenate([equation, [constraint]]))
        merit = np.hypot(np.linalg.norm(equation), constraint)
        step = 1.0
        for _ in range(LINE_SEARCH_HALVINGS):
            trial_phi = phi + step * update[:n]
            trial_mu = mu + step * update[n]
            trial_equation, trial_constraint = system(trial_phi, trial_mu)
            if np.hypot(np.linalg.norm(trial_equation), trial_constraint) < merit:
                break
            step *= 0.5
        else:
            logger.debug(f"Newton line search stalled at |F|={merit:.3e}")
            break
        phi, mu, equation, constraint = trial_phi, trial_mu, trial_equation, trial_constraint
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    return phi, float(mu)


def _chemical_potential(phi: NDArray, grid: Grid1D, interaction: float, workers: int | None = None) -> float:
    """μ = ⟨φ|H₀ + Ng|φ|²|φ⟩ для нормированного φ."""
    density = np.abs(phi) ** 2
    kinetic = grid.kinetic_energy(phi, workers)
    return float(kinetic + grid.integrate((grid.potential + interaction * density) * density))


def _energy_per_particle(phi: NDArray, grid: Grid1D, interaction: float, workers: int | None) -> float:
    density = np.abs(phi) ** 2
    kinetic = grid.kinetic_energy(phi, workers)
    return float(kinetic + grid.integrate((grid.potential + 0.5 * interaction * density) * density))


def _relative_residual(phi: NDArray, grid: Grid1D, interaction: float, mu: float, workers: int | None) -> float:
    residual = grid.apply_hamiltonian(phi, workers) + (interaction * np.abs(phi) ** 2 - mu) * phi
    return float(np.linalg.norm(residual) / np.linalg.norm(phi))
