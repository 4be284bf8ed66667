from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.field.exceptions import InvalidParameterError
from app.core.field.ground_state import GroundState
from app.core.field.grid import Grid1D
from app.core.field.propagation import Couplings, split_step, substeps


@dataclass(frozen=True, eq=False)
class TwistingRateSeries:
    tau: NDArray[np.float64]
    chi: NDArray[np.float64]
    dt: float


def chi_instantaneous(
    phi_a: NDArray[np.complex128],
    phi_b: NDArray[np.complex128],
    grid: Grid1D,
    g0: float,
    lambda_: float,
    kappa: float,
) -> float | NDArray[np.float64]:
    """χ = χ_aa + χ_bb − 2χ_ab, χ_jk = (g_jk/2)∫|φ_j|²|φ_k|²; поддерживает batch-оси."""
    density_a = np.abs(phi_a) ** 2
    density_b = np.abs(phi_b) ** 2
    integral = grid.integrate(
        density_a**2 + lambda_ * density_b**2 - 2.0 * kappa * density_a * density_b
    )
    return 0.5 * g0 * integral


def single_mode_rates(ground: GroundState, lambda_: float, kappa: float) -> tuple[float, float]:
    """(χ, ω) одномодовой модели H = χJ_z² + ωJ_z на профиле основного состояния.

    ω = (N − 1)(χ_aa − χ_bb): линейный член асимметричного конденсата.
    """
    quartic = float(ground.grid.integrate(np.abs(ground.phi0) ** 4))
    chi_aa = 0.5 * ground.g0 * quartic
    chi_bb = lambda_ * chi_aa
    chi_ab = kappa * chi_aa
    return chi_aa + chi_bb - 2.0 * chi_ab, (ground.n_atoms - 1) * (chi_aa - chi_bb)


def twisting_rate_series(
    ground: GroundState,
    lambda_: float,
    kappa: float,
    dt: float,
    t_final: float,
    sample_count: int,
    *,
    workers: int | None = None,
) -> TwistingRateSeries:
    """χ(τ) в среднем поле: эволюция пары полей центральной компоненты (n_a = ⌈N/2⌉).

    Поля стартуют из φ₀ основного состояния с полным N и совершают дыхательные колебания.
    """
    if sample_count < 2:
        raise InvalidParameterError(f"sample_count must be >= 2, got {sample_count}")
    if t_final <= 0 or dt <= 0:
        raise InvalidParameterError(f"t_final and dt must be positive, got t_final={t_final}, dt={dt}")
    n_a = (ground.n_atoms + 1) // 2
    n_b = ground.n_atoms - n_a
    couplings = Couplings.for_populations(n_a, n_b, ground.g0, lambda_, kappa)
    fields = np.stack([ground.phi0, ground.phi0])

    tau = np.linspace(0.0, t_final, sample_count)
    chi = np.empty(sample_count)
    chi[0] = chi_instantaneous(fields[0], fields[1], ground.grid, ground.g0, lambda_, kappa)
    for index in range(1, sample_count):
        n_steps, step = substeps(tau[index] - tau[index - 1], dt)
        fields = split_step(
            fields,
            ground.grid,
            couplings,
            step,
            n_steps,
            workers=workers,
            start_time=tau[index - 1],
        )
        chi[index] = chi_instantaneous(fields[0], fields[1], ground.grid, ground.g0, lambda_, kappa)
    return TwistingRateSeries(tau=tau, chi=chi, dt=substeps(tau[1] - tau[0], dt)[1])
