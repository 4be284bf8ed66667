"""Split-step (Strang) интегратор для пары связанных GPE-подобных уравнений.

Поля хранятся массивом формы (2, *batch, n_points): первая ось: компоненты a и b,
batch-оси позволяют распространять сразу все числовые компоненты.
"""
from collections.abc import Callable
from dataclasses import dataclass
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from app.core.field.exceptions import FieldInstabilityError, GridError
from app.core.field.grid import Grid1D

STABILITY_WARNING_THRESHOLD = 0.1
FINITE_CHECK_INTERVAL = 100

MidpointHook = Callable[[NDArray[np.complex128], float], None]


@dataclass(frozen=True, eq=False)
class Couplings:
    """Коэффициенты нелинейности:

    i∂φ_a = [H₀ + g_self_a|φ_a|² + g_cross_a|φ_b|²]φ_a,
    i∂φ_b = [H₀ + g_self_b|φ_b|² + g_cross_b|φ_a|²]φ_b.

    Каждый коэффициент: скаляр или массив формы batch.
    """

    g_self_a: ArrayLike = 0.0
    g_self_b: ArrayLike = 0.0
    g_cross_a: ArrayLike = 0.0
    g_cross_b: ArrayLike = 0.0

    @classmethod
    def for_populations(
        cls,
        n_a: ArrayLike,
        n_b: ArrayLike,
        g0: float,
        lambda_: float,
        kappa: float,
    ) -> Self:
        """Коэффициенты числовой компоненты (n_a, n_b): g̃_aa(n_a−1), g̃_ab n_b и зеркально для b.

        Для пустой компоненты самодействие обнуляется: max(n_j − 1, 0).
        """
        n_a = np.asarray(n_a, dtype=float)
        n_b = np.asarray(n_b, dtype=float)
        return cls(
            g_self_a=g0 * np.maximum(n_a - 1.0, 0.0),
            g_self_b=lambda_ * g0 * np.maximum(n_b - 1.0, 0.0),
            g_cross_a=kappa * g0 * n_b,
            g_cross_b=kappa * g0 * n_a,
        )

    def as_arrays(self, batch_shape: tuple[int, ...]) -> tuple[NDArray[np.float64], ...]:
        """Коэффициенты, приведённые к форме batch + (1,) для умножения на плотности."""
        return tuple(
            np.broadcast_to(np.asarray(value, dtype=float), batch_shape)[..., None]
            for value in (self.g_self_a, self.g_self_b, self.g_cross_a, self.g_cross_b)
        )


def stability_number(fields: NDArray[np.complex128], couplings: Couplings, dt: float) -> float:
    """dt · max нелинейной энергии по всем точкам и компонентам."""
    density = np.abs(fields) ** 2
    g_sa, g_sb, g_ca, g_cb = couplings.as_arrays(fields.shape[1:-1])
    energy_a = np.abs(g_sa) * density[0] + np.abs(g_ca) * density[1]
    energy_b = np.abs(g_sb) * density[1] + np.abs(g_cb) * density[0]
    peak = max(float(np.max(energy_a, initial=0.0)), float(np.max(energy_b, initial=0.0)))
    return dt * peak


def split_step(
    fields: ArrayLike,
    grid: Grid1D,
    couplings: Couplings,
    dt: float,
    n_steps: int,
    *,
    on_midpoint: MidpointHook | None = None,
    workers: int | None = None,
    start_time: float = 0.0,
) -> NDArray[np.complex128]:
    """Strang: ½ кинетики в k-пространстве, потенциал + нелинейность, ½ кинетики.

    Соседние половинные кинетические шаги объединены. on_midpoint получает поля
    после нелинейного подшага (середина шага по времени) и время этой точки.
    """
    psi = np.array(fields, dtype=np.complex128, copy=True)
    if psi.ndim < 2 or psi.shape[0] != 2 or psi.shape[-1] != grid.n_points:
        raise GridError(f"Expected fields of shape (2, ..., {grid.n_points}), got {psi.shape}")
    if n_steps <= 0:
        return psi

    ratio = stability_number(psi, couplings, dt)
    if ratio > STABILITY_WARNING_THRESHOLD:
        logger.warning(f"Split-step nonlinear phase per step is large: dt*max(g|phi|^2)={ratio:.3f}")

    g_sa, g_sb, g_ca, g_cb = couplings.as_arrays(psi.shape[1:-1])
    half_kinetic = np.exp(-0.5j * dt * grid.kinetic)
    full_kinetic = half_kinetic**2
    potential = grid.potential

    psi = grid.backward(half_kinetic * grid.forward(psi, workers), workers)
    for step in range(n_steps):
        density_a = np.abs(psi[0]) ** 2
        density_b = np.abs(psi[1]) ** 2
        psi[0] *= np.exp(-1j * dt * (potential + g_sa * density_a + g_ca * density_b))
        psi[1] *= np.exp(-1j * dt * (potential + g_sb * density_b + g_cb * density_a))
        if on_midpoint is not None:
            on_midpoint(psi, start_time + (step + 0.5) * dt)
        propagator = full_kinetic if step < n_steps - 1 else half_kinetic
        psi = grid.backward(propagator * grid.forward(psi, workers), workers)
        if (step + 1) % FINITE_CHECK_INTERVAL == 0 or step == n_steps - 1:
            _ensure_finite(psi, step + 1, start_time + (step + 1) * dt)
    return psi


def energy(
    fields: ArrayLike,
    grid: Grid1D,
    couplings: Couplings,
    weights: tuple[ArrayLike, ArrayLike],
    workers: int | None = None,
) -> NDArray[np.float64]:
    """Сохраняющийся функционал Хартри для весов (w_a, w_b), требуется w_a·g_cross_a = w_b·g_cross_b.

    E = Σ_j w_j[⟨φ_j|H₀|φ_j⟩ + (g_self_j/2)∫|φ_j|⁴] + w_a g_cross_a ∫|φ_a|²|φ_b|².
    """
    psi = np.asarray(fields, dtype=np.complex128)
    batch_shape = psi.shape[1:-1]
    g_sa, g_sb, g_ca, _ = (g[..., 0] for g in couplings.as_arrays(batch_shape))
    w_a = np.broadcast_to(np.asarray(weights[0], dtype=float), batch_shape)
    w_b = np.broadcast_to(np.asarray(weights[1], dtype=float), batch_shape)
    density = np.abs(psi) ** 2
    single = grid.kinetic_energy(psi, workers) + grid.integrate(grid.potential * density)
    quartic_a = grid.integrate(density[0] ** 2)
    quartic_b = grid.integrate(density[1] ** 2)
    cross = grid.integrate(density[0] * density[1])
    return (
        w_a * (single[0] + 0.5 * g_sa * quartic_a)
        + w_b * (single[1] + 0.5 * g_sb * quartic_b)
        + w_a * g_ca * cross
    )


def _ensure_finite(psi: NDArray[np.complex128], step: int, time: float) -> None:
    finite = np.isfinite(psi)
    if finite.all():
        return
    batch_shape = psi.shape[1:-1]
    batch_index = None
    if batch_shape:
        bad = ~finite.all(axis=(0, -1))
        batch_index = int(np.flatnonzero(bad)[0])
    raise FieldInstabilityError(step=step, time=time, batch_index=batch_index)


def substeps(interval: float, dt: float) -> tuple[int, float]:
    """Число шагов не крупнее dt, точно покрывающих interval, и фактический шаг."""
    n_steps = max(1, int(np.ceil(interval / dt - 1e-9)))
    return n_steps, interval / n_steps
