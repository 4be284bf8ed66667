"""Truncated Wigner для одномодового one-axis twisting.

Траектории несут пары комплексных амплитуд (α_a, α_b). Для гамильтониана
H = χ J_z² величина J_z^W = (|α_a|² − |α_b|²)/2 сохраняется на траектории,
поэтому эволюция интегрируется в замкнутой форме.
"""
from dataclasses import dataclass, replace
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from numpy.typing import NDArray

from app.core.dicke.entities import SpinMoments
from app.core.wigner.exceptions import DegenerateEnsembleError, EnsembleError

RNG_ALGORITHM = "Philox"
VACUUM_VARIANCE = 0.25
AMPLITUDE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class TwEnsemble:
    n_atoms: int
    alpha_a: NDArray[np.complex128]
    alpha_b: NDArray[np.complex128]
    seed: int
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def n_traj(self) -> int:
        return int(self.alpha_a.size)

    @classmethod
    def sample_css(
        cls,
        n_atoms: int,
        c_a: complex,
        c_b: complex,
        n_traj: int,
        seed: int,
    ) -> Self:
        """Выборка Вигнера для когерентного состояния: α_j = √N c_j + η_j, Var(Re η) = Var(Im η) = 1/4."""
        if n_traj < 1:
            raise EnsembleError(f"n_traj must be positive, got {n_traj}")
        if n_atoms < 1:
            raise EnsembleError(f"n_atoms must be positive, got {n_atoms}")
        norm = abs(c_a) ** 2 + abs(c_b) ** 2
        if abs(norm - 1.0) > AMPLITUDE_TOLERANCE:
            raise EnsembleError(f"Mode amplitudes must satisfy |c_a|^2 + |c_b|^2 = 1, got {norm}")

        rng = np.random.Generator(np.random.Philox(seed))
        noise = rng.normal(scale=np.sqrt(VACUUM_VARIANCE), size=(2, 2, n_traj))
        eta = noise[:, 0] + 1j * noise[:, 1]
        amplitude = np.sqrt(n_atoms)
        return cls(
            n_atoms=n_atoms,
            alpha_a=amplitude * c_a + eta[0],
            alpha_b=amplitude * c_b + eta[1],
            seed=seed,
        )

    def jz_wigner(self) -> NDArray[np.float64]:
        return (np.abs(self.alpha_a) ** 2 - np.abs(self.alpha_b) ** 2) / 2.0

    def evolve(self, chi: float, t: float, detuning: float = 0.0) -> Self:
        """α_a → α_a e^{−i(χ J_z^W + ω/2) t}, α_b → α_b e^{+i(χ J_z^W + ω/2) t}.

        detuning ω: линейный член ω J_z асимметричной модели.
        """
        if not (np.isfinite(chi) and np.isfinite(t) and np.isfinite(detuning)):
            raise EnsembleError(f"Non-finite evolution parameters: chi={chi}, t={t}, detuning={detuning}")
        rotation = np.exp(-1j * (chi * self.jz_wigner() + detuning / 2.0) * t)
        return replace(self, alpha_a=self.alpha_a * rotation, alpha_b=self.alpha_b * np.conj(rotation))

    def apply_pi_pulse(self) -> Self:
        """exp(−iπJ_x): α_a → −iα_b, α_b → −iα_a."""
        return replace(self, alpha_a=-1j * self.alpha_b, alpha_b=-1j * self.alpha_a)

    def moments(self) -> SpinMoments:
        """Перевод симметрично упорядоченных средних в моменты J_i со стандартными ошибками.

        Символ Вейля {J_i, J_j}/2 равен J_i^W J_j^W − δ_ij/8.
        """
        if self.n_traj < 2:
            raise EnsembleError(f"Moment estimates need at least 2 trajectories, got {self.n_traj}")
        coherence = np.conj(self.alpha_a) * self.alpha_b
        samples = np.stack([coherence.real, coherence.imag, self.jz_wigner()])
        if np.all(np.ptp(samples, axis=1) == 0.0):
            raise DegenerateEnsembleError(self.n_traj)

        products = samples[:, None, :] * samples[None, :, :] - np.eye(3)[:, :, None] / 8.0
        sqrt_n = np.sqrt(self.n_traj)
        return SpinMoments(
            n_atoms=self.n_atoms,
            first=np.mean(samples, axis=1),
            second_sym=np.mean(products, axis=2),
            first_err=np.std(samples, axis=1, ddof=1) / sqrt_n,
            second_err=np.std(products, axis=2, ddof=1) / sqrt_n,
        )

    def populations(self) -> tuple[float, float]:
        """Средние ⟨a†a⟩, ⟨b†b⟩ с вычетом полукванта на моду."""
        return (
            float(np.mean(np.abs(self.alpha_a) ** 2) - 0.5),
            float(np.mean(np.abs(self.alpha_b) ** 2) - 0.5),
        )
