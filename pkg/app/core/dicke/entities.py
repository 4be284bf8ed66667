"""Одномодовая модель: состояния в базисе Дикке |J, m⟩ и их коллективные моменты.

Амплитуды хранятся по индексу k = J + m (k = 0..N), что совпадает с числом атомов
в компоненте a. Лестничный оператор J_+ повышает m:
J_+|m⟩ = √(J(J+1) − m(m+1)) |m+1⟩.
"""
from dataclasses import dataclass, replace
from typing import Literal

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import expm
from scipy.special import gammaln, xlogy

from app.core.dicke.exceptions import InvalidSpinStateError, UnknownAxisError

Axis = Literal["x", "y", "z"]

NORM_TOLERANCE = 1e-12
DEFAULT_THETA_NODES = 181
DEFAULT_PHI_NODES = 361


def css_log_weights(n_atoms: int, theta: ArrayLike) -> NDArray[np.float64]:
    """log C^J_m(θ) для всех k = J + m; θ может быть массивом (последняя ось: k)."""
    k = np.arange(n_atoms + 1)
    log_binom = gammaln(n_atoms + 1) - gammaln(k + 1) - gammaln(n_atoms - k + 1)
    half = np.asarray(theta, dtype=float)[..., None] / 2.0
    cos_half = np.abs(np.cos(half))
    sin_half = np.abs(np.sin(half))
    # xlogy даёт 0·log 0 = 0 на полюсах
    return 0.5 * log_binom + xlogy(n_atoms - k, cos_half) + xlogy(k, sin_half)


def css_amplitudes(theta: float, phi: float) -> tuple[complex, complex]:
    """Одночастичные амплитуды (c_a, c_b), порождающие |α(θ, φ)⟩ как произведение мод."""
    return complex(np.sin(theta / 2) * np.exp(-1j * phi)), complex(np.cos(theta / 2))


@dataclass(frozen=True, eq=False)
class SpinMoments:
    """Первые и симметризованные вторые моменты (J_x, J_y, J_z).

    second_sym[i, j] = ⟨J_iJ_j + J_jJ_i⟩/2. Для оценок по ансамблю
    (truncated Wigner) заполняются стандартные ошибки.
    """

    n_atoms: int
    first: NDArray[np.float64]
    second_sym: NDArray[np.float64]
    first_err: NDArray[np.float64] | None = None
    second_err: NDArray[np.float64] | None = None

    @classmethod
    def from_ladder(
        cls,
        n_atoms: int,
        jplus: complex,
        jplus_sq: complex,
        ladder_sum: float,
        jz: float,
        jz_sq: float,
        jplus_jz_anti: complex,
    ) -> Self:
        """Сборка из лестничных средних.

        ladder_sum = ⟨J_+J_−⟩ + ⟨J_−J_+⟩, jplus_jz_anti = ⟨J_+J_z + J_zJ_+⟩.
        Формулы не зависят от того, повышает J_+ проекцию m или понижает.
        """
        jplus = complex(jplus)
        jplus_sq = complex(jplus_sq)
        anti = complex(jplus_jz_anti)
        first = np.array([jplus.real, jplus.imag, float(jz)])
        jx_sq = (ladder_sum + 2.0 * jplus_sq.real) / 4.0
        jy_sq = (ladder_sum - 2.0 * jplus_sq.real) / 4.0
        xy = jplus_sq.imag / 2.0
        xz = anti.real / 2.0
        yz = anti.imag / 2.0
        second = np.array(
            [
                [jx_sq, xy, xz],
                [xy, jy_sq, yz],
                [xz, yz, float(jz_sq)],
            ]
        )
        return cls(n_atoms=n_atoms, first=first, second_sym=second)

    @property
    def spin(self) -> float:
        return self.n_atoms / 2.0

    def covariance(self) -> NDArray[np.float64]:
        """F_ij = 2⟨J_iJ_j + J_jJ_i⟩ − 4⟨J_i⟩⟨J_j⟩."""
        return 4.0 * (self.second_sym - np.outer(self.first, self.first))

    def variance(self, axis: Axis) -> float:
        index = _axis_index(axis)
        return float(self.second_sym[index, index] - self.first[index] ** 2)

    def decomposition(self) -> tuple[float, float, float]:
        """(F₀, F₁, F₂) с F₀ + F₁ + F₂ = 4 Var(J_y)."""
        f0 = 2.0 * (self.second_sym[0, 0] + self.second_sym[1, 1])
        f1 = -4.0 * self.first[1] ** 2
        f2 = 4.0 * self.second_sym[1, 1] - f0
        return float(f0), float(f1), float(f2)


@dataclass(frozen=True, eq=False)
class DickeState:
    n_atoms: int
    amplitudes: NDArray[np.complex128]

    @classmethod
    def from_amplitudes(cls, n_atoms: int, amplitudes: ArrayLike) -> Self:
        """Фабричный метод с проверкой длины, конечности и нормировки."""
        if n_atoms < 1:
            raise InvalidSpinStateError(f"n_atoms must be positive, got {n_atoms}")
        values = np.asarray(amplitudes, dtype=np.complex128)
        if values.shape != (n_atoms + 1,):
            raise InvalidSpinStateError(
                f"Expected {n_atoms + 1} amplitudes for N={n_atoms}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidSpinStateError("Amplitudes must be finite")
        norm = float(np.vdot(values, values).real)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidSpinStateError(f"State is not normalized: norm - 1 = {norm - 1.0:.3e}")
        values.setflags(write=False)
        return cls(n_atoms=n_atoms, amplitudes=values)

    @classmethod
    def make_css(cls, n_atoms: int, theta: float, phi: float) -> Self:
        """Когерентное спиновое состояние c_m = C^J_m(θ) e^{−i(J+m)φ}.

        При θ = 0 вес сосредоточен на m = −J, при θ = π на m = +J.
        """
        if n_atoms < 1:
            raise InvalidSpinStateError(f"n_atoms must be positive, got {n_atoms}")
        if not (np.isfinite(theta) and np.isfinite(phi)):
            raise InvalidSpinStateError(f"Angles must be finite, got theta={theta}, phi={phi}")
        if not 0.0 <= theta <= np.pi:
            raise InvalidSpinStateError(f"theta must lie in [0, pi], got {theta}")
        k = np.arange(n_atoms + 1)
        magnitudes = np.exp(css_log_weights(n_atoms, theta))
        amplitudes = magnitudes * np.exp(-1j * k * phi)
        amplitudes /= np.linalg.norm(amplitudes)
        return cls.from_amplitudes(n_atoms, amplitudes)

    @classmethod
    def basis(cls, n_atoms: int, m: float) -> Self:
        """Собственное состояние |m⟩ оператора J_z."""
        index = m + n_atoms / 2.0
        if not float(index).is_integer() or not 0 <= index <= n_atoms:
            raise InvalidSpinStateError(f"m={m} is not a valid projection for N={n_atoms}")
        amplitudes = np.zeros(n_atoms + 1, dtype=np.complex128)
        amplitudes[int(index)] = 1.0
        return cls.from_amplitudes(n_atoms, amplitudes)

    @property
    def spin(self) -> float:
        return self.n_atoms / 2.0

    @property
    def m_values(self) -> NDArray[np.float64]:
        return np.arange(self.n_atoms + 1) - self.spin

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def evolve_oat(self, twist_angle: float) -> Self:
        """c_m → e^{−i m² χt} c_m."""
        if not np.isfinite(twist_angle):
            raise InvalidSpinStateError(f"Twist angle must be finite, got {twist_angle}")
        phases = np.exp(-1j * self.m_values**2 * twist_angle)
        return replace(self, amplitudes=_frozen(phases * self.amplitudes))

    def rotate(self, axis: Axis, angle: float) -> Self:
        """Применяет exp(−i J_axis · angle) точной экспонентой матрицы (N+1)×(N+1)."""
        if not np.isfinite(angle):
            raise InvalidSpinStateError(f"Rotation angle must be finite, got {angle}")
        if axis == "z":
            rotated = np.exp(-1j * angle * self.m_values) * self.amplitudes
        else:
            generator = spin_operator(self.n_atoms, axis)
            rotated = expm(-1j * angle * generator) @ self.amplitudes
        return replace(self, amplitudes=_frozen(rotated))

    def q_function(
        self,
        theta_grid: ArrayLike | None = None,
        phi_grid: ArrayLike | None = None,
    ) -> NDArray[np.float64]:
        """Q(θ, φ) = |⟨α(θ, φ)|ψ⟩| на сетке (θ по строкам, φ по столбцам)."""
        thetas = np.linspace(0.0, np.pi, DEFAULT_THETA_NODES) if theta_grid is None else np.asarray(theta_grid, float)
        phis = np.linspace(0.0, 2.0 * np.pi, DEFAULT_PHI_NODES) if phi_grid is None else np.asarray(phi_grid, float)
        if thetas.size == 0 or phis.size == 0:
            raise InvalidSpinStateError("Q-function grids must be nonempty")
        if not (np.all(np.isfinite(thetas)) and np.all(np.isfinite(phis))):
            raise InvalidSpinStateError("Q-function grids must be finite")
        k = np.arange(self.n_atoms + 1)
        weights = np.exp(css_log_weights(self.n_atoms, thetas))
        phase_factors = np.exp(1j * np.outer(phis, k))
        return np.abs((weights * self.amplitudes) @ phase_factors.T)

    def spin_moments(self) -> SpinMoments:
        """Точные лестничные суммы по вектору амплитуд."""
        c = self.amplitudes
        m = self.m_values
        j = self.spin
        raise_coeff = np.sqrt(np.maximum(j * (j + 1) - m[:-1] * (m[:-1] + 1), 0.0))
        probabilities = np.abs(c) ** 2

        jplus = np.sum(np.conj(c[1:]) * raise_coeff * c[:-1])
        jplus_sq = np.sum(np.conj(c[2:]) * raise_coeff[1:] * raise_coeff[:-1] * c[:-2])
        ladder_sum = 2.0 * np.sum(probabilities * (j * (j + 1) - m**2))
        anti = 2.0 * np.sum(np.conj(c[1:]) * raise_coeff * c[:-1] * (m[:-1] + 0.5))
        return SpinMoments.from_ladder(
            n_atoms=self.n_atoms,
            jplus=jplus,
            jplus_sq=jplus_sq,
            ladder_sum=float(ladder_sum),
            jz=float(np.sum(probabilities * m)),
            jz_sq=float(np.sum(probabilities * m**2)),
            jplus_jz_anti=anti,
        )

    def cat_fidelity(self, theta: float, phi: float) -> float:
        """|⟨cat(θ, φ)|ψ⟩| для суперпозиции двух противоположных CSS.

        Чётное N: e^{−iπ/4}/√2 (|α(θ,φ)⟩ + i(−1)^J |α(θ,φ+π)⟩).
        Нечётное N: e^{−iπ/4}/√2 (|α(θ,φ+π/2)⟩ + i(−1)^{J+1/2} |α(θ,φ−π/2)⟩).
        """
        n = self.n_atoms
        if n % 2 == 0:
            first = DickeState.make_css(n, theta, phi).amplitudes
            second = DickeState.make_css(n, theta, phi + np.pi).amplitudes
            sign = (-1) ** (n // 2)
        else:
            first = DickeState.make_css(n, theta, phi + np.pi / 2).amplitudes
            second = DickeState.make_css(n, theta, phi - np.pi / 2).amplitudes
            sign = (-1) ** ((n + 1) // 2)
        cat = np.exp(-1j * np.pi / 4) / np.sqrt(2.0) * (first + 1j * sign * second)
        cat_norm = np.linalg.norm(cat)
        if cat_norm == 0.0:
            return 0.0
        return float(abs(np.vdot(cat / cat_norm, self.amplitudes)))


def spin_operator(n_atoms: int, axis: Axis) -> NDArray[np.complex128]:
    """Плотная матрица J_axis в базисе Дикке (для вращений и проверок)."""
    j = n_atoms / 2.0
    m = np.arange(n_atoms + 1) - j
    if axis == "z":
        return np.diag(m).astype(np.complex128)
    raise_coeff = np.sqrt(np.maximum(j * (j + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    jplus = np.diag(raise_coeff, k=-1).astype(np.complex128)
    if axis == "x":
        return (jplus + jplus.conj().T) / 2.0
    if axis == "y":
        return (jplus - jplus.conj().T) / 2.0j
    raise UnknownAxisError(axis)


def _axis_index(axis: str) -> int:
    try:
        return {"x": 0, "y": 1, "z": 2}[axis]
    except KeyError:
        raise UnknownAxisError(axis) from None


def _frozen(values: NDArray[np.complex128]) -> NDArray[np.complex128]:
    values.setflags(write=False)
    return values
