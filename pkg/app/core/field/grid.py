from dataclasses import dataclass, field
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import fft

from app.core.field.exceptions import GridError

MIN_HALF_WIDTH = 8.0
HALF_WIDTH_FACTOR = 2.5
LARGE_MU_THRESHOLD = 100.0


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Периодическая сетка ξ_k = −L + k·dξ в осцилляторных единицах.

    Преобразование Фурье унитарное (norm="ortho"), волновые числа k = 2π·fftfreq(n, dξ).
    """

    n_points: int
    half_width: float
    xi: NDArray[np.float64] = field(init=False, repr=False)
    k: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise GridError(f"n_points must be a power of two, got {n}")
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise GridError(f"half_width must be positive, got {self.half_width}")
        xi = -self.half_width + self.spacing * np.arange(n)
        k = 2.0 * np.pi * fft.fftfreq(n, d=self.spacing)
        xi.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "k", k)

    @classmethod
    def for_chemical_potential(
        cls,
        mu: float,
        n_points: int | None = None,
        half_width: float | None = None,
    ) -> Self:
        """Сетка по умолчанию: L = max(8, 2.5·√(2μ)), 256 узлов (512 при μ > 100)."""
        if half_width is None:
            half_width = max(MIN_HALF_WIDTH, HALF_WIDTH_FACTOR * np.sqrt(2.0 * mu))
        if n_points is None:
            n_points = 512 if mu > LARGE_MU_THRESHOLD else 256
        return cls(n_points=n_points, half_width=float(half_width))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.spacing)

    @property
    def potential(self) -> NDArray[np.float64]:
        """Гармоническая ловушка ξ²/2."""
        return 0.5 * self.xi**2

    @property
    def kinetic(self) -> NDArray[np.float64]:
        return 0.5 * self.k**2

    def integrate(self, values: ArrayLike) -> NDArray[np.float64] | float:
        """Квадратура по последней оси (трапеции на периодической сетке)."""
        return np.sum(values, axis=-1) * self.spacing

    def norm(self, fields: ArrayLike) -> NDArray[np.float64] | float:
        return self.integrate(np.abs(fields) ** 2)

    def inner(self, left: ArrayLike, right: ArrayLike) -> NDArray[np.complex128] | complex:
        """∫ conj(left)·right dξ."""
        return self.integrate(np.conj(left) * right)

    def forward(self, values: NDArray, workers: int | None = None) -> NDArray[np.complex128]:
        return fft.fft(values, axis=-1, norm="ortho", workers=workers)

    def backward(self, values: NDArray, workers: int | None = None) -> NDArray[np.complex128]:
        return fft.ifft(values, axis=-1, norm="ortho", workers=workers)

    def apply_hamiltonian(self, values: NDArray, workers: int | None = None) -> NDArray[np.complex128]:
        """H₀φ = (−½∂² + ξ²/2)φ спектрально."""
        return self.backward(self.kinetic * self.forward(values, workers), workers) + self.potential * values

    def kinetic_energy(self, values: NDArray, workers: int | None = None) -> NDArray[np.float64] | float:
        spectrum = self.forward(values, workers)
        return np.sum(self.kinetic * np.abs(spectrum) ** 2, axis=-1) * self.spacing

    def kinetic_matrix(self) -> NDArray[np.float64]:
        """Плотная матрица −½∂² (вещественная, симметричная) для метода Ньютона."""
        identity = np.eye(self.n_points)
        spectral = fft.ifft(self.kinetic[:, None] * fft.fft(identity, axis=0), axis=0)
        return spectral.real

    def fits_radius(self, radius: float, fraction: float = 0.8) -> bool:
        return radius <= fraction * self.half_width
