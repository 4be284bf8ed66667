import numpy as np
from numpy.typing import NDArray

from app.core.dicke.entities import SpinMoments
from app.core.dicke.exceptions import AsymmetricCovarianceError

SYMMETRY_TOLERANCE = 1e-9


def largest_symmetric_eigenvalue(matrix: NDArray[np.float64]) -> float:
    """Наибольшее собственное значение симметричной 3×3 матрицы в замкнутой форме.

    Тригонометрическое решение характеристического кубического уравнения.
    """
    a = np.asarray(matrix, dtype=float)
    off_diagonal = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if off_diagonal == 0.0:
        return float(np.max(np.diag(a)))
    q = np.trace(a) / 3.0
    diagonal_spread = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2
    p = np.sqrt((diagonal_spread + 2.0 * off_diagonal) / 6.0)
    b = (a - q * np.eye(3)) / p
    r = np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0)
    angle = np.arccos(r) / 3.0
    return float(q + 2.0 * p * np.cos(angle))


def qfi_from_moments(moments: SpinMoments) -> tuple[NDArray[np.float64], float]:
    """Матрица коллективной ковариации F_ij и QFI как её наибольшее собственное значение."""
    second = np.asarray(moments.second_sym, dtype=float)
    scale = max(1.0, float(np.max(np.abs(second))))
    asymmetry = float(np.max(np.abs(second - second.T)))
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise AsymmetricCovarianceError(asymmetry)
    symmetric = 0.5 * (second + second.T)
    first = np.asarray(moments.first, dtype=float)
    matrix = 4.0 * (symmetric - np.outer(first, first))
    qfi = max(largest_symmetric_eigenvalue(matrix), 0.0)
    return matrix, qfi
