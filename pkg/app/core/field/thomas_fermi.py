"""Аналитика приближения Томаса–Ферми и период коллективных возбуждений."""
import numpy as np
from numpy.typing import NDArray

from app.core.field.exceptions import InvalidParameterError, UndefinedTwistingError
from app.core.field.grid import Grid1D


def twisting_factor(lambda_: float, kappa: float) -> float:
    """1 + λ − 2κ: множитель нелинейности χ = χ_aa + χ_bb − 2χ_ab при одинаковых профилях."""
    return 1.0 + lambda_ - 2.0 * kappa


def tf_g0(mu: float, n_atoms: int) -> float:
    """g₀ = 4√2 μ^{3/2} / (3N) из нормировки профиля ТФ."""
    _check_mu(mu, n_atoms)
    return 4.0 * np.sqrt(2.0) * mu**1.5 / (3.0 * n_atoms)


def tf_profile(mu: float, n_atoms: int, g0: float, grid: Grid1D) -> NDArray[np.complex128]:
    """φ_TF(ξ) = √(max(μ − ξ²/2, 0)/(N g₀)).

    Дискретная норма совпадает с аналитической 4√2μ^{3/2}/(3Ng₀),
    то есть равна 1 при g₀ = tf_g0(μ, N).
    """
    _check_mu(mu, n_atoms)
    if g0 <= 0:
        raise InvalidParameterError(f"g0 must be positive for a TF profile, got {g0}")
    interaction = n_atoms * g0
    profile = np.sqrt(np.maximum(mu - grid.potential, 0.0) / interaction)
    discrete = grid.norm(profile)
    if discrete == 0.0:
        raise InvalidParameterError(f"TF radius sqrt(2 mu) is below the grid spacing for mu={mu}")
    analytic = 4.0 * np.sqrt(2.0) * mu**1.5 / (3.0 * interaction)
    return (profile * np.sqrt(analytic / discrete)).astype(np.complex128)


def tf_chi(mu: float, n_atoms: int, lambda_: float, kappa: float) -> float:
    """χ_TF = (1 + λ − 2κ)·2μ/(5N)."""
    _check_mu(mu, n_atoms)
    return twisting_factor(lambda_, kappa) * 2.0 * mu / (5.0 * n_atoms)


def tf_tcat(mu: float, n_atoms: int, lambda_: float, kappa: float) -> float:
    """τ_cat = π/(2χ_TF) = 5πN / (4μ(1 + λ − 2κ))."""
    _check_mu(mu, n_atoms)
    factor = twisting_factor(lambda_, kappa)
    if factor <= 0:
        raise UndefinedTwistingError(lambda_, kappa)
    return 5.0 * np.pi * n_atoms / (4.0 * mu * factor)


def tf_mu_for_tcat(tcat: float, n_atoms: int, lambda_: float, kappa: float) -> float:
    """Обратная к tf_tcat: μ, при котором τ_cat^TF равно заданному."""
    factor = twisting_factor(lambda_, kappa)
    if factor <= 0:
        raise UndefinedTwistingError(lambda_, kappa)
    if tcat <= 0:
        raise InvalidParameterError(f"Cat time must be positive, got {tcat}")
    return 5.0 * np.pi * n_atoms / (4.0 * tcat * factor)


def excitation_period(n: int) -> float:
    """T_n = 2π / √(n(n+1)/2); n = 2: дыхательная мода."""
    if n < 1:
        raise InvalidParameterError(f"Excitation index must be >= 1, got {n}")
    return 2.0 * np.pi / np.sqrt(n * (n + 1) / 2.0)


def _check_mu(mu: float, n_atoms: int) -> None:
    if not np.isfinite(mu) or mu <= 0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    if n_atoms < 1:
        raise InvalidParameterError(f"n_atoms must be positive, got {n_atoms}")
