"""Многомодовый анзац в динамическом числовом базисе.

|Ψ⟩ = Σ_m d_m e^{−iA_m} |m⟩, где |m⟩ содержит n_a = N/2 + m атомов в моде φ_{a,m}
и n_b = N/2 − m атомов в моде φ_{b,m}. Индекс хранения k = n_a = 0..N.
"""
from dataclasses import dataclass, replace
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import logsumexp

from app.core.exceptions import NumericalIntegrityError
from app.core.field.grid import Grid1D
from app.core.multimode.exceptions import InvalidMultimodeStateError, OverlapTableError

NORM_TOLERANCE = 1e-10
FIELD_NORM_TOLERANCE = 1e-8
OVERLAP_ORDERS = (-2, -1, 0, 1, 2)
SPECIES = ("a", "b")


@dataclass(frozen=True, eq=False)
class NumberComponent:
    m: float
    n_a: int
    n_b: int
    phi_a: NDArray[np.complex128]
    phi_b: NDArray[np.complex128]
    action: float


@dataclass(frozen=True, eq=False)
class MultimodeState:
    n_atoms: int
    log_abs: NDArray[np.float64]
    phase: NDArray[np.float64]
    fields: NDArray[np.complex128]
    action: NDArray[np.float64]
    grid: Grid1D
    time: float = 0.0

    @classmethod
    def from_components(
        cls,
        n_atoms: int,
        coefficients: ArrayLike,
        fields: ArrayLike,
        grid: Grid1D,
        action: ArrayLike | None = None,
        time: float = 0.0,
    ) -> Self:
        """Сборка из комплексных d_m, полей формы (2, N+1, n_points) и фаз A_m."""
        if n_atoms < 1:
            raise InvalidMultimodeStateError(f"n_atoms must be positive, got {n_atoms}")
        d = np.asarray(coefficients, dtype=np.complex128)
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(d))
        action_values = np.zeros(n_atoms + 1) if action is None else np.asarray(action, dtype=float)
        state = cls(
            n_atoms=n_atoms,
            log_abs=log_abs,
            phase=np.angle(d),
            fields=np.asarray(fields, dtype=np.complex128),
            action=action_values,
            grid=grid,
            time=float(time),
        )
        state.validate()
        return state

    def validate(self) -> None:
        size = self.n_atoms + 1
        expected_fields = (2, size, self.grid.n_points)
        if self.log_abs.shape != (size,) or self.phase.shape != (size,) or self.action.shape != (size,):
            raise InvalidMultimodeStateError(f"Coefficient arrays must have length {size}")
        if self.fields.shape != expected_fields:
            raise InvalidMultimodeStateError(f"Fields must have shape {expected_fields}, got {self.fields.shape}")
        if not np.all(np.isfinite(self.action)):
            raise InvalidMultimodeStateError("Action phases must be finite")
        if not np.all(np.isfinite(self.fields)):
            raise InvalidMultimodeStateError("Mode functions must be finite")
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidMultimodeStateError(f"Sum of |d_m|^2 must be 1, got {norm!r}")

    @property
    def n_a(self) -> NDArray[np.int64]:
        return np.arange(self.n_atoms + 1)

    @property
    def n_b(self) -> NDArray[np.int64]:
        return self.n_atoms - self.n_a

    @property
    def m_values(self) -> NDArray[np.float64]:
        return self.n_a - self.n_atoms / 2.0

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.exp(2.0 * self.log_abs)

    def coefficients(self) -> NDArray[np.complex128]:
        return np.exp(self.log_abs + 1j * self.phase)

    def norm(self) -> float:
        return float(np.exp(logsumexp(2.0 * self.log_abs)))

    def index_of(self, m: float) -> int:
        index = m + self.n_atoms / 2.0
        if not float(index).is_integer() or not 0 <= index <= self.n_atoms:
            raise InvalidMultimodeStateError(f"m={m} is not a valid label for N={self.n_atoms}")
        return int(index)

    def component(self, m: float) -> NumberComponent:
        index = self.index_of(m)
        return NumberComponent(
            m=float(m),
            n_a=index,
            n_b=self.n_atoms - index,
            phi_a=self.fields[0, index],
            phi_b=self.fields[1, index],
            action=float(self.action[index]),
        )

    def field_norms(self) -> NDArray[np.float64]:
        """∫|φ_{j,m}|² формы (2, N+1)."""
        return self.grid.norm(self.fields)

    def with_fields(self, fields: NDArray[np.complex128], action: NDArray[np.float64], time: float) -> Self:
        return replace(self, fields=fields, action=action, time=float(time))


@dataclass(frozen=True, eq=False)
class OverlapTable:
    """γ^{jk}_s(m) = ∫ φ_{j,m} φ*_{k,m−s} dξ.

    gamma[j, k, s + 2, index] при s ∈ {−2..2}; недопустимые m − s помечены в valid.
    """

    gamma: NDArray[np.complex128]
    valid: NDArray[np.bool_]
    time: float
    orders: tuple[int, ...] = OVERLAP_ORDERS

    def get(self, j: str, k: str, order: int) -> NDArray[np.complex128]:
        if order not in self.orders:
            raise OverlapTableError(f"Overlap order {order} is not in table orders {self.orders}")
        return self.gamma[SPECIES.index(j), SPECIES.index(k), self.orders.index(order)]

    def verify(self) -> None:
        magnitude = np.abs(self.gamma[..., self.valid])
        if np.any(magnitude > 1.0 + 1e-10):
            raise NumericalIntegrityError("overlap_bound", f"max |gamma| = {magnitude.max():.12f}")
        for j in range(2):
            self_overlap = self.gamma[j, j, self.orders.index(0)]
            if np.any(np.abs(self_overlap - 1.0) > FIELD_NORM_TOLERANCE):
                raise NumericalIntegrityError(
                    "self_overlap", f"max |gamma^{SPECIES[j]}{SPECIES[j]}_0 - 1| = {np.abs(self_overlap - 1).max():.3e}"
                )


@dataclass(frozen=True)
class MomentSet:
    """Нормально упорядоченные средние; J_+ = ∫ψ_b†ψ_a переводит атом из a в b."""

    n_atoms: int
    time: float
    jplus: complex
    jpjm: float
    jpjp: complex
    nb_jp: complex
    na_jm: complex
    jz: float
    jz_sq: float
    n_total: float
    n_sq: float

    @property
    def jminus(self) -> complex:
        return self.jplus.conjugate()

    @property
    def jmjp(self) -> float:
        """⟨J_−J_+⟩ = ⟨J_+J_−⟩ + 2⟨J_z⟩ при J_+, понижающем m."""
        return self.jpjm + 2.0 * self.jz

    @property
    def jplus_jz_anti(self) -> complex:
        """⟨J_+J_z + J_zJ_+⟩ = ⟨N_aJ_−⟩* − ⟨N_bJ_+⟩."""
        return self.na_jm.conjugate() - self.nb_jp

    def verify(self, tolerance: float = 1e-8) -> None:
        n = self.n_atoms
        slack = tolerance * max(1.0, n * n)
        if abs(self.jplus) > n / 2.0 + slack:
            raise NumericalIntegrityError("jplus_bound", f"|<J+>| = {abs(self.jplus):.12g} > N/2 = {n / 2}")
        if not -slack <= self.jpjm <= n * (n / 2.0 + 1.0) + slack:
            raise NumericalIntegrityError("jpjm_bound", f"<J+J-> = {self.jpjm:.12g} outside [0, N(N/2+1)]")
