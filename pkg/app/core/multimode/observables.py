"""Перекрытия мод, моменты SU(2), QFI и разложение F₀/F₁/F₂ многомодового состояния.

Все степени [γ]^n и комбинаторные префакторы собираются в лог-пространстве,
чтобы суммы при N ~ 100 не переполнялись.
"""
import numpy as np
from numpy.typing import NDArray

from app.core.dicke.entities import SpinMoments
from app.core.dicke.qfi import qfi_from_moments
from app.core.exceptions import NumericalIntegrityError
from app.core.multimode.entities import OVERLAP_ORDERS, SPECIES, MomentSet, MultimodeState, OverlapTable
from app.core.multimode.exceptions import InvalidMultimodeStateError, OverlapTableError

CLOSURE_TOLERANCE = 1e-8


def overlaps(state: MultimodeState) -> OverlapTable:
    """γ^{jk}_s(m) для s ∈ {−2..2} и всех допустимых m."""
    size = state.n_atoms + 1
    gamma = np.zeros((2, 2, len(OVERLAP_ORDERS), size), dtype=np.complex128)
    valid = np.zeros((len(OVERLAP_ORDERS), size), dtype=bool)
    fields = state.fields
    dxi = state.grid.spacing
    for position, order in enumerate(OVERLAP_ORDERS):
        ket = slice(max(order, 0), size + min(order, 0))
        bra = slice(max(-order, 0), size - max(order, 0))
        valid[position, ket] = True
        gamma[:, :, position, ket] = np.einsum("jmx,kmx->jkm", fields[:, ket], np.conj(fields[:, bra])) * dxi
    return OverlapTable(gamma=gamma, valid=valid, time=state.time)


def mode_overlap(state: MultimodeState, j: str, k: str, order: int, m: float) -> complex:
    """Одиночное перекрытие γ^{jk}_order(m) произвольного порядка."""
    index = state.index_of(m)
    partner = index - order
    if not 0 <= partner <= state.n_atoms:
        raise InvalidMultimodeStateError(f"m - order = {m - order} is outside the number basis")
    left = state.fields[SPECIES.index(j), index]
    right = state.fields[SPECIES.index(k), partner]
    return complex(np.sum(left * np.conj(right)) * state.grid.spacing)


def assemble_moments(state: MultimodeState, table: OverlapTable) -> MomentSet:
    """⟨J_+⟩, ⟨J_+J_−⟩, ⟨J_+J_+⟩, ⟨N_bJ_+⟩, ⟨N_aJ_−⟩ для произвольных d_m.

    Слагаемые содержат d*_{m'} d_m e^{i(A_{m'} − A_m)} и произведения перекрытий;
    сохраняющиеся величины берутся из |d_m|².
    """
    if table.time != state.time:
        raise OverlapTableError(f"Overlap table time {table.time} does not match state time {state.time}")
    missing = set(OVERLAP_ORDERS) - set(table.orders)
    if missing:
        raise OverlapTableError(f"Overlap table misses orders {sorted(missing)}")

    n = state.n_atoms
    n_a = state.n_a.astype(float)
    n_b = state.n_b.astype(float)
    probabilities = state.probabilities

    # J_+: кет k, бра k−1
    ket = np.arange(1, n + 1)
    lowering = _transition_terms(
        state,
        ket,
        shift=1,
        log_prefactor=0.5 * (np.log(n_a[ket]) + np.log(n_b[ket] + 1.0)),
        factors=(
            (table.get("a", "b", 1)[ket], 1),
            (table.get("a", "a", 1)[ket], n_a[ket] - 1.0),
            (table.get("b", "b", 1)[ket], n_b[ket]),
        ),
    )
    jplus = lowering.sum()
    nb_jp = jplus + np.sum(n_b[ket] * lowering)

    # J_+J_+: кет k, бра k−2
    ket2 = np.arange(2, n + 1)
    jpjp = _transition_terms(
        state,
        ket2,
        shift=2,
        log_prefactor=0.5 * (
            np.log(n_a[ket2]) + np.log(n_a[ket2] - 1.0) + np.log(n_b[ket2] + 1.0) + np.log(n_b[ket2] + 2.0)
        ),
        factors=(
            (table.get("a", "b", 2)[ket2], 2),
            (table.get("a", "a", 2)[ket2], n_a[ket2] - 2.0),
            (table.get("b", "b", 2)[ket2], n_b[ket2]),
        ),
    ).sum()

    # J_−: кет k, бра k+1
    ket_up = np.arange(0, n)
    raising = _transition_terms(
        state,
        ket_up,
        shift=-1,
        log_prefactor=0.5 * (np.log(n_b[ket_up]) + np.log(n_a[ket_up] + 1.0)),
        factors=(
            (table.get("b", "a", -1)[ket_up], 1),
            (table.get("a", "a", -1)[ket_up], n_a[ket_up]),
            (table.get("b", "b", -1)[ket_up], n_b[ket_up] - 1.0),
        ),
    )
    na_jm = raising.sum() + np.sum(n_a[ket_up] * raising)

    cross = np.abs(table.get("a", "b", 0)) ** 2
    jpjm = float(np.sum(probabilities * (n_b + n_a * n_b * cross)))

    total = float(np.sum(probabilities))
    m = state.m_values
    moments = MomentSet(
        n_atoms=n,
        time=state.time,
        jplus=complex(jplus),
        jpjm=jpjm,
        jpjp=complex(jpjp),
        nb_jp=complex(nb_jp),
        na_jm=complex(na_jm),
        jz=float(np.sum(probabilities * m)),
        jz_sq=float(np.sum(probabilities * m**2)),
        n_total=n * total,
        n_sq=n * n * total,
    )
    moments.verify()
    return moments


def spin_moments_multimode(moments: MomentSet) -> SpinMoments:
    """J_x = Re⟨J_+⟩, J_y = Im⟨J_+⟩ и симметризованные вторые моменты."""
    return SpinMoments.from_ladder(
        n_atoms=moments.n_atoms,
        jplus=moments.jplus,
        jplus_sq=moments.jpjp,
        ladder_sum=moments.jpjm + moments.jmjp,
        jz=moments.jz,
        jz_sq=moments.jz_sq,
        jplus_jz_anti=moments.jplus_jz_anti,
    )


def qfi_multimode(moments: MomentSet) -> tuple[NDArray[np.float64], float]:
    return qfi_from_moments(spin_moments_multimode(moments))


def decompose(moments: MomentSet) -> tuple[float, float, float]:
    """F₀ = ⟨J_+J_−⟩ + ⟨J_−J_+⟩, F₁ = −4⟨J_y⟩², F₂ = −⟨J_+J_+⟩ − ⟨J_−J_−⟩ с проверкой F₀+F₁+F₂ = 4Var(J_y)."""
    f0 = moments.jpjm + moments.jmjp
    f1 = -4.0 * moments.jplus.imag**2
    f2 = -2.0 * moments.jpjp.real
    variance = 4.0 * spin_moments_multimode(moments).variance("y")
    total = f0 + f1 + f2
    if abs(total - variance) > CLOSURE_TOLERANCE * max(1.0, abs(variance)):
        raise NumericalIntegrityError(
            "decomposition_closure", f"F0+F1+F2={total:.12g} differs from 4Var(Jy)={variance:.12g}"
        )
    return float(f0), float(f1), float(f2)


def f012(state: MultimodeState, table: OverlapTable) -> tuple[float, float, float]:
    return decompose(assemble_moments(state, table))


def _transition_terms(
    state: MultimodeState,
    ket: NDArray[np.int64],
    shift: int,
    log_prefactor: NDArray[np.float64],
    factors: tuple[tuple[NDArray[np.complex128], NDArray[np.float64] | int], ...],
) -> NDArray[np.complex128]:
    """d*_{k−shift} d_k e^{i(A_{k−shift} − A_k)} · prefactor · Π γ^power для каждого кета k."""
    bra = ket - shift
    log_magnitude = state.log_abs[bra] + state.log_abs[ket] + log_prefactor
    phase = (state.phase[ket] - state.phase[bra]) + (state.action[bra] - state.action[ket])
    for gamma, power in factors:
        log_gamma, arg_gamma = _power(gamma, power)
        log_magnitude = log_magnitude + log_gamma
        phase = phase + arg_gamma
    with np.errstate(under="ignore"):
        return np.exp(log_magnitude + 1j * phase)


def _power(gamma: NDArray[np.complex128], power: NDArray[np.float64] | int) -> tuple[NDArray, NDArray]:
    """(n·log|γ|, n·arg γ) с γ^0 = 1 даже при γ = 0."""
    power = np.broadcast_to(np.asarray(power, dtype=float), gamma.shape)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(gamma))
    zero_power = power == 0.0
    log_term = np.where(zero_power, 0.0, power * np.where(zero_power, 0.0, log_abs))
    arg_term = np.where(zero_power, 0.0, power * np.angle(gamma))
    return log_term, arg_term
