"""Сверка многомодовых моментов с прямым вычислением во вторичном квантовании.

N = 4 атома, каждая компонента раскладывается по K = 3 ортонормированным функциям,
пространство Фока 2K мод с N частицами имеет размерность 126.
"""
from itertools import combinations_with_replacement

import numpy as np
import pytest
from scipy.linalg import expm

from app.core.field.grid import Grid1D
from app.core.multimode.dynamics import apply_pi_pulse
from app.core.multimode.entities import MultimodeState
from app.core.multimode.observables import assemble_moments, overlaps, qfi_multimode

pytestmark = pytest.mark.unit

N_ATOMS = 4
N_BASIS = 3
TOLERANCE = 1e-8


class FockSpace:
    """Базис чисел заполнения для мод (a_1..a_K, b_1..b_K) с фиксированным числом частиц."""

    def __init__(self, n_particles: int, n_basis: int):
        self.n_basis = n_basis
        n_modes = 2 * n_basis
        self.states = []
        for modes in combinations_with_replacement(range(n_modes), n_particles):
            occupation = [0] * n_modes
            for mode in modes:
                occupation[mode] += 1
            self.states.append(tuple(occupation))
        self.index = {state: position for position, state in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def hop(self, source: int, target: int) -> np.ndarray:
        """Матрица c†_target c_source."""
        matrix = np.zeros((self.dim, self.dim), dtype=complex)
        for column, state in enumerate(self.states):
            if state[source] == 0:
                continue
            amplitude = np.sqrt(state[source])
            occupation = list(state)
            occupation[source] -= 1
            amplitude *= np.sqrt(occupation[target] + 1)
            occupation[target] += 1
            matrix[self.index[tuple(occupation)], column] += amplitude
        return matrix

    def number(self, species: int) -> np.ndarray:
        modes = range(species * self.n_basis, (species + 1) * self.n_basis)
        return np.diag([float(sum(state[i] for i in modes)) for state in self.states]).astype(complex)

    def product_state(self, u_a: np.ndarray, u_b: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
        """(A†)^{n_a}(B†)^{n_b}|0⟩/√(n_a! n_b!), A† = Σ u_a[i] a_i†."""
        amplitudes = {tuple([0] * 2 * self.n_basis): 1.0 + 0.0j}
        creators = [(u_a, 0)] * n_a + [(u_b, self.n_basis)] * n_b
        for coefficients, offset in creators:
            updated: dict[tuple[int, ...], complex] = {}
            for state, amplitude in amplitudes.items():
                for i, u in enumerate(coefficients):
                    occupation = list(state)
                    occupation[offset + i] += 1
                    key = tuple(occupation)
                    updated[key] = updated.get(key, 0.0) + amplitude * u * np.sqrt(occupation[offset + i])
            amplitudes = updated
        vector = np.zeros(self.dim, dtype=complex)
        for state, amplitude in amplitudes.items():
            vector[self.index[state]] = amplitude
        return vector / np.sqrt(float(np.prod(range(1, n_a + 1))) * float(np.prod(range(1, n_b + 1))))


@pytest.fixture(scope="module")
def grid() -> Grid1D:
    return Grid1D(n_points=64, half_width=8.0)


@pytest.fixture(scope="module")
def basis(grid) -> np.ndarray:
    """Ортонормированные в дискретном скалярном произведении функции ξ^i e^{−ξ²/2}, i < K."""
    raw = np.stack([grid.xi**i * np.exp(-(grid.xi**2) / 2.0) for i in range(N_BASIS)], axis=1)
    q, _ = np.linalg.qr(raw * np.sqrt(grid.spacing))
    return (q / np.sqrt(grid.spacing)).T


@pytest.fixture(scope="module")
def space() -> FockSpace:
    return FockSpace(N_ATOMS, N_BASIS)


@pytest.fixture(scope="module")
def random_state(grid, basis) -> tuple[MultimodeState, np.ndarray]:
    """Случайные d_m, A_m и гладкие моды; возвращает также коэффициенты разложения мод по базису."""
    rng = np.random.default_rng(12345)
    size = N_ATOMS + 1
    expansion = rng.normal(size=(2, size, N_BASIS)) + 1j * rng.normal(size=(2, size, N_BASIS))
    expansion /= np.linalg.norm(expansion, axis=-1, keepdims=True)
    fields = np.einsum("jmi,ix->jmx", expansion, basis)
    d = rng.normal(size=size) + 1j * rng.normal(size=size)
    d /= np.linalg.norm(d)
    action = rng.uniform(0.0, 2.0 * np.pi, size=size)
    state = MultimodeState.from_components(N_ATOMS, d, fields, grid, action=action)
    return state, expansion


def fock_vector(space: FockSpace, state: MultimodeState, expansion: np.ndarray) -> np.ndarray:
    """|Ψ⟩ = Σ_m d_m e^{−iA_m} |m⟩."""
    coefficients = state.coefficients() * np.exp(-1j * state.action)
    vector = np.zeros(space.dim, dtype=complex)
    for k in range(N_ATOMS + 1):
        vector += coefficients[k] * space.product_state(expansion[0, k], expansion[1, k], k, N_ATOMS - k)
    return vector


def operators(space: FockSpace) -> dict[str, np.ndarray]:
    jplus = sum(space.hop(i, space.n_basis + i) for i in range(space.n_basis))
    n_a = space.number(0)
    n_b = space.number(1)
    return {"jplus": jplus, "jminus": jplus.conj().T, "n_a": n_a, "n_b": n_b, "jz": (n_a - n_b) / 2.0}


def expectation(vector: np.ndarray, operator: np.ndarray) -> complex:
    return complex(np.vdot(vector, operator @ vector))


def oracle_qfi(vector: np.ndarray, ops: dict[str, np.ndarray]) -> float:
    jx = (ops["jplus"] + ops["jminus"]) / 2.0
    jy = (ops["jplus"] - ops["jminus"]) / 2.0j
    axes = [jx, jy, ops["jz"]]
    first = np.array([expectation(vector, op).real for op in axes])
    second = np.array([[expectation(vector, a @ b + b @ a).real / 2.0 for b in axes] for a in axes])
    return float(np.linalg.eigvalsh(4.0 * (second - np.outer(first, first)))[-1])


class TestFockOracle:
    """Моменты assemble_moments против прямого вычисления в пространстве Фока."""

    def test_space_dimension(self, space):
        assert space.dim == 126

    def test_product_states_are_normalized(self, space, random_state):
        _, expansion = random_state
        for k in range(N_ATOMS + 1):
            vector = space.product_state(expansion[0, k], expansion[1, k], k, N_ATOMS - k)
            assert np.vdot(vector, vector).real == pytest.approx(1.0, abs=1e-12)

    def test_modes_lie_in_basis(self, grid, basis, random_state):
        """Проекция на базис воспроизводит коэффициенты разложения."""
        state, expansion = random_state
        projected = np.einsum("ix,jmx->jmi", np.conj(basis), state.fields) * grid.spacing
        np.testing.assert_allclose(projected, expansion, atol=1e-12)

    def test_moments_match(self, space, random_state):
        state, expansion = random_state
        vector = fock_vector(space, state, expansion)
        ops = operators(space)
        moments = assemble_moments(state, overlaps(state))

        expected = {
            "jplus": expectation(vector, ops["jplus"]),
            "jpjm": expectation(vector, ops["jplus"] @ ops["jminus"]),
            "jpjp": expectation(vector, ops["jplus"] @ ops["jplus"]),
            "nb_jp": expectation(vector, ops["n_b"] @ ops["jplus"]),
            "na_jm": expectation(vector, ops["n_a"] @ ops["jminus"]),
            "jz": expectation(vector, ops["jz"]),
            "jz_sq": expectation(vector, ops["jz"] @ ops["jz"]),
        }
        for name, value in expected.items():
            actual = complex(getattr(moments, name))
            assert abs(actual - value) <= TOLERANCE * max(1.0, abs(value)), name

    def test_qfi_matches(self, space, random_state):
        state, expansion = random_state
        vector = fock_vector(space, state, expansion)
        _, qfi = qfi_multimode(assemble_moments(state, overlaps(state)))
        assert qfi == pytest.approx(oracle_qfi(vector, operators(space)), rel=TOLERANCE, abs=TOLERANCE)

    def test_pi_pulse_matches_rotation(self, space, random_state):
        """apply_pi_pulse совпадает с exp(−iπJ_x) в пространстве Фока."""
        state, expansion = random_state
        ops = operators(space)
        jx = (ops["jplus"] + ops["jminus"]) / 2.0
        rotated = expm(-1j * np.pi * jx) @ fock_vector(space, state, expansion)
        pulsed = apply_pi_pulse(state)
        moments = assemble_moments(pulsed, overlaps(pulsed))
        assert complex(moments.jplus) == pytest.approx(expectation(rotated, ops["jplus"]), abs=TOLERANCE)
        assert complex(moments.jpjp) == pytest.approx(expectation(rotated, ops["jplus"] @ ops["jplus"]), abs=TOLERANCE)
        assert moments.jz == pytest.approx(expectation(rotated, ops["jz"]).real, abs=TOLERANCE)
