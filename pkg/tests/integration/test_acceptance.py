"""Длинные прогоны N = 100 и N = 40 с опорными значениями τ_peak и F_peak.

Запуск: pytest -m slow; тесты с маркером long дополнительно требуют --long-runs.
"""
import numpy as np
import pytest

from app.application.experiments.analysis import gamma2_period
from app.application.experiments.dto import FigureRequest, PulseSchedule, RunConfig
from app.application.experiments.engines import prepare_ground_state
from app.application.experiments.services.figure_service import FigureService
from app.core.field.ground_state import calibrate_ground_state
from app.core.field.grid import Grid1D
from app.core.field.twisting import single_mode_rates
from app.core.multimode.dynamics import init_state, step_all

pytestmark = [pytest.mark.integration, pytest.mark.slow]

N_ATOMS = 100


def multimode(tmp_path, **overrides) -> RunConfig:
    values = {"engine": "multimode", "n_atoms": N_ATOMS, "sample_count": 401, "output_dir": tmp_path, **overrides}
    return RunConfig(**values)


class TestSingleModeLimit:
    """μ = 0.6: профиль почти гауссов, многомодовая динамика сводится к OAT."""

    def test_reduced_variant_follows_dicke(self, run_service, tmp_path):
        n_atoms = 40
        pilot = RunConfig(n_atoms=n_atoms, mu_target=0.6, t_final=1.0)
        chi, _ = single_mode_rates(prepare_ground_state(pilot), 1.0, 0.0)
        tau_cat = np.pi / (2.0 * chi)
        config = pilot.model_copy(
            update={"name": "limit-n40", "dt": 1e-2, "t_final": 1.3 * tau_cat, "sample_count": 261, "output_dir": tmp_path}
        )

        full = run_service.run(config)
        exact = run_service.run(config.model_copy(update={"name": "limit-n40-dicke", "engine": "dicke"}))

        assert full.succeeded, full.diagnostics.integrity_messages
        assert full.peak.tau_peak == pytest.approx(tau_cat, rel=0.02)
        assert full.peak.f_peak >= 0.95 * n_atoms**2
        through_peak = np.asarray(full.series.tau) <= full.peak.tau_peak
        np.testing.assert_allclose(
            np.asarray(full.series.qfi)[through_peak], np.asarray(exact.series.qfi)[through_peak], rtol=0.02
        )

    def test_full_size_cat_time(self, run_service, tmp_path):
        """N = 100: τ_peak = 1570 ± 2%, F_peak ≥ 0.95N², совпадение с точной моделью до пика."""
        config = multimode(tmp_path, name="limit-n100", mu_target=0.6, dt=1e-2, t_final=2000.0)

        full = run_service.run(config)
        exact = run_service.run(config.model_copy(update={"name": "limit-n100-dicke", "engine": "dicke"}))

        assert full.succeeded, full.diagnostics.integrity_messages
        assert full.peak.tau_peak == pytest.approx(1570.0, rel=0.02)
        assert full.peak.f_peak >= 0.95 * N_ATOMS**2
        through_peak = np.asarray(full.series.tau) <= full.peak.tau_peak
        np.testing.assert_allclose(
            np.asarray(full.series.qfi)[through_peak], np.asarray(exact.series.qfi)[through_peak], rtol=0.02
        )

    def test_mode_functions_nearly_static(self):
        """Плотности |φ_{j,m}|² на τ ∈ [0, 100] отходят от начальных на единицы процентов пика.

        При κ = 0 компонента с n_a ≈ N/2 чувствует половину Ng₀ основного состояния и дышит
        с амплитудой ширины ≈ Ng₀/(4√(2π)) ≈ 2.5%; пустые поля крайних m свободны, до ≈ 5%.
        """
        ground = calibrate_ground_state(0.6, N_ATOMS, Grid1D.for_chemical_potential(0.6))
        state = init_state(N_ATOMS, ground)
        initial = np.abs(state.fields) ** 2
        peak = initial.max()
        central = np.abs(state.m_values) <= np.sqrt(N_ATOMS) / 2
        worst_central = worst_all = 0.0
        for _ in range(200):
            state = step_all(state, 1e-2, 50, ground.g0, 1.0, 0.0)
            deviation = np.abs(np.abs(state.fields) ** 2 - initial).max(axis=(0, 2)) / peak
            worst_central = max(worst_central, float(deviation[central].max()))
            worst_all = max(worst_all, float(deviation.max()))

        assert state.time == pytest.approx(100.0)
        assert worst_central < 0.04
        assert worst_all < 0.07


class TestMultimodeRegime:
    """μ = 32.08: пик кота раньше τ_cat^TF и ниже N²."""

    def test_peak(self, run_service, tmp_path):
        record = run_service.run(multimode(tmp_path, name="regime-mu32.08", mu_target=32.08, t_final=8.0))

        assert record.succeeded, record.diagnostics.integrity_messages
        assert record.peak.tau_peak == pytest.approx(5.735, rel=0.05)
        assert N_ATOMS**2 / 2 < record.peak.f_peak < N_ATOMS**2

    def test_overlap_decays_and_revives(self, run_service, tmp_path):
        """|γ₂^{bb}(0)|^{N/2} падает ниже 1/2 и возвращается с периодом трассы |γ₂^{aa}(0)|."""
        record = run_service.run(
            multimode(tmp_path, name="overlap-mu32.08", mu_target=32.08, t_final=12.0, sample_count=241)
        )

        assert record.succeeded, record.diagnostics.integrity_messages
        tau = record.series.tau
        trace = np.asarray(record.series.gamma_bb2_pow, dtype=float)
        assert trace[0] == pytest.approx(1.0, abs=1e-10)
        first_dip = int(np.flatnonzero(trace < 0.5)[0])
        assert trace[first_dip:].max() > 0.5
        period = gamma2_period(tau, record.series.gamma_aa2)
        assert period is not None
        assert gamma2_period(tau, record.series.gamma_bb2_pow) == pytest.approx(period, rel=0.05)


class TestAsymmetricCondensate:
    """λ = 0.5, μ = 10.29 с подобранным π-импульсом."""

    def test_optimized_pulse(self, run_service, tmp_path):
        asymmetric = multimode(
            tmp_path, name="asym-mu10.29", mu_target=10.29, lambda_=0.5, t_final=33.0,
            pulse=PulseSchedule(mode="optimize"),
        )
        symmetric = asymmetric.model_copy(
            update={"name": "sym-mu10.29", "lambda_": 1.0, "pulse": PulseSchedule(), "t_final": 26.0}
        )

        search = run_service.optimize_pulse(asymmetric)
        reference = run_service.run(symmetric)

        assert search.record.succeeded, search.record.diagnostics.integrity_messages
        assert search.record.peak.tau_peak == pytest.approx(20.33, rel=0.05)
        assert search.record.peak.f_peak < reference.peak.f_peak

    @pytest.mark.long
    def test_optimized_pulse_near_ideal_gas(self, run_service, tmp_path):
        """λ = 0.5, μ = 0.6: τ_peak = 1814 ± 2%; окно поиска от симметричного пика 1570·2/(1 + λ)."""
        config = multimode(
            tmp_path, name="asym-mu0.6", mu_target=0.6, lambda_=0.5, dt=1e-2, t_final=2500.0,
            pulse=PulseSchedule(mode="optimize", reference_tcat=1570.0 * 2.0 / 1.5),
        )

        search = run_service.optimize_pulse(config)

        assert search.record.succeeded, search.record.diagnostics.integrity_messages
        assert search.record.peak.tau_peak == pytest.approx(1814.0, rel=0.02)


class TestSpeedLimit:
    """fig7-mini: τ_cat^TF = T и 2T дают кота выше N²/2, 1.5T: провал между ними."""

    def test_fig7_mini(self, run_service, sweep_service, repository, tmp_path):
        figures = FigureService(run_service, sweep_service, repository, tw_trajectories=2_000)

        result = figures.render("fig7-mini", FigureRequest(out_dir=tmp_path / "fig7"))

        pilot, at_t, at_one_and_half_t, at_two_t = result.records
        assert pilot.succeeded
        peaks = [record.peak.f_peak for record in (at_t, at_one_and_half_t, at_two_t)]
        assert peaks[0] > N_ATOMS**2 / 2
        assert peaks[2] > N_ATOMS**2 / 2
        assert peaks[1] < min(peaks[0], peaks[2])
        assert {path.name for path in result.files} == {"fig7_mini_summary.csv", "fig7_mini_pilot.csv"}
