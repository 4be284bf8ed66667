"""Unit тесты поиска пика и извлечения периода."""
import numpy as np
import pytest

from app.application.experiments.analysis import find_peak, gamma2_period, oscillation_period
from app.application.experiments.exceptions import SeriesAnalysisError
from app.core.dicke.entities import DickeState
from app.core.dicke.qfi import qfi_from_moments

pytestmark = pytest.mark.unit


class TestFindPeak:
    """Тесты find_peak."""

    def test_parabola_vertex_is_exact(self):
        """Парабола восстанавливается точно по трём точкам."""
        tau = np.linspace(0.0, 1.0, 11)
        values = 3.0 - 5.0 * (tau - 0.4321) ** 2
        peak = find_peak(tau, values)
        assert peak.tau_peak == pytest.approx(0.4321, abs=1e-6)
        assert peak.f_peak == pytest.approx(3.0, abs=1e-6)
        assert not peak.at_boundary

    def test_single_mode_peak_at_quarter_period(self):
        """Пик точной OAT при χt = π/2."""
        n = 20
        initial = DickeState.make_css(n, np.pi / 2, np.pi / 2)
        tau = np.linspace(0.0, np.pi, 201)
        qfi = [qfi_from_moments(initial.evolve_oat(t).spin_moments())[1] for t in tau]
        peak = find_peak(tau, qfi)
        assert peak.tau_peak == pytest.approx(np.pi / 2, abs=1e-3)
        assert peak.f_peak == pytest.approx(n**2, rel=1e-3)

    @pytest.mark.parametrize(
        "values",
        [np.ones(7), np.arange(7.0), np.arange(7.0)[::-1]],
        ids=["flat", "increasing", "decreasing"],
    )
    def test_boundary_flagged(self, values):
        assert find_peak(np.arange(7.0), values).at_boundary

    def test_too_few_samples(self):
        with pytest.raises(SeriesAnalysisError):
            find_peak([0.0, 1.0], [1.0, 2.0])
        with pytest.raises(SeriesAnalysisError):
            find_peak([0.0, 1.0, 2.0], [1.0, 2.0])


class TestPeriods:
    """Тесты извлечения периода колебаний."""

    def test_sine_period(self):
        tau = np.linspace(0.0, 20.0, 801)
        assert oscillation_period(tau, np.cos(2 * np.pi * tau / 3.63)) == pytest.approx(3.63, rel=5e-3)

    def test_period_survives_single_sample_spikes(self):
        """Медиана по трём точкам убирает одиночные выбросы."""
        tau = np.linspace(0.0, 20.0, 801)
        values = np.cos(2 * np.pi * tau / 4.0)
        values[[101, 333, 555]] += 5.0
        assert oscillation_period(tau, values) == pytest.approx(4.0, rel=1e-2)

    def test_period_needs_two_maxima(self):
        tau = np.linspace(0.0, 1.0, 50)
        with pytest.raises(SeriesAnalysisError):
            oscillation_period(tau, np.sin(np.pi * tau))
        with pytest.raises(SeriesAnalysisError):
            oscillation_period(tau[:4], tau[:4])

    @pytest.mark.parametrize(
        "trace",
        [None, [0.5, None, 0.4, 0.3, 0.5], [0.5, np.nan, 0.4, 0.3, 0.5], [1.0, 0.9, 0.8, 0.7, 0.6]],
        ids=["absent", "outside-basis", "non-finite", "monotone"],
    )
    def test_gamma2_period_missing(self, trace):
        assert gamma2_period([0.0, 1.0, 2.0, 3.0, 4.0], trace) is None

    def test_gamma2_period(self):
        tau = np.linspace(0.0, 12.0, 401)
        trace = 0.9 + 0.1 * np.cos(2 * np.pi * tau / 3.2)
        assert gamma2_period(tau, list(trace)) == pytest.approx(3.2, rel=1e-2)
