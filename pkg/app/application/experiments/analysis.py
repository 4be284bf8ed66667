from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, medfilt

from app.application.experiments.exceptions import SeriesAnalysisError


@dataclass(frozen=True)
class Peak:
    tau_peak: float
    f_peak: float
    at_boundary: bool


def find_peak(tau: Sequence[float], values: Sequence[float]) -> Peak:
    """Глобальный максимум с параболическим уточнением по трём окружающим точкам.

    Максимум на краю ряда (монотонный или плоский ряд) помечается at_boundary.
    """
    t = np.asarray(tau, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < 3 or t.size != y.size:
        raise SeriesAnalysisError(f"Peak finding needs >= 3 paired samples, got {t.size} and {y.size}")
    index = int(np.argmax(y))
    if index == 0 or index == y.size - 1:
        return Peak(tau_peak=float(t[index]), f_peak=float(y[index]), at_boundary=True)
    vertex_t, vertex_y = _parabolic_vertex(t[index - 1 : index + 2], y[index - 1 : index + 2])
    return Peak(tau_peak=vertex_t, f_peak=vertex_y, at_boundary=False)


def oscillation_period(tau: Sequence[float], values: Sequence[float], smoothing: int = 3) -> float:
    """Средний интервал между соседними максимумами после медианного сглаживания."""
    t = np.asarray(tau, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < 5:
        raise SeriesAnalysisError(f"Period extraction needs >= 5 samples, got {t.size}")
    smoothed = medfilt(y, kernel_size=smoothing)
    # края medfilt дополняются нулями
    smoothed[0], smoothed[-1] = y[0], y[-1]
    peaks, _ = find_peaks(smoothed)
    if peaks.size < 2:
        raise SeriesAnalysisError(f"Found {peaks.size} maxima, at least 2 are needed for a period")
    refined = [_parabolic_vertex(t[p - 1 : p + 2], smoothed[p - 1 : p + 2])[0] for p in peaks]
    return float(np.mean(np.diff(refined)))


def _parabolic_vertex(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    a, b, c = np.polyfit(t - t[1], y, 2)
    if a >= 0:
        return float(t[1]), float(y[1])
    shift = -b / (2.0 * a)
    return float(t[1] + shift), float(c - b * b / (4.0 * a))


def gamma2_period(tau: Sequence[float], gamma_aa2: Sequence[float | None] | None) -> float | None:
    """Период |γ₂^{aa}(0)|(τ); None, если трасса не записана или колебаний меньше двух."""
    if gamma_aa2 is None or any(v is None for v in gamma_aa2):
        return None
    values = np.asarray(gamma_aa2, dtype=float)
    if not np.all(np.isfinite(values)):
        return None
    try:
        return oscillation_period(tau, values)
    except SeriesAnalysisError:
        return None
