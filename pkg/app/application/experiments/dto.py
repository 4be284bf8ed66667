from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

EngineName = Literal["dicke", "tw", "multimode"]
PulseMode = Literal["none", "fixed", "optimize"]
SweepParameter = Literal["mu", "lambda", "kappa", "n"]
RunStatus = Literal["ok", "failed"]

DEFAULT_SAMPLE_COUNT = 200
DEFAULT_TRAJECTORIES = 10_000
DEFAULT_PULSE_BUDGET = 16
MAX_SEED = 2**64 - 1


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_points: Annotated[int | None, Field(default=None, ge=2, description="Число узлов (степень двойки)")]
    half_width: Annotated[float | None, Field(default=None, gt=0, description="Полуширина L в осцилляторных единицах")]

    @field_validator("n_points")
    @classmethod
    def validate_power_of_two(cls, v: int | None) -> int | None:
        """n_points должен быть степенью двойки."""
        if v is not None and v & (v - 1):
            raise ValueError("n_points must be a power of two")
        return v


class PulseSchedule(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Annotated[PulseMode, Field(default="none")]
    tau: Annotated[float | None, Field(default=None, gt=0, description="Время π-импульса для mode=fixed")]
    budget: Annotated[int, Field(default=DEFAULT_PULSE_BUDGET, ge=3, description="Бюджет прогонов для mode=optimize")]
    reference_tcat: Annotated[
        float | None, Field(default=None, gt=0, description="Опорное τ_cat для окна поиска; по умолчанию τ_cat^TF")
    ]

    @model_validator(mode="after")
    def check_fixed_time(self):
        """Для фиксированного импульса время обязательно."""
        if self.mode == "fixed" and self.tau is None:
            raise ValueError("pulse.tau is required when pulse.mode is 'fixed'")
        return self


class RunConfig(BaseModel):
    """Один JSON-документ на прогон; неизвестные ключи отвергаются."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: Annotated[str, Field(default="run", min_length=1, max_length=120)]
    engine: Annotated[EngineName, Field(default="multimode")]
    n_atoms: Annotated[int, Field(ge=2, description="Число атомов N")]
    mu_target: Annotated[float, Field(default=0.5, ge=0.5, description="Безразмерный химпотенциал μ")]
    lambda_: Annotated[float, Field(default=1.0, gt=0, alias="lambda", description="g̃_bb / g̃_aa")]
    kappa: Annotated[float, Field(default=0.0, ge=0, description="g̃_ab / g̃_aa")]
    g0: Annotated[float | None, Field(default=None, ge=0, description="Явное g₀ вместо калибровки по μ")]
    chi: Annotated[float | None, Field(default=None, description="Явная скорость скручивания для dicke/tw")]
    grid: Annotated[GridConfig, Field(default_factory=GridConfig)]
    dt: Annotated[float | None, Field(default=None, gt=0, description="Шаг по времени; по умолчанию из μ")]
    t_final: Annotated[float, Field(gt=0)]
    sample_count: Annotated[int, Field(default=DEFAULT_SAMPLE_COUNT, ge=3)]
    pulse: Annotated[PulseSchedule, Field(default_factory=PulseSchedule)]
    seed: Annotated[int, Field(default=0, ge=0, le=MAX_SEED)]
    n_traj: Annotated[int, Field(default=DEFAULT_TRAJECTORIES, ge=2)]
    output_dir: Annotated[Path | None, Field(default=None)]
    snapshot_path: Annotated[Path | None, Field(default=None, description="Куда сохранить финальное состояние")]
    resume_from: Annotated[Path | None, Field(default=None, description="Снимок для продолжения прогона")]

    @model_validator(mode="after")
    def check_schedule(self):
        """Фиксированный импульс должен попадать в (0, t_final)."""
        if self.pulse.mode == "fixed" and not 0 < self.pulse.tau < self.t_final:
            raise ValueError("pulse.tau must lie inside (0, t_final)")
        if self.resume_from is not None and self.engine != "multimode":
            raise ValueError("resume_from is only supported by the multimode engine")
        return self

    def resolved_dt(self) -> float:
        """По умолчанию 1e-3 при μ ≤ 40, иначе 2.5e-4."""
        if self.dt is not None:
            return self.dt
        return 1e-3 if self.mu_target <= 40 else 2.5e-4


class TimeSeries(BaseModel):
    tau: list[float]
    qfi: list[float]
    f0: list[float]
    f1: list[float]
    f2: list[float]
    chi: list[float] | None = None
    gamma_ab0: list[float] | None = None
    # None там, где m − s выходит за числовой базис (малые N)
    gamma_aa2: list[float | None] | None = None
    gamma_bb1_pow: list[float | None] | None = None
    gamma_bb2_pow: list[float | None] | None = None
    gamma_bb3_pow: list[float | None] | None = None

    def columns(self) -> dict[str, list[float]]:
        """Непустые столбцы в фиксированном порядке."""
        return {name: values for name, values in self.model_dump().items() if values is not None}


class PeakSummary(BaseModel):
    tau_peak: float
    f_peak: float
    at_boundary: bool


class RunDiagnostics(BaseModel):
    wall_clock_s: Annotated[float, Field(default=0.0, description="Не участвует в сравнении воспроизводимости")]
    dt: float | None = None
    n_steps: int = 0
    g0: float | None = None
    mu: float | None = None
    chi: float | None = None
    detuning: float | None = None
    tau_cat_tf: float | None = None
    pulse_times: list[float] = Field(default_factory=list)
    norm_drift: float = 0.0
    energy_drift: float = 0.0
    rng_algorithm: str | None = None
    seed: int | None = None
    integrity_ok: bool = True
    integrity_messages: list[str] = Field(default_factory=list)


class RunRecord(BaseModel):
    run_id: str
    config: RunConfig
    status: RunStatus
    error: str | None = None
    series: TimeSeries | None = None
    peak: PeakSummary | None = None
    diagnostics: RunDiagnostics = Field(default_factory=RunDiagnostics)
    output_path: Path | None = None

    @property
    def succeeded(self) -> bool:
        return self.status == "ok" and self.diagnostics.integrity_ok


class PulseOptimizationResult(BaseModel):
    tau_pulse: float
    record: RunRecord
    evaluations: int
    converged: bool
    budget_exhausted: bool
    objective_by_tau: dict[str, float] = Field(default_factory=dict)


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    base: RunConfig
    vary: SweepParameter
    values: Annotated[list[float], Field(min_length=1)]
    workers: Annotated[int | None, Field(default=None, ge=1)]


class SweepRow(BaseModel):
    value: float
    run_id: str
    status: RunStatus
    n_atoms: int
    mu: float
    mu_over_n: float
    f_peak_over_n2: float | None
    tau_peak: float | None
    tau_cat_tf: float | None
    gamma2_period: float | None
    at_boundary: bool | None


class SweepResult(BaseModel):
    vary: SweepParameter
    rows: list[SweepRow]
    records: list[RunRecord]
    summary_path: Path | None = None

    @property
    def succeeded(self) -> bool:
        return all(record.succeeded for record in self.records)


class FigureRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out_dir: Path
    skip_long: bool = False


class FigureResult(BaseModel):
    name: str
    files: list[Path]
    records: list[RunRecord] = Field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return all(record.succeeded for record in self.records)
