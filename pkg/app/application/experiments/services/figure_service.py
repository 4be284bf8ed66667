"""Рецепты данных для рисунков: каждый пишет CSV, достаточные для построения графика."""
from collections.abc import Callable
from pathlib import Path

import numpy as np
from loguru import logger

from app.application.experiments.analysis import gamma2_period
from app.application.experiments.dto import FigureRequest, FigureResult, PulseSchedule, RunConfig, RunRecord
from app.application.experiments.engines import prepare_ground_state
from app.application.experiments.exceptions import RecipeNotFoundError, SeriesAnalysisError
from app.application.experiments.ports import RunRepository
from app.application.experiments.services.run_service import RunService
from app.application.experiments.services.sweep_service import SweepService
from app.core.field.thomas_fermi import tf_chi, tf_mu_for_tcat, tf_tcat
from app.core.field.twisting import twisting_rate_series

N_ATOMS = 100
MULTIMODE_MU = 32.08
LONG_MU = 0.6
LONG_DT = 1e-2
LONG_T_FINAL = 2500.0
ASYMMETRIC_MU = 10.29
ASYMMETRIC_LAMBDA = 0.5
PEAK_HEADROOM = 1.3
SPEED_LIMIT_MULTIPLES = (1.0, 1.5, 2.0)

Recipe = Callable[[FigureRequest], tuple[list[Path], list[RunRecord]]]


class FigureService:
    def __init__(
        self,
        runs: RunService,
        sweeps: SweepService,
        tables: RunRepository,
        tw_trajectories: int = 10_000,
        fft_workers: int | None = None,
    ):
        self.runs = runs
        self.sweeps = sweeps
        self.tables = tables
        self.tw_trajectories = tw_trajectories
        self.fft_workers = fft_workers

    @property
    def recipes(self) -> dict[str, Recipe]:
        return {
            "fig2": self._fig2,
            "fig3": self._fig3,
            "fig4": self._fig4,
            "fig5": self._fig5,
            "fig6": self._fig6,
            "fig7-mini": self._fig7_mini,
        }

    def render(self, name: str, request: FigureRequest) -> FigureResult:
        recipe = self.recipes.get(name)
        if recipe is None:
            raise RecipeNotFoundError(name, tuple(self.recipes))
        request.out_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Rendering figure data '{name}' into {request.out_dir} (skip_long={request.skip_long})")
        files, records = recipe(request)
        logger.info(f"Figure '{name}' wrote {len(files)} file(s) from {len(records)} run(s)")
        return FigureResult(name=name, files=files, records=records)

    def _fig2(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        """Точная OAT и TW при χ = 1, так что ось времени: это χt ∈ [0, π]."""
        exact = self._run(
            request,
            RunConfig(name="fig2-exact", engine="dicke", n_atoms=N_ATOMS, chi=1.0, t_final=np.pi, sample_count=201),
        )
        tw = self._run(request, exact.config.model_copy(update={"name": "fig2-tw", "engine": "tw", "n_traj": self.tw_trajectories}))
        files = [
            self._series_table(request, "fig2_exact.csv", exact, ("qfi", "f0", "f1", "f2"), time_column="chi_t"),
            self._series_table(request, "fig2_tw.csv", tw, ("qfi", "f0", "f1", "f2"), time_column="chi_t"),
        ]
        return [f for f in files if f is not None], [exact, tw]

    def _fig3(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        records = [self._run(request, _multimode(MULTIMODE_MU, "fig3-mu32.08"))]
        if not request.skip_long:
            long_run = _multimode(LONG_MU, "fig3-mu0.6").model_copy(
                update={"dt": LONG_DT, "t_final": LONG_T_FINAL, "sample_count": 501}
            )
            records.append(self._run(request, long_run))
            records.append(self._run(request, long_run.model_copy(update={"name": "fig3-mu0.6-dicke", "engine": "dicke"})))
        files = [
            self._series_table(request, f"{record.config.name.replace('-', '_')}.csv", record, ("qfi",))
            for record in records
        ]
        return [f for f in files if f is not None], records

    def _fig4(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        """χ(τ) при дыхательных колебаниях и постоянная χ_TF для сравнения."""
        files = []
        for mu in (LONG_MU, MULTIMODE_MU):
            config = RunConfig(name=f"fig4-mu{mu:g}", n_atoms=N_ATOMS, mu_target=mu, t_final=15.0, sample_count=301)
            ground = prepare_ground_state(config, self.fft_workers)
            series = twisting_rate_series(
                ground,
                config.lambda_,
                config.kappa,
                config.resolved_dt(),
                config.t_final,
                config.sample_count,
                workers=self.fft_workers,
            )
            chi_tf = tf_chi(mu, N_ATOMS, config.lambda_, config.kappa)
            files.append(
                self.tables.write_table(
                    request.out_dir / f"fig4_mu{mu:g}.csv",
                    {"tau": series.tau, "chi": series.chi, "chi_tf": np.full(series.tau.size, chi_tf)},
                )
            )
        return files, []

    def _fig5(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        """Асимметричный конденсат без импульса, с оптимальным импульсом и симметричный ориентир."""
        files: list[Path] = []
        records: list[RunRecord] = []
        cases = [(ASYMMETRIC_MU, None, None)]
        if not request.skip_long:
            cases.append((LONG_MU, LONG_DT, LONG_T_FINAL))
        for mu, dt, t_final in cases:
            symmetric = _multimode(mu, f"fig5-mu{mu:g}-symmetric", dt=dt, t_final=t_final)
            asymmetric = _multimode(
                mu, f"fig5-mu{mu:g}-nopulse", lambda_=ASYMMETRIC_LAMBDA, dt=dt, t_final=t_final
            )
            symmetric_record = self._run(request, symmetric)
            reference = None
            if mu == LONG_MU and symmetric_record.peak is not None:
                # χ ∝ 1 + λ при κ = 0
                reference = symmetric_record.peak.tau_peak * 2.0 / (1.0 + ASYMMETRIC_LAMBDA)
            nopulse_record = self._run(request, asymmetric)
            search = self.runs.optimize_pulse(
                asymmetric.model_copy(
                    update={
                        "name": f"fig5-mu{mu:g}-pulse",
                        "output_dir": request.out_dir / "runs",
                        "pulse": PulseSchedule(mode="optimize", reference_tcat=reference),
                    }
                )
            )
            records += [symmetric_record, nopulse_record, search.record]
            prefix = f"fig5_mu{mu:g}"
            for suffix, record in (("symmetric", symmetric_record), ("nopulse", nopulse_record), ("pulse", search.record)):
                path = self._series_table(request, f"{prefix}_{suffix}.csv", record, ("qfi", "f0", "f1", "f2"))
                if path is not None:
                    files.append(path)
            taus = sorted(search.objective_by_tau, key=float)
            files.append(
                self.tables.write_table(
                    request.out_dir / f"{prefix}_search.csv",
                    {"tau_pulse": [float(t) for t in taus], "f_peak": [search.objective_by_tau[t] for t in taus]},
                )
            )
        return files, records

    def _fig6(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        record = self._run(request, _multimode(MULTIMODE_MU, "fig6-mu32.08"))
        if record.series is None:
            return [], [record]
        series = record.series
        columns = {
            "tau": series.tau,
            "f0": series.f0,
            "f1": series.f1,
            "f2": series.f2,
            "f_sum": list(np.add(np.add(series.f0, series.f1), series.f2)),
            "qfi": series.qfi,
            "gamma_bb1_pow": series.gamma_bb1_pow,
            "gamma_bb2_pow": series.gamma_bb2_pow,
            "gamma_bb3_pow": series.gamma_bb3_pow,
        }
        return [self.tables.write_table(request.out_dir / "fig6_mu32.08.csv", columns)], [record]

    def _fig7_mini(self, request: FigureRequest) -> tuple[list[Path], list[RunRecord]]:
        """Пилотный прогон даёт период T трассы |γ₂^{aa}(0)|; затем μ с τ_cat^TF = T, 1.5T, 2T."""
        pilot = self._run(request, _multimode(MULTIMODE_MU, "fig7-mini-pilot", t_final=12.0))
        if pilot.series is None:
            return [], [pilot]
        period = gamma2_period(pilot.series.tau, pilot.series.gamma_aa2)
        if period is None:
            raise SeriesAnalysisError("The pilot run shows no |gamma_2^aa(0)| oscillation to extract a period from")
        logger.info(f"fig7-mini: |gamma_2^aa(0)| period T={period:.6g}")

        mus = [tf_mu_for_tcat(k * period, N_ATOMS, 1.0, 0.0) for k in SPEED_LIMIT_MULTIPLES]
        configs = [
            _multimode(mu, f"fig7-mini-k{k:g}", t_final=PEAK_HEADROOM * k * period).model_copy(
                update={"output_dir": request.out_dir / "runs"}
            )
            for k, mu in zip(SPEED_LIMIT_MULTIPLES, mus)
        ]
        result = self.sweeps.run_members("mu", mus, configs, name="fig7-mini")
        rows = result.rows
        files = [
            self.tables.write_table(
                request.out_dir / "fig7_mini_summary.csv",
                {
                    "multiple": list(SPEED_LIMIT_MULTIPLES),
                    "mu": [row.mu for row in rows],
                    "mu_over_n": [row.mu_over_n for row in rows],
                    "f_peak_over_n2": [_nan(row.f_peak_over_n2) for row in rows],
                    "tau_peak": [_nan(row.tau_peak) for row in rows],
                    "tau_cat_tf": [_nan(row.tau_cat_tf) for row in rows],
                    "gamma2_period": [period] * len(rows),
                },
            ),
            self.tables.write_table(
                request.out_dir / "fig7_mini_pilot.csv",
                {"tau": pilot.series.tau, "gamma_aa2": pilot.series.gamma_aa2},
            ),
        ]
        return files, [pilot, *result.records]

    def _run(self, request: FigureRequest, config: RunConfig) -> RunRecord:
        return self.runs.run(config.model_copy(update={"output_dir": request.out_dir / "runs"}))

    def _series_table(
        self,
        request: FigureRequest,
        filename: str,
        record: RunRecord,
        names: tuple[str, ...],
        time_column: str = "tau",
    ) -> Path | None:
        if record.series is None:
            logger.warning(f"Run {record.run_id} produced no series; {filename} is not written")
            return None
        columns = record.series.columns()
        return self.tables.write_table(
            request.out_dir / filename,
            {time_column: columns["tau"], **{name: columns[name] for name in names}},
        )


def _multimode(
    mu: float,
    name: str,
    *,
    lambda_: float = 1.0,
    dt: float | None = None,
    t_final: float | None = None,
) -> RunConfig:
    """Многомодовый прогон N=100, κ=0 с запасом 1.3·τ_cat^TF по времени."""
    if t_final is None:
        t_final = PEAK_HEADROOM * tf_tcat(mu, N_ATOMS, lambda_, 0.0)
    return RunConfig(
        name=name,
        engine="multimode",
        n_atoms=N_ATOMS,
        mu_target=mu,
        lambda_=lambda_,
        kappa=0.0,
        dt=dt,
        t_final=t_final,
        sample_count=401,
    )


def _nan(value: float | None) -> float:
    return float("nan") if value is None else value
