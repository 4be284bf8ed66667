import csv
from collections.abc import Sequence
from pathlib import Path

from loguru import logger

from app.application.experiments.dto import RunRecord, SweepResult
from app.application.experiments.exceptions import RunNotFoundError

SUMMARY_FILE = "summary.json"
SERIES_FILE = "series.csv"
SWEEP_CSV = "sweep_summary.csv"
SWEEP_JSON = "sweep_summary.json"
INDEX_DIR = "_index"
POINTER_SUFFIX = ".path"

# единицы: время в 1/ω, энергии в ħω, длины в осцилляторных длинах
UNITS: dict[str, str] = {
    "tau": "1/omega",
    "tau_peak": "1/omega",
    "tau_cat_tf": "1/omega",
    "tau_pulse": "1/omega",
    "gamma2_period": "1/omega",
    "chi_t": "rad",
    "qfi": "1",
    "f0": "1",
    "f1": "1",
    "f2": "1",
    "f_sum": "1",
    "f_peak": "1",
    "f_peak_over_n2": "1",
    "chi": "omega",
    "chi_tf": "omega",
    "mu": "hbar*omega",
    "mu_over_n": "hbar*omega",
    "value": "1",
}


def header(name: str) -> str:
    """Имя столбца с единицами: 'tau [1/omega]'; безразмерные трассы γ: '[1]'."""
    return f"{name} [{UNITS.get(name, '1')}]"


class FileRunRepository:
    """Запись прогона: каталог <root>/<run_id> с summary.json и series.csv.

    Прогон с собственным output_dir сохраняется туда, а в <root>/_index/<run_id>.path
    остаётся абсолютный путь к его каталогу, по которому load находит запись.
    """

    def __init__(self, root: Path):
        self.root = Path(root)

    def save(self, record: RunRecord) -> Path:
        directory = (record.config.output_dir or self.root) / record.run_id
        directory.mkdir(parents=True, exist_ok=True)
        if record.series is not None:
            self.write_table(directory / SERIES_FILE, record.series.columns())
        stored = record.model_copy(update={"output_path": directory})
        (directory / SUMMARY_FILE).write_text(stored.model_dump_json(by_alias=True, indent=2), encoding="utf-8")
        if directory.resolve() != (self.root / record.run_id).resolve():
            self._write_pointer(record.run_id, directory)
        logger.debug(f"Run record saved: id={record.run_id} path={directory}")
        return directory

    def load(self, run_id: str) -> RunRecord:
        path = self._locate(run_id) / SUMMARY_FILE
        if not path.is_file():
            logger.warning(f"Run record not found: id={run_id}")
            raise RunNotFoundError(run_id)
        return RunRecord.model_validate_json(path.read_text(encoding="utf-8"))

    def _write_pointer(self, run_id: str, directory: Path) -> None:
        pointer = self.root / INDEX_DIR / f"{run_id}{POINTER_SUFFIX}"
        pointer.parent.mkdir(parents=True, exist_ok=True)
        pointer.write_text(str(directory.resolve()), encoding="utf-8")

    def _locate(self, run_id: str) -> Path:
        local = self.root / run_id
        if (local / SUMMARY_FILE).is_file():
            return local
        pointer = self.root / INDEX_DIR / f"{run_id}{POINTER_SUFFIX}"
        if pointer.is_file():
            return Path(pointer.read_text(encoding="utf-8").strip())
        return local

    def save_sweep(self, result: SweepResult, name: str) -> Path:
        base = result.records[0].config.output_dir if result.records else None
        directory = (base or self.root) / f"{name}-sweep"
        directory.mkdir(parents=True, exist_ok=True)
        columns = [
            "value", "run_id", "status", "n_atoms", "mu", "mu_over_n",
            "f_peak_over_n2", "tau_peak", "tau_cat_tf", "gamma2_period", "at_boundary",
        ]
        with (directory / SWEEP_CSV).open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow([f"vary={result.vary}"] + [header(c) for c in columns[1:]])
            for row in result.rows:
                data = row.model_dump()
                writer.writerow([_cell(data[c]) for c in columns])
        summary = result.model_dump_json(include={"vary", "rows"}, indent=2)
        (directory / SWEEP_JSON).write_text(summary, encoding="utf-8")
        logger.debug(f"Sweep summary saved: {directory}")
        return directory

    def write_table(self, path: Path, columns: dict[str, Sequence[float]]) -> Path:
        lengths = {name: len(values) for name, values in columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"All columns must share one length, got {lengths}")
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow([header(name) for name in columns])
            writer.writerows(zip(*([_cell(v) for v in values] for values in columns.values())))
        return path


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, str):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")
