"""E2E тесты командной строки spincat."""
import json
from pathlib import Path

import numpy as np
import pytest

from app.cli import EXIT_BAD_INPUT, EXIT_FAILED_RUN, EXIT_OK, main
from app.config.settings import settings

pytestmark = pytest.mark.e2e


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path: Path):
    """Хранилище и размер TW-ансамбля на время теста."""
    monkeypatch.setattr(settings, "OUTPUT_DIR", tmp_path / "runs")
    monkeypatch.setattr(settings, "TW_TRAJECTORIES", 2_000)


def write_config(path: Path, **values) -> Path:
    path.write_text(json.dumps(values), encoding="utf-8")
    return path


@pytest.fixture
def dicke_file(tmp_path: Path) -> Path:
    return write_config(
        tmp_path / "dicke.json",
        name="cli-dicke",
        engine="dicke",
        n_atoms=20,
        chi=1.0,
        t_final=float(np.pi),
        sample_count=201,
    )


class TestRunCommand:
    """spincat run --config"""

    def test_run_success(self, dicke_file, tmp_path, capsys):
        code = main(["run", "--config", str(dicke_file)])

        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["status"] == "ok"
        assert summary["peak"]["f_peak"] == pytest.approx(400.0, rel=1e-3)
        assert "series" not in summary
        run_dir = tmp_path / "runs" / summary["run_id"]
        assert (run_dir / "summary.json").is_file()
        assert (run_dir / "series.csv").is_file()

    def test_missing_config_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "absent.json")]) == EXIT_BAD_INPUT

    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path / "typo.json", engine="dicke", n_atoms=20, chi=1.0, t_final=1.0, mu=3.0)
        assert main(["run", "--config", str(path)]) == EXIT_BAD_INPUT

    def test_invalid_value(self, tmp_path):
        path = write_config(tmp_path / "bad.json", engine="dicke", n_atoms=20, chi=1.0, t_final=1.0, kappa=-1.0)
        assert main(["run", "--config", str(path)]) == EXIT_BAD_INPUT

    def test_unknown_verb_exits(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["render"])
        assert exc_info.value.code == 2


class TestOtherCommands:
    """sweep, optimize-pulse и figure."""

    def test_sweep(self, dicke_file, capsys):
        code = main(["sweep", "--config", str(dicke_file), "--vary", "n", "--values", "10", "20"])

        assert code == EXIT_OK
        output = json.loads(capsys.readouterr().out)
        assert output["vary"] == "n"
        assert [row["n_atoms"] for row in output["rows"]] == [10, 20]
        assert Path(output["summary_path"]).is_dir()

    def test_optimize_pulse_rejects_dicke(self, dicke_file):
        assert main(["optimize-pulse", "--config", str(dicke_file)]) == EXIT_FAILED_RUN

    def test_unknown_figure(self, tmp_path):
        assert main(["figure", "fig99", "--out", str(tmp_path / "out")]) == EXIT_FAILED_RUN

    def test_fig2(self, tmp_path, capsys):
        out = tmp_path / "fig2"

        code = main(["figure", "fig2", "--out", str(out)])

        assert code == EXIT_OK
        output = json.loads(capsys.readouterr().out)
        assert output["name"] == "fig2"
        assert (out / "fig2_exact.csv").is_file()
        assert (out / "fig2_tw.csv").is_file()
        header = (out / "fig2_exact.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith("chi_t [rad],qfi [1]")
