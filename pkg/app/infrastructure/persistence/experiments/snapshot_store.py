"""Контрольные точки многомодового состояния в сжатом .npz."""
import zipfile
from pathlib import Path

import numpy as np
from loguru import logger

from app.application.experiments.exceptions import SnapshotFormatError
from app.core.field.exceptions import GridError
from app.core.field.grid import Grid1D
from app.core.multimode.entities import MultimodeState
from app.core.multimode.exceptions import InvalidMultimodeStateError

FORMAT_VERSION = 1
KEYS = ("format_version", "n_atoms", "time", "m", "action", "log_abs", "phase", "fields", "half_width")


class NpzSnapshotStore:
    def save(self, state: MultimodeState, path: Path) -> Path:
        path = Path(path)
        if path.suffix != ".npz":
            path = path.with_suffix(".npz")
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            path,
            format_version=FORMAT_VERSION,
            n_atoms=state.n_atoms,
            time=state.time,
            m=state.m_values,
            action=state.action,
            log_abs=state.log_abs,
            phase=state.phase,
            fields=state.fields,
            half_width=state.grid.half_width,
        )
        logger.debug(f"Snapshot written: {path} (N={state.n_atoms}, tau={state.time})")
        return path

    def load(self, path: Path) -> MultimodeState:
        path = Path(path)
        try:
            with np.load(path, allow_pickle=False) as data:
                missing = [key for key in KEYS if key not in data.files]
                if missing:
                    raise SnapshotFormatError(path, f"missing keys {missing}")
                version = int(data["format_version"])
                if version != FORMAT_VERSION:
                    raise SnapshotFormatError(path, f"unsupported format_version {version}")
                fields = data["fields"]
                state = MultimodeState(
                    n_atoms=int(data["n_atoms"]),
                    log_abs=data["log_abs"],
                    phase=data["phase"],
                    fields=fields,
                    action=data["action"],
                    grid=Grid1D(n_points=int(fields.shape[-1]), half_width=float(data["half_width"])),
                    time=float(data["time"]),
                )
                state.validate()
                if not np.array_equal(state.m_values, data["m"]):
                    raise SnapshotFormatError(path, "stored m labels do not match the number basis")
        except (OSError, ValueError, IndexError, zipfile.BadZipFile, GridError, InvalidMultimodeStateError) as exc:
            raise SnapshotFormatError(path, str(exc)) from exc
        logger.debug(f"Snapshot loaded: {path} (N={state.n_atoms}, tau={state.time})")
        return state
