from app.core.exceptions import DomainError


class EnsembleError(DomainError):
    """Недопустимые параметры выборки фазового пространства."""

    def __init__(self, message: str):
        super().__init__(message)


class DegenerateEnsembleError(DomainError):
    """Все траектории совпадают, статистическая ошибка не определена."""

    def __init__(self, n_traj: int):
        self.n_traj = n_traj
        super().__init__(f"Ensemble of {n_traj} trajectories is degenerate (zero spread)")
