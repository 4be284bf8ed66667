from app.core.exceptions import DomainError


class InvalidMultimodeStateError(DomainError):
    """Недопустимые коэффициенты или поля многомодового состояния."""

    def __init__(self, message: str):
        super().__init__(message)


class ComponentInstabilityError(DomainError):
    """Поля числовой компоненты m стали неконечными при распространении."""

    def __init__(self, m: float, step: int, time: float):
        self.m = m
        self.step = step
        self.time = time
        super().__init__(f"Number component m={m:g} became non-finite at step {step} (t={time:.6g})")


class OverlapTableError(DomainError):
    """Таблица перекрытий не соответствует состоянию (время или набор порядков)."""

    def __init__(self, message: str):
        super().__init__(message)
