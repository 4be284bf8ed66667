from app.core.exceptions import DomainError


class InvalidParameterError(DomainError):
    """Физический параметр вне допустимой области."""

    def __init__(self, message: str):
        super().__init__(message)


class GridError(DomainError):
    """Сетка не подходит для задачи (не степень двойки, слишком узкая)."""

    def __init__(self, message: str):
        super().__init__(message)


class GroundStateConvergenceError(DomainError):
    """Поиск основного состояния не сошёлся."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"Ground state did not converge after {iterations} iterations (relative residual {residual:.3e})"
        )


class FieldInstabilityError(DomainError):
    """В распространяемых полях появились NaN/Inf."""

    def __init__(self, step: int, time: float, batch_index: int | None = None):
        self.step = step
        self.time = time
        self.batch_index = batch_index
        location = "" if batch_index is None else f" in batch entry {batch_index}"
        super().__init__(f"Non-finite field values{location} at step {step} (t={time:.6g})")


class UndefinedTwistingError(DomainError):
    """Комбинация 1 + λ − 2κ не положительна, время кота не определено."""

    def __init__(self, lambda_: float, kappa: float):
        self.lambda_ = lambda_
        self.kappa = kappa
        super().__init__(f"1 + lambda - 2 kappa must be positive, got lambda={lambda_}, kappa={kappa}")
