from app.core.exceptions import DomainError


class InvalidSpinStateError(DomainError):
    """Недопустимые параметры или амплитуды одномодового спинового состояния."""

    def __init__(self, message: str):
        super().__init__(message)


class UnknownAxisError(DomainError):
    """Ось вращения не из набора {x, y, z}."""

    def __init__(self, axis: str):
        self.axis = axis
        super().__init__(f"Unknown rotation axis '{axis}', expected one of x, y, z")


class AsymmetricCovarianceError(DomainError):
    """Матрица вторых моментов не симметрична в пределах допуска."""

    def __init__(self, asymmetry: float):
        self.asymmetry = asymmetry
        super().__init__(f"Second-moment matrix is not symmetric: max |S - S^T| = {asymmetry:.3e}")
