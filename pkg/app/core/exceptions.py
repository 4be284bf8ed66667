class DomainError(Exception):
    """Базовое исключение для всех доменных ошибок."""
    pass


class NumericalIntegrityError(DomainError):
    """Нарушен численный инвариант (замыкание разложения, границы, законы сохранения)."""

    def __init__(self, check: str, detail: str):
        self.check = check
        self.detail = detail
        super().__init__(f"Integrity check '{check}' failed: {detail}")
