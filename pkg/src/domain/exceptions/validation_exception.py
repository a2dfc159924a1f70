from src.domain.exceptions.domain_exception import DomainException


class ScenarioValidationException(DomainException):
    """
    Documento de escenario (JSON) mal formado o incompleto.

    Attributes:
        source: Nombre del archivo o sección que falló
    """

    def __init__(self, message: str, source: str | None = None):
        super().__init__(message)
        self.source = source

    def __str__(self) -> str:
        base = super().__str__()
        return f"{self.source}: {base}" if self.source else base
