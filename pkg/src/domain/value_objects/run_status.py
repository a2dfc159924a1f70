"""
Value Objects del estado de una ejecución de la CLI.

Los Value Objects son inmutables y se comparan por valor, no por identidad.
"""
from enum import Enum


class ExitCode(Enum):
    """
    Código de salida de la CLI (contrato estable para CI).

    Attributes:
        EXITO: Ejecución completa y verificaciones aprobadas (0)
        FALLA_VERIFICACION: Alguna condición no pasó (1)
        ERROR_ENTRADA: Uso incorrecto o escenario inválido (2)
    """
    EXITO = 0
    FALLA_VERIFICACION = 1
    ERROR_ENTRADA = 2

    @classmethod
    def from_passed(cls, passed: bool) -> 'ExitCode':
        return cls.EXITO if passed else cls.FALLA_VERIFICACION

    @property
    def es_exitoso(self) -> bool:
        """Retorna True si el estado es EXITO"""
        return self == ExitCode.EXITO

    def __int__(self) -> int:
        return self.value


class CommandName(Enum):
    """Subcomandos de la CLI"""
    CURVE = "curve"
    AFFINE = "affine"
    FILTER = "filter"
    SIMULATE = "simulate"
    VERIFY = "verify"

    @classmethod
    def from_string(cls, valor: str) -> 'CommandName':
        """
        Crea un CommandName desde un string.

        Raises:
            ValueError: Si el comando no existe
        """
        valor_limpio = valor.strip().lower()
        for comando in cls:
            if comando.value == valor_limpio:
                return comando
        raise ValueError(f"Comando inválido: '{valor}'. Opciones: {', '.join(c.value for c in cls)}")

    @property
    def es_estocastico(self) -> bool:
        """Los comandos que simulan requieren semilla"""
        return self in (CommandName.FILTER, CommandName.SIMULATE)

    def __str__(self) -> str:
        return self.value


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"
    XLSX = "xlsx"

    @classmethod
    def from_string(cls, valor: str) -> 'OutputFormat':
        try:
            return cls(valor.strip().lower())
        except ValueError:
            raise ValueError(f"Formato inválido: '{valor}'. Debe ser csv, json o xlsx") from None
