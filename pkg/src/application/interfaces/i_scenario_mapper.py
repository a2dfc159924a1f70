from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple


class BaseScenarioMapper(ABC):
    """
    Contrato base para convertir un documento de escenario en una solicitud del dominio.
    """

    @abstractmethod
    def validar_estructura(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        """
        Valida el documento contra el esquema del comando.

        Returns:
            (True, "") si es válido; (False, mensaje) si no
        """
        pass

    @abstractmethod
    def mapear(self, data: Dict[str, Any], source_name: str) -> Any:
        """
        Retorna la solicitud del comando con los objetos del dominio construidos.

        Raises:
            ScenarioValidationException: Si el documento no cumple el esquema o
                los objetos del dominio rechazan sus valores
        """
        pass
