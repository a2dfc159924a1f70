from __future__ import annotations
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd


class IResultExporter(ABC):
    """
    Contrato de exportación de resultados de un comando.
    """

    @abstractmethod
    def exportar_tabla(self, df: pd.DataFrame, destino: Optional[Path]) -> Optional[str]:
        """
        Escribe una tabla.

        Returns:
            El texto generado cuando destino es None (salida estándar)
        """
        pass

    @abstractmethod
    def exportar_reporte(self, reporte: Dict[str, Any], destino: Optional[Path]) -> Optional[str]:
        pass
