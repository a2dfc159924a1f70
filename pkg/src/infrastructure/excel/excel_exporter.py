"""
Exportación a .xlsx con pandas/openpyxl y el estilo de ExcelStyler.
"""
from __future__ import annotations
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src.application.interfaces.i_result_exporter import IResultExporter
from src.domain.exceptions.validation_exception import ScenarioValidationException
from src.infrastructure.excel.excel_styler import ExcelStyler

logger = logging.getLogger(__name__)


class XlsxResultExporter(IResultExporter):
    """
    Hoja 'resultado' para tablas; 'condiciones' (y 'martingala') para reportes.

    Los infinitos se escriben como texto porque Excel no los representa.
    """

    def __init__(self, styler: ExcelStyler | None = None):
        self.styler = styler or ExcelStyler()

    @staticmethod
    def _preparar(df: pd.DataFrame) -> pd.DataFrame:
        out = df.copy()
        for col in out.columns:
            if pd.api.types.is_float_dtype(out[col]) and np.isinf(out[col]).any():
                out[col] = out[col].map(lambda v: str(v) if isinstance(v, float) and math.isinf(v) else v)
        return out

    def _escribir(self, hojas: Dict[str, pd.DataFrame], destino: Optional[Path]) -> None:
        if destino is None:
            raise ScenarioValidationException("El formato xlsx requiere --out")
        destino = Path(destino)
        destino.parent.mkdir(parents=True, exist_ok=True)
        with pd.ExcelWriter(destino, engine='openpyxl') as writer:
            for nombre, df in hojas.items():
                self._preparar(df).to_excel(writer, sheet_name=nombre, index=False)
                self.styler.aplicar_estilos(writer.sheets[nombre], len(df))
        logger.info(f"💾 Excel escrito: {destino} ({', '.join(hojas)})")

    def exportar_tabla(self, df: pd.DataFrame, destino: Optional[Path]) -> Optional[str]:
        self._escribir({'resultado': df}, destino)
        return None

    def exportar_reporte(self, reporte: Dict[str, Any], destino: Optional[Path]) -> Optional[str]:
        hojas = {'condiciones': pd.DataFrame(reporte.get('rows', []))}
        martingala = reporte.get('martingale')
        if martingala:
            hojas['martingala'] = pd.DataFrame({
                't': martingala['t'], 'mean': martingala['mean'],
                'std_error': martingala['std_error'], 'z': martingala['z'],
            })
        self._escribir(hojas, destino)
        return None
