"""
Exportación tabular en CSV con precisión completa de punto flotante.
"""
from __future__ import annotations
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from src.application.interfaces.i_result_exporter import IResultExporter

logger = logging.getLogger(__name__)


class CsvResultExporter(IResultExporter):
    """Un archivo por tabla; los reportes se aplanan a una fila por condición."""

    def __init__(self, float_digits: int = 17):
        self.float_format = f"%.{float_digits}g"

    def exportar_tabla(self, df: pd.DataFrame, destino: Optional[Path]) -> Optional[str]:
        texto = df.to_csv(index=False, float_format=self.float_format, na_rep='')
        if destino is None:
            return texto
        destino = Path(destino)
        destino.parent.mkdir(parents=True, exist_ok=True)
        destino.write_text(texto, encoding='utf-8')
        logger.info(f"💾 CSV escrito: {destino} ({len(df)} filas)")
        return None

    def exportar_reporte(self, reporte: Dict[str, Any], destino: Optional[Path]) -> Optional[str]:
        filas = reporte.get('rows')
        if filas is None:
            filas = [{'condition': c['condition'], 'max_residual': c['max_residual'],
                      'tolerance': c['tolerance'], 'pass': c['pass']} for c in reporte.get('conditions', [])]
        return self.exportar_tabla(pd.DataFrame(filas), destino)
