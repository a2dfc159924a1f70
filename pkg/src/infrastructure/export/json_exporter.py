"""
Exportación JSON: tablas como lista de registros, reportes como documento.
"""
from __future__ import annotations
import json
import math
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src.application.interfaces.i_result_exporter import IResultExporter

logger = logging.getLogger(__name__)


def _valor(v: Any) -> Any:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _registros(df: pd.DataFrame) -> list:
    # NaN / NA → null; ±inf → "inf" (JSON estricto)
    limpio = df.astype(object).where(pd.notna(df), None)
    return [{k: _valor(v) for k, v in fila.items()} for fila in limpio.to_dict(orient="records")]


class JsonResultExporter(IResultExporter):
    def __init__(self, indent: int = 2):
        self.indent = indent

    def _escribir(self, contenido: Any, destino: Optional[Path]) -> Optional[str]:
        texto = json.dumps(contenido, indent=self.indent, ensure_ascii=False, allow_nan=False)
        if destino is None:
            return texto + "\n"
        destino = Path(destino)
        destino.parent.mkdir(parents=True, exist_ok=True)
        destino.write_text(texto + "\n", encoding='utf-8')
        logger.info(f"💾 JSON escrito: {destino}")
        return None

    def exportar_tabla(self, df: pd.DataFrame, destino: Optional[Path]) -> Optional[str]:
        return self._escribir(_registros(df), destino)

    def exportar_reporte(self, reporte: Dict[str, Any], destino: Optional[Path]) -> Optional[str]:
        contenido = {k: v for k, v in reporte.items() if k != 'rows'}
        return self._escribir(contenido, destino)
