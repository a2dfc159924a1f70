"""
Estilo uniforme de las hojas de resultados: encabezado, filas alternas,
columna 'pass' coloreada y ancho automático.
"""
from __future__ import annotations
import logging
from typing import Any

from openpyxl.utils import get_column_letter

from src.infrastructure.config.excel_style_config import ExcelStyleConfig

logger = logging.getLogger(__name__)


class ExcelStyler:
    @staticmethod
    def aplicar_estilos(worksheet: Any, data_rows: int, status_column: str = 'pass') -> None:
        max_col = worksheet.max_column
        if data_rows <= 0 or max_col == 0:
            logger.debug(f"[ExcelStyler] Hoja '{worksheet.title}' sin filas para estilizar")
            return

        border = ExcelStyleConfig.get_thin_border()
        headers = {}
        for col in range(1, max_col + 1):
            cell = worksheet.cell(row=1, column=col)
            headers[cell.value] = col
            cell.fill = ExcelStyleConfig.get_header_fill()
            cell.font = ExcelStyleConfig.get_header_font()
            cell.alignment = ExcelStyleConfig.get_center_alignment()
            cell.border = border

        status_col = headers.get(status_column)
        widths = {c: len(str(worksheet.cell(row=1, column=c).value or "")) for c in range(1, max_col + 1)}
        for r in range(2, data_rows + 2):
            fill = ExcelStyleConfig.get_row_fill(r)
            for c in range(1, max_col + 1):
                cell = worksheet.cell(row=r, column=c)
                cell.border = border
                cell.fill = fill
                if isinstance(cell.value, float):
                    cell.number_format = ExcelStyleConfig.NUMBER_FORMAT
                widths[c] = max(widths[c], len(str(cell.value)) if cell.value is not None else 0)
            if status_col is not None:
                status = worksheet.cell(row=r, column=status_col)
                status.fill = ExcelStyleConfig.get_status_fill(bool(status.value))

        for c, w in widths.items():
            ancho = max(min(w + 3, ExcelStyleConfig.MAX_WIDTH), ExcelStyleConfig.MIN_WIDTH)
            worksheet.column_dimensions[get_column_letter(c)].width = ancho
        worksheet.freeze_panes = "A2"
        logger.debug(f"[ExcelStyler] Estilo aplicado a '{worksheet.title}' ({data_rows} filas)")
