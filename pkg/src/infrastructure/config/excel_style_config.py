"""
Estilos de las hojas de resultados exportadas a Excel.
"""
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side


class ColorPalette:
    HEADER_BG = "1F4E79"     # Azul oscuro
    HEADER_TEXT = "FFFFFF"
    ROW_EVEN = "DEEBF7"      # Azul claro
    ROW_ODD = "FFFFFF"
    PASS = "C6EFCE"          # Verde
    FAIL = "FFC7CE"          # Rojo
    BORDER = "AAAAAA"


def _fill(color: str) -> PatternFill:
    return PatternFill(start_color=color, end_color=color, fill_type="solid")


class ExcelStyleConfig:
    """
    Estilos predefinidos; cada llamada entrega una instancia nueva.
    """
    NUMBER_FORMAT = "0.000000000000"
    MIN_WIDTH = 12
    MAX_WIDTH = 40

    @staticmethod
    def get_header_fill() -> PatternFill:
        return _fill(ColorPalette.HEADER_BG)

    @staticmethod
    def get_header_font() -> Font:
        return Font(color=ColorPalette.HEADER_TEXT, bold=True)

    @staticmethod
    def get_thin_border() -> Border:
        side = Side(style="thin", color=ColorPalette.BORDER)
        return Border(left=side, right=side, top=side, bottom=side)

    @staticmethod
    def get_row_fill(index: int) -> PatternFill:
        """Filas alternas."""
        return _fill(ColorPalette.ROW_EVEN if index % 2 == 0 else ColorPalette.ROW_ODD)

    @staticmethod
    def get_status_fill(passed: bool) -> PatternFill:
        return _fill(ColorPalette.PASS if passed else ColorPalette.FAIL)

    @staticmethod
    def get_center_alignment() -> Alignment:
        return Alignment(horizontal='center', vertical='center', wrap_text=True)
