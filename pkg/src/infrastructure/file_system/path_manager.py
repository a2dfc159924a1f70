from pathlib import Path
from typing import Optional

from src.infrastructure.config.settings import AppConfig, PROJECT_ROOT, get_config


class PathManager:
    """Resuelve rutas de salida relativas a la raíz del proyecto."""

    EXTENSIONS = {'csv': '.csv', 'json': '.json', 'xlsx': '.xlsx'}

    def __init__(self, config: Optional[AppConfig] = None):
        self.config = config or get_config()

    def _resolve(self, path: Path) -> Path:
        return path if path.is_absolute() else PROJECT_ROOT / path

    def get_output_dir(self) -> Path:
        return self._resolve(Path(self.config.output.output_dir))

    def output_path(self, command: str, fmt: str, out: Optional[Path] = None) -> Optional[Path]:
        """
        Destino de la salida de un comando.

        Con `out` explícito se usa tal cual; sin él, csv/json van a stdout (None)
        y xlsx a output_dir/<comando>.xlsx.
        """
        if out is not None:
            return Path(out)
        if fmt == 'xlsx':
            return self.get_output_dir() / f"{command}{self.EXTENSIONS[fmt]}"
        return None
