"""
Configuración centralizada del logging de la aplicación.

Los logs siempre van a stderr: stdout queda libre para CSV/JSON.
"""
from __future__ import annotations
import logging
import sys

from src.infrastructure.config.settings import AppConfig

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s - %(message)s'

_configured = False


def setup_logging(config: AppConfig, level: str | None = None) -> None:
    """
    Configura el logger raíz una sola vez por proceso.

    Args:
        config: Configuración de la aplicación
        level: Nivel explícito (sobrescribe config.logging.level)
    """
    global _configured
    nivel = (level or config.logging.level).upper()

    root = logging.getLogger()
    if _configured:
        root.setLevel(nivel)
        return

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if config.logging.log_to_file:
        logs_dir = config.logging.logs_dir
        logs_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(config.logging.log_file, encoding='utf-8'))

    formatter = logging.Formatter(LOG_FORMAT)
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)

    root.setLevel(nivel)
    _configured = True
