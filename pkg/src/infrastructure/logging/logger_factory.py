"""
Fábrica de loggers con prefijo de aplicación.
"""
import logging

APP_LOGGER = 'riskytimes'


def get_run_logger(command: str) -> logging.Logger:
    """Logger hijo por comando de la CLI (ej: 'riskytimes.verify')."""
    return logging.getLogger(f"{APP_LOGGER}.{command}")
