"""
Lector de documentos de escenario (JSON, o YAML por extensión).
"""
from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Any, Dict

import yaml

from src.domain.exceptions.validation_exception import ScenarioValidationException

logger = logging.getLogger(__name__)


class ScenarioFileReader:
    """Devuelve el documento como dict; cualquier problema de lectura es un ScenarioValidationException."""

    YAML_SUFFIXES = ('.yaml', '.yml')

    def __init__(self, encoding: str = 'utf-8'):
        self._encoding = encoding

    def read(self, ruta: Path) -> Dict[str, Any]:
        ruta = Path(ruta)
        if not ruta.exists():
            raise ScenarioValidationException("El archivo de escenario no existe", ruta.name)
        try:
            texto = ruta.read_text(encoding=self._encoding)
        except (OSError, UnicodeDecodeError) as e:
            raise ScenarioValidationException(f"No se pudo leer: {e}", ruta.name) from e
        return self.parse(texto, ruta.name, yaml_format=ruta.suffix.lower() in self.YAML_SUFFIXES)

    def parse(self, texto: str, source_name: str = "<stdin>", yaml_format: bool = False) -> Dict[str, Any]:
        if not texto.strip():
            raise ScenarioValidationException("Documento de escenario vacío", source_name)
        try:
            data = yaml.safe_load(texto) if yaml_format else json.loads(texto)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ScenarioValidationException(f"Documento mal formado: {e}", source_name) from e
        if not isinstance(data, dict):
            raise ScenarioValidationException("El escenario debe ser un objeto", source_name)
        logger.info(f"📄 Escenario leído: {source_name} ({len(data)} claves)")
        return data
