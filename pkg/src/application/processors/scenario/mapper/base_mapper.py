"""
Base común de los mappers: validación pydantic y conversión a objetos del dominio.
"""
from __future__ import annotations
from abc import abstractmethod
import logging
from typing import Any, Dict, Tuple, Union

import numpy as np
from pydantic import TypeAdapter, ValidationError

from src.application.interfaces.i_scenario_mapper import BaseScenarioMapper
from src.application.processors.scenario.schemas import CurveSchema
from src.domain.exceptions.domain_exception import DomainException
from src.domain.exceptions.validation_exception import ScenarioValidationException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear

logger = logging.getLogger(__name__)


def _formatear_errores(error: ValidationError) -> str:
    partes = []
    for e in error.errors():
        ubicacion = ".".join(str(p) for p in e.get('loc', ())) or "(raíz)"
        partes.append(f"{ubicacion}: {e.get('msg')}")
    return "; ".join(partes)


def to_curve(value: Union[float, CurveSchema], start: float = 0.0, end: float = 1.0) -> PiecewiseLinear:
    """Número → función constante; {grid, values} → lineal por tramos."""
    if isinstance(value, CurveSchema):
        return PiecewiseLinear(np.asarray(value.grid, dtype=float), np.asarray(value.values, dtype=float))
    return PiecewiseLinear.constant(float(value), start, end)


def to_vector_curve(value, start: float = 0.0, end: float = 1.0) -> PiecewiseLinear:
    if isinstance(value, CurveSchema):
        return PiecewiseLinear(np.asarray(value.grid, dtype=float), np.asarray(value.values, dtype=float))
    return PiecewiseLinear.constant(np.asarray(value, dtype=float), start, end)


class SchemaScenarioMapper(BaseScenarioMapper):
    """
    Valida con un esquema pydantic y delega la construcción a `_construir`.
    """
    SCHEMA: Any = None

    def __init__(self):
        self._adapter = TypeAdapter(self.SCHEMA)

    def _validar(self, data: Dict[str, Any], source_name: str = ""):
        try:
            return self._adapter.validate_python(data)
        except ValidationError as e:
            raise ScenarioValidationException(_formatear_errores(e), source_name) from e

    def validar_estructura(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        if not isinstance(data, dict):
            return False, "El escenario debe ser un objeto JSON"
        try:
            self._validar(data)
        except ScenarioValidationException as e:
            return False, str(e)
        return True, ""

    def mapear(self, data: Dict[str, Any], source_name: str) -> Any:
        if not isinstance(data, dict):
            raise ScenarioValidationException("El escenario debe ser un objeto JSON", source_name)
        modelo = self._validar(data, source_name)
        try:
            solicitud = self._construir(modelo, source_name)
        except ScenarioValidationException:
            raise
        except (DomainException, ValueError) as e:
            raise ScenarioValidationException(str(e), source_name) from e
        logger.debug(f"Escenario '{source_name}' mapeado con {type(self).__name__}")
        return solicitud

    @abstractmethod
    def _construir(self, modelo: Any, source_name: str) -> Any:
        pass
