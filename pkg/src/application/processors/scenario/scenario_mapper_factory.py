from __future__ import annotations
from src.application.interfaces.i_scenario_mapper import BaseScenarioMapper
from src.application.processors.scenario.mapper.affine_mapper import AffineScenarioMapper
from src.application.processors.scenario.mapper.curve_mapper import CurveScenarioMapper
from src.application.processors.scenario.mapper.filter_mapper import FilterScenarioMapper
from src.application.processors.scenario.mapper.simulate_mapper import SimulateScenarioMapper
from src.application.processors.scenario.mapper.verify_mapper import VerifyScenarioMapper
from src.domain.exceptions.validation_exception import ScenarioValidationException


class ScenarioMapperFactory:
    """
    Entrega el mapper del subcomando solicitado.
    """
    _MAPPERS = {
        'curve': CurveScenarioMapper,
        'affine': AffineScenarioMapper,
        'filter': FilterScenarioMapper,
        'simulate': SimulateScenarioMapper,
        'verify': VerifyScenarioMapper,
    }

    @staticmethod
    def get_mapper(command: str) -> BaseScenarioMapper:
        mapper_cls = ScenarioMapperFactory._MAPPERS.get(command)
        if mapper_cls is None:
            raise ScenarioValidationException(f"Comando desconocido: {command}")
        return mapper_cls()

    @staticmethod
    def commands() -> list[str]:
        return list(ScenarioMapperFactory._MAPPERS)
