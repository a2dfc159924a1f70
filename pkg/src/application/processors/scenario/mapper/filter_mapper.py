from __future__ import annotations

from src.application.dto.scenario_dto import FilterRequest
from src.application.processors.scenario.mapper.base_mapper import SchemaScenarioMapper
from src.application.processors.scenario.schemas import FilterScenario
from src.domain.entities.merton import MertonSetup


class FilterScenarioMapper(SchemaScenarioMapper):
    """Rechaza configuraciones fuera de 0 < S < T < U a través de MertonSetup."""
    SCHEMA = FilterScenario

    def _construir(self, modelo: FilterScenario, source_name: str) -> FilterRequest:
        return FilterRequest(
            setup=MertonSetup(**modelo.setup.model_dump()),
            horizon=modelo.horizon,
            dt=modelo.dt,
            true_x=modelo.true_x,
            coverage_runs=modelo.coverage_runs,
            source=source_name,
        )
