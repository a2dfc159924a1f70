from __future__ import annotations

import numpy as np

from src.application.dto.scenario_dto import CurveRequest
from src.application.processors.scenario.mapper.base_mapper import SchemaScenarioMapper, to_curve
from src.application.processors.scenario.schemas import CurveScenario
from src.domain.entities.forward_surface import ForwardSurface
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.validation_exception import ScenarioValidationException


class CurveScenarioMapper(SchemaScenarioMapper):
    """
    Superficie forward con átomos.

    `f` acepta un número (curva plana), una curva {grid, values} homogénea en t o
    la matriz completa f(t,T); `g` de cada átomo es un número o una columna en t.
    """
    SCHEMA = CurveScenario

    def _construir(self, modelo: CurveScenario, source_name: str) -> CurveRequest:
        time_grid = np.asarray(modelo.time_grid, dtype=float)
        maturity_grid = np.asarray(modelo.maturity_grid, dtype=float)

        if isinstance(modelo.f, list):
            f_values = np.asarray(modelo.f, dtype=float)
        else:
            curve = to_curve(modelo.f, float(maturity_grid[0]), float(maturity_grid[-1]))
            f_values = np.tile(np.asarray(curve(maturity_grid)), (time_grid.size, 1))

        atoms = sorted(modelo.risky_times, key=lambda a: a.u)
        schedule = RiskySchedule.from_times(
            [a.u for a in atoms],
            [a.gamma for a in atoms],
            [a.announce for a in atoms],
        )
        g_atoms = {}
        for a in atoms:
            column = np.atleast_1d(np.asarray(a.g, dtype=float))
            if column.size == 1:
                column = np.full(time_grid.size, float(column[0]))
            if column.size != time_grid.size:
                raise ScenarioValidationException(
                    f"g de u={a.u} tiene {column.size} valores; time_grid tiene {time_grid.size}",
                    source_name,
                )
            g_atoms[a.u] = column

        surface = ForwardSurface(
            time_grid=time_grid, maturity_grid=maturity_grid,
            f_values=f_values, g_atoms=g_atoms, schedule=schedule,
        )
        return CurveRequest(
            surface=surface, t=modelo.t, maturities=list(modelo.maturities),
            defaulted=modelo.defaulted, source=source_name,
        )
