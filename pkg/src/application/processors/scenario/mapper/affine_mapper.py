from __future__ import annotations

import numpy as np

from src.application.dto.scenario_dto import AffineModel, AffineRequest
from src.application.processors.scenario.mapper.base_mapper import (
    SchemaScenarioMapper,
    to_curve,
    to_vector_curve,
)
from src.application.processors.scenario.schemas import AffineModelSchema, AffineScenario
from src.domain.entities.affine import AffineParams, CIRParams, CompensatorLoadings, JumpLoading
from src.domain.entities.risky_schedule import RiskySchedule


def build_affine_model(modelo: AffineModelSchema) -> AffineModel:
    """Construye parámetros, cargas y calendario (compartido con el mapper de verify)."""
    schedule = RiskySchedule.from_times(sorted(modelo.risky_times))
    if modelo.cir is not None:
        cir = CIRParams(**modelo.cir.model_dump())
        return AffineModel(
            params=cir.to_affine(), loadings=cir.loadings(len(schedule)),
            schedule=schedule, cir=cir,
        )

    p = modelo.params
    params = AffineParams(
        mu0=np.asarray(p.mu0, dtype=float),
        mu=np.asarray(p.mu, dtype=float),
        sigma0=np.asarray(p.sigma0, dtype=float),
        sigma=np.asarray(p.sigma, dtype=float),
        cone_dim=p.cone_dim,
    )
    l = modelo.loadings
    loadings = CompensatorLoadings(
        phi0=to_curve(l.phi0),
        psi0=to_vector_curve(l.psi0),
        jumps=tuple(JumpLoading(j.phi, np.asarray(j.psi, dtype=float)) for j in l.jumps),
    )
    return AffineModel(params=params, loadings=loadings, schedule=schedule)


class AffineScenarioMapper(SchemaScenarioMapper):
    SCHEMA = AffineScenario

    def _construir(self, modelo: AffineScenario, source_name: str) -> AffineRequest:
        return AffineRequest(
            model=build_affine_model(modelo),
            x0=np.asarray(modelo.x0, dtype=float),
            t=modelo.t,
            maturities=list(modelo.maturities),
            export=modelo.export,
            step=modelo.step,
            source=source_name,
        )
