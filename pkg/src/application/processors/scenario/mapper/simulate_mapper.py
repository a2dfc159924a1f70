from __future__ import annotations

from src.application.dto.scenario_dto import AzemaRequest, SimulateRequest
from src.application.processors.scenario.mapper.base_mapper import SchemaScenarioMapper, to_curve
from src.application.processors.scenario.schemas import SimulateScenario
from src.domain.entities.hazard import HazardAtom, HazardPath, TwoPointPrior


class SimulateScenarioMapper(SchemaScenarioMapper):
    SCHEMA = SimulateScenario

    def _construir(self, modelo: SimulateScenario, source_name: str) -> SimulateRequest:
        if modelo.lam is not None:
            atoms = sorted(modelo.atoms, key=lambda a: a.u)
            path = HazardPath(
                lam=to_curve(modelo.lam, 0.0, modelo.horizon),
                atoms=tuple(HazardAtom(a.u, a.lamp) for a in atoms),
                horizon=modelo.horizon,
            )
            return SimulateRequest(hazard_path=path, n_paths=modelo.n_paths, source=source_name)

        if modelo.announced is not None:
            a = modelo.announced
            return SimulateRequest(
                announced=(a.rate, a.delay_mean, a.horizon), n_paths=modelo.n_paths, source=source_name,
            )

        z = modelo.azema
        azema = AzemaRequest(
            f_curve=to_curve(z.f, 0.0, z.horizon),
            obs_times=sorted(z.obs_times),
            noise=z.noise,
            prior=TwoPointPrior(p_low=z.p_low, points=tuple(z.points)),
            horizon=z.horizon,
            step=z.step,
        )
        return SimulateRequest(azema=azema, n_paths=modelo.n_paths, source=source_name)
