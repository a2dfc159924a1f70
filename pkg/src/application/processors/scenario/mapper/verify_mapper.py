from __future__ import annotations
from typing import List, Optional, Tuple

import numpy as np

from src.application.dto.scenario_dto import MartingaleRequest, VerifyRequest
from src.application.processors.scenario.mapper.affine_mapper import build_affine_model
from src.application.processors.scenario.mapper.base_mapper import SchemaScenarioMapper, to_curve
from src.application.processors.scenario.schemas import (
    AffineVerifySchema,
    GeneralVerifySchema,
    MartingaleSchema,
    MertonVerifySchema,
    VerifyScenario,
)
from src.domain.entities.compensator import CompensatorSpec, ShortRate
from src.domain.entities.hjm import HJMCoefficients, constant_field, constant_vector_field
from src.domain.entities.risky_schedule import RiskySchedule
from src.shared.constants import TIME_ATOL


def _grid(t_grid: List[float], T_grid: List[float]) -> List[Tuple[float, float]]:
    return [(float(t), float(T)) for t in sorted(t_grid) for T in sorted(T_grid) if T >= t - TIME_ATOL]


def _martingale(m: Optional[MartingaleSchema]) -> Optional[MartingaleRequest]:
    if m is None:
        return None
    x0 = None if m.x0 is None else np.asarray(m.x0, dtype=float)
    return MartingaleRequest(T=m.T, t_grid=sorted(m.t_grid), n_paths=m.n_paths, mispriced=m.mispriced, x0=x0)


def _atom_g_field(locations: np.ndarray, values: np.ndarray):
    """g(t,u) = g_i si u coincide con u_i; 0 en otro caso."""
    def field(t, u):
        t_arr, u_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(u, dtype=float))
        out = np.zeros(t_arr.shape)
        for loc, val in zip(locations, values):
            out = np.where(np.abs(u_arr - loc) <= TIME_ATOL, val, out)
        return out
    return field


class VerifyScenarioMapper(SchemaScenarioMapper):
    """Escenarios de verificación discriminados por `kind`: general, merton o affine."""
    SCHEMA = VerifyScenario

    def _construir(self, modelo, source_name: str) -> VerifyRequest:
        if isinstance(modelo, GeneralVerifySchema):
            return self._general(modelo, source_name)
        if isinstance(modelo, MertonVerifySchema):
            return VerifyRequest(
                kind='merton',
                grid=_grid(modelo.t_grid, modelo.T_grid),
                tol=modelo.tol,
                rate=ShortRate.constant(modelo.r),
                merton_states=list(modelo.W),
                merton_K=modelo.K,
                merton_U=modelo.U,
                source=source_name,
            )
        return self._affine(modelo, source_name)

    @staticmethod
    def _general(modelo: GeneralVerifySchema, source_name: str) -> VerifyRequest:
        atoms = sorted(modelo.atoms, key=lambda a: a.u)
        schedule = RiskySchedule.from_times(
            [a.u for a in atoms], [a.gamma for a in atoms], [a.announce for a in atoms],
        )
        spec = CompensatorSpec(
            hazard=to_curve(modelo.hazard, 0.0, modelo.horizon),
            schedule=schedule,
            horizon=modelo.horizon,
        )
        vol = np.asarray(modelo.vol, dtype=float)
        if modelo.drift == 'hjm':
            vol_sq = float(vol @ vol)
            a = lambda t, u: vol_sq * (np.asarray(u, dtype=float) - np.asarray(t, dtype=float))
        else:
            a = constant_field(float(modelo.drift))
        zero_vec = constant_vector_field(np.zeros(vol.size))
        coefficients = HJMCoefficients(
            a=a,
            b=constant_vector_field(vol),
            alpha=constant_field(0.0),
            beta=zero_vec,
            g=_atom_g_field(schedule.times, np.array([x.g for x in atoms], dtype=float)),
            schedule=schedule,
            n_factors=vol.size,
        )
        return VerifyRequest(
            kind='general',
            grid=_grid(modelo.t_grid, modelo.T_grid),
            tol=modelo.tol,
            coefficients=coefficients,
            spec=spec,
            rate=ShortRate.constant(modelo.r),
            f_diag=modelo.f_diag,
            martingale=_martingale(modelo.martingale),
            source=source_name,
        )

    @staticmethod
    def _affine(modelo: AffineVerifySchema, source_name: str) -> VerifyRequest:
        return VerifyRequest(
            kind='affine',
            grid=_grid(modelo.t_grid, modelo.T_grid),
            affine=build_affine_model(modelo),
            affine_states=[np.asarray(x, dtype=float) for x in modelo.states],
            step=modelo.step,
            martingale=_martingale(modelo.martingale),
            source=source_name,
        )
