"""
Precios de bonos con átomos y compensador del default.
"""
from __future__ import annotations
import logging
import math
from typing import Sequence

import numpy as np

from src.domain.entities.compensator import CompensatorSpec
from src.domain.entities.forward_surface import ForwardSurface
from src.domain.exceptions.domain_exception import EntityValidationException, OutOfRangeException
from src.shared.constants import TIME_ATOL
from src.shared.utils import within

logger = logging.getLogger(__name__)


class TermStructureService:
    """
    Evalúa P(t,T) = 1{τ>t} exp(−∫_t^T f(t,u) du − Σ_{u_i ∈ (t,T]} g(t,u_i)).

    Solo cuentan los átomos ya anunciados en t (S_i ≤ t); sin tiempos de
    anuncio todos los átomos cuentan.
    """

    def bond_price(self, surface: ForwardSurface, t: float, T: float, defaulted: bool = False) -> float:
        self._check_pair(surface, t, T)
        if defaulted:
            return 0.0
        if abs(T - t) <= TIME_ATOL:
            return 1.0
        return math.exp(-self._log_price(surface, t, T))

    def curve(self, surface: ForwardSurface, t: float, maturities: Sequence[float]) -> np.ndarray:
        """P(t,T) para varios vencimientos con la fila f(t,·) interpolada una sola vez."""
        surface.check_time(t)
        curve = surface.forward_curve(t)
        maturities = np.asarray(maturities, dtype=float)
        prices = np.empty(maturities.size)
        for j, T in enumerate(maturities):
            self._check_pair(surface, t, float(T))
            continuous = float(curve.integral(t, T))
            atoms = sum(surface.g_value(t, surface.schedule[i].time) for i in surface.schedule.announced_in(t, T))
            prices[j] = math.exp(-(continuous + atoms))
        return prices

    def _log_price(self, surface: ForwardSurface, t: float, T: float) -> float:
        continuous = float(surface.continuous_integral(t, t, T))
        indices = surface.schedule.announced_in(t, T)
        atoms = sum(surface.g_value(t, surface.schedule[i].time) for i in indices)
        logger.debug(f"log P({t},{T}): continuo={continuous:.6g}, átomos={atoms:.6g} ({len(indices)})")
        return continuous + atoms

    @staticmethod
    def _check_pair(surface: ForwardSurface, t: float, T: float) -> None:
        if T < t - TIME_ATOL:
            raise OutOfRangeException(f"Vencimiento T={T} anterior a t={t}")
        if t < -TIME_ATOL:
            raise OutOfRangeException(f"t={t} negativo")
        surface.check_time(t)
        surface.check_maturity(T)

    # ------------------------------------------------------------------
    # Compensador
    # ------------------------------------------------------------------
    def compensator_path(self, spec: CompensatorSpec, t):
        """H^p(t) = ∫₀ᵗ h(s) ds + Σ_{u_i ≤ t} Γ_i (antes del default)."""
        return self._accumulate(spec, t, spec.schedule.gammas if len(spec.schedule) else np.array([]))

    def h_prime(self, spec: CompensatorSpec, t):
        """H′(t) = ∫₀ᵗ h(s) ds − Σ_{u_i ≤ t} log(1 − Γ_i)."""
        if len(spec.schedule):
            gammas = spec.schedule.gammas
            if np.any(gammas >= 1.0):
                raise EntityValidationException("Γ_i ≥ 1 no tiene H′ finito")
            atoms = -np.log1p(-gammas)
        else:
            atoms = np.array([])
        return self._accumulate(spec, t, atoms)

    @staticmethod
    def _accumulate(spec: CompensatorSpec, t, atom_sizes: np.ndarray):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any([not within(s, 0.0, spec.horizon) for s in t_arr]):
            raise OutOfRangeException(f"t fuera de [0, {spec.horizon}]: {t}")
        out = np.asarray(spec.hazard.integral(0.0, t_arr), dtype=float)
        for u, size in zip(spec.schedule.times, atom_sizes):
            out = out + np.where(u <= t_arr + TIME_ATOL, size, 0.0)
        return float(out[0]) if np.ndim(t) == 0 else out
