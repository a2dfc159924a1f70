"""
Especificación del compensador del default y tasa corta.
"""
from __future__ import annotations
from dataclasses import dataclass, field

import numpy as np

from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import EntityValidationException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear


@dataclass(frozen=True, eq=False)
class CompensatorSpec:
    """
    H^p(t) = ∫₀ᵗ h(s) ds + Σ_{u_i ≤ t} Γ_i sobre [0, horizon].

    Attributes:
        hazard: h ≥ 0 (1/año)
        schedule: Tiempos riesgosos con Γ_i determinísticos
        horizon: T*
    """
    hazard: PiecewiseLinear
    schedule: RiskySchedule = field(default_factory=RiskySchedule.empty)
    horizon: float = 1.0

    def __post_init__(self):
        if self.hazard.is_vector:
            raise EntityValidationException("El hazard debe ser escalar")
        if not self.hazard.is_nonnegative():
            raise EntityValidationException("El hazard h debe ser no negativo")
        if not self.schedule.has_gammas:
            raise EntityValidationException("Todos los tiempos riesgosos requieren Γ_i")
        if self.horizon <= 0:
            raise EntityValidationException(f"Horizonte inválido: {self.horizon}")
        if len(self.schedule) and self.schedule.times[-1] > self.horizon:
            raise EntityValidationException("Hay tiempos riesgosos posteriores al horizonte")

    @classmethod
    def constant(cls, h: float, schedule: RiskySchedule | None = None, horizon: float = 1.0) -> CompensatorSpec:
        return cls(
            hazard=PiecewiseLinear.constant(h, 0.0, horizon),
            schedule=schedule or RiskySchedule.empty(),
            horizon=horizon,
        )


@dataclass(frozen=True, eq=False)
class ShortRate:
    """Tasa corta r(s); el numerario es X⁰_t = exp(∫₀ᵗ r_s ds)."""
    rate: PiecewiseLinear

    def __post_init__(self):
        if self.rate.is_vector:
            raise EntityValidationException("La tasa corta debe ser escalar")

    @classmethod
    def zero(cls) -> ShortRate:
        return cls(PiecewiseLinear.zero())

    @classmethod
    def constant(cls, r: float) -> ShortRate:
        return cls(PiecewiseLinear.constant(r))

    def __call__(self, t):
        return self.rate(t)

    def integral(self, a, b):
        return self.rate.integral(a, b)

    def discount(self, t) -> np.ndarray | float:
        """(X⁰_t)^{-1}."""
        return np.exp(-self.rate.integral(0.0, t))
