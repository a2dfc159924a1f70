"""
Coeficientes HJM de la superficie forward con átomos.

df(t,T) = a(t,T) dt + b(t,T)ᵀ dW_t  y  dg(t,T) = α(t,T) dt + β(t,T)ᵀ dW_t.
Las funciones reciben arreglos (t, u) y evalúan elemento a elemento.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import EntityValidationException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]
VectorField = Callable[[np.ndarray, np.ndarray], np.ndarray]


def constant_field(value: float) -> ScalarField:
    return lambda t, u: np.full(np.broadcast(np.asarray(t), np.asarray(u)).shape, float(value))


def constant_vector_field(vector) -> VectorField:
    vec = np.atleast_1d(np.asarray(vector, dtype=float))
    return lambda t, u: np.broadcast_to(
        vec, np.broadcast(np.asarray(t), np.asarray(u)).shape + vec.shape
    ).copy()


@dataclass(frozen=True, eq=False)
class NuAtom:
    """Átomo u_j del kernel ν(t,du) con peso w_j(t) ≥ 0."""
    location: float
    weight: PiecewiseLinear

    def __post_init__(self):
        if not self.weight.is_nonnegative():
            raise EntityValidationException(f"Peso de ν negativo en u={self.location}")


@dataclass(frozen=True, eq=False)
class HJMCoefficients:
    """
    Coeficientes del modelo general.

    Attributes:
        a, alpha: Derivas de f y g
        b, beta: Volatilidades (vectores de dimensión n_factors)
        g: Prima atómica g(t,u)
        nu: Kernel discreto ν(t,du)
        schedule: Tiempos riesgosos con tiempos de anuncio
        n_factors: Dimensión del Browniano
    """
    a: ScalarField
    b: VectorField
    alpha: ScalarField
    beta: VectorField
    g: ScalarField
    schedule: RiskySchedule
    n_factors: int = 1
    nu: Tuple[NuAtom, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_factors < 1:
            raise EntityValidationException("n_factors debe ser al menos 1")
        object.__setattr__(self, 'nu', tuple(self.nu))

    @classmethod
    def zero(cls, schedule: RiskySchedule | None = None, n_factors: int = 1) -> HJMCoefficients:
        zero_vec = constant_vector_field(np.zeros(n_factors))
        return cls(
            a=constant_field(0.0), b=zero_vec,
            alpha=constant_field(0.0), beta=zero_vec,
            g=constant_field(0.0),
            schedule=schedule or RiskySchedule.empty(),
            n_factors=n_factors,
        )
