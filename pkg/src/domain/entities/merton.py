"""
Modelo de Merton con deriva desconocida e información incompleta.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import NamedTuple
import math

import numpy as np

from src.domain.exceptions.domain_exception import EntityValidationException


@dataclass(frozen=True)
class MertonSetup:
    """
    Valor de la firma dV/V = X dt + σ dW con X ~ N(mu_x, var_x) desconocida.

    Attributes:
        v0: Valor inicial de la firma
        sigma: Volatilidad σ
        mu_x: Media a priori de X
        var_x: Varianza a priori de X (no desviación estándar)
        K: Deuda con vencimiento T
        K_prime: Pago con vencimiento U
        T, U: Fechas de pago, 0 < T < U
        S: Tiempo de la noticia Y′ = X + η, S < T
        sigma_eta: Desviación estándar de η (inf = noticia sin información)
        r: Tasa corta constante
    """
    v0: float
    sigma: float
    mu_x: float
    var_x: float
    K: float
    K_prime: float
    T: float
    U: float
    S: float
    sigma_eta: float
    r: float = 0.0

    def __post_init__(self):
        for name in ('v0', 'sigma', 'var_x', 'K', 'K_prime'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise EntityValidationException(f"{name} debe ser positivo y finito: {value}")
        if not (self.sigma_eta >= 0):
            raise EntityValidationException(f"sigma_eta debe ser no negativo: {self.sigma_eta}")
        if not (0 < self.S < self.T < self.U):
            raise EntityValidationException(
                f"Se requiere 0 < S < T < U (S={self.S}, T={self.T}, U={self.U})"
            )

    @property
    def sigma_sq(self) -> float:
        return self.sigma ** 2

    @property
    def eta_var(self) -> float:
        return self.sigma_eta ** 2


@dataclass(frozen=True)
class FilterState:
    """
    Estado del filtro: media X̂_t y varianza Σ(t) condicionales.

    `xhat` puede ser un arreglo para evaluar ensambles completos.
    """
    t: float
    xhat: float | np.ndarray
    Sigma: float

    def __post_init__(self):
        if not (self.Sigma >= 0):
            raise EntityValidationException(f"Σ debe ser no negativa: {self.Sigma}")

    @classmethod
    def prior(cls, setup: MertonSetup, n: int | None = None) -> FilterState:
        xhat = setup.mu_x if n is None else np.full(n, setup.mu_x)
        return cls(t=0.0, xhat=xhat, Sigma=setup.var_x)


@dataclass(frozen=True)
class MertonCurve:
    """Bono de Merton con deriva conocida: pago único en U con barrera K."""
    K: float
    U: float
    r: float = 0.0

    def __post_init__(self):
        if self.U <= 0:
            raise EntityValidationException(f"U debe ser positivo: {self.U}")


class MertonForwardCoefficients(NamedTuple):
    """f(t,U), a(t,U), b(t,U) del átomo de Merton."""
    f: float | np.ndarray
    a: float | np.ndarray
    b: float | np.ndarray
