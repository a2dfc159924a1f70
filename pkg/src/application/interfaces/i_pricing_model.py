"""
Contratos usados por el verificador de no arbitraje (Dependency Inversion).

El verificador solo conoce estas abstracciones; los modelos concretos
(determinístico, afín, afín con átomo mal valuado) viven en los servicios.
"""
from __future__ import annotations
from abc import ABC, abstractmethod
from typing import NamedTuple

import numpy as np

from src.shared.random_streams import RandomSource


class SampledPaths(NamedTuple):
    """
    Trayectorias simuladas en t_grid.

    Attributes:
        states: Estado del modelo, forma (n, m, d)
        cumulative_hazard: Λ en cada t, forma (n, m); default en t si Λ_t ≥ ζ
        discount: (X⁰_t)^{-1}, forma (n, m)
    """
    states: np.ndarray
    cumulative_hazard: np.ndarray
    discount: np.ndarray


class IPricingModel(ABC):
    """Precio pre-default P(t,T) como función del estado."""

    @abstractmethod
    def price(self, t: float, T: float, states: np.ndarray) -> np.ndarray:
        """
        Args:
            states: Estados (n, d) en t

        Returns:
            Precios pre-default (n,)
        """
        pass

    @abstractmethod
    def reference(self, T: float, initial_state: np.ndarray) -> float:
        """P(0,T) en el estado inicial."""
        pass


class IPathSampler(ABC):
    """Simulador de estados y hazard integrado bajo la medida candidata."""

    @abstractmethod
    def sample(self, t_grid: np.ndarray, n_paths: int, rng: RandomSource) -> SampledPaths:
        pass

    @property
    @abstractmethod
    def initial_state(self) -> np.ndarray:
        pass


class IDriftProvider(ABC):
    """
    Coeficientes μ^M-integrados de un modelo de Merton generalizado.

    Se usan para evaluar (dcm1) y (dcm2) sin conocer la forma del modelo.
    """

    @abstractmethod
    def bar(self, t: float, T: float) -> tuple[float, np.ndarray]:
        """(ā(t,T), b̄(t,T)) con las integrales respecto de μ^M, incluidos los átomos en (t,T]."""
        pass

    @abstractmethod
    def forward_diagonal(self, t: float) -> float:
        """f(t,t) de la parte continua."""
        pass

    @abstractmethod
    def atom_forward(self, index: int) -> float:
        """f(u_i, u_i) en el átomo u_i (límite a izquierda en t)."""
        pass
