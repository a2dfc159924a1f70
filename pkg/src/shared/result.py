"""
Resultados estadísticos compartidos.
"""
from __future__ import annotations
from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class MonteCarloEstimate:
    """
    Estimación Monte Carlo con su error estándar.

    Attributes:
        value: Media muestral (o valor exacto si std_error = 0)
        std_error: Error estándar de la media
        n_samples: Número de muestras (0 para valores deterministas)
    """
    value: float
    std_error: float = 0.0
    n_samples: int = 0

    @classmethod
    def exact(cls, value: float) -> MonteCarloEstimate:
        return cls(value=float(value), std_error=0.0, n_samples=0)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> MonteCarloEstimate:
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n == 0:
            raise ValueError("No hay muestras para estimar")
        std = float(samples.std(ddof=1)) if n > 1 else 0.0
        return cls(value=float(samples.mean()), std_error=std / math.sqrt(n), n_samples=n)

    def z_score(self, reference: float) -> float:
        """Desviación respecto a la referencia en unidades de error estándar."""
        diff = self.value - reference
        if self.std_error > 0:
            return diff / self.std_error
        return 0.0 if abs(diff) <= 1e-12 * max(1.0, abs(reference)) else math.copysign(math.inf, diff)

    def within(self, reference: float, n_se: float = 3.0) -> bool:
        return abs(self.z_score(reference)) <= n_se
