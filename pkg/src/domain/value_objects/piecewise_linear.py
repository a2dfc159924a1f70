"""
Value Object para funciones del tiempo lineales por tramos.

Representa curvas como h(s), r(s), λ(s), φ_0(s) o ψ_0(s): interpolación lineal
entre nodos y extensión constante fuera de la grilla.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.domain.exceptions.domain_exception import ValueObjectValidationException
from src.shared.utils import as_strict_grid, trapezoid_cumulative


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """
    Función s ↦ valores (escalar o vector de dimensión d).

    Attributes:
        grid: Nodos estrictamente crecientes (al menos 2)
        values: Valores en los nodos, forma (n,) o (n, d)
    """
    grid: np.ndarray
    values: np.ndarray
    _nodes: np.ndarray = field(init=False, repr=False)
    _cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        try:
            grid = as_strict_grid(self.grid, "grid")
        except ValueError as e:
            raise ValueObjectValidationException(str(e)) from e

        values = np.asarray(self.values, dtype=float)
        if values.shape[0] != grid.size or values.ndim not in (1, 2):
            raise ValueObjectValidationException(
                f"values con forma {values.shape} no corresponde a una grilla de {grid.size} nodos"
            )
        if not np.all(np.isfinite(values)):
            raise ValueObjectValidationException("values contiene valores no finitos")
        if grid.size == 1:
            grid = np.array([grid[0], grid[0] + 1.0])
            values = np.concatenate([values, values])

        nodes = values if values.ndim == 2 else values[:, None]
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, '_nodes', nodes)
        object.__setattr__(self, '_cumulative', trapezoid_cumulative(grid, nodes))

    @classmethod
    def constant(cls, value: float | Sequence[float], start: float = 0.0, end: float = 1.0) -> PiecewiseLinear:
        arr = np.asarray(value, dtype=float)
        return cls(grid=np.array([start, end]), values=np.stack([arr, arr]))

    @classmethod
    def zero(cls, dim: int | None = None) -> PiecewiseLinear:
        return cls.constant(0.0 if dim is None else np.zeros(dim))

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 2

    @property
    def dim(self) -> int:
        return self._nodes.shape[1]

    def is_nonnegative(self) -> bool:
        # Con interpolación lineal basta revisar los nodos
        return bool(np.all(self._nodes >= 0.0))

    def _locate(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.grid
        k = np.clip(np.searchsorted(x, s, side='right') - 1, 0, x.size - 2)
        s_clamped = np.clip(s, x[0], x[-1])
        dx = s_clamped - x[k]
        slope = (self._nodes[k + 1] - self._nodes[k]) / (x[k + 1] - x[k])[:, None]
        return k, dx, slope

    def _shape_output(self, out: np.ndarray, scalar_input: bool) -> np.ndarray | float:
        if not self.is_vector:
            out = out[:, 0]
        if scalar_input:
            return float(out[0]) if not self.is_vector else out[0]
        return out

    def __call__(self, s) -> np.ndarray | float:
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        k, dx, slope = self._locate(s_arr)
        out = self._nodes[k] + slope * dx[:, None]
        return self._shape_output(out, np.ndim(s) == 0)

    def antiderivative(self, s) -> np.ndarray | float:
        """F(s) = ∫_{grid[0]}^s de la función extendida (exacta, cuadrática por tramos)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        x = self.grid
        k, dx, slope = self._locate(s_arr)
        inside = self._cumulative[k] + self._nodes[k] * dx[:, None] + 0.5 * slope * (dx ** 2)[:, None]

        below = self._nodes[0] * (np.minimum(s_arr, x[0]) - x[0])[:, None]
        above = self._nodes[-1] * (np.maximum(s_arr, x[-1]) - x[-1])[:, None]
        out = inside + below + above
        return self._shape_output(out, np.ndim(s) == 0)

    def integral(self, a, b) -> np.ndarray | float:
        """∫_a^b de la función (a, b escalares o arreglos del mismo tamaño)."""
        fa = self.antiderivative(a)
        fb = self.antiderivative(b)
        return fb - fa
