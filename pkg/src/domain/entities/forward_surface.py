"""
Superficie forward con átomos en los tiempos riesgosos.

f(t,T) vive en una grilla densa (tiempo × vencimiento) y g(t,u_i) se guarda como
una columna sobre la grilla de tiempo por cada tiempo riesgoso.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import EntityValidationException, OutOfRangeException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear
from src.shared.constants import TIME_ATOL
from src.shared.utils import as_strict_grid, within


@dataclass(frozen=True, eq=False)
class ForwardSurface:
    """
    Attributes:
        time_grid: Tiempos de observación t (estrictamente crecientes)
        maturity_grid: Vencimientos T (estrictamente crecientes)
        f_values: Matriz f(t,T), forma (len(time_grid), len(maturity_grid))
        g_atoms: {u_i: columna g(t,u_i) sobre time_grid}
        schedule: Calendario de tiempos riesgosos
    """
    time_grid: np.ndarray
    maturity_grid: np.ndarray
    f_values: np.ndarray
    g_atoms: Mapping[float, np.ndarray]
    schedule: RiskySchedule

    def __post_init__(self):
        try:
            time_grid = as_strict_grid(self.time_grid, "time_grid")
            maturity_grid = as_strict_grid(self.maturity_grid, "maturity_grid")
        except ValueError as e:
            raise EntityValidationException(str(e)) from e
        if maturity_grid.size < 2:
            raise EntityValidationException("maturity_grid requiere al menos 2 nodos")

        f_values = np.asarray(self.f_values, dtype=float)
        if f_values.shape != (time_grid.size, maturity_grid.size):
            raise EntityValidationException(
                f"f con forma {f_values.shape}; se esperaba {(time_grid.size, maturity_grid.size)}"
            )
        if not np.all(np.isfinite(f_values)):
            raise EntityValidationException("f contiene valores no finitos")

        atoms: Dict[float, np.ndarray] = {}
        for u, column in self.g_atoms.items():
            col = np.asarray(column, dtype=float)
            if col.shape != (time_grid.size,) or not np.all(np.isfinite(col)):
                raise EntityValidationException(f"Columna g inválida para u={u}")
            atoms[float(u)] = col

        expected = sorted(self.schedule.times.tolist())
        if len(expected) != len(atoms) or any(
            abs(a - b) > TIME_ATOL for a, b in zip(expected, sorted(atoms))
        ):
            raise EntityValidationException(
                f"g_atoms {sorted(atoms)} no coincide con el calendario {expected}"
            )
        # Claves normalizadas a los tiempos exactos del calendario
        atoms = {u: atoms[k] for u, k in zip(expected, sorted(atoms))}

        object.__setattr__(self, 'time_grid', time_grid)
        object.__setattr__(self, 'maturity_grid', maturity_grid)
        object.__setattr__(self, 'f_values', f_values)
        object.__setattr__(self, 'g_atoms', atoms)

    @classmethod
    def time_homogeneous(
        cls,
        time_grid,
        maturity_grid,
        curve: PiecewiseLinear,
        atom_premiums: Mapping[float, float],
        schedule: RiskySchedule,
    ) -> ForwardSurface:
        """Superficie con f(t,u) = curve(u) y g(t,u_i) constante en t."""
        time_grid = np.asarray(time_grid, dtype=float)
        maturity_grid = np.asarray(maturity_grid, dtype=float)
        row = np.asarray(curve(maturity_grid), dtype=float)
        return cls(
            time_grid=time_grid,
            maturity_grid=maturity_grid,
            f_values=np.tile(row, (time_grid.size, 1)),
            g_atoms={u: np.full(time_grid.size, float(g)) for u, g in atom_premiums.items()},
            schedule=schedule,
        )

    @property
    def horizon(self) -> float:
        """T*."""
        return float(self.maturity_grid[-1])

    def check_time(self, t: float) -> None:
        if not within(t, self.time_grid[0], self.time_grid[-1]):
            raise OutOfRangeException(
                f"t={t} fuera de la grilla de tiempo [{self.time_grid[0]}, {self.time_grid[-1]}]"
            )

    def check_maturity(self, T: float) -> None:
        if not within(T, self.maturity_grid[0], self.maturity_grid[-1]):
            raise OutOfRangeException(
                f"T={T} fuera de la grilla de vencimientos [{self.maturity_grid[0]}, {self.maturity_grid[-1]}]"
            )

    def forward_row(self, t: float) -> np.ndarray:
        """f(t,·) sobre maturity_grid, interpolado linealmente en t."""
        grid = self.time_grid
        if grid.size == 1:
            return self.f_values[0].copy()
        k = int(np.clip(np.searchsorted(grid, t, side='right') - 1, 0, grid.size - 2))
        w = (np.clip(t, grid[0], grid[-1]) - grid[k]) / (grid[k + 1] - grid[k])
        return (1.0 - w) * self.f_values[k] + w * self.f_values[k + 1]

    def forward_curve(self, t: float) -> PiecewiseLinear:
        return PiecewiseLinear(self.maturity_grid, self.forward_row(t))

    def forward(self, t: float, u) -> np.ndarray | float:
        return self.forward_curve(t)(u)

    def g_value(self, t: float, u: float) -> float:
        column = self.g_atoms[self.schedule[self.schedule.index_of(u)].time]
        return float(np.interp(t, self.time_grid, column))

    def continuous_integral(self, t: float, a, b):
        """∫_a^b f(t,u) du con trapecio exacto sobre la interpolación lineal en u."""
        return self.forward_curve(t).integral(a, b)
