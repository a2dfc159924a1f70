"""
Utilidades numéricas compartidas: grillas y cuadraturas trapezoidales.
"""
from __future__ import annotations
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from src.shared.constants import TIME_ATOL


def as_strict_grid(values: Sequence[float] | np.ndarray, name: str = "grid") -> np.ndarray:
    """
    Convierte a arreglo float 1-D estrictamente creciente y finito.

    Raises:
        ValueError: Si la grilla está vacía, no es finita o no es creciente
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} debe ser un vector no vacío")
    if not np.all(np.isfinite(grid)):
        raise ValueError(f"{name} contiene valores no finitos")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} debe ser estrictamente creciente")
    return grid


def aligned_grid(start: float, end: float, step: float, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """
    Grilla en [start, end] con paso máximo `step` que contiene todos los breakpoints.

    Cada tramo entre breakpoints consecutivos se divide en partes iguales, por lo
    que los breakpoints son nodos exactos de la grilla.
    """
    if step <= 0:
        raise ValueError(f"El paso debe ser positivo: {step}")
    if end < start:
        raise ValueError(f"Intervalo inválido [{start}, {end}]")
    if math.isclose(start, end, abs_tol=TIME_ATOL):
        return np.array([start], dtype=float)

    knots = [start]
    for b in sorted(set(float(b) for b in breakpoints)):
        if start + TIME_ATOL < b < end - TIME_ATOL:
            knots.append(b)
    knots.append(end)

    pieces = []
    for left, right in zip(knots[:-1], knots[1:]):
        n = max(1, int(math.ceil((right - left) / step - 1e-9)))
        pieces.append(np.linspace(left, right, n + 1)[:-1])
    pieces.append(np.array([end]))
    return np.concatenate(pieces)


def trapezoid_cumulative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Integral acumulada trapezoidal con valor inicial 0 (soporta y de forma (n, d))."""
    return cumulative_trapezoid(y, x, axis=0, initial=0)


def trapezoid_on_interval(fn, a: float, b: float, nodes: int) -> np.ndarray:
    """
    ∫_a^b fn(u) du por trapecio compuesto con `nodes` nodos equiespaciados.

    `fn` recibe el vector de nodos y devuelve (n,) o (n, d).
    """
    if b <= a:
        sample = np.asarray(fn(np.array([a])), dtype=float)
        return np.zeros(sample.shape[1:]) if sample.ndim > 1 else np.float64(0.0)
    u = np.linspace(a, b, max(nodes, 2))
    values = np.asarray(fn(u), dtype=float)
    return trapezoid(values, u, axis=0)


def within(t: float, lower: float, upper: float) -> bool:
    return lower - TIME_ATOL <= t <= upper + TIME_ATOL
