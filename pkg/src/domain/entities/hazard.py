"""
Hazard integrado con átomos y muestras de tiempos de default.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Optional, Tuple
import math

import numpy as np

from src.domain.entities.compensator import CompensatorSpec
from src.domain.entities.risky_schedule import RiskySchedule, RiskyTime
from src.domain.exceptions.domain_exception import EntityValidationException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear
from src.shared.constants import TIME_ATOL


@dataclass(frozen=True)
class HazardAtom:
    """Salto λ′_i ≥ 0 del hazard integrado en u_i (λ′ = inf fuerza el default en u_i)."""
    time: float
    lam_prime: float

    def __post_init__(self):
        if not math.isfinite(self.time) or self.time < 0:
            raise EntityValidationException(f"Tiempo de átomo inválido: {self.time}")
        if math.isnan(self.lam_prime) or self.lam_prime < 0:
            raise EntityValidationException(f"λ′ debe ser no negativo en u={self.time}: {self.lam_prime}")


@dataclass(frozen=True, eq=False)
class HazardPath:
    """
    Λ_t = ∫₀ᵗ λ(s) ds + Σ_{u_i ≤ t} λ′_i sobre [0, horizon].

    Attributes:
        lam: Intensidad λ ≥ 0
        atoms: Saltos ordenados por tiempo
        horizon: Fin de la ventana de simulación
    """
    lam: PiecewiseLinear
    atoms: Tuple[HazardAtom, ...] = field(default_factory=tuple)
    horizon: float = 1.0

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if self.lam.is_vector or not self.lam.is_nonnegative():
            raise EntityValidationException("λ debe ser escalar y no negativa")
        if self.horizon <= 0:
            raise EntityValidationException(f"Horizonte inválido: {self.horizon}")
        times = [a.time for a in atoms]
        if any(b - a <= TIME_ATOL for a, b in zip(times[:-1], times[1:])):
            raise EntityValidationException(f"Los átomos deben ser estrictamente crecientes: {times}")
        if times and times[-1] > self.horizon + TIME_ATOL:
            raise EntityValidationException("Hay átomos posteriores al horizonte")
        object.__setattr__(self, 'atoms', atoms)

    @classmethod
    def constant(cls, lam: float, atoms=(), horizon: float = 1.0) -> HazardPath:
        return cls(
            lam=PiecewiseLinear.constant(lam, 0.0, horizon),
            atoms=tuple(HazardAtom(float(u), float(lp)) for u, lp in atoms),
            horizon=horizon,
        )

    @property
    def atom_times(self) -> np.ndarray:
        return np.array([a.time for a in self.atoms], dtype=float)

    @property
    def atom_sizes(self) -> np.ndarray:
        return np.array([a.lam_prime for a in self.atoms], dtype=float)

    def continuous_cumulative(self, t):
        return self.lam.integral(0.0, t)

    def cumulative(self, t):
        """Λ_t (continua a derecha)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.asarray(self.continuous_cumulative(t_arr), dtype=float)
        for atom in self.atoms:
            out = out + np.where(atom.time <= t_arr + TIME_ATOL, atom.lam_prime, 0.0)
        return float(out[0]) if np.ndim(t) == 0 else out

    def increment(self, t: float, T: float) -> float:
        """Λ_T − Λ_t = ∫_t^T λ + Σ_{u_i ∈ (t,T]} λ′_i."""
        jumps = sum(a.lam_prime for a in self.atoms if t + TIME_ATOL < a.time <= T + TIME_ATOL)
        return float(self.lam.integral(t, T)) + jumps

    def to_compensator_spec(self) -> CompensatorSpec:
        """
        CompensatorSpec del modelo determinístico: h = λ y Γ_i = 1 − e^{−λ′_i}.

        Átomos con λ′ = 0 no generan tiempo riesgoso.

        Raises:
            EntityValidationException: Si algún λ′ es infinito (Γ = 1)
        """
        entries = []
        for atom in self.atoms:
            if atom.lam_prime == 0.0:
                continue
            if math.isinf(atom.lam_prime):
                raise EntityValidationException(f"λ′ infinito en u={atom.time} implica Γ = 1")
            entries.append(RiskyTime(time=atom.time, gamma=-math.expm1(-atom.lam_prime)))
        return CompensatorSpec(hazard=self.lam, schedule=RiskySchedule(tuple(entries)), horizon=self.horizon)


@dataclass(frozen=True)
class DefaultSample:
    """
    Attributes:
        tau: Tiempo de default (inf si no ocurre antes del horizonte)
        hit_atom: Índice i cuando τ = u_i por un salto de Λ
    """
    tau: float
    hit_atom: Optional[int] = None

    def __post_init__(self):
        if math.isnan(self.tau) or self.tau < 0:
            raise EntityValidationException(f"τ inválido: {self.tau}")
        if self.hit_atom is not None and math.isinf(self.tau):
            raise EntityValidationException("hit_atom requiere τ finito")

    @property
    def defaulted(self) -> bool:
        return math.isfinite(self.tau)


@dataclass(frozen=True)
class TwoPointPrior:
    """
    Ley a priori de X sobre dos puntos (por defecto {1, 2}).

    Attributes:
        p_low: Masa en el punto menor
        points: Soporte (x_bajo, x_alto)
    """
    p_low: float
    points: Tuple[float, float] = (1.0, 2.0)

    def __post_init__(self):
        if not (0.0 <= self.p_low <= 1.0):
            raise EntityValidationException(f"La masa debe estar en [0,1]: {self.p_low}")
        low, high = self.points
        if not (0 < low < high):
            raise EntityValidationException(f"Soporte inválido: {self.points}")
        object.__setattr__(self, 'points', (float(low), float(high)))

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.p_low, 1.0 - self.p_low])
