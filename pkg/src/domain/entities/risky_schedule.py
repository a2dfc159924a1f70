"""
Tiempos riesgosos: instantes predecibles en los que el compensador del default salta.

Convención única de intervalos: un átomo u_i pertenece a (t, T] si t < u_i ≤ T.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple
import math

import numpy as np

from src.domain.exceptions.domain_exception import EntityValidationException
from src.shared.constants import TIME_ATOL


@dataclass(frozen=True)
class RiskyTime:
    """
    Tiempo riesgoso u_i con probabilidad condicional de default Γ_i.

    Attributes:
        time: u_i en años
        gamma: Γ_i en (0,1); None cuando depende del estado (modelos afines)
        announce_time: S_i < u_i si el tiempo es anunciado; None si se conoce desde 0
    """
    time: float
    gamma: Optional[float] = None
    announce_time: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.time) or self.time < 0:
            raise EntityValidationException(f"Tiempo riesgoso inválido: {self.time}")
        if self.gamma is not None and not (0.0 < self.gamma < 1.0):
            raise EntityValidationException(
                f"Γ debe estar en (0,1) en u={self.time}: {self.gamma}"
            )
        if self.announce_time is not None:
            if self.announce_time < 0 or self.announce_time >= self.time:
                raise EntityValidationException(
                    f"El anuncio S={self.announce_time} debe cumplir 0 ≤ S < u={self.time}"
                )

    @property
    def has_gamma(self) -> bool:
        return self.gamma is not None

    def require_gamma(self) -> float:
        if self.gamma is None:
            raise EntityValidationException(f"El tiempo riesgoso u={self.time} no tiene Γ determinístico")
        return self.gamma

    @property
    def lam_prime(self) -> float:
        """λ′ = −log(1−Γ), el salto del hazard integrado equivalente."""
        return -math.log1p(-self.require_gamma())

    def is_announced_by(self, t: float) -> bool:
        return self.announce_time is None or self.announce_time <= t + TIME_ATOL


@dataclass(frozen=True)
class RiskySchedule:
    """
    Conjunto finito y ordenado de tiempos riesgosos (soporte atómico de H^p).
    """
    entries: Tuple[RiskyTime, ...] = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(self.entries)
        times = [e.time for e in entries]
        if any(b - a <= TIME_ATOL for a, b in zip(times[:-1], times[1:])):
            raise EntityValidationException(
                f"Los tiempos riesgosos deben ser estrictamente crecientes: {times}"
            )
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def empty(cls) -> RiskySchedule:
        return cls(entries=())

    @classmethod
    def from_times(
        cls,
        times: Sequence[float],
        gammas: Sequence[Optional[float]] | None = None,
        announce_times: Sequence[Optional[float]] | None = None,
    ) -> RiskySchedule:
        n = len(times)
        gammas = list(gammas) if gammas is not None else [None] * n
        announce_times = list(announce_times) if announce_times is not None else [None] * n
        return cls(tuple(
            RiskyTime(time=float(u), gamma=g, announce_time=s)
            for u, g, s in zip(times, gammas, announce_times)
        ))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RiskyTime]:
        return iter(self.entries)

    def __getitem__(self, index: int) -> RiskyTime:
        return self.entries[index]

    @property
    def times(self) -> np.ndarray:
        return np.array([e.time for e in self.entries], dtype=float)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([e.require_gamma() for e in self.entries], dtype=float)

    @property
    def has_gammas(self) -> bool:
        return all(e.has_gamma for e in self.entries)

    def index_of(self, u: float) -> int:
        for i, e in enumerate(self.entries):
            if abs(e.time - u) <= TIME_ATOL:
                return i
        raise EntityValidationException(f"u={u} no es un tiempo riesgoso del calendario")

    def in_interval(self, t: float, T: float) -> list[int]:
        """Índices con t < u_i ≤ T."""
        return [i for i, e in enumerate(self.entries) if t + TIME_ATOL < e.time <= T + TIME_ATOL]

    def up_to(self, t: float) -> list[int]:
        """Índices con u_i ≤ t."""
        return [i for i, e in enumerate(self.entries) if e.time <= t + TIME_ATOL]

    def announced_in(self, t: float, T: float) -> list[int]:
        """Índices con t < u_i ≤ T ya anunciados en t (S_i ≤ t)."""
        return [i for i in self.in_interval(t, T) if self.entries[i].is_announced_by(t)]

    def min_gap(self) -> float:
        """Menor distancia entre tiempos riesgosos consecutivos (inf si hay menos de 2)."""
        times = self.times
        if times.size < 2:
            return math.inf
        return float(np.min(np.diff(times)))
