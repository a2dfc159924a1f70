"""
Modelos afines por tramos: parámetros de la difusión, cargas del compensador,
soluciones de Riccati y el caso CIR unidimensional.

Convención de difusión: ½ σ(x)σ(x)ᵀ = σ_0 + Σ_i x_i σ_i, y μ(x) = μ_0 + Σ_i x_i μ_i.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence, Tuple
import math

import numpy as np

from src.domain.exceptions.domain_exception import AdmissibilityException, EntityValidationException
from src.domain.value_objects.piecewise_linear import PiecewiseLinear

_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AffineParams:
    """
    Difusión afín en ℝ₊^m × ℝ^{d−m}. Las primeras `cone_dim` coordenadas son del cono.

    Attributes:
        mu0: Vector (d,)
        mu: Matriz (d, d); la fila i es μ_i
        sigma0: Matriz simétrica PSD (d, d)
        sigma: Arreglo (d, d, d); sigma[i] es σ_i
        cone_dim: m
    """
    mu0: np.ndarray
    mu: np.ndarray
    sigma0: np.ndarray
    sigma: np.ndarray
    cone_dim: int

    def __post_init__(self):
        mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        d = mu0.size
        try:
            mu = np.asarray(self.mu, dtype=float).reshape(d, d)
            sigma0 = np.asarray(self.sigma0, dtype=float).reshape(d, d)
            sigma = np.asarray(self.sigma, dtype=float).reshape(d, d, d)
        except ValueError as e:
            raise EntityValidationException(f"Dimensiones inconsistentes para d={d}: {e}") from e
        if not (0 <= self.cone_dim <= d):
            raise EntityValidationException(f"cone_dim={self.cone_dim} fuera de [0, {d}]")
        for name, arr in (('mu0', mu0), ('mu', mu), ('sigma0', sigma0), ('sigma', sigma)):
            if not np.all(np.isfinite(arr)):
                raise EntityValidationException(f"{name} contiene valores no finitos")

        object.__setattr__(self, 'mu0', mu0)
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'sigma0', sigma0)
        object.__setattr__(self, 'sigma', sigma)
        self._check_admissible()

    def _check_admissible(self) -> None:
        """Admisibilidad estructural de los parámetros."""
        d, m = self.dim, self.cone_dim
        for name, mat in [('sigma0', self.sigma0)] + [(f'sigma[{i}]', s) for i, s in enumerate(self.sigma)]:
            if not np.allclose(mat, mat.T, atol=_TOL):
                raise AdmissibilityException(f"{name} no es simétrica")
            if np.min(np.linalg.eigvalsh(mat)) < -1e-10:
                raise AdmissibilityException(f"{name} no es semidefinida positiva")

        if m > 0 and (np.any(np.abs(self.sigma0[:m, :]) > _TOL) or np.any(np.abs(self.sigma0[:, :m]) > _TOL)):
            raise AdmissibilityException("sigma0 debe anularse en filas/columnas del cono")

        for i in range(d):
            if i >= m:
                if np.any(np.abs(self.sigma[i]) > _TOL):
                    raise AdmissibilityException(f"sigma[{i}] debe ser cero para una coordenada real")
                if m > 0 and np.any(np.abs(self.mu[i, :m]) > _TOL):
                    raise AdmissibilityException(
                        f"La deriva del cono no puede depender de la coordenada real {i}"
                    )
                continue
            for k in range(m):
                if k != i and abs(self.sigma[i][k, k]) > _TOL:
                    raise AdmissibilityException(
                        f"sigma[{i}] tiene difusión en la coordenada del cono {k}"
                    )
                if k != i and self.mu[i, k] < -_TOL:
                    raise AdmissibilityException(
                        f"μ_{i} apunta fuera del cono en la coordenada {k}"
                    )

        if np.any(self.mu0[:m] < -_TOL):
            raise AdmissibilityException("μ_0 debe ser no negativa en las coordenadas del cono")

    @property
    def dim(self) -> int:
        return self.mu0.size

    @property
    def is_diagonal(self) -> bool:
        """True si σ_0 y todos los σ_i son diagonales."""
        mats = np.concatenate([self.sigma0[None], self.sigma])
        off = mats - np.einsum('kii->ki', mats)[:, :, None] * np.eye(self.dim)[None]
        return bool(np.all(np.abs(off) <= _TOL))

    def in_state_space(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.isfinite(x)) and np.all(x[..., :self.cone_dim] >= 0))

    def drift(self, x: np.ndarray) -> np.ndarray:
        """μ(x) para x de forma (..., d)."""
        return self.mu0 + x @ self.mu

    def half_diffusion(self, x: np.ndarray) -> np.ndarray:
        """σ_0 + Σ x_i σ_i, forma (..., d, d)."""
        return self.sigma0 + np.tensordot(x, self.sigma, axes=([-1], [0]))


@dataclass(frozen=True)
class JumpLoading:
    """Carga (φ_i, ψ_i) del átomo del compensador en u_i."""
    phi: float
    psi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'psi', np.atleast_1d(np.asarray(self.psi, dtype=float)))


@dataclass(frozen=True, eq=False)
class CompensatorLoadings:
    """
    H^p_t = ∫(φ_0(s) + ψ_0(s)ᵀX_s) ds + Σ_{u_i ≤ t}(1 − e^{−φ_i − ψ_iᵀX_{u_i}}).

    Attributes:
        phi0: Función escalar del tiempo
        psi0: Función vectorial del tiempo (dimensión d)
        jumps: Una carga por tiempo riesgoso del calendario
    """
    phi0: PiecewiseLinear
    psi0: PiecewiseLinear
    jumps: Tuple[JumpLoading, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'jumps', tuple(self.jumps))
        if self.phi0.is_vector:
            raise EntityValidationException("φ_0 debe ser escalar")
        if not self.psi0.is_vector:
            raise EntityValidationException("ψ_0 debe ser vectorial")
        for j in self.jumps:
            if j.psi.size != self.dim:
                raise EntityValidationException(f"ψ_i de dimensión {j.psi.size}; se esperaba {self.dim}")

    @classmethod
    def zero(cls, dim: int, n_jumps: int = 0) -> CompensatorLoadings:
        return cls(
            phi0=PiecewiseLinear.zero(),
            psi0=PiecewiseLinear.zero(dim),
            jumps=tuple(JumpLoading(0.0, np.zeros(dim)) for _ in range(n_jumps)),
        )

    @classmethod
    def constant(
        cls,
        phi0: float,
        psi0: Sequence[float],
        jumps: Sequence[Tuple[float, Sequence[float]]] = (),
    ) -> CompensatorLoadings:
        return cls(
            phi0=PiecewiseLinear.constant(phi0),
            psi0=PiecewiseLinear.constant(np.asarray(psi0, dtype=float)),
            jumps=tuple(JumpLoading(float(p), np.asarray(q, dtype=float)) for p, q in jumps),
        )

    @property
    def dim(self) -> int:
        return self.psi0.dim

    def check_positivity(self, cone_dim: int) -> None:
        """
        φ + ψᵀx ≥ 0 en todo el espacio de estados (revisado en los generadores del cono).

        Raises:
            AdmissibilityException: Si alguna carga puede producir hazard negativo
        """
        def _check(phi_values: np.ndarray, psi_values: np.ndarray, label: str) -> None:
            if np.any(phi_values < -_TOL):
                raise AdmissibilityException(f"{label}: φ negativo")
            if np.any(psi_values[..., :cone_dim] < -_TOL):
                raise AdmissibilityException(f"{label}: ψ negativo en coordenadas del cono")
            if np.any(np.abs(psi_values[..., cone_dim:]) > _TOL):
                raise AdmissibilityException(f"{label}: ψ no nulo en coordenadas reales")

        _check(self.phi0.values, self.psi0.values, "Carga continua")
        for i, j in enumerate(self.jumps):
            _check(np.array([j.phi]), j.psi, f"Carga del átomo {i}")

    def hazard_rate(self, s, x: np.ndarray) -> np.ndarray:
        """φ_0(s) + ψ_0(s)ᵀx; s (n,) y x (..., n, d) evaluados nodo a nodo."""
        return np.asarray(self.phi0(s)) + np.sum(np.asarray(self.psi0(s)) * x, axis=-1)

    def atom_exponent(self, index: int, x: np.ndarray) -> np.ndarray:
        """φ_i + ψ_iᵀx."""
        j = self.jumps[index]
        return j.phi + np.asarray(x, dtype=float) @ j.psi


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """
    Solución (A, B)(t, T) sobre una grilla ascendente de t.

    Los valores guardados son continuos a derecha; `A_left`, `B_left` guardan los
    límites por izquierda (iguales salvo en nodos riesgosos).
    """
    maturity: float
    times: np.ndarray
    A: np.ndarray
    B: np.ndarray
    risky_mask: np.ndarray
    A_left: np.ndarray
    B_left: np.ndarray

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    def _locate(self, t: float) -> tuple[int, float, bool]:
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise EntityValidationException(f"t={t} fuera de [{times[0]}, {times[-1]}]")
        k = int(np.searchsorted(times, t, side='left'))
        if k < times.size and abs(times[k] - t) <= 1e-12:
            return k, 0.0, True
        k -= 1
        w = (t - times[k]) / (times[k + 1] - times[k])
        return k, w, False

    def at(self, t: float) -> tuple[float, np.ndarray]:
        """(A(t,T), B(t,T)) continuo a derecha."""
        k, w, on_node = self._locate(t)
        if on_node:
            return float(self.A[k]), self.B[k].copy()
        a = (1 - w) * self.A[k] + w * self.A_left[k + 1]
        b = (1 - w) * self.B[k] + w * self.B_left[k + 1]
        return float(a), b

    def left_limit(self, t: float) -> tuple[float, np.ndarray]:
        """(A(t−,T), B(t−,T))."""
        k, w, on_node = self._locate(t)
        if on_node:
            return float(self.A_left[k]), self.B_left[k].copy()
        return self.at(t)

    def _nodal_derivative(self, right: np.ndarray, left: np.ndarray, k: int) -> np.ndarray:
        """
        Derivada a derecha en el nodo k con fórmulas de tres puntos (grilla no uniforme).

        Solo usa puntos del mismo tramo continuo: valor a derecha en el nodo
        inicial y límites por izquierda en los nodos siguientes.
        """
        t = self.times
        n = t.size
        interior = 0 < k < n - 1 and not self.risky_mask[k]
        if interior:
            h1, h2 = t[k] - t[k - 1], t[k + 1] - t[k]
            return (
                -h2 / (h1 * (h1 + h2)) * right[k - 1]
                + (h2 - h1) / (h1 * h2) * right[k]
                + h1 / (h2 * (h1 + h2)) * left[k + 1]
            )
        if k + 2 < n and not self.risky_mask[k + 1]:
            h1, h2 = t[k + 1] - t[k], t[k + 2] - t[k + 1]
            return (
                -(2 * h1 + h2) / (h1 * (h1 + h2)) * right[k]
                + (h1 + h2) / (h1 * h2) * right[k + 1]
                - h1 / (h2 * (h1 + h2)) * left[k + 2]
            )
        if k + 1 < n:
            return (left[k + 1] - right[k]) / (t[k + 1] - t[k])
        # Nodo terminal: derivada por izquierda
        return (left[k] - right[k - 1]) / (t[k] - t[k - 1])

    def derivative(self, t: float) -> tuple[float, np.ndarray]:
        """(∂_t⁺A, ∂_t⁺B); entre nodos interpola linealmente las derivadas nodales."""
        k, w, on_node = self._locate(t)
        dA_k = self._nodal_derivative(self.A, self.A_left, k)
        dB_k = self._nodal_derivative(self.B, self.B_left, k)
        if on_node or w == 0.0:
            return float(dA_k), dB_k
        # La derivada en k+1 se toma por izquierda si k+1 es riesgoso
        if self.risky_mask[k + 1]:
            dA_n = (self.A_left[k + 1] - self.A[k]) / (self.times[k + 1] - self.times[k])
            dB_n = (self.B_left[k + 1] - self.B[k]) / (self.times[k + 1] - self.times[k])
            return float(dA_k if w < 0.5 else dA_n), (dB_k if w < 0.5 else dB_n)
        dA_n = self._nodal_derivative(self.A, self.A_left, k + 1)
        dB_n = self._nodal_derivative(self.B, self.B_left, k + 1)
        return float((1 - w) * dA_k + w * dA_n), (1 - w) * dB_k + w * dB_n


@dataclass(frozen=True)
class CIRParams:
    """
    dX = (μ_0 + μ_1 X) dt + σ √X dW con compensador φ_0 + ψ_0 X y átomo φ_1 + ψ_1 X_{u_1}.
    """
    mu0: float
    mu1: float
    sigma: float
    psi1: float = 0.0
    phi0: float = 0.0
    psi0: float = 1.0
    phi1: float = 0.0

    def __post_init__(self):
        if self.mu0 < 0:
            raise AdmissibilityException(f"μ_0 debe ser no negativo: {self.mu0}")
        if self.sigma <= 0:
            raise EntityValidationException(f"σ debe ser positivo: {self.sigma}")
        if min(self.psi1, self.phi0, self.psi0, self.phi1) < 0:
            raise AdmissibilityException("Las cargas del compensador CIR deben ser no negativas")

    @property
    def theta(self) -> float:
        """θ = √(μ_1² + 2σ²ψ_0)."""
        return math.sqrt(self.mu1 ** 2 + 2.0 * self.sigma ** 2 * self.psi0)

    def to_affine(self) -> AffineParams:
        return AffineParams(
            mu0=np.array([self.mu0]),
            mu=np.array([[self.mu1]]),
            sigma0=np.zeros((1, 1)),
            sigma=np.array([[[0.5 * self.sigma ** 2]]]),
            cone_dim=1,
        )

    def loadings(self, n_jumps: int = 1) -> CompensatorLoadings:
        jumps = [(self.phi1, [self.psi1])] * n_jumps
        return CompensatorLoadings.constant(self.phi0, [self.psi0], jumps)

    def mean(self, x0: float, t: float) -> float:
        """E[X_t] = x0 e^{μ_1 t} + (μ_0/μ_1)(e^{μ_1 t} − 1)."""
        if self.mu1 == 0:
            return x0 + self.mu0 * t
        growth = math.exp(self.mu1 * t)
        return x0 * growth + (self.mu0 / self.mu1) * (growth - 1.0)


@dataclass(frozen=True, eq=False)
class StatePath:
    """Trayectoria del estado: times (n,), values (n, d)."""
    times: np.ndarray
    values: np.ndarray

    def at(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.times, self.values[:, k]) for k in range(self.values.shape[1])])
