"""
Modelos afines por tramos: ecuaciones de Riccati con saltos en los tiempos
riesgosos, forma cerrada CIR, precios afines y simulación del estado.
"""
from __future__ import annotations
import logging
import math
from typing import Tuple

import numpy as np
from scipy.integrate import trapezoid

from src.domain.entities.affine import (
    AffineParams,
    CIRParams,
    CompensatorLoadings,
    RiccatiSolution,
    StatePath,
)
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import (
    AdmissibilityException,
    EntityValidationException,
    NumericalSchemeException,
    OutOfRangeException,
)
from src.shared.constants import TIME_ATOL
from src.shared.random_streams import derive_generator
from src.shared.utils import aligned_grid

logger = logging.getLogger(__name__)


class AffineEngineService:
    """
    Motor afín.

    Riccati (t ↦ A, B hacia atrás desde T):
        −∂_t A = φ_0 + μ_0ᵀB − Bᵀσ_0B
        −∂_t B_k = ψ_{0,k} + μ_kᵀB − Bᵀσ_kB
    con A(T,T) = 0, B(T,T) = 0 y A(u_i−) = A(u_i) + φ_i, B(u_i−) = B(u_i) + ψ_i.
    """

    def __init__(self, riccati_step: float = 1e-3, euler_step: float = 1e-3):
        self.riccati_step = riccati_step
        self.euler_dt = euler_step

    # ------------------------------------------------------------------
    # Riccati
    # ------------------------------------------------------------------
    @staticmethod
    def riccati_rhs(
        params: AffineParams,
        loadings: CompensatorLoadings,
        t: float,
        A: float,
        B: np.ndarray,
    ) -> Tuple[float, np.ndarray]:
        """(−∂_t A, −∂_t B) evaluados en (t, A, B)."""
        quad0 = B @ params.sigma0 @ B
        dA = float(loadings.phi0(t)) + params.mu0 @ B - quad0
        quad = np.einsum('i,kij,j->k', B, params.sigma, B)
        dB = np.asarray(loadings.psi0(t)) + params.mu @ B - quad
        return dA, dB

    def riccati_solve(
        self,
        params: AffineParams,
        loadings: CompensatorLoadings,
        schedule: RiskySchedule,
        T: float,
        step: float | None = None,
        t_start: float = 0.0,
    ) -> RiccatiSolution:
        """
        Integra hacia atrás desde T con RK4 de paso fijo; cada u_i ∈ [t_start, T] es nodo.

        Raises:
            AdmissibilityException: Cargas inconsistentes con el espacio de estados
            NumericalSchemeException: Paso no positivo o mayor que la menor distancia
                entre tiempos riesgosos
        """
        step = self.riccati_step if step is None else step
        self._validate_model(params, loadings, schedule)
        if step <= 0:
            raise NumericalSchemeException(f"El paso debe ser positivo: {step}")
        if T <= t_start:
            raise OutOfRangeException(f"Se requiere T > t_start (T={T}, t_start={t_start})")
        if step > schedule.min_gap():
            raise NumericalSchemeException(
                f"Paso {step} mayor que la menor distancia entre tiempos riesgosos {schedule.min_gap()}"
            )

        relevant = [i for i, e in enumerate(schedule) if t_start - TIME_ATOL <= e.time <= T + TIME_ATOL]
        times = aligned_grid(t_start, T, step, [schedule[i].time for i in relevant])
        jump_at = {}
        for i in relevant:
            k = int(np.argmin(np.abs(times - schedule[i].time)))
            jump_at[k] = loadings.jumps[i]

        n, d = times.size, params.dim
        A = np.zeros(n)
        B = np.zeros((n, d))
        A_left = np.zeros(n)
        B_left = np.zeros((n, d))
        risky = np.zeros(n, dtype=bool)

        a, b = 0.0, np.zeros(d)
        for k in range(n - 1, -1, -1):
            if k < n - 1:
                a, b = self._rk4_step(params, loadings, times[k + 1], times[k + 1] - times[k], a, b)
            A[k], B[k] = a, b
            if k in jump_at:
                jump = jump_at[k]
                a, b = a + jump.phi, b + jump.psi
                risky[k] = True
            A_left[k], B_left[k] = a, b

        logger.debug(
            f"Riccati resuelto: T={T}, nodos={n}, saltos={int(risky.sum())}, A(t0)={A[0]:.6g}"
        )
        return RiccatiSolution(
            maturity=float(T), times=times, A=A, B=B,
            risky_mask=risky, A_left=A_left, B_left=B_left,
        )

    def _rk4_step(self, params, loadings, t: float, h: float, a: float, b: np.ndarray):
        """Un paso de t a t − h (la solución crece en la dirección de T − t)."""
        k1a, k1b = self.riccati_rhs(params, loadings, t, a, b)
        k2a, k2b = self.riccati_rhs(params, loadings, t - 0.5 * h, a + 0.5 * h * k1a, b + 0.5 * h * k1b)
        k3a, k3b = self.riccati_rhs(params, loadings, t - 0.5 * h, a + 0.5 * h * k2a, b + 0.5 * h * k2b)
        k4a, k4b = self.riccati_rhs(params, loadings, t - h, a + h * k3a, b + h * k3b)
        a_new = a + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        b_new = b + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
        return a_new, b_new

    @staticmethod
    def _validate_model(params: AffineParams, loadings: CompensatorLoadings, schedule: RiskySchedule) -> None:
        if loadings.dim != params.dim:
            raise AdmissibilityException(
                f"Cargas de dimensión {loadings.dim} para un estado de dimensión {params.dim}"
            )
        if len(loadings.jumps) != len(schedule):
            raise EntityValidationException(
                f"{len(loadings.jumps)} cargas de salto para {len(schedule)} tiempos riesgosos"
            )
        loadings.check_positivity(params.cone_dim)

    # ------------------------------------------------------------------
    # CIR
    # ------------------------------------------------------------------
    @staticmethod
    def _cir_flow(params: CIRParams, s: float, u: float, a0: float) -> Tuple[float, float]:
        """
        Solución del Riccati CIR tras un tiempo s = T − t con B(T) = u, A(T) = a0.
        """
        theta = params.theta
        sig2 = params.sigma ** 2
        if theta < 1e-14:
            # μ_1 = ψ_0 = 0: −∂B = −½σ²B²
            growth = 1.0 + 0.5 * sig2 * u * s
            return a0 + params.phi0 * s + (2.0 * params.mu0 / sig2) * math.log(growth), u / growth
        growth = math.exp(theta * s)
        L1 = 2.0 * params.psi0 * (growth - 1.0)
        L2 = theta * (growth + 1.0) + params.mu1 * (growth - 1.0)
        L3 = theta * (growth + 1.0) - params.mu1 * (growth - 1.0)
        L4 = sig2 * (growth - 1.0)
        denom = L3 + L4 * u
        B = (L1 + L2 * u) / denom
        log_term = math.log(2.0 * theta) + 0.5 * (theta - params.mu1) * s - math.log(denom)
        A = a0 + params.phi0 * s - (2.0 * params.mu0 / sig2) * log_term
        return A, B

    def cir_closed_form(self, params: CIRParams, t: float, T: float, u1: float) -> Tuple[float, float]:
        """
        (A(t,T), B(t,T)) del ejemplo CIR con un tiempo riesgoso u1.

        Ramas: t ≤ T < u1 y u1 ≤ t ≤ T sin salto; t < u1 ≤ T con el flujo
        reiniciado en u1 desde (A_0(T−u1) + φ_1, B_0(T−u1) + ψ_1).
        """
        if T < t - TIME_ATOL or t < -TIME_ATOL:
            raise OutOfRangeException(f"Se requiere 0 ≤ t ≤ T (t={t}, T={T})")
        if abs(T - t) <= TIME_ATOL and not (t < u1 - TIME_ATOL and u1 <= T + TIME_ATOL):
            return 0.0, 0.0
        if T < u1 - TIME_ATOL or u1 <= t + TIME_ATOL:
            return self._cir_flow(params, T - t, 0.0, 0.0)

        A_u, B_u = self._cir_flow(params, max(T - u1, 0.0), 0.0, 0.0)
        return self._cir_flow(params, u1 - t, B_u + params.psi1, A_u + params.phi1)

    # ------------------------------------------------------------------
    # Precios y compensador
    # ------------------------------------------------------------------
    @staticmethod
    def affine_bond_price(
        sol: RiccatiSolution,
        x,
        t: float,
        defaulted: bool = False,
        params: AffineParams | None = None,
    ) -> float:
        """P^M(t,T) = 1{τ>t} exp(−A(t,T) − B(t,T)ᵀx)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != sol.dim or not np.all(np.isfinite(x)):
            raise OutOfRangeException(f"Estado {x} incompatible con dimensión {sol.dim}")
        if params is not None and not params.in_state_space(x):
            raise OutOfRangeException(f"Estado {x} fuera del cono")
        if t > sol.maturity + TIME_ATOL:
            raise OutOfRangeException(f"t={t} posterior al vencimiento {sol.maturity}")
        if defaulted:
            return 0.0
        A, B = sol.at(t)
        return math.exp(-A - float(B @ x))

    @staticmethod
    def affine_compensator(
        loadings: CompensatorLoadings,
        x_path: StatePath,
        schedule: RiskySchedule,
        t: float,
    ) -> float:
        """
        ∫₀ᵗ(φ_0 + ψ_0ᵀX_s) ds + Σ_{u_i ≤ t}(1 − exp(−φ_i − ψ_iᵀX_{u_i})).

        Raises:
            NumericalSchemeException: Hazard negativo sobre la trayectoria
        """
        times = x_path.times
        if t < times[0] - TIME_ATOL or t > times[-1] + TIME_ATOL:
            raise OutOfRangeException(f"t={t} fuera de la trayectoria [{times[0]}, {times[-1]}]")

        mask = times < t - TIME_ATOL
        s = np.append(times[mask], t)
        x = np.vstack([x_path.values[mask], x_path.at(t)[None, :]])
        rates = loadings.hazard_rate(s, x)
        if np.any(rates < -1e-12):
            raise NumericalSchemeException(
                f"Hazard negativo en la trayectoria (mín={rates.min():.3g}); cargas no positivas"
            )
        continuous = float(trapezoid(rates, s)) if s.size > 1 else 0.0

        atoms = 0.0
        for i in schedule.up_to(t):
            exponent = float(loadings.atom_exponent(i, x_path.at(schedule[i].time)))
            if exponent < -1e-12:
                raise NumericalSchemeException(f"Átomo con exponente negativo en u={schedule[i].time}")
            atoms += -math.expm1(-exponent)
        return continuous + atoms

    # ------------------------------------------------------------------
    # Simulación
    # ------------------------------------------------------------------
    @staticmethod
    def euler_step(params: AffineParams, x: np.ndarray, dt: float, dW: np.ndarray) -> np.ndarray:
        """
        Paso Euler-Maruyama con truncamiento completo en el cono.

        x y dW tienen forma (n, d); los coeficientes se evalúan en x⁺.
        """
        m = params.cone_dim
        x_plus = x.copy()
        x_plus[:, :m] = np.maximum(x_plus[:, :m], 0.0)
        drift = params.drift(x_plus)
        half = params.half_diffusion(x_plus)
        if params.is_diagonal:
            vol = np.sqrt(np.maximum(2.0 * np.einsum('nii->ni', half), 0.0))
            shock = vol * dW
        else:
            w, Q = np.linalg.eigh(2.0 * half)
            root = np.einsum('nij,nj,nkj->nik', Q, np.sqrt(np.maximum(w, 0.0)), Q)
            shock = np.einsum('nij,nj->ni', root, dW)
        x_new = x + drift * dt + shock
        x_new[:, :m] = np.maximum(x_new[:, :m], 0.0)
        return x_new

    def simulate_state(
        self,
        params: AffineParams,
        x0,
        horizon: float,
        step: float | None = None,
        seed: int = 0,
    ) -> StatePath:
        """Trayectoria Euler en una grilla uniforme de [0, horizon]; determinista dada la semilla."""
        step = self.euler_dt if step is None else step
        if step <= 0:
            raise NumericalSchemeException(f"El paso debe ser positivo: {step}")
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        if x0.size != params.dim or not params.in_state_space(x0):
            raise OutOfRangeException(f"Estado inicial {x0} fuera del espacio de estados")

        times = aligned_grid(0.0, horizon, step)
        rng = derive_generator(seed, 0)
        values = np.empty((times.size, params.dim))
        values[0] = x0
        x = x0[None, :].copy()
        for k, dt in enumerate(np.diff(times)):
            dW = rng.standard_normal((1, params.dim)) * math.sqrt(dt)
            x = self.euler_step(params, x, dt, dW)
            values[k + 1] = x[0]
        return StatePath(times=times, values=values)
