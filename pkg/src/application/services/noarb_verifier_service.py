"""
Verificación numérica de las condiciones de deriva de no arbitraje y pruebas
Monte Carlo de la propiedad de martingala de los precios descontados.
"""
from __future__ import annotations
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.application.dto.report_dto import ConditionReport, MartingaleReport, VerificationReport
from src.application.interfaces.i_pricing_model import (
    IDriftProvider,
    IPathSampler,
    IPricingModel,
    SampledPaths,
)
from src.application.services.affine_engine_service import AffineEngineService
from src.application.services.merton_filter_service import MertonFilterService
from src.domain.entities.affine import AffineParams, CompensatorLoadings, JumpLoading, RiccatiSolution
from src.domain.entities.compensator import CompensatorSpec, ShortRate
from src.domain.entities.forward_surface import ForwardSurface
from src.domain.entities.hazard import HazardPath
from src.domain.entities.hjm import HJMCoefficients
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import (
    EntityValidationException,
    NumericalSchemeException,
    OutOfRangeException,
    UnderpoweredTestException,
)
from src.shared.constants import DEFAULT_Z_THRESHOLD, TIME_ATOL
from src.shared.random_streams import PathStreams, RandomSource, run_blocks, standard_exponentials
from src.shared.result import MonteCarloEstimate
from src.shared.utils import aligned_grid, trapezoid_on_interval

logger = logging.getLogger(__name__)

GridPairs = Sequence[Tuple[float, float]]


# ----------------------------------------------------------------------
# Proveedores de coeficientes μ^M-integrados
# ----------------------------------------------------------------------
class MertonAtomDriftProvider(IDriftProvider):
    """
    Merton con deriva conocida: un único átomo en U y parte continua f = r.

    El estado es el nivel W_t del Browniano en el punto evaluado.
    """

    def __init__(self, W_t: float, U: float, K: float, r: float = 0.0):
        self.W_t = W_t
        self.U = U
        self.K = K
        self.r = r

    def bar(self, t: float, T: float) -> tuple[float, np.ndarray]:
        if t < self.U <= T + TIME_ATOL:
            coeffs = MertonFilterService.merton_forward_coeffs(self.W_t, t, self.U, self.K)
            return float(coeffs.a), np.array([coeffs.b])
        return 0.0, np.zeros(1)

    def forward_diagonal(self, t: float) -> float:
        return self.r

    def atom_forward(self, index: int) -> float:
        return 0.0 if self.W_t > self.K else math.inf


class AffineDriftProvider(IDriftProvider):
    """
    Coeficientes de un modelo afín en el estado x a partir de soluciones de Riccati.

    ā = ∂_t⁺A + φ_0 + (∂_t⁺B + ψ_0)ᵀx + Bᵀμ(x),  b̄ = S B con S² = σσᵀ = 2(σ_0 + Σ x_i σ_i).
    """

    def __init__(
        self,
        engine: AffineEngineService,
        params: AffineParams,
        loadings: CompensatorLoadings,
        schedule: RiskySchedule,
        x,
        step: Optional[float] = None,
    ):
        self.engine = engine
        self.params = params
        self.loadings = loadings
        self.schedule = schedule
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.step = step
        self._solutions: Dict[float, RiccatiSolution] = {}
        w, Q = np.linalg.eigh(2.0 * params.half_diffusion(self.x))
        self._root = (Q * np.sqrt(np.maximum(w, 0.0))) @ Q.T

    def solution(self, T: float) -> RiccatiSolution:
        key = round(float(T), 12)
        if key not in self._solutions:
            self._solutions[key] = self.engine.riccati_solve(
                self.params, self.loadings, self.schedule, T, self.step
            )
        return self._solutions[key]

    def bar(self, t: float, T: float) -> tuple[float, np.ndarray]:
        sol = self.solution(T)
        A, B = sol.at(t)
        dA, dB = sol.derivative(t)
        x = self.x
        abar = (
            dA + float(self.loadings.phi0(t))
            + float((dB + np.asarray(self.loadings.psi0(t))) @ x)
            + float(B @ self.params.drift(x))
        )
        return abar, self._root @ B

    def forward_diagonal(self, t: float) -> float:
        dA, dB = AffineEngineService.riccati_rhs(self.params, self.loadings, t, 0.0, np.zeros(self.params.dim))
        return float(dA + dB @ self.x)

    def atom_forward(self, index: int) -> float:
        u = self.schedule[index].time
        sol = self.solution(u)
        A_left, B_left = sol.left_limit(u)
        return float(A_left + B_left @ self.x)


# ----------------------------------------------------------------------
# Modelos de precio y simuladores para la prueba de martingala
# ----------------------------------------------------------------------
class DeterministicPricingModel(IPricingModel):
    """P(t,T) = exp(−∫_t^T r − (Λ_T − Λ_t)) con Λ determinístico."""

    def __init__(self, path: HazardPath, rate: Optional[ShortRate] = None):
        self.path = path
        self.rate = rate or ShortRate.zero()

    def price(self, t: float, T: float, states: np.ndarray) -> np.ndarray:
        value = math.exp(-float(self.rate.integral(t, T)) - self.path.increment(t, T))
        return np.full(states.shape[0], value)

    def reference(self, T: float, initial_state: np.ndarray) -> float:
        return math.exp(-float(self.rate.integral(0.0, T)) - float(self.path.cumulative(T)))


class DeterministicPathSampler(IPathSampler):
    def __init__(self, path: HazardPath, rate: Optional[ShortRate] = None):
        self.path = path
        self.rate = rate or ShortRate.zero()

    @property
    def initial_state(self) -> np.ndarray:
        return np.zeros(1)

    def sample(self, t_grid: np.ndarray, n_paths: int, rng: RandomSource) -> SampledPaths:
        lam = np.asarray(self.path.cumulative(t_grid), dtype=float)
        discount = np.asarray(self.rate.discount(t_grid), dtype=float)
        return SampledPaths(
            states=np.zeros((n_paths, t_grid.size, 1)),
            cumulative_hazard=np.broadcast_to(lam, (n_paths, t_grid.size)),
            discount=np.broadcast_to(discount, (n_paths, t_grid.size)),
        )


class AffinePricingModel(IPricingModel):
    """P(t,T) = exp(−A(t,T) − B(t,T)ᵀx) con soluciones de Riccati en caché por vencimiento."""

    def __init__(self, engine: AffineEngineService, params: AffineParams, loadings: CompensatorLoadings,
                 schedule: RiskySchedule, step: Optional[float] = None):
        self.engine = engine
        self.params = params
        self.loadings = loadings
        self.schedule = schedule
        self.step = step
        self._solutions: Dict[float, RiccatiSolution] = {}

    @classmethod
    def with_mispriced_atoms(cls, engine: AffineEngineService, params: AffineParams,
                             loadings: CompensatorLoadings, schedule: RiskySchedule,
                             step: Optional[float] = None) -> AffinePricingModel:
        """Variante que valúa con φ_i = ψ_i = 0 (ignora los átomos del compensador)."""
        zeroed = CompensatorLoadings(
            phi0=loadings.phi0, psi0=loadings.psi0,
            jumps=tuple(JumpLoading(0.0, np.zeros(loadings.dim)) for _ in loadings.jumps),
        )
        return cls(engine, params, zeroed, schedule, step)

    def _solution(self, T: float) -> RiccatiSolution:
        key = round(float(T), 12)
        if key not in self._solutions:
            self._solutions[key] = self.engine.riccati_solve(self.params, self.loadings, self.schedule, T, self.step)
        return self._solutions[key]

    def price(self, t: float, T: float, states: np.ndarray) -> np.ndarray:
        if abs(T - t) <= TIME_ATOL:
            return np.ones(states.shape[0])
        A, B = self._solution(T).at(t)
        return np.exp(-A - states @ B)

    def reference(self, T: float, initial_state: np.ndarray) -> float:
        return float(self.price(0.0, T, np.atleast_2d(initial_state))[0])


class AffinePathSampler(IPathSampler):
    """
    Euler con truncamiento completo; Λ_t = ∫(φ_0 + ψ_0ᵀX) ds + Σ_{u_i ≤ t}(φ_i + ψ_iᵀX_{u_i}).
    """

    def __init__(self, engine: AffineEngineService, params: AffineParams, loadings: CompensatorLoadings,
                 schedule: RiskySchedule, x0, euler_step: float = 1e-3):
        self.engine = engine
        self.params = params
        self.loadings = loadings
        self.schedule = schedule
        self.x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        self.euler_step = euler_step

    @property
    def initial_state(self) -> np.ndarray:
        return self.x0

    def sample(self, t_grid: np.ndarray, n_paths: int, rng: RandomSource) -> SampledPaths:
        d = self.params.dim
        horizon = float(t_grid[-1])
        atoms = {round(e.time, 12): i for i, e in enumerate(self.schedule) if e.time <= horizon + TIME_ATOL}
        grid = aligned_grid(0.0, horizon, self.euler_step, list(t_grid) + [self.schedule[i].time for i in atoms.values()])
        record = {int(np.argmin(np.abs(grid - t))): j for j, t in enumerate(t_grid)}

        states = np.empty((n_paths, t_grid.size, d))
        lam = np.empty((n_paths, t_grid.size))
        x = np.tile(self.x0, (n_paths, 1))
        cumulative = np.zeros(n_paths)
        rate = self.loadings.hazard_rate(grid[0], x)

        def _store(k: int) -> None:
            if k in record:
                states[:, record[k]] = x
                lam[:, record[k]] = cumulative

        for k in range(grid.size):
            if k > 0:
                dt = grid[k] - grid[k - 1]
                dW = rng.standard_normal((n_paths, d)) * math.sqrt(dt)
                x = self.engine.euler_step(self.params, x, dt, dW)
                new_rate = self.loadings.hazard_rate(grid[k], x)
                cumulative = cumulative + 0.5 * (rate + new_rate) * dt
                rate = new_rate
            i = atoms.get(round(float(grid[k]), 12))
            if i is not None:
                cumulative = cumulative + self.loadings.atom_exponent(i, x)
            _store(k)
        return SampledPaths(states=states, cumulative_hazard=lam, discount=np.ones_like(lam))


# ----------------------------------------------------------------------
# Servicio
# ----------------------------------------------------------------------
class NoArbitrageVerifierService:
    """
    Condiciones de deriva (generales y de Merton), salto de G y prueba de martingala.
    """

    def __init__(
        self,
        quadrature_nodes: int = 2001,
        closed_form_tol: float = 1e-8,
        grid_tol_factor: float = 10.0,
        z_threshold: float = DEFAULT_Z_THRESHOLD,
        min_paths: int = 1000,
        block_size: int = 10_000,
        workers: int = 1,
        continuity_tol: float = 1e-4,
    ):
        self.quadrature_nodes = quadrature_nodes
        self.closed_form_tol = closed_form_tol
        self.grid_tol_factor = grid_tol_factor
        self.z_threshold = z_threshold
        self.min_paths = min_paths
        self.block_size = block_size
        self.workers = workers
        self.continuity_tol = continuity_tol

    # ------------------------------------------------------------------
    # Integrales barra
    # ------------------------------------------------------------------
    def bar_integrals(self, coef: HJMCoefficients, t: float, T: float):
        """
        (ā, b̄, ᾱ, β̄) en (t,T): ā, b̄ por trapecio; ᾱ, β̄ sobre átomos anunciados en (t,T].
        """
        if T < t - TIME_ATOL:
            raise OutOfRangeException(f"Se requiere t ≤ T (t={t}, T={T})")
        abar = float(trapezoid_on_interval(lambda u: coef.a(np.full_like(u, t), u), t, T, self.quadrature_nodes))
        bbar = np.atleast_1d(
            trapezoid_on_interval(lambda u: coef.b(np.full_like(u, t), u), t, T, self.quadrature_nodes)
        ).astype(float)
        if bbar.size != coef.n_factors:
            bbar = np.broadcast_to(bbar, (coef.n_factors,)).copy()

        alphabar = 0.0
        betabar = np.zeros(coef.n_factors)
        for i in coef.schedule.announced_in(t, T):
            u = coef.schedule[i].time
            alphabar += float(coef.alpha(np.asarray(t), np.asarray(u)))
            betabar = betabar + np.asarray(coef.beta(np.asarray(t), np.asarray(u)), dtype=float).reshape(-1)
        return abar, bbar, alphabar, betabar

    # ------------------------------------------------------------------
    # (dc1) / (dc2)
    # ------------------------------------------------------------------
    @staticmethod
    def _continuous_dc1(f_diag: Callable[[float], float], spec: CompensatorSpec, r: ShortRate,
                        times: Iterable[float]) -> Tuple[List[float], List[Dict[str, float]]]:
        residuals, points = [], []
        for t in times:
            residuals.append(abs(float(f_diag(t)) - float(r(t)) - float(spec.hazard(t))))
            points.append({'t': float(t)})
        return residuals, points

    def verify_general_drift(
        self,
        coef: HJMCoefficients,
        spec: CompensatorSpec,
        r: ShortRate,
        f_diag: Callable[[float], float],
        grid: GridPairs,
        tol: Optional[float] = None,
        label: str = "general",
    ) -> VerificationReport:
        """
        (dc1): f(t,t) = r_t + h_t y g(U_i,U_i) = −log(1 − Γ_i) por separado.
        (dc2): ā + ᾱ = ½‖b̄ + β̄‖² + Σ_{u_j ∈ (t,T]} (e^{−g(t,u_j)} − 1) w_j(t).
        """
        tol = self.closed_form_tol if tol is None else tol
        grid = [(float(t), float(T)) for t, T in grid]
        self._check_grid(grid, spec.horizon)

        times = sorted({t for t, _ in grid})
        residuals, points = self._continuous_dc1(f_diag, spec, r, times)
        for entry in spec.schedule:
            u = entry.time
            g_diag = float(coef.g(np.asarray(u), np.asarray(u)))
            if not math.isfinite(g_diag):
                raise EntityValidationException(f"Falta g en el punto diagonal riesgoso u={u}")
            residuals.append(abs(g_diag + math.log1p(-entry.require_gamma())))
            points.append({'t': u, 'T': u})
        dc1 = ConditionReport.from_residuals('dc1', np.array(residuals), points, tol)

        dc2_res = []
        for t, T in grid:
            abar, bbar, alphabar, betabar = self.bar_integrals(coef, t, T)
            jump_term = 0.0
            for atom in coef.nu:
                if t + TIME_ATOL < atom.location <= T + TIME_ATOL:
                    g_tu = float(coef.g(np.asarray(t), np.asarray(atom.location)))
                    jump_term += math.expm1(-g_tu) * float(atom.weight(t))
            rhs = 0.5 * float(np.sum((bbar + betabar) ** 2)) + jump_term
            dc2_res.append(abs(abar + alphabar - rhs))
        dc2 = ConditionReport.from_residuals('dc2', np.array(dc2_res), [{'t': t, 'T': T} for t, T in grid], tol)

        report = VerificationReport(label=label, conditions=[dc1, dc2])
        self._log_report(report)
        return report

    # ------------------------------------------------------------------
    # (dcm1) / (dcm2)
    # ------------------------------------------------------------------
    def verify_merton_drift(
        self,
        provider: IDriftProvider,
        spec: Optional[CompensatorSpec],
        r: ShortRate,
        grid: GridPairs,
        tol: Optional[float] = None,
        label: str = "merton",
        tolerance_kind: str = "closed_form",
    ) -> VerificationReport:
        """
        (dcm1): f(t,t) = r_t + h_t y f(u_i,u_i) = −log(1 − Γ_i); se omite si spec es None.
        (dcm2): ā(t,T) = ½‖b̄(t,T)‖² con integrales respecto de μ^M.
        """
        tol = self.closed_form_tol if tol is None else tol
        grid = [(float(t), float(T)) for t, T in grid]
        conditions = []
        if spec is not None:
            self._check_grid(grid, spec.horizon)
            times = sorted({t for t, _ in grid})
            residuals, points = self._continuous_dc1(provider.forward_diagonal, spec, r, times)
            for i, entry in enumerate(spec.schedule):
                residuals.append(abs(provider.atom_forward(i) + math.log1p(-entry.require_gamma())))
                points.append({'t': entry.time, 'T': entry.time})
            conditions.append(ConditionReport.from_residuals('dcm1', np.array(residuals), points, tol, tolerance_kind))
        else:
            logger.info("dcm1 omitida: Γ no es determinístico en este modelo")

        dcm2_res = []
        for t, T in grid:
            abar, bbar = provider.bar(t, T)
            dcm2_res.append(abs(abar - 0.5 * float(np.sum(np.asarray(bbar) ** 2))))
        conditions.append(ConditionReport.from_residuals(
            'dcm2', np.array(dcm2_res), [{'t': t, 'T': T} for t, T in grid], tol, tolerance_kind,
        ))
        report = VerificationReport(label=label, conditions=conditions)
        self._log_report(report)
        return report

    def verify_affine_drift(
        self,
        engine: AffineEngineService,
        params: AffineParams,
        loadings: CompensatorLoadings,
        schedule: RiskySchedule,
        states: Sequence[Sequence[float]],
        grid: GridPairs,
        step: Optional[float] = None,
    ) -> VerificationReport:
        """(dcm2) de un modelo afín en varios estados; tolerancia grid_tol_factor · paso²."""
        step = engine.riccati_step if step is None else step
        tol = self.grid_tol_factor * step ** 2
        conditions: List[ConditionReport] = []
        for x in states:
            provider = AffineDriftProvider(engine, params, loadings, schedule, x, step)
            sub = self.verify_merton_drift(provider, None, ShortRate.zero(), grid, tol,
                                           label=f"affine x={list(np.atleast_1d(x))}", tolerance_kind="grid")
            cond = sub.condition('dcm2')
            cond.argmax = {**cond.argmax, 'x': [float(v) for v in np.atleast_1d(x)]}
            conditions.append(cond)
        worst = max(conditions, key=lambda c: c.max_residual)
        merged = ConditionReport(
            condition='dcm2', max_residual=worst.max_residual, argmax=worst.argmax,
            passed=all(c.passed for c in conditions), tolerance=tol, tolerance_kind='grid',
            details={'n_states': len(conditions), 'n_points': sum(c.details.get('n_points', 0) for c in conditions)},
        )
        return VerificationReport(label="affine", conditions=[merged])

    # ------------------------------------------------------------------
    # Salto de G
    # ------------------------------------------------------------------
    def _left_value(self, surface: ForwardSurface, t: float, u: float) -> float:
        """g(t−, u) por extrapolación lineal desde los dos nodos de tiempo anteriores a t."""
        grid = surface.time_grid
        before = grid[grid < t - TIME_ATOL]
        if before.size == 0:
            return surface.g_value(t, u)
        if before.size == 1:
            return surface.g_value(float(before[-1]), u)
        t_a, t_b = float(before[-2]), float(before[-1])
        g_a, g_b = surface.g_value(t_a, u), surface.g_value(t_b, u)
        return g_b + (g_b - g_a) / (t_b - t_a) * (t - t_b)

    def g_jump_check(self, surface: ForwardSurface, u_i: float, T: float, tol: Optional[float] = None) -> float:
        """
        Residuo |G(u_i,T)/G(u_i−,T) − 1 − (e^{g(u_i,u_i)} − 1)|.

        Raises:
            NumericalSchemeException: Si g(·, u_j) es discontinua en t = u_i
        """
        schedule = surface.schedule
        i = schedule.index_of(u_i)
        u_i = schedule[i].time
        if T <= u_i + TIME_ATOL:
            raise OutOfRangeException(f"Se requiere T > u_i (T={T}, u_i={u_i})")
        if not schedule[i].is_announced_by(u_i - 1e-9):
            raise OutOfRangeException(f"u_i={u_i} no está anunciado antes de u_i")

        later = [j for j in schedule.in_interval(u_i, T)
                 if schedule[j].announce_time is None or schedule[j].announce_time < u_i - TIME_ATOL]

        g_diag = surface.g_value(u_i, u_i)
        log_ratio = self._left_value(surface, u_i, u_i)
        # g(·, u_i) puede saltar en u_i; los átomos posteriores no
        for j in later:
            u = schedule[j].time
            right, left = surface.g_value(u_i, u), self._left_value(surface, u_i, u)
            if abs(right - left) > self.continuity_tol:
                raise NumericalSchemeException(
                    f"g(·, {u}) es discontinua en t={u_i}: salto {right - left:.3g}"
                )
            log_ratio += left - right

        relative_jump = math.expm1(log_ratio)
        residual = abs(relative_jump - math.expm1(g_diag))
        tol = self.closed_form_tol if tol is None else tol
        level = logging.DEBUG if residual <= tol else logging.WARNING
        logger.log(level, f"Salto de G en u={u_i}, T={T}: relativo={relative_jump:.8g}, residuo={residual:.3g}")
        return residual

    # ------------------------------------------------------------------
    # Prueba de martingala
    # ------------------------------------------------------------------
    def martingale_mc_test(
        self,
        model: IPricingModel,
        sampler: IPathSampler,
        t_grid: Sequence[float],
        T: float,
        n_paths: int,
        seed: int,
    ) -> MartingaleReport:
        """
        Estima E[(X⁰_t)^{-1} 1{τ>t} P(t,T)] en cada t y lo compara con P(0,T).

        Raises:
            UnderpoweredTestException: Si n_paths < min_paths
        """
        if n_paths < self.min_paths:
            raise UnderpoweredTestException(
                f"n_paths={n_paths} insuficiente; se requieren al menos {self.min_paths}"
            )
        t_grid = np.asarray(sorted(float(t) for t in t_grid))
        if t_grid.size == 0 or t_grid[0] < -TIME_ATOL or t_grid[-1] > T + TIME_ATOL:
            raise OutOfRangeException(f"t_grid debe estar en [0, T={T}]")

        def _block(k: int, n: int, rng: PathStreams):
            paths = sampler.sample(t_grid, n, rng)
            zeta = standard_exponentials(rng, n)
            values = np.empty((n, t_grid.size))
            for j, t in enumerate(t_grid):
                alive = paths.cumulative_hazard[:, j] < zeta
                price = model.price(float(t), T, paths.states[:, j])
                values[:, j] = paths.discount[:, j] * np.where(alive, price, 0.0)
            return values.sum(axis=0), (values ** 2).sum(axis=0)

        blocks = run_blocks(_block, n_paths, seed, self.block_size, self.workers)
        total = np.zeros(t_grid.size)
        total_sq = np.zeros(t_grid.size)
        for s, s2 in blocks:
            total += s
            total_sq += s2
        mean = total / n_paths
        var = np.maximum(total_sq - n_paths * mean ** 2, 0.0) / (n_paths - 1)
        se = np.sqrt(var / n_paths)
        reference = model.reference(T, sampler.initial_state)
        z = np.array([
            MonteCarloEstimate(value=float(m), std_error=float(e), n_samples=n_paths).z_score(reference)
            for m, e in zip(mean, se)
        ])
        report = MartingaleReport(
            maturity=float(T), reference=float(reference), t_grid=t_grid, estimates=mean,
            std_errors=se, z_scores=z, n_paths=n_paths, z_threshold=self.z_threshold,
        )
        logger.info(
            f"Prueba de martingala T={T}: P(0,T)={reference:.6g}, máx |z|={np.max(np.abs(z)):.3f}, "
            f"{'✅ aprobada' if report.passed else '❌ rechazada'}"
        )
        return report

    # ------------------------------------------------------------------
    @staticmethod
    def _check_grid(grid: GridPairs, horizon: float) -> None:
        for t, T in grid:
            if t < -TIME_ATOL or T > horizon + TIME_ATOL or T < t - TIME_ATOL:
                raise OutOfRangeException(f"Par ({t}, {T}) fuera de 0 ≤ t ≤ T ≤ {horizon}")

    @staticmethod
    def _log_report(report: VerificationReport) -> None:
        for c in report.conditions:
            status = "✅" if c.passed else "❌"
            logger.info(f"{status} {report.label}/{c.condition}: residuo máx={c.max_residual:.3e} (tol={c.tolerance:.1e})")
