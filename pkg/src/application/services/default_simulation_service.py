"""
Tiempos de default doblemente estocásticos, supervivencia y supermartingala de Azéma.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from src.domain.entities.compensator import CompensatorSpec
from src.domain.entities.hazard import DefaultSample, HazardAtom, HazardPath, TwoPointPrior
from src.domain.entities.risky_schedule import RiskySchedule, RiskyTime
from src.domain.exceptions.domain_exception import (
    EntityValidationException,
    OutOfRangeException,
)
from src.domain.value_objects.piecewise_linear import PiecewiseLinear
from src.shared.constants import ANNOUNCED_ATOM_GAMMA, TIME_ATOL
from src.shared.random_streams import (
    PathStreams,
    RandomSource,
    derive_generator,
    path_generator,
    run_blocks,
    standard_exponentials,
)
from src.shared.result import MonteCarloEstimate
from src.shared.utils import aligned_grid, within

logger = logging.getLogger(__name__)

DelayLaw = Callable[[np.random.Generator, int], np.ndarray]
LamPrimeSampler = Callable[[RandomSource, int], np.ndarray]

NO_ATOM = -1

# Propósitos de los flujos por trayectoria
SCENARIO_STREAM = 0
DEFAULT_STREAM = 1


def exponential_delays(scale: float = 1.0) -> DelayLaw:
    """Retardos σ_i ~ Exp(media = scale)."""
    if scale <= 0:
        raise OutOfRangeException(f"La media del retardo debe ser positiva: {scale}")
    return lambda rng, size: scale * standard_exponentials(rng, size)


def constant_delays(delay: float) -> DelayLaw:
    if delay <= 0:
        raise OutOfRangeException(f"El retardo debe ser positivo: {delay}")
    return lambda rng, size: np.full(size, float(delay))


@dataclass(frozen=True, eq=False)
class AzemaPath:
    """
    Trayectoria de Z_t = Σ_x π_t(x) e^{−x f(t)}.

    Attributes:
        times: Grilla (los tiempos de observación son nodos)
        Z: Valores continuos a derecha
        x_true: Valor simulado de X
        obs_times, observations: Observaciones Y_{t_i} = X + ξ_i
        jumps: Z_{t_i} − Z_{t_i−} en cada observación
        posterior: π en el último nodo
    """
    times: np.ndarray
    Z: np.ndarray
    x_true: float
    obs_times: np.ndarray
    observations: np.ndarray
    jumps: np.ndarray
    posterior: TwoPointPrior


class DefaultSimulationService:
    """Muestreo y evaluación de modelos de default con átomos."""

    def __init__(self, block_size: int = 10_000, workers: int = 1):
        self.block_size = block_size
        self.workers = workers

    # ------------------------------------------------------------------
    # Inversión del hazard integrado
    # ------------------------------------------------------------------
    @staticmethod
    def _nodes(path: HazardPath) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Nodos de inversión con Λ a izquierda y a derecha.

        Returns:
            (nodos, Λ_izq, Λ_der, índice de átomo por nodo o NO_ATOM)
        """
        grid = path.lam.grid
        inner = grid[(grid > 0) & (grid < path.horizon)]
        nodes = np.unique(np.concatenate([[0.0, path.horizon], inner, path.atom_times]))
        continuous = np.asarray(path.continuous_cumulative(nodes), dtype=float)

        atom_index = np.full(nodes.size, NO_ATOM)
        jumps = np.zeros(nodes.size)
        for i, atom in enumerate(path.atoms):
            k = int(np.argmin(np.abs(nodes - atom.time)))
            atom_index[k] = i
            jumps[k] = atom.lam_prime
        right_jumps = np.cumsum(jumps)
        left_jumps = np.concatenate([[0.0], right_jumps[:-1]])
        return nodes, continuous + left_jumps, continuous + right_jumps, atom_index

    def invert(self, path: HazardPath, zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        τ = inf{t : Λ_t ≥ ζ} para cada ζ; inf si Λ no alcanza ζ en el horizonte.

        Un empate Λ_{u_i} = ζ se atribuye al átomo.

        Returns:
            (tau, índice del átomo alcanzado o NO_ATOM)
        """
        zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
        nodes, left, right, atom_index = self._nodes(path)
        k = np.searchsorted(right, zeta, side='left')

        tau = np.full(zeta.size, np.inf)
        hit = np.full(zeta.size, NO_ATOM)
        found = k < nodes.size
        kk = np.minimum(k, nodes.size - 1)

        on_atom = found & (atom_index[kk] != NO_ATOM) & (zeta > left[kk])
        tau[on_atom] = nodes[kk[on_atom]]
        hit[on_atom] = atom_index[kk[on_atom]]

        at_start = found & ~on_atom & (kk == 0)
        tau[at_start] = nodes[0]

        inner = found & ~on_atom & (kk > 0)
        k1 = kk[inner]
        lo, hi = right[k1 - 1], left[k1]
        width = np.where(hi > lo, hi - lo, 1.0)
        frac = np.clip((zeta[inner] - lo) / width, 0.0, 1.0)
        tau[inner] = nodes[k1 - 1] + frac * (nodes[k1] - nodes[k1 - 1])
        return tau, hit

    def simulate_tau(self, path: HazardPath, seed: int) -> DefaultSample:
        """Un tiempo de default con ζ ~ Exp(1) del flujo derivado de la semilla."""
        zeta = standard_exponentials(derive_generator(seed, 0), 1)
        tau, hit = self.invert(path, zeta)
        sample = DefaultSample(tau=float(tau[0]), hit_atom=None if hit[0] == NO_ATOM else int(hit[0]))
        logger.debug(f"ζ={zeta[0]:.6g} → τ={sample.tau}, átomo={sample.hit_atom}")
        return sample

    def sample_taus(self, path: HazardPath, n_paths: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        n_paths tiempos de default en bloques con semillas derivadas.

        Returns:
            (tau, hit_atom) con NO_ATOM para defaults no atómicos o ausentes
        """
        def _block(k: int, n: int, rng: PathStreams):
            return self.invert(path, standard_exponentials(rng, n))

        blocks = run_blocks(_block, n_paths, seed, self.block_size, self.workers)
        if not blocks:
            return np.array([]), np.array([], dtype=int)
        tau = np.concatenate([b[0] for b in blocks])
        hit = np.concatenate([b[1] for b in blocks])
        logger.info(
            f"Simulados {n_paths} tiempos de default: {np.isfinite(tau).mean():.4f} con default, "
            f"{(hit != NO_ATOM).mean():.4f} en átomos"
        )
        return tau, hit

    # ------------------------------------------------------------------
    # Probabilidades
    # ------------------------------------------------------------------
    def conditional_atom_prob(
        self,
        lam_prime: float | LamPrimeSampler,
        n_samples: int = 0,
        seed: Optional[int] = None,
    ) -> MonteCarloEstimate:
        """
        Q(τ = u_i | τ ≥ u_i) = E[1 − e^{−λ′}].

        Con λ′ determinístico el valor es exacto; con un muestreador se estima por MC.
        """
        if not callable(lam_prime):
            if math.isnan(lam_prime) or lam_prime < 0:
                raise OutOfRangeException(f"λ′ debe ser no negativo: {lam_prime}")
            return MonteCarloEstimate.exact(-math.expm1(-lam_prime))
        if seed is None or n_samples <= 0:
            raise OutOfRangeException("La estimación Monte Carlo requiere semilla y n_samples > 0")

        def _block(k: int, n: int, rng: PathStreams) -> np.ndarray:
            draws = np.asarray(lam_prime(rng, n), dtype=float)
            if np.any(draws < 0):
                raise OutOfRangeException("El muestreador produjo λ′ negativos")
            return -np.expm1(-draws)

        samples = np.concatenate(run_blocks(_block, n_samples, seed, self.block_size, self.workers))
        return MonteCarloEstimate.from_samples(samples)

    @staticmethod
    def survival_probability(spec: CompensatorSpec, t):
        """
        Q(τ > t) = e^{−∫₀ᵗ h} ∏_{u_i ≤ t}(1 − Γ_i).

        Raises:
            OutOfRangeException: Si t está fuera de [0, T*]
        """
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if not all(within(s, 0.0, spec.horizon) for s in t_arr):
            raise OutOfRangeException(f"t fuera de [0, {spec.horizon}]: {t}")
        out = np.exp(-np.asarray(spec.hazard.integral(0.0, t_arr), dtype=float))
        for entry in spec.schedule:
            out = out * np.where(entry.time <= t_arr + TIME_ATOL, 1.0 - entry.require_gamma(), 1.0)
        return float(out[0]) if np.ndim(t) == 0 else out

    @staticmethod
    def compensator_from_hazard(path: HazardPath) -> CompensatorSpec:
        """h = λ y Γ_i = 1 − e^{−λ′_i}."""
        return path.to_compensator_spec()

    @staticmethod
    def deterministic_term_structure(path: HazardPath, t: float, T: float, defaulted: bool = False) -> float:
        """P(t,T) = 1{τ>t} exp(−∫_t^T λ − Σ_{u_i ∈ (t,T]} λ′_i) con r ≡ 0."""
        if not (-TIME_ATOL <= t <= T + TIME_ATOL) or T > path.horizon + TIME_ATOL:
            raise OutOfRangeException(f"Se requiere 0 ≤ t ≤ T ≤ {path.horizon} (t={t}, T={T})")
        if defaulted:
            return 0.0
        return math.exp(-path.increment(t, T))

    # ------------------------------------------------------------------
    # Tiempos anunciados
    # ------------------------------------------------------------------
    @staticmethod
    def announced_scenario(rate: float, sigma_law: DelayLaw, horizon: float, seed: int,
                           path_id: int = 0) -> RiskySchedule:
        """
        Noticias de Poisson S_i en [0, horizon], tiempos riesgosos U_i = S_i + σ_i ≤ horizon
        con Γ = 1 − e^{−1}.

        El escenario depende solo de (seed, path_id).
        """
        if not rate > 0:
            raise OutOfRangeException(f"La intensidad de noticias debe ser positiva: {rate}")
        if horizon <= 0:
            raise OutOfRangeException(f"Horizonte inválido: {horizon}")
        rng = path_generator(seed, path_id, SCENARIO_STREAM)
        n = int(rng.poisson(rate * horizon))
        news = np.sort(rng.uniform(0.0, horizon, n))
        delays = np.asarray(sigma_law(rng, n), dtype=float)
        risky = news + delays

        keep = (delays > 0) & (risky <= horizon)
        order = np.argsort(risky[keep], kind='stable')
        entries = []
        last = -np.inf
        for s, u in zip(news[keep][order], risky[keep][order]):
            if u - last <= TIME_ATOL:
                continue
            entries.append(RiskyTime(time=float(u), gamma=ANNOUNCED_ATOM_GAMMA, announce_time=float(s)))
            last = u
        logger.debug(f"Escenario anunciado: {n} noticias, {len(entries)} tiempos riesgosos ≤ {horizon}")
        return RiskySchedule(tuple(entries))

    def simulate_announced(self, rate: float, sigma_law: DelayLaw, horizon: float,
                           n_paths: int, seed: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Un escenario anunciado y un τ por trayectoria, en bloques.

        Returns:
            (tau, hit_atom, n_atoms) por trayectoria
        """
        def _block(k: int, n: int, streams: PathStreams):
            tau, hit, counts = np.empty(n), np.empty(n, dtype=int), np.empty(n, dtype=int)
            for j, p in enumerate(streams.path_ids):
                schedule = self.announced_scenario(rate, sigma_law, horizon, seed, p)
                path = self.announced_default_path(schedule, horizon)
                zeta = standard_exponentials(streams.for_path(p, DEFAULT_STREAM), 1)
                t_p, h_p = self.invert(path, zeta)
                tau[j], hit[j], counts[j] = t_p[0], h_p[0], len(schedule)
            return tau, hit, counts

        blocks = run_blocks(_block, n_paths, seed, self.block_size, self.workers)
        if not blocks:
            return np.array([]), np.array([], dtype=int), np.array([], dtype=int)
        tau, hit, counts = (np.concatenate([b[i] for b in blocks]) for i in range(3))
        logger.info(f"Simulados {n_paths} escenarios anunciados: {counts.mean():.3f} átomos en promedio")
        return tau, hit, counts

    def expected_atom_count(self, rate: float, sigma_law: DelayLaw, horizon: float,
                            n_runs: int, seed: int) -> MonteCarloEstimate:
        """Media Monte Carlo del número de tiempos riesgosos por escenario."""
        def _block(k: int, n: int, streams: PathStreams) -> np.ndarray:
            return np.array([
                len(self.announced_scenario(rate, sigma_law, horizon, seed, p)) for p in streams.path_ids
            ], dtype=float)

        counts = np.concatenate(run_blocks(_block, n_runs, seed, self.block_size, self.workers))
        return MonteCarloEstimate.from_samples(counts)

    @staticmethod
    def announced_default_path(schedule: RiskySchedule, horizon: float) -> HazardPath:
        """Λ_t = t + #{U_i ≤ t}: λ ≡ 1 y λ′_i = 1 en cada tiempo anunciado."""
        return HazardPath(
            lam=PiecewiseLinear.constant(1.0, 0.0, horizon),
            atoms=tuple(HazardAtom(e.time, 1.0) for e in schedule if e.time <= horizon + TIME_ATOL),
            horizon=horizon,
        )

    # ------------------------------------------------------------------
    # Supermartingala de Azéma
    # ------------------------------------------------------------------
    @staticmethod
    def _check_curve(f_curve, times: np.ndarray) -> np.ndarray:
        f = np.asarray(f_curve(times), dtype=float)
        if np.any(np.diff(f) < -1e-12):
            raise EntityValidationException("f debe ser no decreciente")
        if np.any(f < 0):
            raise EntityValidationException("f debe ser no negativa")
        return f

    @staticmethod
    def _z_values(log_post: np.ndarray, points: np.ndarray, f: np.ndarray) -> np.ndarray:
        # log_post (n, 2), f (m,) → Z (n, m)
        return np.exp(logsumexp(log_post[:, :, None] - points[None, :, None] * f[None, None, :], axis=1))

    def azema_ensemble(
        self,
        f_curve,
        obs_times: Sequence[float],
        obs_noise_std: float,
        prior: TwoPointPrior,
        n_paths: int,
        seed: int,
        horizon: float,
        step: float = 0.01,
        start: float = 0.0,
    ):
        """
        n trayectorias de Z en [start, horizon] partiendo de la ley `prior` en `start`.

        Returns:
            (times, Z (n, m), X (n,), observaciones (n, k), tiempos de observación (k,))
        """
        if obs_noise_std <= 0:
            raise OutOfRangeException(f"El ruido de observación debe ser positivo: {obs_noise_std}")
        if horizon <= start:
            raise OutOfRangeException(f"Se requiere horizon > start ({horizon} ≤ {start})")
        obs = np.sort(np.asarray([s for s in obs_times if start + TIME_ATOL < s <= horizon + TIME_ATOL], dtype=float))
        times = aligned_grid(start, horizon, step, obs)
        f = self._check_curve(f_curve, times)
        points = np.asarray(prior.points)

        rng = derive_generator(seed, 0)
        X = np.where(rng.random(n_paths) < prior.p_low, points[0], points[1])
        Y = X[:, None] + obs_noise_std * rng.standard_normal((n_paths, obs.size))

        with np.errstate(divide='ignore'):
            log_post = np.tile(np.log(prior.weights), (n_paths, 1))
        Z = np.empty((n_paths, times.size))
        obs_nodes = [int(np.argmin(np.abs(times - s))) for s in obs]
        cursor = 0
        for j, k_obs in enumerate(obs_nodes + [times.size - 1]):
            segment = slice(cursor, k_obs)
            if j < len(obs_nodes):
                Z[:, segment] = self._z_values(log_post, points, f[segment])
                log_post = log_post + norm.logpdf(Y[:, j:j + 1], loc=points[None, :], scale=obs_noise_std)
                log_post = log_post - logsumexp(log_post, axis=1, keepdims=True)
                cursor = k_obs
            else:
                Z[:, cursor:] = self._z_values(log_post, points, f[cursor:])
        return times, Z, X, Y, obs, log_post

    def azema_path(
        self,
        f_curve,
        obs_times: Sequence[float],
        obs_noise_std: float,
        prior: TwoPointPrior,
        seed: int,
        horizon: Optional[float] = None,
        step: float = 0.01,
        start: float = 0.0,
    ) -> AzemaPath:
        """
        Simula X, las observaciones ruidosas y la actualización bayesiana exacta de π_t.

        Con prior degenerada Z_t = e^{−x f(t)} y no hay saltos informativos.
        """
        horizon = float(max(obs_times)) if horizon is None and len(obs_times) else horizon
        if horizon is None:
            raise OutOfRangeException("Se requiere un horizonte cuando no hay observaciones")
        times, Z, X, Y, obs, log_post = self.azema_ensemble(
            f_curve, obs_times, obs_noise_std, prior, 1, seed, horizon, step, start
        )
        f = np.asarray(f_curve(times), dtype=float)
        jumps = np.empty(obs.size)
        with np.errstate(divide='ignore'):
            w_prev = np.log(prior.weights)
        points = np.asarray(prior.points)
        for j, s in enumerate(obs):
            k = int(np.argmin(np.abs(times - s)))
            before = float(np.exp(logsumexp(w_prev - points * f[k])))
            jumps[j] = Z[0, k] - before
            w_prev = w_prev + norm.logpdf(Y[0, j], loc=points, scale=obs_noise_std)
            w_prev = w_prev - logsumexp(w_prev)
        posterior = TwoPointPrior(p_low=float(np.clip(np.exp(log_post[0, 0]), 0.0, 1.0)), points=prior.points)
        return AzemaPath(
            times=times, Z=Z[0], x_true=float(X[0]), obs_times=obs,
            observations=Y[0], jumps=jumps, posterior=posterior,
        )
