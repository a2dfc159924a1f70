"""
Filtro de Kalman-Bucy con noticia discreta y probabilidades de default de Merton.

Observación: Y_t = log(V_t / V_0) + ½σ²t = X t + σ W_t, de modo que
dY = X dt + σ dW y el filtro es el estándar con ruido de varianza σ².
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
from scipy.special import log_ndtr, ndtr
from scipy.stats import multivariate_normal, norm

from src.domain.entities.merton import (
    FilterState,
    MertonCurve,
    MertonForwardCoefficients,
    MertonSetup,
)
from src.domain.exceptions.domain_exception import NumericalSchemeException, OutOfRangeException
from src.shared.constants import TIME_ATOL
from src.shared.random_streams import derive_generator
from src.shared.utils import aligned_grid

logger = logging.getLogger(__name__)

_CDF_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class FilterRun:
    """
    Corrida sintética del filtro sobre una grilla.

    Attributes:
        times: Nodos de la grilla (S es nodo exacto)
        xhat, Sigma: Media y varianza condicionales (valor posterior a la noticia en S)
        pT, pU: Probabilidades de default en T y en U (NaN donde no están definidas)
        true_x: Deriva verdadera simulada
        firm_value: Trayectoria V_t
        y_prime: Noticia observada en S
    """
    times: np.ndarray
    xhat: np.ndarray
    Sigma: np.ndarray
    pT: np.ndarray
    pU: np.ndarray
    true_x: float
    firm_value: np.ndarray
    y_prime: float

    def to_columns(self) -> dict:
        return {'t': self.times, 'xhat': self.xhat, 'Sigma': self.Sigma, 'pT': self.pT, 'pU': self.pU}


class MertonFilterService:
    """Operaciones del modelo de Merton con deriva desconocida."""

    def __init__(self, dt: float = 1e-3):
        self.dt = dt

    # ------------------------------------------------------------------
    # Varianza y filtro
    # ------------------------------------------------------------------
    @staticmethod
    def _decay(sigma0, elapsed, sigma_sq: float):
        return sigma0 / (1.0 + sigma0 * elapsed / sigma_sq)

    @staticmethod
    def _news_variance(sigma_minus, eta_var: float):
        if math.isinf(eta_var):
            return sigma_minus
        return eta_var * sigma_minus / (sigma_minus + eta_var)

    @staticmethod
    def _news_gain(sigma_minus: float, eta_var: float) -> float:
        if math.isinf(eta_var):
            return 0.0
        denom = sigma_minus + eta_var
        return sigma_minus / denom if denom > 0 else 1.0

    def variance_path(self, setup: MertonSetup, t):
        """
        Σ(t) determinista: decaimiento hiperbólico, salto en S, decaimiento reiniciado.

        Raises:
            OutOfRangeException: Si t < 0
        """
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < -TIME_ATOL):
            raise OutOfRangeException(f"t debe ser no negativo: {t}")
        s2 = setup.sigma_sq
        before = self._decay(setup.var_x, np.maximum(t_arr, 0.0), s2)
        at_news = self._news_variance(self._decay(setup.var_x, setup.S, s2), setup.eta_var)
        after = self._decay(at_news, np.maximum(t_arr - setup.S, 0.0), s2)
        out = np.where(t_arr < setup.S - TIME_ATOL, before, after)
        return float(out) if out.ndim == 0 else out

    def filter_step(self, state: FilterState, dY, dt: float, setup: MertonSetup) -> FilterState:
        """x̂ ← x̂ + (Σ/σ²)(dY − x̂ dt); Σ avanza por la solución exacta de dΣ = −Σ²/σ² dt."""
        if dt <= 0:
            raise NumericalSchemeException(f"dt debe ser positivo: {dt}")
        gain = state.Sigma / setup.sigma_sq
        xhat = state.xhat + gain * (np.asarray(dY) - state.xhat * dt)
        if np.ndim(xhat) == 0:
            xhat = float(xhat)
        return FilterState(
            t=state.t + dt,
            xhat=xhat,
            Sigma=self._decay(state.Sigma, dt, setup.sigma_sq),
        )

    def news_update(self, state: FilterState, yprime, setup: MertonSetup) -> FilterState:
        """
        Actualización bayesiana exacta con Y′ = X + η.

        Raises:
            OutOfRangeException: Si el estado no está en el tiempo de la noticia
        """
        if abs(state.t - setup.S) > 1e-9:
            raise OutOfRangeException(f"La noticia llega en S={setup.S}; el estado está en t={state.t}")
        gain = self._news_gain(state.Sigma, setup.eta_var)
        xhat = state.xhat + gain * (np.asarray(yprime) - state.xhat)
        if np.ndim(xhat) == 0:
            xhat = float(xhat)
        Sigma = self._news_variance(state.Sigma, setup.eta_var)
        logger.debug(f"Noticia en S={setup.S}: ganancia={gain:.6g}, Σ {state.Sigma:.6g} → {Sigma:.6g}")
        return FilterState(t=setup.S, xhat=xhat, Sigma=Sigma)

    @staticmethod
    def conjugate_posterior(setup: MertonSetup, t: float, y_t, y_prime=None):
        """
        Posterior normal exacta de X dado Y_t (y Y′ si t ≥ S).

        Returns:
            (media, varianza)
        """
        precision = 1.0 / setup.var_x + t / setup.sigma_sq
        weighted = setup.mu_x / setup.var_x + np.asarray(y_t) / setup.sigma_sq
        if y_prime is not None and t >= setup.S - TIME_ATOL:
            if setup.eta_var == 0:
                return np.asarray(y_prime, dtype=float), 0.0
            if not math.isinf(setup.eta_var):
                precision += 1.0 / setup.eta_var
                weighted = weighted + np.asarray(y_prime) / setup.eta_var
        return weighted / precision, 1.0 / precision

    # ------------------------------------------------------------------
    # Probabilidades de default
    # ------------------------------------------------------------------
    @staticmethod
    def _check_value(V_t) -> np.ndarray:
        V = np.asarray(V_t, dtype=float)
        if np.any(~(V > 0)):
            raise OutOfRangeException(f"El valor de la firma debe ser positivo: {V_t}")
        return V

    def default_prob_T(self, state: FilterState, V_t, setup: MertonSetup):
        """
        P(V_T < K | F_t) = Φ((a′(t) − x̂ (T−t)) / b′(t)) para 0 ≤ t < T.

        a′ = log(K/V_t) + ½σ²(T−t),  b′ = √(T−t) √(σ² + Σ(t)(T−t)).
        """
        V = self._check_value(V_t)
        if not (-TIME_ATOL <= state.t < setup.T):
            raise OutOfRangeException(f"default_prob_T requiere 0 ≤ t < T (t={state.t}, T={setup.T})")
        tau = setup.T - state.t
        a = np.log(setup.K / V) + 0.5 * setup.sigma_sq * tau
        b = math.sqrt(tau) * math.sqrt(setup.sigma_sq + state.Sigma * tau)
        out = ndtr((a - np.asarray(state.xhat) * tau) / b)
        return float(out) if np.ndim(out) == 0 else out

    def default_prob_U(self, state: FilterState, V_t, survived_T, setup: MertonSetup):
        """
        P(τ = U | F_t) = P(V_T ≥ K, V_U < K′ | F_t) para S ≤ t < U.

        En [T, U) se usa la fórmula unidimensional multiplicada por 1{τ > T}; en
        [S, T) la probabilidad conjunta exacta de (log V_T, log V_U).

        Raises:
            OutOfRangeException: Si t < S o t ≥ U
        """
        V = self._check_value(V_t)
        t = state.t
        if t < setup.S - TIME_ATOL:
            raise OutOfRangeException(f"default_prob_U no está definida antes de la noticia (t={t} < S={setup.S})")
        if t >= setup.U:
            raise OutOfRangeException(f"default_prob_U requiere t < U (t={t}, U={setup.U})")

        xhat = np.asarray(state.xhat, dtype=float)
        s2, Sig = setup.sigma_sq, state.Sigma
        tau_u = setup.U - t
        a_u = np.log(setup.K_prime / V) + 0.5 * s2 * tau_u - xhat * tau_u
        var_u = Sig * tau_u ** 2 + s2 * tau_u

        if t >= setup.T - TIME_ATOL:
            out = np.where(np.asarray(survived_T, dtype=bool), ndtr(a_u / math.sqrt(var_u)), 0.0)
            return float(out) if out.ndim == 0 else out

        tau_t = setup.T - t
        a_t = np.log(setup.K / V) + 0.5 * s2 * tau_t - xhat * tau_t
        var_t = Sig * tau_t ** 2 + s2 * tau_t
        cov = Sig * tau_t * tau_u + s2 * tau_t
        points = np.column_stack(np.broadcast_arrays(a_t, a_u))
        joint = np.atleast_1d(multivariate_normal.cdf(
            points, mean=np.zeros(2), cov=[[var_t, cov], [cov, var_u]], abseps=_CDF_EPS, releps=_CDF_EPS,
        ))
        out = np.clip(ndtr(a_u / math.sqrt(var_u)) - joint.reshape(np.shape(a_u)), 0.0, 1.0)
        return float(out) if np.ndim(out) == 0 else out

    @staticmethod
    def gaussian_phi_expectation(a, b):
        """E[Φ(ξ)] = Φ(a / √(1 + b²)) para ξ ~ N(a, b²)."""
        b_arr = np.asarray(b, dtype=float)
        if np.any(b_arr < 0):
            raise OutOfRangeException(f"b debe ser no negativo: {b}")
        out = ndtr(np.asarray(a, dtype=float) / np.sqrt(1.0 + b_arr ** 2))
        return float(out) if np.ndim(out) == 0 else out

    # ------------------------------------------------------------------
    # Merton con deriva conocida
    # ------------------------------------------------------------------
    @staticmethod
    def merton_bond_price(W_t, t: float, T: float, curve: MertonCurve):
        """
        P^M(t,T) = e^{−r(T−t)} si T < U; e^{−r(T−t)} Φ((W_t − K)/√(U − t)) si U ≤ T.
        """
        if t >= curve.U:
            raise OutOfRangeException(f"merton_bond_price requiere t < U (t={t}, U={curve.U})")
        if T < t - TIME_ATOL:
            raise OutOfRangeException(f"Vencimiento T={T} anterior a t={t}")
        discount = math.exp(-curve.r * (T - t))
        if T < curve.U:
            out = np.full(np.shape(W_t), discount)
        else:
            out = discount * ndtr((np.asarray(W_t, dtype=float) - curve.K) / math.sqrt(curve.U - t))
        return float(out) if np.ndim(out) == 0 else out

    @staticmethod
    def merton_forward_coeffs(W_t, t: float, U: float, K: float) -> MertonForwardCoefficients:
        """
        f(t,U) = −log Φ(z), b(t,U) = −(φ(z)/Φ(z)) / √(U−t), z = (W_t − K)/√(U−t).

        a(t,U) es la deriva de Itô de −log Φ(z): ∂_t f + ½ ∂²_W f.
        """
        if t >= U:
            raise OutOfRangeException(f"merton_forward_coeffs requiere t < U (t={t}, U={U})")
        tau = U - t
        z = (np.asarray(W_t, dtype=float) - K) / math.sqrt(tau)
        log_cdf = log_ndtr(z)
        mills = np.exp(norm.logpdf(z) - log_cdf)
        f = -log_cdf
        b = -mills / math.sqrt(tau)
        d_time = -mills * z / (2.0 * tau)
        half_d_space = (z * mills + mills ** 2) / (2.0 * tau)
        a = d_time + half_d_space
        if np.ndim(f) == 0:
            return MertonForwardCoefficients(f=float(f), a=float(a), b=float(b))
        return MertonForwardCoefficients(f=f, a=a, b=b)

    # ------------------------------------------------------------------
    # Corridas sintéticas
    # ------------------------------------------------------------------
    def _simulate(self, setup: MertonSetup, n: int, horizon: float, dt: float,
                  rng: np.random.Generator, true_x: Optional[np.ndarray] = None,
                  record: bool = False):
        if horizon <= 0:
            raise OutOfRangeException(f"El horizonte debe ser positivo: {horizon}")
        times = aligned_grid(0.0, horizon, dt, [setup.S, setup.T, setup.U])
        X = rng.normal(setup.mu_x, math.sqrt(setup.var_x), n) if true_x is None else np.asarray(true_x, float)
        noise = rng.standard_normal(n)
        y_prime = X + setup.sigma_eta * noise if not math.isinf(setup.eta_var) else np.full(n, np.nan)

        state = FilterState.prior(setup, n)
        log_v = np.full(n, math.log(setup.v0))
        news_done = setup.S > horizon
        rows = []
        if record:
            rows.append((state.xhat.copy(), state.Sigma, log_v.copy()))
        for k, h in enumerate(np.diff(times)):
            dW = rng.standard_normal(n) * math.sqrt(h)
            dY = X * h + setup.sigma * dW
            log_v = log_v + dY - 0.5 * setup.sigma_sq * h
            state = self.filter_step(state, dY, h, setup)
            state = FilterState(t=float(times[k + 1]), xhat=state.xhat, Sigma=state.Sigma)
            if not news_done and abs(times[k + 1] - setup.S) <= TIME_ATOL:
                state = self.news_update(state, np.nan_to_num(y_prime, nan=0.0), setup)
                news_done = True
            if record:
                rows.append((state.xhat.copy(), state.Sigma, log_v.copy()))
        return times, X, y_prime, state, rows, log_v

    def run_filter(self, setup: MertonSetup, seed: int, horizon: Optional[float] = None,
                   dt: Optional[float] = None, true_x: Optional[float] = None) -> FilterRun:
        """
        Simula un escenario (X, W, η) y registra x̂, Σ, p_T y p_U en cada nodo.

        p_T vale 1{V_T < K} desde T; p_U es NaN antes de S y vale 1{V_T ≥ K, V_U < K′} en U.
        """
        horizon = setup.U if horizon is None else horizon
        dt = self.dt if dt is None else dt
        rng = derive_generator(seed, 0)
        x = None if true_x is None else np.array([true_x])
        times, X, y_prime, _, rows, _ = self._simulate(setup, 1, horizon, dt, rng, x, record=True)

        xhat = np.array([r[0][0] for r in rows])
        Sigma = np.array([r[1] for r in rows])
        V = np.exp(np.array([r[2][0] for r in rows]))
        pT = np.full(times.size, np.nan)
        pU = np.full(times.size, np.nan)
        V_T = None
        for k, t in enumerate(times):
            state = FilterState(t=float(t), xhat=float(xhat[k]), Sigma=float(Sigma[k]))
            if t < setup.T - TIME_ATOL:
                pT[k] = self.default_prob_T(state, V[k], setup)
            else:
                if V_T is None:
                    V_T = V[k]
                pT[k] = float(V_T < setup.K)
            if t < setup.S - TIME_ATOL:
                continue
            if t < setup.U - TIME_ATOL:
                survived = V_T is None or V_T >= setup.K
                pU[k] = self.default_prob_U(state, V[k], survived, setup)
            else:
                pU[k] = float(V_T >= setup.K and V[k] < setup.K_prime)

        logger.info(
            f"Filtro: {times.size} nodos, X={X[0]:.6g}, x̂(final)={xhat[-1]:.6g}, Σ(final)={Sigma[-1]:.6g}"
        )
        return FilterRun(times=times, xhat=xhat, Sigma=Sigma, pT=pT, pU=pU,
                         true_x=float(X[0]), firm_value=V, y_prime=float(y_prime[0]))

    def terminal_ensemble(self, setup: MertonSetup, n: int, horizon: float, seed: int,
                          dt: Optional[float] = None):
        """
        Corre n escenarios en paralelo vectorial.

        Returns:
            (X, x̂ final, Σ final, Y_horizon, Y′)
        """
        dt = self.dt if dt is None else dt
        rng = derive_generator(seed, 0)
        times, X, y_prime, state, _, log_v = self._simulate(setup, n, horizon, dt, rng)
        y_end = log_v - math.log(setup.v0) + 0.5 * setup.sigma_sq * times[-1]
        return X, np.asarray(state.xhat), state.Sigma, y_end, y_prime

    def coverage(self, setup: MertonSetup, n_scenarios: int, horizon: float, seed: int,
                 level: float = 0.95, dt: Optional[float] = None) -> float:
        """Fracción de escenarios con X dentro de x̂ ± z√Σ al horizonte."""
        X, xhat, Sigma, _, _ = self.terminal_ensemble(setup, n_scenarios, horizon, seed, dt)
        z = float(norm.ppf(0.5 + level / 2.0))
        inside = np.abs(X - xhat) <= z * math.sqrt(Sigma)
        fraction = float(inside.mean())
        logger.info(f"Cobertura del intervalo {level:.0%}: {fraction:.4f} en {n_scenarios} escenarios")
        return fraction
