import math

import numpy as np
import pytest
from scipy.special import ndtr

from src.domain.entities.merton import FilterState, MertonCurve, MertonSetup
from src.domain.exceptions.domain_exception import EntityValidationException, OutOfRangeException
from src.shared.result import MonteCarloEstimate


@pytest.fixture
def setup_unitario():
    """Σ(0) = σ = σ_η = 1 y noticia en S = 1."""
    return MertonSetup(
        v0=1.0, sigma=1.0, mu_x=0.0, var_x=1.0,
        K=0.8, K_prime=0.7, T=2.0, U=3.0, S=1.0, sigma_eta=1.0,
    )


# --- Varianza y noticia ---
def test_varianza_antes_y_despues_de_la_noticia(filter_service, setup_unitario):
    """
    Σ(S−) = 1/(1 + 1) = 0.5 y tras la noticia Σ(S) = 0.5·1/(0.5 + 1) = 1/3.
    """
    assert filter_service.variance_path(setup_unitario, 1.0 - 1e-9) == pytest.approx(0.5, abs=1e-8)
    assert filter_service.variance_path(setup_unitario, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-14)
    # Decaimiento reiniciado: Σ(2) = (1/3)/(1 + 1/3)
    assert filter_service.variance_path(setup_unitario, 2.0) == pytest.approx(0.25, abs=1e-14)


def test_news_update_bayes_exacto(filter_service, setup_unitario):
    """
    x̂ = 0.1, Σ = 0.5, Y′ = 0.4: ganancia 1/3 → x̂ = 0.2.
    """
    estado = FilterState(t=1.0, xhat=0.1, Sigma=0.5)
    nuevo = filter_service.news_update(estado, 0.4, setup_unitario)
    assert nuevo.xhat == pytest.approx(0.2, abs=1e-14)
    assert nuevo.Sigma == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_noticia_fuera_de_s(filter_service, setup_unitario):
    with pytest.raises(OutOfRangeException):
        filter_service.news_update(FilterState(t=0.5, xhat=0.0, Sigma=1.0), 0.4, setup_unitario)


def test_noticia_sin_informacion(filter_service):
    """
    σ_η = inf deja x̂ y Σ sin cambios.
    """
    setup = MertonSetup(
        v0=1.0, sigma=1.0, mu_x=0.0, var_x=1.0,
        K=0.8, K_prime=0.7, T=2.0, U=3.0, S=1.0, sigma_eta=math.inf,
    )
    estado = FilterState(t=1.0, xhat=0.1, Sigma=0.5)
    nuevo = filter_service.news_update(estado, 5.0, setup)
    assert nuevo.xhat == pytest.approx(0.1)
    assert nuevo.Sigma == pytest.approx(0.5)


def test_posterior_conjugada_coincide_con_varianza(filter_service, setup_unitario):
    """
    La precisión 1/var_x + t/σ² + 1/σ_η² reproduce Σ(t) después de la noticia.
    """
    media, varianza = filter_service.conjugate_posterior(setup_unitario, 2.0, 0.3, 0.1)
    assert varianza == pytest.approx(filter_service.variance_path(setup_unitario, 2.0), abs=1e-14)
    assert media == pytest.approx((0.3 + 0.1) * 0.25, abs=1e-14)

    media_previa, var_previa = filter_service.conjugate_posterior(setup_unitario, 0.5, 0.2)
    assert var_previa == pytest.approx(filter_service.variance_path(setup_unitario, 0.5), abs=1e-14)
    assert media_previa == pytest.approx(0.2 / 1.5, abs=1e-14)


def test_filter_step_con_sigma_cero(filter_service, setup_unitario):
    """
    Con Σ = 0 el filtro ya no aprende: x̂ queda fijo.
    """
    estado = FilterState(t=0.0, xhat=0.3, Sigma=0.0)
    nuevo = filter_service.filter_step(estado, 1.0, 0.01, setup_unitario)
    assert nuevo.xhat == 0.3
    assert nuevo.Sigma == 0.0


def test_setup_requiere_orden_de_fechas():
    with pytest.raises(EntityValidationException):
        MertonSetup(
            v0=1.0, sigma=0.2, mu_x=0.0, var_x=0.04,
            K=0.8, K_prime=0.7, T=2.0, U=3.0, S=2.5, sigma_eta=0.1,
        )


# --- Probabilidades de default ---
def test_default_prob_t_en_la_mediana(filter_service, merton_setup):
    """
    Con x̂ = 0 y log(K/V) = −½σ²(T−t) el argumento de Φ es 0.
    """
    V = merton_setup.K * math.exp(0.5 * merton_setup.sigma_sq * merton_setup.T)
    estado = FilterState(t=0.0, xhat=0.0, Sigma=merton_setup.var_x)
    assert filter_service.default_prob_T(estado, V, merton_setup) == pytest.approx(0.5, abs=1e-14)


def test_default_prob_t_vectorizado(filter_service, merton_setup):
    estado = FilterState(t=0.5, xhat=np.array([0.0, 0.1, -0.1]), Sigma=0.02)
    p = filter_service.default_prob_T(estado, 1.0, merton_setup)
    assert p.shape == (3,)
    assert p[1] < p[0] < p[2]


def test_default_prob_u_antes_de_la_noticia(filter_service, merton_setup):
    estado = FilterState(t=0.5, xhat=0.05, Sigma=0.03)
    with pytest.raises(OutOfRangeException):
        filter_service.default_prob_U(estado, 1.0, True, merton_setup)


def test_default_prob_u_despues_de_t(filter_service, merton_setup):
    """
    En [T,U) la probabilidad es Φ(a/√var) si sobrevivió a T y 0 en otro caso.
    """
    estado = FilterState(t=2.5, xhat=0.05, Sigma=0.01)
    vivo = filter_service.default_prob_U(estado, 0.9, True, merton_setup)
    tau = 0.5
    a = math.log(0.7 / 0.9) + 0.5 * 0.04 * tau - 0.05 * tau
    esperado = float(ndtr(a / math.sqrt(0.01 * tau ** 2 + 0.04 * tau)))
    assert vivo == pytest.approx(esperado, abs=1e-14)
    assert filter_service.default_prob_U(estado, 0.9, False, merton_setup) == 0.0


def test_default_prob_u_conjunta_acotada(filter_service, merton_setup):
    """
    En [S,T) P(τ = U) ≤ P(V_U < K′) sin condicionar a T.
    """
    estado = FilterState(t=1.5, xhat=0.05, Sigma=0.01)
    p = filter_service.default_prob_U(estado, 0.9, True, merton_setup)
    tau = 1.5
    a = math.log(0.7 / 0.9) + 0.5 * 0.04 * tau - 0.05 * tau
    marginal = float(ndtr(a / math.sqrt(0.01 * tau ** 2 + 0.04 * tau)))
    assert 0.0 <= p <= marginal


def test_gaussian_phi_expectation_valor_conocido(filter_service):
    """
    E[Φ(ξ)] con ξ ~ N(1, 1) = Φ(1/√2).
    """
    assert filter_service.gaussian_phi_expectation(1.0, 1.0) == pytest.approx(0.760250, abs=1e-6)


def test_gaussian_phi_expectation_contra_hermite(filter_service):
    """
    Cuadratura de Gauss-Hermite con 64 nodos sobre una grilla 20×20 de (a, b).
    """
    x, w = np.polynomial.hermite.hermgauss(64)
    for a in np.linspace(-3.0, 3.0, 20):
        for b in np.linspace(0.0, 2.0, 20):
            cuadratura = float(np.sum(w * ndtr(a + b * math.sqrt(2.0) * x)) / math.sqrt(math.pi))
            assert filter_service.gaussian_phi_expectation(a, b) == pytest.approx(cuadratura, abs=1e-9)


def test_gaussian_phi_expectation_b_negativo(filter_service):
    with pytest.raises(OutOfRangeException):
        filter_service.gaussian_phi_expectation(0.0, -1.0)


# --- Merton con deriva conocida ---
def test_merton_bond_price(filter_service):
    curve = MertonCurve(K=0.0, U=1.0)
    assert filter_service.merton_bond_price(1.0, 0.0, 1.0, curve) == pytest.approx(0.841345, abs=1e-6)
    assert filter_service.merton_bond_price(1.0, 0.0, 0.5, curve) == 1.0
    with pytest.raises(OutOfRangeException):
        filter_service.merton_bond_price(1.0, 1.0, 2.0, curve)


def test_merton_forward_coeffs_cumplen_deriva(filter_service):
    """
    a(t,U) = ½ b(t,U)² a menos de 1e-12 en 10³ puntos (W_t, t) aleatorios.
    """
    rng = np.random.default_rng(77)
    W = rng.uniform(-2.0, 2.0, 1_000)
    t = rng.uniform(0.0, 1.5, 1_000)
    a = np.empty_like(W)
    b = np.empty_like(W)
    for k in range(W.size):
        coeffs = filter_service.merton_forward_coeffs(W[k], float(t[k]), 2.0, 0.0)
        a[k], b[k] = coeffs.a, coeffs.b
        assert coeffs.f == pytest.approx(-math.log(ndtr(W[k] / math.sqrt(2.0 - t[k]))), rel=1e-10)
    np.testing.assert_allclose(a, 0.5 * b ** 2, rtol=0, atol=1e-12)


# --- Oráculos Monte Carlo ---
def _log_valor(rng, V_t, X, setup, desde, hasta):
    """log V en `hasta` dado V en `desde` y la deriva X."""
    dt = hasta - desde
    return np.log(V_t) + (X - 0.5 * setup.sigma_sq) * dt + setup.sigma * math.sqrt(dt) * rng.standard_normal(X.size)


@pytest.mark.slow
def test_default_prob_t_contra_monte_carlo(filter_service, merton_setup):
    estado = FilterState(t=0.5, xhat=0.03, Sigma=0.02)
    rng = np.random.default_rng(5)
    X = rng.normal(estado.xhat, math.sqrt(estado.Sigma), 1_000_000)
    en_default = (_log_valor(rng, 0.9, X, merton_setup, 0.5, merton_setup.T) < math.log(merton_setup.K))
    est = MonteCarloEstimate.from_samples(en_default)
    assert est.within(filter_service.default_prob_T(estado, 0.9, merton_setup), 3.0)


@pytest.mark.slow
def test_default_prob_u_conjunta_contra_monte_carlo(filter_service, merton_setup):
    """
    En [S,T): P(V_T ≥ K, V_U < K′) con X ~ N(x̂, Σ).
    """
    estado = FilterState(t=1.5, xhat=0.05, Sigma=0.01)
    rng = np.random.default_rng(6)
    X = rng.normal(estado.xhat, math.sqrt(estado.Sigma), 1_000_000)
    log_vT = _log_valor(rng, 0.9, X, merton_setup, 1.5, merton_setup.T)
    log_vU = _log_valor(rng, np.exp(log_vT), X, merton_setup, merton_setup.T, merton_setup.U)
    evento = (log_vT >= math.log(merton_setup.K)) & (log_vU < math.log(merton_setup.K_prime))
    est = MonteCarloEstimate.from_samples(evento)
    assert est.within(filter_service.default_prob_U(estado, 0.9, True, merton_setup), 3.0)


@pytest.mark.slow
def test_default_prob_u_despues_de_t_contra_monte_carlo(filter_service, merton_setup):
    estado = FilterState(t=2.5, xhat=0.05, Sigma=0.01)
    rng = np.random.default_rng(7)
    X = rng.normal(estado.xhat, math.sqrt(estado.Sigma), 1_000_000)
    evento = _log_valor(rng, 0.9, X, merton_setup, 2.5, merton_setup.U) < math.log(merton_setup.K_prime)
    est = MonteCarloEstimate.from_samples(evento)
    assert est.within(filter_service.default_prob_U(estado, 0.9, True, merton_setup), 3.0)


@pytest.mark.slow
def test_default_prob_t_es_martingala(filter_service, merton_setup):
    """
    E[p_T(0.5) | F_0] = p_T(0): se simulan X, Y_{0.5} y V_{0.5} desde la prior y se
    actualiza el filtro con la posterior conjugada.
    """
    inicial = FilterState.prior(merton_setup)
    p0 = filter_service.default_prob_T(inicial, merton_setup.v0, merton_setup)

    rng = np.random.default_rng(8)
    n, t = 200_000, 0.5
    X = rng.normal(merton_setup.mu_x, math.sqrt(merton_setup.var_x), n)
    Y = X * t + merton_setup.sigma * math.sqrt(t) * rng.standard_normal(n)
    V = merton_setup.v0 * np.exp(Y - 0.5 * merton_setup.sigma_sq * t)
    media, varianza = filter_service.conjugate_posterior(merton_setup, t, Y)
    p_t = filter_service.default_prob_T(FilterState(t=t, xhat=media, Sigma=varianza), V, merton_setup)
    assert MonteCarloEstimate.from_samples(p_t).within(p0, 3.0)


@pytest.mark.parametrize("V, indicador", [(0.79, 1.0), (0.81, 0.0)])
def test_default_prob_t_converge_al_indicador(filter_service, merton_setup, V, indicador):
    """
    Cuando t → T la probabilidad tiende a 1{V_t < K}.
    """
    distancias = []
    for t in (1.5, 1.9, 1.99, merton_setup.T - 1e-4):
        p = filter_service.default_prob_T(FilterState(t=t, xhat=0.05, Sigma=0.01), V, merton_setup)
        distancias.append(abs(p - indicador))
    assert distancias == sorted(distancias, reverse=True)
    assert distancias[-1] < 1e-6


# --- Corridas ---
def test_run_filter_determinista(filter_service, merton_setup):
    a = filter_service.run_filter(merton_setup, seed=3, dt=0.01)
    b = filter_service.run_filter(merton_setup, seed=3, dt=0.01)
    np.testing.assert_array_equal(a.xhat, b.xhat)
    assert a.times[-1] == pytest.approx(merton_setup.U)
    assert np.any(np.isclose(a.times, merton_setup.S))
    # p_U no está definida antes de la noticia
    assert np.all(np.isnan(a.pU[a.times < merton_setup.S - 1e-9]))
    assert a.pT[-1] in (0.0, 1.0)


def test_run_filter_con_x_fija(filter_service, merton_setup):
    run = filter_service.run_filter(merton_setup, seed=4, dt=0.01, true_x=0.07)
    assert run.true_x == 0.07
    np.testing.assert_allclose(run.Sigma, filter_service.variance_path(merton_setup, run.times), rtol=1e-10)


def test_filtro_converge_a_la_posterior_conjugada(filter_service, merton_setup):
    """
    El x̂ terminal (pasos + noticia) tiende a la posterior exacta dado (Y_U, Y′) con orden uno en dt.
    """
    errores = []
    for dt in (1e-2, 1e-3):
        _, xhat, Sigma, y_end, y_prime = filter_service.terminal_ensemble(
            merton_setup, 500, merton_setup.U, seed=13, dt=dt,
        )
        media, varianza = filter_service.conjugate_posterior(merton_setup, merton_setup.U, y_end, y_prime)
        assert Sigma == pytest.approx(varianza, rel=1e-10)
        errores.append(float(np.mean(np.abs(xhat - media))))
    assert errores[1] < errores[0] / 4.0
    assert errores[0] < 0.05


@pytest.mark.slow
def test_cobertura_del_intervalo(filter_service, merton_setup):
    """
    El intervalo x̂ ± 1.96√Σ cubre X en aproximadamente 95% de los escenarios.
    """
    fraccion = filter_service.coverage(merton_setup, 4000, merton_setup.U, seed=21, level=0.95, dt=0.01)
    assert 0.93 <= fraccion <= 0.97
