import math

import numpy as np
import pytest

from src.application.services.noarb_verifier_service import AffinePathSampler
from src.domain.entities.affine import (
    AffineParams,
    CompensatorLoadings,
    StatePath,
)
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import (
    AdmissibilityException,
    NumericalSchemeException,
    OutOfRangeException,
)
from src.shared.random_streams import derive_generator
from src.shared.result import MonteCarloEstimate


def _parametros_nulos(d=1):
    return AffineParams(
        mu0=np.zeros(d), mu=np.zeros((d, d)), sigma0=np.zeros((d, d)),
        sigma=np.zeros((d, d, d)), cone_dim=d,
    )


# --- Riccati ---
def test_cargas_nulas_dan_precio_uno(affine_engine):
    """
    Con cargas nulas A = B = 0 en toda la grilla.
    """
    params = _parametros_nulos(2)
    schedule = RiskySchedule.from_times([1.0])
    sol = affine_engine.riccati_solve(params, CompensatorLoadings.zero(2, 1), schedule, 2.0)
    assert np.all(sol.A == 0.0)
    assert np.all(sol.B == 0.0)
    assert affine_engine.affine_bond_price(sol, [0.3, -0.1], 0.0) == 1.0


def test_phi0_constante_integra_exacto(affine_engine):
    """
    −∂_t A = c con B ≡ 0 da A(t,T) = c (T − t).
    """
    params = _parametros_nulos()
    loadings = CompensatorLoadings.constant(0.03, [0.0])
    sol = affine_engine.riccati_solve(params, loadings, RiskySchedule.empty(), 2.0, step=0.01)
    for t in (0.0, 0.5, 1.234):
        A, B = sol.at(t)
        assert A == pytest.approx(0.03 * (2.0 - t), abs=1e-13)
        assert B[0] == 0.0


def test_salto_en_tiempo_riesgoso(affine_engine):
    """
    En u = 1 el límite por izquierda suma φ_1: A(1−,2) = A(1,2) + φ_1.
    """
    params = _parametros_nulos()
    loadings = CompensatorLoadings.constant(0.03, [0.0], jumps=[(0.2, [0.0])])
    schedule = RiskySchedule.from_times([1.0])
    sol = affine_engine.riccati_solve(params, loadings, schedule, 2.0, step=0.01)

    A_right, _ = sol.at(1.0)
    A_left, _ = sol.left_limit(1.0)
    assert A_right == pytest.approx(0.03, abs=1e-13)
    assert A_left - A_right == pytest.approx(0.2, abs=1e-13)
    assert sol.at(0.0)[0] == pytest.approx(0.06 + 0.2, abs=1e-13)


@pytest.mark.parametrize("T", [0.5, 1.5, 2.0])
def test_cir_rk4_contra_forma_cerrada(affine_engine, cir, cir_schedule, T):
    """
    RK4 con paso 1e-4 reproduce la forma cerrada CIR en todo t ∈ [0,T], antes y después de u1 = 1.
    """
    sol = affine_engine.riccati_solve(cir.to_affine(), cir.loadings(1), cir_schedule, T, step=1e-4)
    error = 0.0
    for t in np.linspace(0.0, T, 41):
        A, B = sol.at(float(t))
        A_cf, B_cf = affine_engine.cir_closed_form(cir, float(t), T, 1.0)
        error = max(error, abs(A - A_cf), abs(B[0] - B_cf))
    assert error < 1e-8

    x0 = 0.04
    A_cf, B_cf = affine_engine.cir_closed_form(cir, 0.0, T, 1.0)
    precio = affine_engine.affine_bond_price(sol, [x0], 0.0)
    assert precio == pytest.approx(math.exp(-A_cf - B_cf * x0), abs=1e-8)



def test_cir_forma_cerrada_despues_del_atomo(affine_engine, cir):
    """
    Para u1 ≤ t el átomo ya no afecta: coincide con el flujo sin salto.
    """
    con_atomo = affine_engine.cir_closed_form(cir, 1.2, 2.0, 1.0)
    sin_atomo = affine_engine.cir_closed_form(cir, 1.2, 2.0, math.inf)
    assert con_atomo == pytest.approx(sin_atomo, abs=1e-15)
    assert affine_engine.cir_closed_form(cir, 1.5, 1.5, 1.0) == (0.0, 0.0)


def test_paso_mayor_que_distancia_entre_atomos(affine_engine):
    params = _parametros_nulos()
    schedule = RiskySchedule.from_times([1.0, 1.05])
    loadings = CompensatorLoadings.zero(1, 2)
    with pytest.raises(NumericalSchemeException):
        affine_engine.riccati_solve(params, loadings, schedule, 2.0, step=0.1)


def test_parametros_no_admisibles():
    """
    σ_0 no puede tener difusión en coordenadas del cono.
    """
    with pytest.raises(AdmissibilityException):
        AffineParams(
            mu0=[0.0], mu=[[0.0]], sigma0=[[0.1]], sigma=[[[0.0]]], cone_dim=1,
        )


def test_cargas_negativas_rechazadas(affine_engine):
    params = _parametros_nulos()
    loadings = CompensatorLoadings.constant(0.0, [-0.5])
    with pytest.raises(AdmissibilityException):
        affine_engine.riccati_solve(params, loadings, RiskySchedule.empty(), 1.0)


def test_precio_con_estado_fuera_del_cono(affine_engine, cir, cir_schedule):
    sol = affine_engine.riccati_solve(cir.to_affine(), cir.loadings(1), cir_schedule, 2.0)
    with pytest.raises(OutOfRangeException):
        affine_engine.affine_bond_price(sol, [-0.01], 0.0, params=cir.to_affine())


# --- Compensador ---
def test_affine_compensator_con_atomo(affine_engine):
    """
    X ≡ 0.4, ψ_0 = 1 y ψ_1 = 0.5: H(1.5) = 0.6 + (1 − e^{−0.2}).
    """
    loadings = CompensatorLoadings.constant(0.0, [1.0], jumps=[(0.0, [0.5])])
    path = StatePath(times=np.array([0.0, 2.0]), values=np.array([[0.4], [0.4]]))
    schedule = RiskySchedule.from_times([1.0])

    assert affine_engine.affine_compensator(loadings, path, schedule, 0.5) == pytest.approx(0.2, abs=1e-14)
    assert affine_engine.affine_compensator(loadings, path, schedule, 1.5) == pytest.approx(0.6 + 0.181269, abs=1e-6)


# --- Simulación ---
def test_simulate_state_determinista(affine_engine, cir):
    params = cir.to_affine()
    a = affine_engine.simulate_state(params, [0.04], 1.0, step=0.01, seed=5)
    b = affine_engine.simulate_state(params, [0.04], 1.0, step=0.01, seed=5)
    c = affine_engine.simulate_state(params, [0.04], 1.0, step=0.01, seed=6)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert np.all(a.values >= 0.0)


def test_euler_trunca_en_el_cono(affine_engine, cir):
    x = np.array([[0.0], [0.01]])
    dW = np.array([[-10.0], [-10.0]])
    nuevo = affine_engine.euler_step(cir.to_affine(), x, 0.01, dW)
    assert np.all(nuevo >= 0.0)


@pytest.mark.slow
def test_media_cir_simulada(affine_engine, cir, cir_schedule):
    """
    La media Euler de X_1 cae a 3 errores estándar de x0 e^{μ_1} + (μ_0/μ_1)(e^{μ_1} − 1).
    """
    sampler = AffinePathSampler(affine_engine, cir.to_affine(), cir.loadings(1), cir_schedule, [0.04], 1e-3)
    paths = sampler.sample(np.array([1.0]), 100_000, derive_generator(11, 0))
    est = MonteCarloEstimate.from_samples(paths.states[:, 0, 0])
    assert est.n_samples == 100_000
    assert est.within(cir.mean(0.04, 1.0), 3.0)


def test_simulate_state_sin_difusion_es_constante(affine_engine):
    """
    σ ≡ 0 y deriva nula: la trayectoria queda en x0 en toda la grilla.
    """
    path = affine_engine.simulate_state(_parametros_nulos(2), [0.3, 0.7], 1.0, step=0.1, seed=4)
    np.testing.assert_allclose(path.times, np.linspace(0.0, 1.0, 11), atol=1e-14)
    np.testing.assert_array_equal(path.values, np.tile([0.3, 0.7], (11, 1)))


def test_simulate_state_sin_difusion_deriva_lineal(affine_engine):
    """
    σ ≡ 0, μ = 0 y μ_0 = 0.05: X_t = x0 + μ_0 t, sin importar la semilla.
    """
    params = AffineParams(mu0=[0.05], mu=[[0.0]], sigma0=[[0.0]], sigma=[[[0.0]]], cone_dim=1)
    a = affine_engine.simulate_state(params, [0.02], 2.0, step=0.01, seed=1)
    b = affine_engine.simulate_state(params, [0.02], 2.0, step=0.01, seed=99)
    np.testing.assert_allclose(a.values[:, 0], 0.02 + 0.05 * a.times, rtol=0, atol=1e-13)
    np.testing.assert_array_equal(a.values, b.values)

