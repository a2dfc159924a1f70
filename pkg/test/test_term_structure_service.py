import math

import numpy as np
import pytest

from src.domain.entities.compensator import CompensatorSpec
from src.domain.entities.forward_surface import ForwardSurface
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.exceptions.domain_exception import (
    EntityValidationException,
    OutOfRangeException,
)
from src.domain.value_objects.piecewise_linear import PiecewiseLinear


def _superficie_plana(f=0.02, atomos=None, anuncios=None):
    atomos = atomos or {}
    schedule = RiskySchedule.from_times(
        sorted(atomos), announce_times=anuncios if anuncios is not None else None,
    )
    return ForwardSurface.time_homogeneous(
        time_grid=[0.0, 1.0, 2.0],
        maturity_grid=[0.0, 3.0],
        curve=PiecewiseLinear.constant(f, 0.0, 3.0),
        atom_premiums=atomos,
        schedule=schedule,
    )


# --- P(t,T) ---
def test_curva_plana_sin_atomos(term_structure):
    """
    Con f constante el precio es exp(−f (T−t)).
    """
    surface = _superficie_plana()
    for T in (0.5, 1.0, 2.5):
        assert term_structure.bond_price(surface, 0.0, T) == pytest.approx(math.exp(-0.02 * T), rel=1e-14)


def test_atomo_descuenta_g_a_partir_de_u(term_structure):
    """
    El átomo en u=1 con g=0.05 descuenta solo para T ≥ u: P(0,1) = e^{−0.07}.
    """
    surface = _superficie_plana(atomos={1.0: 0.05})
    assert term_structure.bond_price(surface, 0.0, 1.0) == pytest.approx(0.932394, abs=1e-6)
    assert term_structure.bond_price(surface, 0.0, 0.999) == pytest.approx(math.exp(-0.02 * 0.999), rel=1e-12)
    assert term_structure.bond_price(surface, 0.0, 2.0) == pytest.approx(math.exp(-0.04 - 0.05), rel=1e-12)


def test_atomo_en_t_no_cuenta(term_structure):
    """
    Convención (t,T]: el átomo en u = t ya no forma parte del descuento.
    """
    surface = _superficie_plana(atomos={1.0: 0.05})
    assert term_structure.bond_price(surface, 1.0, 2.0) == pytest.approx(math.exp(-0.02), rel=1e-12)


def test_atomo_anunciado_solo_cuenta_despues_del_anuncio(term_structure):
    """
    Un átomo con S = 0.5 no se descuenta en t = 0.25 pero sí en t = 0.75.
    """
    surface = _superficie_plana(atomos={1.0: 0.05}, anuncios=[0.5])
    antes = term_structure.bond_price(surface, 0.25, 2.0)
    despues = term_structure.bond_price(surface, 0.75, 2.0)
    assert antes == pytest.approx(math.exp(-0.02 * 1.75), rel=1e-12)
    assert despues == pytest.approx(math.exp(-0.02 * 1.25 - 0.05), rel=1e-12)


def test_precio_en_vencimiento_y_default(term_structure):
    surface = _superficie_plana(atomos={1.0: 0.05})
    assert term_structure.bond_price(surface, 1.0, 1.0) == 1.0
    assert term_structure.bond_price(surface, 0.0, 2.0, defaulted=True) == 0.0


def test_curve_coincide_con_bond_price(term_structure):
    """
    curve() evalúa varios vencimientos con el mismo resultado que bond_price().
    """
    surface = _superficie_plana(atomos={1.0: 0.05})
    maturities = [0.5, 1.0, 1.5, 2.0]
    precios = term_structure.curve(surface, 0.0, maturities)
    esperado = [term_structure.bond_price(surface, 0.0, T) for T in maturities]
    np.testing.assert_allclose(precios, esperado, rtol=1e-13)


def test_vencimiento_anterior_a_t_falla(term_structure):
    surface = _superficie_plana()
    with pytest.raises(OutOfRangeException):
        term_structure.bond_price(surface, 1.0, 0.5)
    with pytest.raises(OutOfRangeException):
        term_structure.bond_price(surface, 0.0, 4.0)


def test_superficie_sin_columna_g_para_un_atomo():
    """
    Cada tiempo riesgoso del calendario requiere su columna g.
    """
    with pytest.raises(EntityValidationException):
        ForwardSurface(
            time_grid=np.array([0.0, 1.0]),
            maturity_grid=np.array([0.0, 2.0]),
            f_values=np.zeros((2, 2)),
            g_atoms={},
            schedule=RiskySchedule.from_times([1.0]),
        )


# --- Compensador ---
@pytest.fixture
def spec():
    """h = 0.1 y un átomo en u = 1 con Γ = 0.3."""
    return CompensatorSpec.constant(0.1, RiskySchedule.from_times([1.0], [0.3]), horizon=2.0)


def test_compensator_path(term_structure, spec):
    assert term_structure.compensator_path(spec, 0.5) == pytest.approx(0.05, abs=1e-14)
    assert term_structure.compensator_path(spec, 1.0) == pytest.approx(0.4, abs=1e-14)
    np.testing.assert_allclose(
        term_structure.compensator_path(spec, np.array([0.999, 1.5])), [0.0999, 0.45], atol=1e-14,
    )


def test_h_prime_usa_logaritmo(term_structure, spec):
    """
    H′(1.5) = 0.15 − log(0.7).
    """
    assert term_structure.h_prime(spec, 1.5) == pytest.approx(0.15 + 0.356675, abs=1e-6)
    assert term_structure.h_prime(spec, 0.5) == pytest.approx(0.05, abs=1e-14)


def test_compensador_fuera_del_horizonte(term_structure, spec):
    with pytest.raises(OutOfRangeException):
        term_structure.compensator_path(spec, 2.5)
