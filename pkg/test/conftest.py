import os

import numpy as np
import pytest

from src.application.services.affine_engine_service import AffineEngineService
from src.application.services.default_simulation_service import DefaultSimulationService
from src.application.services.merton_filter_service import MertonFilterService
from src.application.services.noarb_verifier_service import NoArbitrageVerifierService
from src.application.services.term_structure_service import TermStructureService
from src.domain.entities.affine import CIRParams
from src.domain.entities.merton import MertonSetup
from src.domain.entities.risky_schedule import RiskySchedule
from src.infrastructure.config.settings import AppConfig, reset_config


@pytest.fixture(autouse=True)
def config_aislada(monkeypatch):
    """Cada prueba parte del YAML del repositorio sin variables DTS_* heredadas."""
    for nombre in list(os.environ):
        if nombre.startswith('DTS_'):
            monkeypatch.delenv(nombre, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def app_config():
    return AppConfig()


@pytest.fixture
def term_structure():
    return TermStructureService()


@pytest.fixture
def affine_engine():
    return AffineEngineService(riccati_step=1e-3, euler_step=1e-3)


@pytest.fixture
def filter_service():
    return MertonFilterService(dt=1e-3)


@pytest.fixture
def simulation():
    return DefaultSimulationService(block_size=5_000)


@pytest.fixture
def verifier():
    return NoArbitrageVerifierService(block_size=5_000)


@pytest.fixture
def cir():
    """CIR con un tiempo riesgoso en u1 = 1 (ψ_1 = 0.5)."""
    return CIRParams(mu0=0.02, mu1=-0.3, sigma=0.2, psi1=0.5)


@pytest.fixture
def cir_schedule():
    return RiskySchedule.from_times([1.0])


@pytest.fixture
def merton_setup():
    return MertonSetup(
        v0=1.0, sigma=0.2, mu_x=0.05, var_x=0.04,
        K=0.8, K_prime=0.7, T=2.0, U=3.0, S=1.0, sigma_eta=0.1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
