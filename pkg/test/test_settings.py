import argparse

import pytest
from pydantic import ValidationError

from src.infrastructure.config.settings import AppConfig, get_config, reset_config
from src.presentation.console.console_app import UsageError, apply_overrides


def _args(**valores):
    base = {'paths': None, 'step': None, 'tol': None}
    return argparse.Namespace(**{**base, **valores})


def test_valores_del_yaml(app_config):
    assert app_config.numerics.riccati_step == 1e-3
    assert app_config.monte_carlo.z_threshold == 3.0
    assert app_config.monte_carlo.min_paths == 1000
    assert app_config.output.default_format == 'csv'


def test_variables_de_entorno_anidadas(monkeypatch):
    monkeypatch.setenv('DTS_MONTE_CARLO__N_PATHS', '5000')
    monkeypatch.setenv('DTS_FILTER__DT', '0.01')
    config = AppConfig()
    assert config.monte_carlo.n_paths == 5000
    assert config.filter.dt == 0.01


def test_archivo_alternativo(monkeypatch, tmp_path):
    ruta = tmp_path / 'otro.yaml'
    ruta.write_text("numerics:\n  riccati_step: 0.0005\noutput:\n  default_format: JSON\n", encoding='utf-8')
    monkeypatch.setenv('DTS_CONFIG_FILE', str(ruta))
    config = AppConfig()
    assert config.numerics.riccati_step == 5e-4
    assert config.output.default_format == 'json'


def test_formato_invalido(monkeypatch):
    monkeypatch.setenv('DTS_OUTPUT__DEFAULT_FORMAT', 'pdf')
    with pytest.raises(ValidationError):
        AppConfig()


def test_with_overrides_no_modifica_el_original(app_config):
    nuevo = app_config.with_overrides(numerics={'riccati_step': 1e-4}, monte_carlo={})
    assert nuevo.numerics.riccati_step == 1e-4
    assert app_config.numerics.riccati_step == 1e-3
    assert nuevo.monte_carlo == app_config.monte_carlo


def test_flags_de_la_cli(app_config):
    config = apply_overrides(app_config, _args(paths=500, step=0.01, tol=1e-6))
    assert config.monte_carlo.n_paths == 500
    assert config.numerics.riccati_step == 0.01
    assert config.monte_carlo.euler_step == 0.01
    assert config.filter.dt == 0.01
    assert config.numerics.closed_form_tol == 1e-6


def test_flag_negativo(app_config):
    with pytest.raises(UsageError):
        apply_overrides(app_config, _args(step=-0.1))


def test_singleton():
    a = get_config()
    assert get_config() is a
    reset_config()
    assert get_config() is not a
