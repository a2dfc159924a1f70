import json
import math
from pathlib import Path

import numpy as np
import pytest

from src.application.processors.scenario.scenario_file_reader import ScenarioFileReader
from src.application.processors.scenario.scenario_mapper_factory import ScenarioMapperFactory
from src.domain.exceptions.validation_exception import ScenarioValidationException

SCENARIOS = Path(__file__).resolve().parents[1] / 'scenarios'


def _cargar(nombre):
    return json.loads((SCENARIOS / nombre).read_text(encoding='utf-8'))


# --- Fábrica ---
def test_factory_entrega_un_mapper_por_comando():
    assert ScenarioMapperFactory.commands() == ['curve', 'affine', 'filter', 'simulate', 'verify']
    for comando in ScenarioMapperFactory.commands():
        mapper = ScenarioMapperFactory.get_mapper(comando)
        assert hasattr(mapper, 'mapear')


def test_factory_comando_desconocido():
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('price')


# --- Lector ---
def test_reader_json_y_yaml(tmp_path):
    reader = ScenarioFileReader()
    ruta_json = tmp_path / 'escenario.json'
    ruta_json.write_text('{"lambda": 0.1, "horizon": 2.0}', encoding='utf-8')
    ruta_yaml = tmp_path / 'escenario.yaml'
    ruta_yaml.write_text('lambda: 0.1\nhorizon: 2.0\n', encoding='utf-8')
    assert reader.read(ruta_json) == reader.read(ruta_yaml) == {'lambda': 0.1, 'horizon': 2.0}


@pytest.mark.parametrize("texto", ["", "   ", "{no es json", "[1, 2, 3]"])
def test_reader_documentos_invalidos(texto):
    with pytest.raises(ScenarioValidationException):
        ScenarioFileReader().parse(texto, 'prueba.json')


def test_reader_archivo_inexistente(tmp_path):
    with pytest.raises(ScenarioValidationException) as exc:
        ScenarioFileReader().read(tmp_path / 'no_existe.json')
    assert 'no_existe.json' in str(exc.value)


# --- Mappers ---
def test_curve_mapper_con_atomo():
    req = ScenarioMapperFactory.get_mapper('curve').mapear(_cargar('curve_one_atom.json'), 'curve_one_atom.json')
    surface = req.surface
    assert surface.f_values.shape == (3, 2)
    assert surface.g_value(0.5, 1.0) == pytest.approx(0.05)
    assert surface.schedule[0].gamma == pytest.approx(1.0 - math.exp(-0.05))
    assert req.maturities == [0.5, 1.0, 1.5, 2.0]


def test_curve_mapper_columna_g_de_longitud_incorrecta():
    data = _cargar('curve_one_atom.json')
    data['risky_times'][0]['g'] = [0.05, 0.05]
    with pytest.raises(ScenarioValidationException) as exc:
        ScenarioMapperFactory.get_mapper('curve').mapear(data, 'malo.json')
    assert exc.value.source == 'malo.json'


def test_curve_mapper_campo_desconocido():
    data = _cargar('curve_flat.json')
    data['extra'] = 1
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('curve').mapear(data, 'extra.json')


def test_affine_mapper_cir():
    req = ScenarioMapperFactory.get_mapper('affine').mapear(_cargar('affine_cir.json'), 'affine_cir.json')
    assert req.model.cir is not None
    assert req.model.cir.psi0 == 1.0
    assert req.model.params.dim == 1
    assert len(req.model.loadings.jumps) == len(req.model.schedule) == 1
    np.testing.assert_array_equal(req.x0, [0.04])
    assert req.step == 1e-4


def test_affine_mapper_general():
    req = ScenarioMapperFactory.get_mapper('affine').mapear(_cargar('affine_zero.json'), 'affine_zero.json')
    assert req.model.cir is None
    assert req.model.params.dim == 2
    assert req.model.params.cone_dim == 1


def test_affine_mapper_requiere_un_solo_modelo():
    data = _cargar('affine_cir.json')
    data['params'] = _cargar('affine_zero.json')['params']
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('affine').mapear(data, 'doble.json')


def test_affine_mapper_parametros_no_admisibles():
    """
    Un error del dominio se reporta como error de escenario.
    """
    data = _cargar('affine_zero.json')
    data['params']['sigma0'] = [[0.1, 0.0], [0.0, 0.1]]
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('affine').mapear(data, 'no_admisible.json')


def test_filter_mapper():
    req = ScenarioMapperFactory.get_mapper('filter').mapear(_cargar('filter_news.json'), 'filter_news.json')
    assert req.setup.S == 1.0 and req.setup.T == 2.0 and req.setup.U == 3.0
    assert req.coverage_runs == 1000


def test_filter_mapper_fechas_inconsistentes():
    data = _cargar('filter_news.json')
    data['setup']['S'] = 2.5
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('filter').mapear(data, 'fechas.json')


def test_simulate_mapper_tres_modelos():
    mapper = ScenarioMapperFactory.get_mapper('simulate')
    hazard = mapper.mapear(_cargar('simulate_hazard.json'), 'h')
    assert hazard.hazard_path is not None
    np.testing.assert_allclose(hazard.hazard_path.atom_times, [1.0, 1.5])
    assert hazard.n_paths == 100_000

    anunciado = mapper.mapear(_cargar('simulate_announced.json'), 'a')
    assert anunciado.announced == (1.0, 1.0, 5.0)

    azema = mapper.mapear(_cargar('simulate_azema.json'), 'z')
    assert azema.azema.prior.points == (1.0, 2.0)
    assert azema.azema.obs_times == [0.5, 1.0, 1.5]


def test_simulate_mapper_sin_modelo():
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('simulate').mapear({'n_paths': 10}, 'vacio.json')


def test_verify_mapper_general():
    req = ScenarioMapperFactory.get_mapper('verify').mapear(_cargar('verify_general_fixed.json'), 'v')
    assert req.kind == 'general'
    assert req.martingale is not None and req.martingale.n_paths == 20_000
    assert all(T >= t for t, T in req.grid)
    g = req.coefficients.g(np.asarray(1.0), np.asarray(1.0))
    assert float(g) == pytest.approx(-math.log(0.7))
    assert float(req.coefficients.g(np.asarray(0.5), np.asarray(1.5))) == 0.0


def test_verify_mapper_merton_y_afin():
    mapper = ScenarioMapperFactory.get_mapper('verify')
    merton = mapper.mapear(_cargar('verify_merton.json'), 'm')
    assert merton.kind == 'merton' and merton.merton_states == [-1.0, 0.0, 0.5, 2.0]

    afin = mapper.mapear(_cargar('verify_cir.json'), 'c')
    assert afin.kind == 'affine'
    assert len(afin.affine_states) == 3
    assert afin.step == 1e-3


def test_verify_mapper_merton_t_posterior_a_u():
    data = _cargar('verify_merton.json')
    data['t_grid'] = [0.0, 2.5]
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('verify').mapear(data, 'm')


def test_verify_mapper_kind_desconocido():
    with pytest.raises(ScenarioValidationException):
        ScenarioMapperFactory.get_mapper('verify').mapear({'kind': 'otro'}, 'k')
