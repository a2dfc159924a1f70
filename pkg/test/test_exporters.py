import json
import math

import pandas as pd
import pytest
from openpyxl import load_workbook

from src.domain.exceptions.validation_exception import ScenarioValidationException
from src.infrastructure.excel.excel_exporter import XlsxResultExporter
from src.infrastructure.export.csv_exporter import CsvResultExporter
from src.infrastructure.export.json_exporter import JsonResultExporter


@pytest.fixture
def tabla():
    return pd.DataFrame({'t': [0.0, 0.1, 1.0], 'tau': [0.5, math.inf, math.nan]})


@pytest.fixture
def reporte():
    return {
        'label': 'general',
        'pass': False,
        'conditions': [
            {'condition': 'dc1', 'max_residual': 0.356675, 'argmax': {'t': 1.0, 'T': 1.0},
             'tolerance': 1e-8, 'tolerance_kind': 'closed_form', 'pass': False},
        ],
        'rows': [
            {'condition': 'dc1', 'max_residual': 0.356675, 't': 1.0, 'T': 1.0,
             'tolerance': 1e-8, 'tolerance_kind': 'closed_form', 'pass': False},
        ],
    }


def test_csv_precision_completa(tabla):
    texto = CsvResultExporter(float_digits=17).exportar_tabla(tabla, None)
    lineas = texto.splitlines()
    assert lineas[0] == 't,tau'
    assert lineas[2] == '0.10000000000000001,inf'
    # NaN se escribe vacío
    assert lineas[3] == '1,'


def test_csv_a_archivo(tabla, tmp_path):
    destino = tmp_path / 'sub' / 'tabla.csv'
    assert CsvResultExporter().exportar_tabla(tabla, destino) is None
    assert pd.read_csv(destino)['t'].tolist() == [0.0, 0.1, 1.0]


def test_csv_reporte_usa_filas(reporte):
    texto = CsvResultExporter().exportar_reporte(reporte, None)
    assert texto.splitlines()[0] == 'condition,max_residual,t,T,tolerance,tolerance_kind,pass'


def test_json_estricto(tabla):
    filas = json.loads(JsonResultExporter().exportar_tabla(tabla, None))
    assert filas[1] == {'t': 0.1, 'tau': 'inf'}
    assert filas[2] == {'t': 1.0, 'tau': None}


def test_json_reporte_sin_filas(reporte):
    documento = json.loads(JsonResultExporter().exportar_reporte(reporte, None))
    assert 'rows' not in documento
    assert documento['conditions'][0]['argmax'] == {'t': 1.0, 'T': 1.0}


def test_xlsx_requiere_destino(tabla):
    with pytest.raises(ScenarioValidationException):
        XlsxResultExporter().exportar_tabla(tabla, None)


def test_xlsx_reporte_con_martingala(reporte, tmp_path):
    reporte['martingale'] = {'t': [0.25, 0.75], 'mean': [0.9, 0.8], 'std_error': [0.01, 0.01], 'z': [0.5, -1.2]}
    destino = tmp_path / 'reporte.xlsx'
    XlsxResultExporter().exportar_reporte(reporte, destino)
    libro = load_workbook(destino)
    assert libro.sheetnames == ['condiciones', 'martingala']
    hoja = libro['condiciones']
    assert hoja.freeze_panes == 'A2'
    assert [c.value for c in hoja[1]][:2] == ['condition', 'max_residual']


def test_xlsx_infinitos_como_texto(tabla, tmp_path):
    destino = tmp_path / 'tabla.xlsx'
    XlsxResultExporter().exportar_tabla(tabla, destino)
    hoja = load_workbook(destino)['resultado']
    assert hoja['B3'].value == 'inf'
