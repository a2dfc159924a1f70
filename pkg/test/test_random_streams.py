import numpy as np
import pytest

from src.shared.constants import PATHS_PER_STREAM
from src.shared.random_streams import (
    PathStreams,
    aligned_block_size,
    block_ranges,
    derive_generator,
    path_generator,
    run_blocks,
)


def test_bloques_alineados_a_los_tramos():
    assert aligned_block_size(1) == PATHS_PER_STREAM
    assert aligned_block_size(PATHS_PER_STREAM) == PATHS_PER_STREAM
    assert aligned_block_size(PATHS_PER_STREAM + 1) == 2 * PATHS_PER_STREAM
    assert block_ranges(2_500, 777) == [(0, 0, 1_000), (1, 1_000, 2_000), (2, 2_000, 2_500)]
    assert block_ranges(0, 10) == []


def test_sorteo_repartido_por_tramo():
    """
    Un bloque de dos tramos y medio usa el flujo de cada tramo en orden.
    """
    streams = PathStreams(seed=3, start=1_000, end=3_500)
    normales = streams.standard_normal((2_500, 2))
    esperado = np.concatenate([
        derive_generator(3, 1).standard_normal((1_000, 2)),
        derive_generator(3, 2).standard_normal((1_000, 2)),
        derive_generator(3, 3).standard_normal((500, 2)),
    ])
    np.testing.assert_array_equal(normales, esperado)


def test_primer_eje_debe_ser_el_bloque():
    streams = PathStreams(seed=3, start=0, end=10)
    with pytest.raises(ValueError):
        streams.random(11)
    with pytest.raises(ValueError):
        PathStreams(seed=3, start=5, end=10)


def test_flujo_por_trayectoria():
    streams = PathStreams(seed=8, start=2_000, end=3_000)
    a = streams.for_path(2_500, 1).random(3)
    np.testing.assert_array_equal(a, path_generator(8, 2_500, 1).random(3))
    assert not np.array_equal(a, path_generator(8, 2_500, 0).random(3))
    with pytest.raises(ValueError):
        streams.for_path(3_000)


@pytest.mark.parametrize("workers", [1, 4])
def test_run_blocks_mantiene_el_orden(workers):
    partes = run_blocks(lambda k, n, s: (k, s.start, s.random(n)), 4_200, seed=1, block_size=1_000, workers=workers)
    assert [p[:2] for p in partes] == [(0, 0), (1, 1_000), (2, 2_000), (3, 3_000), (4, 4_000)]
    unidos = np.concatenate([p[2] for p in partes])
    otro = np.concatenate([p[2] for p in run_blocks(lambda k, n, s: (k, s.start, s.random(n)), 4_200, 1, 3_000)])
    np.testing.assert_array_equal(unidos, otro)


def test_semilla_negativa():
    with pytest.raises(ValueError):
        derive_generator(-1)
