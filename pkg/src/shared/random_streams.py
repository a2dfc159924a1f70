"""
Derivación reproducible de generadores aleatorios.

Las trayectorias se agrupan en tramos fijos de PATHS_PER_STREAM índices y cada
tramo tiene su propio flujo derivado de (semilla, índice de tramo). Los bloques
de trabajo se alinean a esos tramos, así que la trayectoria `path_id` recibe los
mismos números sin importar block_size, el número de workers o el orden de
ejecución.
"""
from __future__ import annotations
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar, Union

import numpy as np

from src.shared.constants import PATHS_PER_STREAM

T = TypeVar('T')


def derive_generator(seed: int, *key: int) -> np.random.Generator:
    """Generador PCG64 para el flujo `key` de la semilla `seed` (por defecto el flujo 0)."""
    if seed < 0:
        raise ValueError(f"La semilla debe ser no negativa: {seed}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key) or (0,))
    return np.random.Generator(np.random.PCG64(sequence))


def path_generator(seed: int, path_id: int, purpose: int = 0) -> np.random.Generator:
    """
    Flujo propio de una sola trayectoria.

    `purpose` separa sorteos independientes de la misma trayectoria (escenario, ζ, ...).
    """
    return derive_generator(seed, path_id, purpose)


class PathStreams:
    """
    Fuente aleatoria de un bloque [start, end) de trayectorias.

    Expone el subconjunto de métodos de np.random.Generator que usan los muestreadores.
    El primer eje de `size` debe ser el número de trayectorias del bloque: cada sorteo se
    reparte entre los flujos de los tramos que cubre el bloque.
    """

    def __init__(self, seed: int, start: int, end: int, width: int = PATHS_PER_STREAM):
        if start % width:
            raise ValueError(f"El bloque debe empezar en un múltiplo de {width}: {start}")
        self.seed = seed
        self.start = start
        self.end = end
        self._parts = [
            (derive_generator(seed, c), min((c + 1) * width, end) - c * width)
            for c in range(start // width, math.ceil(end / width))
        ]

    @property
    def n_paths(self) -> int:
        return self.end - self.start

    @property
    def path_ids(self) -> range:
        return range(self.start, self.end)

    def for_path(self, path_id: int, purpose: int = 0) -> np.random.Generator:
        if not self.start <= path_id < self.end:
            raise ValueError(f"La trayectoria {path_id} no pertenece al bloque [{self.start}, {self.end})")
        return path_generator(self.seed, path_id, purpose)

    def _draw(self, method: str, size, **kwargs) -> np.ndarray:
        shape = (int(size),) if np.ndim(size) == 0 else tuple(int(s) for s in size)
        if not shape or shape[0] != self.n_paths:
            raise ValueError(f"El primer eje de size debe ser {self.n_paths}, se recibió {shape}")
        return np.concatenate(
            [getattr(rng, method)(size=(n,) + shape[1:], **kwargs) for rng, n in self._parts], axis=0,
        )

    def random(self, size) -> np.ndarray:
        return self._draw('random', size)

    def standard_normal(self, size) -> np.ndarray:
        return self._draw('standard_normal', size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size=None) -> np.ndarray:
        return self._draw('normal', size, loc=loc, scale=scale)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray:
        return self._draw('uniform', size, low=low, high=high)

    def standard_exponential(self, size) -> np.ndarray:
        return self._draw('standard_exponential', size)

    def exponential(self, scale: float = 1.0, size=None) -> np.ndarray:
        return self._draw('exponential', size, scale=scale)

    def gamma(self, shape: float, scale: float = 1.0, size=None) -> np.ndarray:
        return self._draw('gamma', size, shape=shape, scale=scale)


RandomSource = Union[np.random.Generator, PathStreams]


def aligned_block_size(block_size: int, width: int = PATHS_PER_STREAM) -> int:
    """block_size redondeado hacia arriba al múltiplo de `width` más cercano."""
    return width * max(1, math.ceil(block_size / width))


def block_ranges(n_paths: int, block_size: int) -> List[Tuple[int, int, int]]:
    """
    Divide n_paths en bloques contiguos alineados a los tramos de flujo.

    Returns:
        Lista de (indice_bloque, inicio, fin)
    """
    if n_paths <= 0:
        return []
    block_size = aligned_block_size(block_size)
    return [
        (k, start, min(start + block_size, n_paths))
        for k, start in enumerate(range(0, n_paths, block_size))
    ]


def run_blocks(
    task: Callable[[int, int, PathStreams], T],
    n_paths: int,
    seed: int,
    block_size: int,
    workers: int = 1,
) -> List[T]:
    """
    Ejecuta `task(indice_bloque, n_en_bloque, streams)` por bloque.

    El orden de la lista devuelta es siempre el de los bloques.
    """
    blocks = block_ranges(n_paths, block_size)

    def _run(block: Tuple[int, int, int]) -> T:
        k, start, end = block
        return task(k, end - start, PathStreams(seed, start, end))

    if workers <= 1 or len(blocks) <= 1:
        return [_run(b) for b in blocks]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run, blocks))


def standard_exponentials(rng: RandomSource, size: int | Sequence[int]) -> np.ndarray:
    """ζ ~ Exp(1) por inversión de la CDF: ζ = −log(1 − U), U ~ Uniforme[0,1)."""
    return -np.log1p(-rng.random(size))
