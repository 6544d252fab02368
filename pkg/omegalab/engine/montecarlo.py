"""
Monte Carlo por bloques con un flujo aleatorio propio por bloque.

Cada bloque de ``settings.MC_BLOCK_SIZE`` muestras usa el generador
``rng.generator(block)``, de modo que el resultado no depende del número de
hilos. Los bloques devuelven sumas (Σ X, Σ |X|²) que se combinan en orden.
"""
import logging
from typing import Callable

import numpy as np
from joblib import Parallel, delayed

from omegalab.core.config import settings
from omegalab.schemas.matrix import RngStream

logger = logging.getLogger(__name__)

# block(generator, count) -> (Σ X, Σ |X|²) over ``count`` fresh samples
BlockFunction = Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]]


def block_counts(samples: int, block_size: int | None = None) -> list[int]:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    size = block_size or settings.MC_BLOCK_SIZE
    full, rest = divmod(samples, size)
    return [size] * full + ([rest] if rest else [])


def sample_moments(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Σ X, Σ |X|²) over the leading axis."""
    return values.sum(axis=0), (np.abs(values) ** 2).sum(axis=0)


def run_blocks(samples: int, rng: RngStream, block: BlockFunction,
               workers: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Mean and standard error of X over ``samples`` draws.

    For complex X the standard error is √((Var Re X + Var Im X)/S).
    """
    counts = block_counts(samples)
    workers = workers or settings.THREADS
    logger.debug("monte carlo: %d samples in %d blocks, %d workers", samples, len(counts), workers)
    partials = Parallel(n_jobs=workers, prefer="threads", return_as="generator")(
        delayed(block)(rng.generator(index), count) for index, count in enumerate(counts)
    )
    total, total_sq = None, None
    for part, part_sq in partials:
        total = part if total is None else total + part
        total_sq = part_sq if total_sq is None else total_sq + part_sq

    mean = total / samples
    if samples == 1:
        return mean, np.zeros_like(np.abs(mean))
    variance = np.maximum(total_sq / samples - np.abs(mean) ** 2, 0.0) * samples / (samples - 1)
    return mean, np.sqrt(variance / samples)
