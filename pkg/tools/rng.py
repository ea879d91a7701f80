"""
Random streams and replicate-parallel Monte Carlo.

Every Monte Carlo quantity is computed in fixed-size chunks of replicates.
Each chunk gets its own child stream spawned from the caller's generator, so
the result depends only on the generator state and the chunk size, never on
how many worker threads run the chunks.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from ..config import settings

T = TypeVar("T")


def make_stream(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by ``key`` under ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


def chunk_sizes(reps: int, chunk_size: int | None = None) -> list[int]:
    """Split ``reps`` replicates into chunks of ``chunk_size`` (last chunk may be short)."""
    size = chunk_size or settings.chunk_size
    if reps < 1:
        raise ValueError("reps must be at least 1")
    full, rest = divmod(reps, size)
    return [size] * full + ([rest] if rest else [])


def run_chunks(
    fn: Callable[[int, np.random.Generator], T],
    reps: int,
    stream: np.random.Generator,
    workers: int | None = None,
    chunk_size: int | None = None,
) -> list[T]:
    """
    Run ``fn(count, chunk_stream)`` over all chunks and return results in chunk order.

    Args:
        fn: Computes one chunk of ``count`` replicates from its own stream
        reps: Total number of replicates
        stream: Parent generator; one child is spawned per chunk
        workers: Worker threads (defaults to settings.workers)
        chunk_size: Replicates per chunk (defaults to settings.chunk_size)
    """
    sizes = chunk_sizes(reps, chunk_size)
    streams = stream.spawn(len(sizes))
    n_workers = workers or settings.workers

    if n_workers <= 1 or len(sizes) == 1:
        return [fn(count, child) for count, child in zip(sizes, streams)]

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, sizes, streams))


def replicate(
    fn: Callable[[int, np.random.Generator], np.ndarray],
    reps: int,
    stream: np.random.Generator,
    workers: int | None = None,
    chunk_size: int | None = None,
) -> np.ndarray:
    """Like :func:`run_chunks` but concatenates array results along the first axis."""
    return np.concatenate(run_chunks(fn, reps, stream, workers, chunk_size), axis=0)


def path_chunk_size(n: int) -> int:
    """Replicates per chunk when every replicate holds a path of length ``n``."""
    return max(1, min(settings.chunk_size, settings.path_chunk_elements // max(n, 1)))


EXPERIMENT_STREAMS = {
    "simulate": 1,
    "diagnose": 2,
    "curve": 3,
    "main": 4,
    "split": 5,
    "alpha1": 6,
    "functional": 7,
    "newman": 8,
    "single_lag": 9,
    "hoeffding": 10,
}


def experiment_stream(master_seed: int, name: str) -> np.random.Generator:
    """Stream of one experiment; experiments never share random numbers."""
    return make_stream(master_seed, EXPERIMENT_STREAMS[name])
