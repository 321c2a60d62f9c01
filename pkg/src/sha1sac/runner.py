"""Fan-out/fan-in driver for the avalanche experiment."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from .avalanche import FlipCountMatrix, SacValueHistogram, flip_counts_many, matrix_from_counts, merge
from .bundle import ResultBundle, make_metadata
from .ingest import DeterministicSource, FileSource, deterministic_words

log = logging.getLogger(__name__)

# Samples traced per numpy batch.
CHUNK = 32


class SourceExhausted(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    sample_count: int
    out_dir: Path | None = None
    inputs: Sequence[str] = ()
    seed: int | None = None
    worker_count: int = 1
    round_floor: int = 24

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if not 1 <= self.round_floor <= 80:
            raise ValueError("round_floor must be in 1..80")
        if bool(self.inputs) == (self.seed is not None):
            raise ValueError("give either input files or a seed, not both or neither")


def process_words(words: np.ndarray) -> tuple[FlipCountMatrix, SacValueHistogram]:
    per_input = flip_counts_many(words)
    return matrix_from_counts(per_input), SacValueHistogram.from_counts(per_input)


def process_shard(seed: int | None, words: np.ndarray | None, start: int, count: int):
    """Reduce samples ``start .. start + count - 1`` to one accumulator pair.

    Samples come from the deterministic generator when ``seed`` is given,
    otherwise from rows of ``words`` (already sliced to this shard).
    """
    matrix, hist = FlipCountMatrix.zeros(), SacValueHistogram.zeros()
    for off in range(0, count, CHUNK):
        n = min(CHUNK, count - off)
        if seed is not None:
            chunk = deterministic_words(seed, start + off, n)
        else:
            chunk = words[off : off + n]
        m, h = process_words(chunk)
        matrix, hist = merge(matrix, m), hist.merge(h)
    return matrix, hist


def _shards(n: int, k: int) -> list[tuple[int, int]]:
    base, extra = divmod(n, k)
    out, start = [], 0
    for i in range(k):
        size = base + (i < extra)
        if size:
            out.append((start, size))
        start += size
    return out


def _load(config: RunConfig):
    """Return ``(words or None, source description)``."""
    n = config.sample_count
    if config.seed is not None:
        return None, DeterministicSource(config.seed).describe()
    src = FileSource(config.inputs)
    try:
        words = src.next_words(n)
    finally:
        src.close()
    if len(words) < n:
        raise SourceExhausted(
            f"input holds only {len(words)} complete sample(s); {n} requested "
            f"(short by {n - len(words)})"
        )
    return words, src.describe()


def run_experiment(config: RunConfig) -> ResultBundle:
    """Process all samples, one contiguous shard per worker.

    Counters are integers, so the merged result does not depend on the
    number of shards or the order they finish in.
    """
    words, source = _load(config)
    shards = _shards(config.sample_count, config.worker_count)
    jobs = [
        (config.seed, None if words is None else words[s : s + c], s, c) for s, c in shards
    ]
    matrix, hist = FlipCountMatrix.zeros(), SacValueHistogram.zeros()
    if config.worker_count == 1:
        results = map(lambda job: process_shard(*job), jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=config.worker_count)
        results = pool.map(process_shard, *zip(*jobs))
    try:
        for m, h in results:
            matrix, hist = merge(matrix, m), hist.merge(h)
    finally:
        if config.worker_count > 1:
            pool.shutdown()
    log.info("processed %d samples (%d trials)", matrix.samples, matrix.trials)
    return ResultBundle(matrix, hist, make_metadata(matrix.samples, source, config.round_floor))
