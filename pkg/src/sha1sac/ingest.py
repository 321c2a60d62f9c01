"""Input sample streams.

File mode reads raw bytes (for example random.org archive files), treating
the listed files as one concatenated stream and cutting it into 84-byte
samples: 21 big-endian words, message words 0..15 then IV words a..e.

Deterministic mode is a stand-in for a true random corpus.  It uses
SplitMix64 in counter mode:

    z_n  = seed + (n + 1) * 0x9E3779B97F4A7C15         (mod 2**64)
    z    = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z    = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_n = z ^ (z >> 31)

which is exactly the n-th output of a SplitMix64 generator seeded with
``seed``.  Sample ``s`` uses outputs ``11*s .. 11*s + 10``; each output is
split into its high then low 32-bit half and the first 21 halves are the
sample's words (the last low half is discarded).  Any range of samples can
be generated independently of the others.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .avalanche import INPUT_WORDS, SAMPLE_BYTES, InputSample

log = logging.getLogger(__name__)

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
OUTPUTS_PER_SAMPLE = 11
_M64 = (1 << 64) - 1


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """Outputs number ``counters`` of SplitMix64 seeded with ``seed``."""
    n = np.asarray(counters, dtype=np.uint64)
    z = np.uint64(seed & _M64) + (n + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def deterministic_words(seed: int, start: int, count: int) -> np.ndarray:
    """Words of samples ``start .. start + count - 1`` as a (count, 21) uint32 array."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be non-negative")
    counters = np.arange(start * OUTPUTS_PER_SAMPLE, (start + count) * OUTPUTS_PER_SAMPLE, dtype=np.uint64)
    raw = splitmix64(seed, counters).reshape(count, OUTPUTS_PER_SAMPLE)
    halves = np.empty((count, 2 * OUTPUTS_PER_SAMPLE), dtype=np.uint32)
    halves[:, 0::2] = (raw >> np.uint64(32)).astype(np.uint32)
    halves[:, 1::2] = (raw & np.uint64(0xFFFFFFFF)).astype(np.uint32)
    return np.ascontiguousarray(halves[:, :INPUT_WORDS])


class SampleSource:
    """Base class; subclasses yield ``InputSample`` objects in order."""

    def next_sample(self) -> InputSample | None:
        raise NotImplementedError

    def next_words(self, count: int) -> np.ndarray:
        """Up to ``count`` further samples as a (k, 21) uint32 array, k <= count."""
        rows = []
        for _ in range(count):
            s = self.next_sample()
            if s is None:
                break
            rows.append(s.words)
        return np.array(rows, dtype=np.uint32).reshape(-1, INPUT_WORDS)

    def __iter__(self) -> Iterator[InputSample]:
        while (s := self.next_sample()) is not None:
            yield s

    def describe(self) -> dict:
        raise NotImplementedError


class DeterministicSource(SampleSource):
    def __init__(self, seed: int, counter: int = 0):
        if not 0 <= seed <= _M64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.counter = counter

    def next_sample(self) -> InputSample:
        words = deterministic_words(self.seed, self.counter, 1)[0]
        self.counter += 1
        return InputSample(tuple(int(w) for w in words))

    def next_words(self, count: int) -> np.ndarray:
        words = deterministic_words(self.seed, self.counter, count)
        self.counter += count
        return words

    def describe(self) -> dict:
        return {"kind": "deterministic", "generator": "splitmix64-counter", "seed": f"0x{self.seed:X}"}


class FileSource(SampleSource):
    """Concatenation of raw binary files, consumed 84 bytes at a time."""

    def __init__(self, paths: Sequence[str | os.PathLike]):
        if not paths:
            raise ValueError("at least one input file is required")
        self.paths = [Path(p) for p in paths]
        for p in self.paths:
            # Fail early on unreadable files rather than mid-run.
            with open(p, "rb"):
                pass
        self.offset = 0
        self.leftover_bytes = 0
        self._file_index = 0
        self._fh = None
        self._exhausted = False

    def _read(self, size: int) -> bytes:
        buf = bytearray()
        while len(buf) < size and self._file_index < len(self.paths):
            if self._fh is None:
                self._fh = open(self.paths[self._file_index], "rb")
            chunk = self._fh.read(size - len(buf))
            if chunk:
                buf += chunk
            else:
                self._fh.close()
                self._fh = None
                self._file_index += 1
        return bytes(buf)

    def next_sample(self) -> InputSample | None:
        if self._exhausted:
            return None
        data = self._read(SAMPLE_BYTES)
        if len(data) < SAMPLE_BYTES:
            self._exhausted = True
            self.leftover_bytes = len(data)
            if data:
                log.warning("ignoring %d trailing byte(s) that do not fill a sample", len(data))
            return None
        self.offset += SAMPLE_BYTES
        return InputSample.from_bytes(data)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def describe(self) -> dict:
        return {"kind": "file", "paths": [str(p) for p in self.paths]}


def count_samples(src: FileSource) -> int:
    if not isinstance(src, FileSource):
        raise TypeError("count_samples needs a file source")
    total = sum(os.path.getsize(p) for p in src.paths)
    return total // SAMPLE_BYTES
