"""Baseline/avalanche tracing and the mergeable flip-count accumulator.

Bit layout of a 672-bit input sample: bit ``i`` lives in word ``i // 32``
at position ``31 - i % 32`` (most significant bit first).  Words 0..15 are
the message block, words 16..20 the IV registers a..e.

Output bits follow the same rule: column ``j`` of a round is bit
``31 - j`` of that round's trace word, so ``j = 0`` is the MSB.
"""

from __future__ import annotations

import dataclasses
import struct
from typing import Iterable, Sequence

import numpy as np

from .sha1_core import ROUNDS, compress_traced_many

INPUT_WORDS = 21
INPUT_BITS = INPUT_WORDS * 32  # 672
SAMPLE_BYTES = INPUT_BITS // 8  # 84
WORD_BITS = 32
FLAT_BITS = ROUNDS * WORD_BITS  # 2560

# Tag persisted with every accumulator so the ordering choice travels with the data.
ORDERING_TAG = "msg0-15,iv-a-e;msb-first;round=new-a"

_U64_LIMIT = 2**64


@dataclasses.dataclass(frozen=True)
class InputSample:
    """One population member: 16 message words followed by 5 IV words."""

    words: tuple[int, ...]

    def __post_init__(self):
        if len(self.words) != INPUT_WORDS:
            raise ValueError(f"a sample has {INPUT_WORDS} words, got {len(self.words)}")
        for w in self.words:
            if not 0 <= w <= 0xFFFFFFFF:
                raise ValueError(f"word out of 32-bit range: {w!r}")

    @classmethod
    def from_parts(cls, message: Sequence[int], iv: Sequence[int]) -> "InputSample":
        if len(message) != 16 or len(iv) != 5:
            raise ValueError("need 16 message words and 5 IV words")
        return cls(tuple(message) + tuple(iv))

    @classmethod
    def from_bytes(cls, data: bytes) -> "InputSample":
        if len(data) != SAMPLE_BYTES:
            raise ValueError(f"a sample is {SAMPLE_BYTES} bytes, got {len(data)}")
        return cls(struct.unpack(">21I", data))

    @classmethod
    def zeros(cls) -> "InputSample":
        return cls((0,) * INPUT_WORDS)

    @property
    def message(self) -> tuple[int, ...]:
        return self.words[:16]

    @property
    def iv(self) -> tuple[int, ...]:
        return self.words[16:]

    def to_bytes(self) -> bytes:
        return struct.pack(">21I", *self.words)

    def to_array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.uint32)


def _bit_location(i: int) -> tuple[int, int]:
    if not 0 <= i < INPUT_BITS:
        raise IndexError(f"bit index {i} outside 0..{INPUT_BITS - 1}")
    return i // 32, 1 << (31 - i % 32)


def flip_bit(sample: InputSample, i: int) -> InputSample:
    word, mask = _bit_location(i)
    words = list(sample.words)
    words[word] ^= mask
    return InputSample(tuple(words))


# Word index and XOR mask for each of the 672 single-bit flips.
_FLIP_WORD = np.arange(INPUT_BITS) // 32
_FLIP_MASK = (np.uint32(1) << (31 - np.arange(INPUT_BITS) % 32).astype(np.uint32)).astype(np.uint32)


def flip_counts_many(words: np.ndarray) -> np.ndarray:
    """Per-input flip counts for a batch of samples.

    ``words`` is an (S, 21) array.  Returns an (S, 80, 32) uint16 array whose
    entry [s, r, j] is the number of flips i (out of 672) for which bit j of
    round r's avalanche vector is set.  Each sample costs 673 traced
    compressions: one baseline and one per flipped bit.
    """
    words = np.asarray(words, dtype=np.uint32)
    if words.ndim != 2 or words.shape[1] != INPUT_WORDS:
        raise ValueError(f"expected shape (S, {INPUT_WORDS}), got {words.shape}")
    s = words.shape[0]
    variants = np.repeat(words[:, None, :], INPUT_BITS + 1, axis=1)
    variants[:, 1 + np.arange(INPUT_BITS), _FLIP_WORD] ^= _FLIP_MASK
    flat = variants.reshape(-1, INPUT_WORDS)
    traces = compress_traced_many(flat[:, 16:], flat[:, :16]).reshape(s, INPUT_BITS + 1, ROUNDS)
    avalanche = traces[:, 1:, :] ^ traces[:, :1, :]
    bits = np.unpackbits(avalanche.astype(">u4").view(np.uint8), axis=-1)
    # bits: (S, 672, 80 * 32), MSB-first within each round word
    return bits.sum(axis=1, dtype=np.uint16).reshape(s, ROUNDS, WORD_BITS)


def avalanche_vectors(sample: InputSample) -> np.ndarray:
    """The (672, 80) array of V_i = baseline trace XOR flipped trace."""
    words = sample.to_array()
    variants = np.repeat(words[None, :], INPUT_BITS + 1, axis=0)
    variants[1 + np.arange(INPUT_BITS), _FLIP_WORD] ^= _FLIP_MASK
    traces = compress_traced_many(variants[:, 16:], variants[:, :16])
    return traces[1:] ^ traces[:1]


@dataclasses.dataclass(frozen=True)
class PerInputSac:
    """Flip fractions for one sample, stored as exact integer counts out of 672."""

    counts: np.ndarray  # (80, 32) integers in 0..672

    @property
    def values(self) -> np.ndarray:
        return self.counts / INPUT_BITS


def analyze_sample(sample: InputSample) -> PerInputSac:
    counts = flip_counts_many(sample.to_array()[None, :])[0]
    return PerInputSac(counts.astype(np.int64))


def _check_u64(value: int, what: str) -> int:
    if not 0 <= value < _U64_LIMIT:
        raise OverflowError(f"{what} overflows a 64-bit counter")
    return value


def _add_u64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = a + b
    if np.any(out < a):
        raise OverflowError("flip counter overflow")
    return out


@dataclasses.dataclass(frozen=True)
class FlipCountMatrix:
    """Per-(round, bit) flip counts with the number of trials behind them."""

    flip_counts: np.ndarray  # (80, 32) uint64
    trials: int = 0
    samples: int = 0

    def __post_init__(self):
        if self.flip_counts.shape != (ROUNDS, WORD_BITS):
            raise ValueError(f"flip_counts must be {ROUNDS}x{WORD_BITS}, got {self.flip_counts.shape}")
        _check_u64(self.trials, "trials")
        _check_u64(self.samples, "samples")

    @classmethod
    def zeros(cls) -> "FlipCountMatrix":
        return cls(np.zeros((ROUNDS, WORD_BITS), dtype=np.uint64))

    def __eq__(self, other):
        if not isinstance(other, FlipCountMatrix):
            return NotImplemented
        return (
            self.trials == other.trials
            and self.samples == other.samples
            and np.array_equal(self.flip_counts, other.flip_counts)
        )

    __hash__ = None  # type: ignore[assignment]


def merge(a: FlipCountMatrix, b: FlipCountMatrix) -> FlipCountMatrix:
    return FlipCountMatrix(
        _add_u64(a.flip_counts, b.flip_counts),
        _check_u64(a.trials + b.trials, "trials"),
        _check_u64(a.samples + b.samples, "samples"),
    )


def matrix_from_counts(per_input: np.ndarray) -> FlipCountMatrix:
    """Collapse an (S, 80, 32) block of per-input counts into one matrix."""
    s = per_input.shape[0]
    return FlipCountMatrix(
        per_input.sum(axis=0, dtype=np.uint64), trials=s * INPUT_BITS, samples=s
    )


def accumulate(acc: FlipCountMatrix, sample: InputSample) -> FlipCountMatrix:
    counts = analyze_sample(sample).counts
    return merge(acc, matrix_from_counts(counts[None]))


def accumulate_many(acc: FlipCountMatrix, samples: Iterable[InputSample]) -> FlipCountMatrix:
    words = np.array([s.words for s in samples], dtype=np.uint32).reshape(-1, INPUT_WORDS)
    if not len(words):
        return acc
    return merge(acc, matrix_from_counts(flip_counts_many(words)))


@dataclasses.dataclass(frozen=True)
class SacEstimate:
    probabilities: np.ndarray  # (80, 32)
    divergences: np.ndarray  # |p - 0.5|


def estimate(acc: FlipCountMatrix) -> SacEstimate:
    if acc.trials == 0:
        raise ValueError("no trials accumulated")
    p = acc.flip_counts.astype(np.float64) / acc.trials
    return SacEstimate(p, np.abs(p - 0.5))


def flatten_bit_index(r: int, i: int) -> int:
    """Map a 1-based (round, bit) pair to a flat index 0..2559."""
    if not 1 <= r <= ROUNDS:
        raise ValueError(f"round {r} outside 1..{ROUNDS}")
    if not 1 <= i <= WORD_BITS:
        raise ValueError(f"bit {i} outside 1..{WORD_BITS}")
    return (r - 1) * WORD_BITS + (i - 1)


@dataclasses.dataclass(frozen=True)
class SacValueHistogram:
    """How often each per-input SAC value k/672 was seen in each cell.

    ``counts[r, j, k]`` is the number of samples whose round-r, bit-j flip
    count equalled k.  Integer-valued, so merging is exact and
    order-independent.  Arithmetic means, geometric means and quantiles
    over samples can all be recovered from it.
    """

    counts: np.ndarray  # (80, 32, 673) uint64

    @classmethod
    def zeros(cls) -> "SacValueHistogram":
        return cls(np.zeros((ROUNDS, WORD_BITS, INPUT_BITS + 1), dtype=np.uint64))

    @classmethod
    def from_counts(cls, per_input: np.ndarray) -> "SacValueHistogram":
        cell = np.arange(ROUNDS * WORD_BITS).reshape(1, ROUNDS, WORD_BITS)
        flat = cell.astype(np.int64) * (INPUT_BITS + 1) + per_input.astype(np.int64)
        hist = np.bincount(flat.ravel(), minlength=FLAT_BITS * (INPUT_BITS + 1))
        return cls(hist.astype(np.uint64).reshape(ROUNDS, WORD_BITS, INPUT_BITS + 1))

    @property
    def samples(self) -> int:
        return int(self.counts[0, 0].sum())

    def merge(self, other: "SacValueHistogram") -> "SacValueHistogram":
        return SacValueHistogram(_add_u64(self.counts, other.counts))

    def flip_counts(self) -> np.ndarray:
        """Recover the (80, 32) flip-count matrix: sum over k of k * count."""
        return (self.counts * np.arange(INPUT_BITS + 1, dtype=np.uint64)).sum(axis=-1)

    def __eq__(self, other):
        if not isinstance(other, SacValueHistogram):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]
