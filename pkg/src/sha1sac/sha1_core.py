"""SHA-1 compression function with a per-round trace.

Two implementations live here:

* a scalar, pure-Python path (``compress_traced``, ``compress``, ``sha1``)
  used for validation against the NIST byte-oriented vectors, and
* a batched numpy path (``compress_traced_many``) that runs many
  (iv, block) pairs through the 80 rounds at once.  The avalanche engine
  uses it to trace a baseline and its 672 single-bit variants together.

The trace entry for round ``r`` (0-based) is the freshly computed working
value, i.e. the new ``a`` register.  ``b``..``e`` are only shifted or
rotated copies of earlier entries, so nothing is lost.

Words are big-endian throughout.
"""

from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

MASK = 0xFFFFFFFF
ROUNDS = 80

STANDARD_IV: tuple[int, int, int, int, int] = (
    0x67452301,
    0xEFCDAB89,
    0x98BADCFE,
    0x10325476,
    0xC3D2E1F0,
)

# One constant per 20-round stage.  Read at call time so tests can mutate it.
ROUND_CONSTANTS: tuple[int, int, int, int] = (
    0x5A827999,
    0x6ED9EBA1,
    0x8F1BBCDC,
    0xCA62C1D6,
)

MAX_MESSAGE_BITS = 2**64


def rotl(x: int, n: int) -> int:
    return ((x << n) | (x >> (32 - n))) & MASK


def _check_words(words: Sequence[int], count: int, what: str) -> None:
    if len(words) != count:
        raise ValueError(f"{what} must have exactly {count} words, got {len(words)}")
    for w in words:
        if not 0 <= w <= MASK:
            raise ValueError(f"{what} word out of 32-bit range: {w!r}")


def message_schedule(block: Sequence[int]) -> list[int]:
    """Expand a 16-word block into the 80 schedule words W_0..W_79."""
    _check_words(block, 16, "message block")
    w = list(block)
    for t in range(16, ROUNDS):
        w.append(rotl(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1))
    return w


def compress_traced(
    iv: Sequence[int], block: Sequence[int]
) -> tuple[list[int], tuple[int, int, int, int, int]]:
    """Run the 80 rounds and return ``(trace, final_state)``.

    ``final_state`` is the register contents after round 79, before the
    IV is added back in.
    """
    _check_words(iv, 5, "chaining state")
    w = message_schedule(block)
    k0, k1, k2, k3 = ROUND_CONSTANTS
    a, b, c, d, e = iv
    trace = []
    for t in range(ROUNDS):
        if t < 20:
            f = (b & c) | (~b & d)
            k = k0
        elif t < 40:
            f = b ^ c ^ d
            k = k1
        elif t < 60:
            f = (b & c) | (b & d) | (c & d)
            k = k2
        else:
            f = b ^ c ^ d
            k = k3
        temp = (rotl(a, 5) + (f & MASK) + e + k + w[t]) & MASK
        e, d, c, b, a = d, c, rotl(b, 30), a, temp
        trace.append(temp)
    return trace, (a, b, c, d, e)


def compress(iv: Sequence[int], block: Sequence[int]) -> tuple[int, int, int, int, int]:
    _, state = compress_traced(iv, block)
    return tuple((x + y) & MASK for x, y in zip(iv, state))  # type: ignore[return-value]


def pad(message: bytes) -> bytes:
    """Merkle-Damgard strengthening: 0x80, zeros to 56 mod 64, 64-bit length."""
    bit_length = len(message) * 8
    if bit_length >= MAX_MESSAGE_BITS:
        raise ValueError(f"message too long for SHA-1: {bit_length} bits (limit 2**64 - 1)")
    zeros = (55 - len(message)) % 64
    return bytes(message) + b"\x80" + b"\x00" * zeros + struct.pack(">Q", bit_length)


def sha1(message: bytes) -> bytes:
    """Full SHA-1 over ``message``; returns the 20-byte digest."""
    padded = pad(message)
    h: tuple[int, ...] = STANDARD_IV
    for off in range(0, len(padded), 64):
        h = compress(h, struct.unpack(">16I", padded[off : off + 64]))
    return struct.pack(">5I", *h)


def digest_hex(words: Sequence[int]) -> str:
    return struct.pack(f">{len(words)}I", *words).hex()


# ---------------------------------------------------------------------------
# Batched path


def _rotl_np(x: np.ndarray, n: int) -> np.ndarray:
    return (x << np.uint32(n)) | (x >> np.uint32(32 - n))


def compress_traced_many(ivs: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    """Trace many compressions at once.

    ``ivs`` has shape (N, 5), ``blocks`` (N, 16); both are cast to uint32.
    Returns the (N, 80) uint32 array of per-round new-``a`` values.
    """
    ivs = np.asarray(ivs, dtype=np.uint32)
    blocks = np.asarray(blocks, dtype=np.uint32)
    if ivs.ndim != 2 or ivs.shape[1] != 5:
        raise ValueError(f"ivs must have shape (N, 5), got {ivs.shape}")
    if blocks.ndim != 2 or blocks.shape[1] != 16 or blocks.shape[0] != ivs.shape[0]:
        raise ValueError(f"blocks must have shape ({ivs.shape[0]}, 16), got {blocks.shape}")

    n = ivs.shape[0]
    w = np.empty((ROUNDS, n), dtype=np.uint32)
    w[:16] = blocks.T
    for t in range(16, ROUNDS):
        w[t] = _rotl_np(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1)

    k = [np.uint32(c) for c in ROUND_CONSTANTS]
    a, b, c, d, e = (ivs[:, i].copy() for i in range(5))
    trace = np.empty((ROUNDS, n), dtype=np.uint32)
    for t in range(ROUNDS):
        if t < 20:
            f = d ^ (b & (c ^ d))
            kt = k[0]
        elif t < 40:
            f = b ^ c ^ d
            kt = k[1]
        elif t < 60:
            f = (b & c) | (d & (b | c))
            kt = k[2]
        else:
            f = b ^ c ^ d
            kt = k[3]
        temp = _rotl_np(a, 5) + f + e + kt + w[t]
        e, d, c, b, a = d, c, _rotl_np(b, 30), a, temp
        trace[t] = temp
    return np.ascontiguousarray(trace.T)
