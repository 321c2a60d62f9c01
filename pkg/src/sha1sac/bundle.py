"""Persisted experiment results.

A result directory holds two files:

``accumulator.bin``
    ``SHA1SAC-ACC\\n`` magic, a 4-byte big-endian header length, a UTF-8
    JSON header (sorted keys), then two little-endian uint64 arrays in C
    order: ``flip_counts`` (80 x 32) and ``value_counts`` (80 x 32 x 673).
    The header records the format version, both shapes, ``trials``,
    ``samples`` and the input ordering tag.

``metadata.json``
    Sample count, source description, round floor, convention tags and
    tool version.  No timestamps, so identical runs produce identical bytes.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from . import __version__
from .avalanche import (
    INPUT_BITS,
    ORDERING_TAG,
    WORD_BITS,
    FlipCountMatrix,
    SacValueHistogram,
)
from .sha1_core import ROUNDS

MAGIC = b"SHA1SAC-ACC\n"
FORMAT_VERSION = 1
ACCUMULATOR_FILE = "accumulator.bin"
METADATA_FILE = "metadata.json"


class BundleError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class ResultBundle:
    matrix: FlipCountMatrix
    histogram: SacValueHistogram
    metadata: dict

    def __post_init__(self):
        if self.metadata.get("samples") != self.matrix.samples:
            raise BundleError("metadata sample count disagrees with the accumulator")
        if self.histogram.samples != self.matrix.samples:
            raise BundleError("value histogram sample count disagrees with the accumulator")


def make_metadata(samples: int, source: dict, round_floor: int = 24) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "samples": samples,
        "trials": samples * INPUT_BITS,
        "source": source,
        "round_floor": round_floor,
        "conventions": {
            "input_ordering": ORDERING_TAG,
            "rounds": "1-based in reports (round r = trace index r-1)",
            "bits": "1-based in reports, bit 1 = most significant",
        },
        "tool_version": __version__,
    }


def _encode_accumulator(matrix: FlipCountMatrix, hist: SacValueHistogram) -> bytes:
    header = {
        "format_version": FORMAT_VERSION,
        "ordering": ORDERING_TAG,
        "flip_counts_shape": [ROUNDS, WORD_BITS],
        "value_counts_shape": [ROUNDS, WORD_BITS, INPUT_BITS + 1],
        "dtype": "<u8",
        "trials": matrix.trials,
        "samples": matrix.samples,
    }
    head = json.dumps(header, sort_keys=True).encode()
    return b"".join(
        [
            MAGIC,
            struct.pack(">I", len(head)),
            head,
            np.ascontiguousarray(matrix.flip_counts, dtype="<u8").tobytes(),
            np.ascontiguousarray(hist.counts, dtype="<u8").tobytes(),
        ]
    )


def _decode_accumulator(data: bytes) -> tuple[FlipCountMatrix, SacValueHistogram]:
    if not data.startswith(MAGIC):
        raise BundleError("not an accumulator file (bad magic)")
    pos = len(MAGIC)
    (hlen,) = struct.unpack_from(">I", data, pos)
    pos += 4
    header = json.loads(data[pos : pos + hlen])
    pos += hlen
    if header.get("format_version") != FORMAT_VERSION:
        raise BundleError(f"unsupported accumulator version {header.get('format_version')!r}")
    if header.get("ordering") != ORDERING_TAG:
        raise BundleError(f"accumulator uses a different input ordering: {header.get('ordering')!r}")
    fshape = tuple(header["flip_counts_shape"])
    vshape = tuple(header["value_counts_shape"])
    if fshape != (ROUNDS, WORD_BITS) or vshape != (ROUNDS, WORD_BITS, INPUT_BITS + 1):
        raise BundleError("unexpected accumulator shapes")
    nf = 8 * ROUNDS * WORD_BITS
    nv = nf * (INPUT_BITS + 1)
    if len(data) != pos + nf + nv:
        raise BundleError("accumulator file is truncated or has trailing data")
    flips = np.frombuffer(data, dtype="<u8", count=ROUNDS * WORD_BITS, offset=pos)
    values = np.frombuffer(data, dtype="<u8", count=nv // 8, offset=pos + nf)
    matrix = FlipCountMatrix(
        flips.astype(np.uint64).reshape(fshape), trials=header["trials"], samples=header["samples"]
    )
    return matrix, SacValueHistogram(values.astype(np.uint64).reshape(vshape))


def save_bundle(bundle: ResultBundle, directory: Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / ACCUMULATOR_FILE).write_bytes(_encode_accumulator(bundle.matrix, bundle.histogram))
    (directory / METADATA_FILE).write_text(json.dumps(bundle.metadata, indent=2, sort_keys=True) + "\n")


def load_bundle(directory: Path) -> ResultBundle:
    directory = Path(directory)
    try:
        data = (directory / ACCUMULATOR_FILE).read_bytes()
        metadata = json.loads((directory / METADATA_FILE).read_text())
    except FileNotFoundError as exc:
        raise BundleError(f"no result bundle in {directory}: {exc.filename} missing") from exc
    matrix, hist = _decode_accumulator(data)
    return ResultBundle(matrix, hist, metadata)
