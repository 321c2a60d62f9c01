"""Plot-ready CSV data derived from a result bundle.

Rounds and bits are 1-based in every report; bit 1 is the most
significant bit of a round's output word.  Floats are written with
Python's shortest round-trip repr.  Each schema is versioned through its
default file name (``heatmap.v1.csv`` and so on); columns never change
within a version.
"""

from __future__ import annotations

import csv
import io
import re
from typing import Iterable, Sequence

import numpy as np

from . import statistics as st
from .avalanche import INPUT_BITS, WORD_BITS, estimate, flatten_bit_index
from .bundle import ResultBundle
from .sac_toolkit import toy_table
from .sha1_core import ROUNDS

SCHEMA_VERSION = 1
KINDS = ("heatmap", "summary", "histogram", "qq", "toy")

HEATMAP_HEADER = ("round", "bit", "p_arith", "p_geom", "divergence_arith", "divergence_geom")
SUMMARY_HEADER = ("flat_bit_index", "min", "q1", "median", "q3", "max")
HISTOGRAM_HEADER = ("bucket_center", "count")
HISTOGRAM_PER_ROUND_HEADER = ("round", "bucket_center", "count")
QQ_HEADER = ("family", "param1", "param2", "theoretical", "empirical")

# One bucket per attainable per-input SAC value k/672, centred on it.
DEFAULT_BUCKETS = INPUT_BITS + 1
DEFAULT_RANGE = (-0.5 / INPUT_BITS, 1.0 + 0.5 / INPUT_BITS)

SAC_VALUES = np.arange(INPUT_BITS + 1) / INPUT_BITS
SIGNED_DEVIATIONS = (np.arange(INPUT_BITS + 1) - INPUT_BITS // 2) / INPUT_BITS


def parse_rounds(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.|-|:)\s*(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
    elif text.strip().isdigit():
        lo = hi = int(text)
    else:
        raise ValueError(f"bad round range {text!r}; expected LO..HI")
    if not 1 <= lo <= hi <= ROUNDS:
        raise ValueError(f"round range must satisfy 1 <= LO <= HI <= {ROUNDS}, got {lo}..{hi}")
    return lo, hi


def _require_samples(bundle: ResultBundle) -> None:
    if bundle.matrix.samples == 0:
        raise ValueError("bundle holds no samples")


def heatmap_rows(bundle: ResultBundle, rounds: tuple[int, int] = (1, ROUNDS)):
    _require_samples(bundle)
    est = estimate(bundle.matrix)
    counts = bundle.histogram.counts
    lo, hi = rounds
    for r in range(lo, hi + 1):
        for j in range(WORD_BITS):
            p = float(est.probabilities[r - 1, j])
            g = st.geometric_mean(SAC_VALUES, counts[r - 1, j])
            yield (r, j + 1, p, g, abs(p - 0.5), abs(g - 0.5))


def summary_rows(bundle: ResultBundle, rounds: tuple[int, int] = (1, ROUNDS)):
    """Five-figure summary of the signed per-input deviation p - 0.5, per flat bit."""
    _require_samples(bundle)
    counts = bundle.histogram.counts
    lo, hi = rounds
    for r in range(lo, hi + 1):
        for j in range(WORD_BITS):
            s = st.five_figure_from_counts(SIGNED_DEVIATIONS, counts[r - 1, j])
            yield (flatten_bit_index(r, j + 1),) + s.as_tuple()


def histogram_rows(
    bundle: ResultBundle,
    rounds: tuple[int, int] = (1, ROUNDS),
    bucket_count: int = DEFAULT_BUCKETS,
    value_range: tuple[float, float] = DEFAULT_RANGE,
    per_round: bool = False,
):
    _require_samples(bundle)
    lo, hi = rounds
    per_value = bundle.histogram.counts[lo - 1 : hi].sum(axis=1)  # (rounds, 673)
    if not per_round:
        for center, count in st.histogram(SAC_VALUES, bucket_count, value_range, per_value.sum(axis=0)):
            yield (center, count)
        return
    for offset, row in enumerate(per_value):
        if not row.any():
            continue
        for center, count in st.histogram(SAC_VALUES, bucket_count, value_range, row):
            yield (lo + offset, center, count)


def stable_values(bundle: ResultBundle, round_floor: int) -> np.ndarray:
    """Counts of each SAC value k/672 over all cells with round >= round_floor."""
    return bundle.histogram.counts[round_floor - 1 :].sum(axis=(0, 1))


def fit_all(values: np.ndarray, counts: np.ndarray) -> list[st.DistributionParams]:
    return [st.fit_normal(values, counts), st.fit_lognormal(values, counts), st.fit_weibull(values, counts)]


def qq_rows(bundle: ResultBundle, round_floor: int = 24, max_points: int | None = 1000):
    if bundle.matrix.samples == 0:
        raise ValueError("no samples: run the experiment before asking for Q-Q data")
    counts = stable_values(bundle, round_floor)
    for d in fit_all(SAC_VALUES, counts):
        for theoretical, empirical in st.qq_data_from_counts(SAC_VALUES, counts, d, max_points):
            yield (d.family, d.p1, d.p2, theoretical, empirical)


def write_csv(rows: Iterable[Sequence], header: Sequence[str], fh) -> int:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    n = 0
    for row in rows:
        writer.writerow(row)
        n += 1
    return n


def render(kind: str, bundle: ResultBundle | None, **options) -> str:
    """Produce the text of one report.  ``bundle`` may be None only for ``toy``."""
    if kind == "toy":
        return toy_table()
    if kind not in KINDS:
        raise ValueError(f"unknown report kind {kind!r}")
    if bundle is None:
        raise ValueError(f"report {kind!r} needs a result bundle")
    rounds = options.get("rounds") or (1, ROUNDS)
    out = io.StringIO()
    if kind == "heatmap":
        write_csv(heatmap_rows(bundle, rounds), HEATMAP_HEADER, out)
    elif kind == "summary":
        write_csv(summary_rows(bundle, rounds), SUMMARY_HEADER, out)
    elif kind == "histogram":
        per_round = options.get("per_round", False)
        rows = histogram_rows(
            bundle,
            rounds,
            options.get("buckets") or DEFAULT_BUCKETS,
            options.get("value_range") or DEFAULT_RANGE,
            per_round,
        )
        write_csv(rows, HISTOGRAM_PER_ROUND_HEADER if per_round else HISTOGRAM_HEADER, out)
    else:
        floor = options.get("round_floor") or bundle.metadata.get("round_floor", 24)
        write_csv(qq_rows(bundle, floor, options.get("max_points", 1000)), QQ_HEADER, out)
    return out.getvalue()


def default_filename(kind: str, per_round: bool = False) -> str:
    if kind == "toy":
        return "toy.txt"
    stem = "histogram_per_round" if (kind == "histogram" and per_round) else kind
    return f"{stem}.v{SCHEMA_VERSION}.csv"
