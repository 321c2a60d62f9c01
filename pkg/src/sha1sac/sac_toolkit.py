"""Exhaustive SAC checks for small boolean functions.

Index convention: an input is an integer ``x`` in ``0 .. 2**n - 1`` and
variable ``x_i`` (0-based) is bit ``i`` of it, ``(x >> i) & 1``.  The
1-based variable x_{i+1} of the textbook definitions is bit ``i`` here.
When rendered as a bit string the most significant bit comes first, so
``"01"`` is the integer 1 and flipping ``"01"`` flips bit 0.

Two readings of the criterion are checked:

* summed: for every i, sum_x f(x) xor f(x xor c_i) == 2**(n-1)
* rowwise: for every baseline x, the fraction of single-bit flips that
  change f(x) is exactly 1/2
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Callable

import numpy as np

MAX_ARITY = 24


def _check_arity(n: int, low: int = 1) -> None:
    if not low <= n <= MAX_ARITY:
        raise ValueError(f"arity must be in {low}..{MAX_ARITY}, got {n}")


@dataclasses.dataclass(frozen=True, eq=False)
class BooleanFunction:
    arity: int
    truth_table: np.ndarray  # uint8, length 2**arity

    def __post_init__(self):
        _check_arity(self.arity)
        table = np.asarray(self.truth_table, dtype=np.uint8).ravel()
        if table.size != 1 << self.arity:
            raise ValueError(f"truth table must have {1 << self.arity} entries, got {table.size}")
        if np.any(table > 1):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "truth_table", table)

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[int], int]) -> "BooleanFunction":
        _check_arity(n)
        return cls(n, np.array([fn(x) & 1 for x in range(1 << n)], dtype=np.uint8))

    def __call__(self, x: int) -> int:
        return int(self.truth_table[x])

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.truth_table, other.truth_table)

    __hash__ = None  # type: ignore[assignment]


def and_function() -> BooleanFunction:
    """f(x) = x_0 AND x_1."""
    return BooleanFunction(2, np.array([0, 0, 0, 1], dtype=np.uint8))


def parity_function(n: int) -> BooleanFunction:
    _check_arity(n)
    x = np.arange(1 << n, dtype=np.uint32)
    bits = np.zeros_like(x)
    for i in range(n):
        bits ^= (x >> i) & 1
    return BooleanFunction(n, bits.astype(np.uint8))


def babbage_function(n: int) -> BooleanFunction:
    """0 when the first variable is 0, otherwise the parity of the others.

    The first variable is bit 0; for n = 2 this is x_0 AND x_1.
    """
    _check_arity(n, low=2)
    x = np.arange(1 << n, dtype=np.uint32)
    rest = np.zeros_like(x)
    for i in range(1, n):
        rest ^= (x >> i) & 1
    return BooleanFunction(n, (rest & (x & 1)).astype(np.uint8))


def flip_changes(f: BooleanFunction, i: int) -> np.ndarray:
    """Indicator f(x) != f(x xor c_i) for every x."""
    x = np.arange(1 << f.arity, dtype=np.uint32)
    return f.truth_table ^ f.truth_table[x ^ np.uint32(1 << i)]


def summed_sac(f: BooleanFunction) -> list[int]:
    return [int(flip_changes(f, i).sum(dtype=np.int64)) for i in range(f.arity)]


def rowwise_changes(f: BooleanFunction) -> np.ndarray:
    """Number of the n single-bit flips that change f, per baseline x."""
    total = np.zeros(1 << f.arity, dtype=np.int64)
    for i in range(f.arity):
        total += flip_changes(f, i)
    return total


def rowwise_profile(f: BooleanFunction) -> list[Fraction]:
    return [Fraction(int(c), f.arity) for c in rowwise_changes(f)]


def satisfies_summed(f: BooleanFunction) -> bool:
    half = 1 << (f.arity - 1)
    return all(s == half for s in summed_sac(f))


def satisfies_rowwise(f: BooleanFunction) -> bool:
    return bool(np.all(2 * rowwise_changes(f) == f.arity))


@dataclasses.dataclass(frozen=True)
class SacReport:
    per_flip_sums: list[int]
    per_input_change_probabilities: list[Fraction]
    satisfies_summed: bool
    satisfies_rowwise: bool


def sac_report(f: BooleanFunction) -> SacReport:
    sums = summed_sac(f)
    profile = rowwise_profile(f)
    half = 1 << (f.arity - 1)
    return SacReport(
        sums,
        profile,
        all(s == half for s in sums),
        all(p == Fraction(1, 2) for p in profile),
    )


def toy_table(f: BooleanFunction | None = None) -> str:
    """Render the per-flip table for a small function (default x_0 AND x_1).

    Columns: baseline x, f(x), one column per flipped bit, the probability
    that a single-bit flip changes f(x), and the probability that it leaves
    f(x) unchanged.  The last lines give the per-flip column sums and the
    verdict for both readings of the criterion.
    """
    f = f or and_function()
    n = f.arity
    report = sac_report(f)
    # Columns ordered by flip mask as written MSB-first: "0..01" first.
    flips = [flip_changes(f, i) for i in range(n)]
    flip_names = [format(1 << i, f"0{n}b") for i in range(n)]
    header = ["x", "f(x)"] + [f"f(x)^f(x^{m})" for m in flip_names] + ["P(change)", "P(equal)"]
    rows = []
    for x in range(1 << n):
        p = report.per_input_change_probabilities[x]
        rows.append(
            [format(x, f"0{n}b"), str(f(x))]
            + [str(int(col[x])) for col in flips]
            + [_fmt_prob(p), _fmt_prob(1 - p)]
        )
    sums = ["Sum:", ""] + [str(s) for s in report.per_flip_sums] + ["", ""]
    widths = [max(len(r[c]) for r in [header, sums] + rows) for c in range(len(header))]

    def line(cells):
        return "  ".join(cell.rjust(w) for cell, w in zip(cells, widths)).rstrip()

    out = [line(header), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in rows]
    out += ["  ".join("-" * w for w in widths), line(sums)]
    out.append(f"summed criterion (every sum = {1 << (n - 1)}): {_verdict(report.satisfies_summed)}")
    out.append(f"rowwise criterion (every P(change) = 0.5): {_verdict(report.satisfies_rowwise)}")
    return "\n".join(out) + "\n"


def _fmt_prob(p: Fraction) -> str:
    return repr(float(p))


def _verdict(ok: bool) -> str:
    return "satisfied" if ok else "NOT satisfied"
