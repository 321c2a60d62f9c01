"""Numerical statistics used by the SAC reports.

Quartiles use linear interpolation between order statistics at position
``1 + (n - 1) * p`` (Hyndman-Fan type 7, numpy's default).  The normal fit
uses the population (divide-by-n) standard deviation.  Q-Q plotting
positions are ``(i - 0.5) / n``.

Most routines accept optional integer ``weights``.  SAC values are stored
as counts per distinct value, and weights avoid expanding them.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

FAMILIES = ("normal", "lognormal", "weibull")


class ConvergenceError(ArithmeticError):
    pass


@dataclasses.dataclass(frozen=True)
class SampleSizeParams:
    confidence: float = 0.99
    margin_of_error: float = 0.01

    def __post_init__(self):
        for name in ("confidence", "margin_of_error"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {value!r}")


@dataclasses.dataclass(frozen=True)
class FiveFigureSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.min, self.q1, self.median, self.q3, self.max)


@dataclasses.dataclass(frozen=True)
class DistributionParams:
    """``p1``/``p2`` are mu/sigma (normal), log-space mu/sigma (lognormal)
    or shape k / scale lambda (weibull)."""

    family: str
    p1: float
    p2: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "weibull":
            if not (self.p1 > 0 and self.p2 > 0):
                raise ValueError("weibull shape and scale must be positive")
        elif not self.p2 > 0:
            raise ValueError(f"{self.family} sigma must be positive")


# ---------------------------------------------------------------------------
# Inverse error function

_SQRT_PI = math.sqrt(math.pi)


def _erfinv_initial(y: float) -> float:
    # Giles' single-precision approximation; ~1e-7 relative, good start for Newton.
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            p = c + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            p = c + p * w
    return p * y


def erf_inverse(y: float) -> float:
    """x with erf(x) = y, for -1 < y < 1."""
    if not -1.0 < y < 1.0:
        raise ValueError(f"erf_inverse is defined on (-1, 1), got {y!r}")
    if y == 0.0:
        return 0.0
    x = _erfinv_initial(y)
    for _ in range(8):
        # Newton on erf(x) - y; math.erf is accurate to a few ulp.
        err = math.erf(x) - y
        step = err / (2.0 / _SQRT_PI * math.exp(-x * x))
        # Halley correction: f''/f' = -2x
        step = step / (1.0 + x * step)
        x -= step
        if abs(step) <= 1e-16 * abs(x):
            break
    return x


def sample_size(params: SampleSizeParams = SampleSizeParams()) -> int:
    """Samples needed for the given margin of error at the given confidence.

    (erf^-1(confidence) / (margin * sqrt 2))^2, rounded half-up to the
    nearest integer.
    """
    z = erf_inverse(params.confidence) / (params.margin_of_error * math.sqrt(2.0))
    return math.floor(z * z + 0.5)


# ---------------------------------------------------------------------------
# Descriptive statistics


def _as_data(xs, weights=None) -> tuple[np.ndarray, np.ndarray | None]:
    x = np.asarray(xs, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty input")
    if weights is None:
        return x, None
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape != x.shape:
        raise ValueError("weights must match data shape")
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be non-negative with a positive total")
    return x, w


def geometric_mean(xs: Sequence[float], weights=None) -> float:
    x, w = _as_data(xs, weights)
    if np.any(x < 0):
        raise ValueError("geometric mean needs non-negative data")
    if w is not None:
        keep = w > 0
        x, w = x[keep], w[keep]
    if np.any(x == 0):
        return 0.0
    return float(np.exp(np.average(np.log(x), weights=w)))


def five_figure(xs: Sequence[float]) -> FiveFigureSummary:
    x, _ = _as_data(xs)
    q = np.quantile(x, [0.0, 0.25, 0.5, 0.75, 1.0])
    return FiveFigureSummary(*map(float, q))


def weighted_quantiles(values, counts, probs) -> np.ndarray:
    """Type-7 quantiles of the multiset where ``values[m]`` occurs ``counts[m]`` times.

    Equal to ``np.quantile(np.repeat(values, counts), probs)`` without the
    expansion.  ``values`` need not be sorted.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    c = np.asarray(counts).ravel().astype(np.int64)
    if v.shape != c.shape:
        raise ValueError("values and counts must have the same length")
    if np.any(c < 0):
        raise ValueError("counts must be non-negative")
    order = np.argsort(v, kind="stable")
    v, c = v[order], c[order]
    keep = c > 0
    v, c = v[keep], c[keep]
    n = int(c.sum())
    if n == 0:
        raise ValueError("empty input")
    cum = np.cumsum(c)  # cum[m] = number of order statistics <= v[m]
    out = []
    for p in np.atleast_1d(probs):
        h = (n - 1) * float(p)
        lo = math.floor(h)
        frac = h - lo
        # 0-based order statistic k sits in the first bucket with cum > k
        x_lo = v[np.searchsorted(cum, lo, side="right")]
        x_hi = v[np.searchsorted(cum, min(lo + 1, n - 1), side="right")]
        out.append(x_lo + frac * (x_hi - x_lo))
    return np.array(out)


def five_figure_from_counts(values, counts) -> FiveFigureSummary:
    return FiveFigureSummary(*map(float, weighted_quantiles(values, counts, [0, 0.25, 0.5, 0.75, 1])))


def histogram(xs, bucket_count: int, value_range: tuple[float, float], weights=None):
    """Equal-width histogram as ``[(bucket_center, count), ...]``.

    Values equal to the upper bound land in the last bucket; values outside
    the range are dropped; empty buckets are omitted.
    """
    if bucket_count < 1:
        raise ValueError("bucket_count must be at least 1")
    lo, hi = value_range
    if not lo < hi:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    x = np.asarray(xs, dtype=np.float64).ravel()
    counts, edges = np.histogram(x, bins=bucket_count, range=(lo, hi), weights=weights)
    centers = (edges[:-1] + edges[1:]) / 2
    if weights is not None and np.issubdtype(np.asarray(weights).dtype, np.integer):
        counts = np.rint(counts).astype(np.int64)
    return [(float(c), counts[b].item()) for b, c in enumerate(centers) if counts[b] != 0]


# ---------------------------------------------------------------------------
# Distribution fitting


def fit_normal(xs, weights=None) -> DistributionParams:
    x, w = _as_data(xs, weights)
    mu = float(np.average(x, weights=w))
    sigma = float(math.sqrt(np.average((x - mu) ** 2, weights=w)))
    return DistributionParams("normal", mu, sigma)


def fit_lognormal(xs, weights=None) -> DistributionParams:
    x, w = _as_data(xs, weights)
    if w is not None:
        x, w = x[w > 0], w[w > 0]
    if np.any(x <= 0):
        raise ValueError("log-normal fit needs strictly positive data")
    fitted = fit_normal(np.log(x), w)
    return DistributionParams("lognormal", fitted.p1, fitted.p2)


def fit_weibull(xs, weights=None, tol: float = 1e-10, max_iter: int = 200) -> DistributionParams:
    """Two-parameter Weibull maximum-likelihood fit.

    The shape k solves
        sum(w x^k ln x) / sum(w x^k) - 1/k - mean(ln x) = 0
    by Newton's method; the scale follows as (mean(x^k))^(1/k).
    """
    x, w = _as_data(xs, weights)
    if w is None:
        w = np.ones_like(x)
    else:
        x, w = x[w > 0], w[w > 0]
    if np.any(x <= 0):
        raise ValueError("Weibull fit needs strictly positive data")
    w = w / w.sum()
    # k does not depend on the scale of x; normalising keeps x^k in range.
    scale = x.max()
    logs = np.log(x / scale)
    mean_log = float(np.dot(w, logs))
    spread = math.sqrt(float(np.dot(w, (logs - mean_log) ** 2)))
    if spread == 0.0:
        raise ConvergenceError("Weibull fit undefined for constant data")

    k = 1.2 / spread
    for it in range(1, max_iter + 1):
        xk = w * np.exp(k * logs)
        s0 = xk.sum()
        s1 = np.dot(xk, logs)
        s2 = np.dot(xk, logs * logs)
        g = s1 / s0 - 1.0 / k - mean_log
        dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k)
        step = g / dg
        new_k = k - step
        while new_k <= 0:
            step /= 2
            new_k = k - step
        if abs(new_k - k) <= tol * abs(new_k):
            k = new_k
            break
        k = new_k
    else:
        raise ConvergenceError(
            f"Weibull shape did not converge in {max_iter} iterations (last k={k!r}, step={step!r})"
        )
    lam = scale * float(np.dot(w, np.exp(k * logs))) ** (1.0 / k)
    return DistributionParams("weibull", float(k), lam)


def quantile(d: DistributionParams, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile probability must lie in (0, 1), got {p!r}")
    if d.family == "weibull":
        return d.p2 * (-math.log1p(-p)) ** (1.0 / d.p1)
    z = math.sqrt(2.0) * erf_inverse(2.0 * p - 1.0)
    if d.family == "normal":
        return d.p1 + d.p2 * z
    return math.exp(d.p1 + d.p2 * z)


def qq_data(xs, d: DistributionParams) -> list[tuple[float, float]]:
    x = np.sort(np.asarray(xs, dtype=np.float64).ravel())
    if x.size == 0:
        raise ValueError("empty input")
    n = x.size
    return [(quantile(d, (i - 0.5) / n), float(x[i - 1])) for i in range(1, n + 1)]


def qq_data_from_counts(values, counts, d: DistributionParams, max_points: int | None = None):
    """Q-Q pairs for a counted multiset, optionally thinned to ``max_points`` ranks.

    Without thinning this equals ``qq_data(np.repeat(values, counts), d)``.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    c = np.asarray(counts).ravel().astype(np.int64)
    order = np.argsort(v, kind="stable")
    v, c = v[order], c[order]
    n = int(c.sum())
    if n == 0:
        raise ValueError("empty input")
    if max_points is None or max_points >= n:
        ranks = np.arange(1, n + 1)
    else:
        ranks = np.unique(np.rint(np.linspace(1, n, max_points)).astype(np.int64))
    cum = np.cumsum(c)
    empirical = v[np.searchsorted(cum, ranks - 1, side="right")]
    return [(quantile(d, (int(i) - 0.5) / n), float(e)) for i, e in zip(ranks, empirical)]
