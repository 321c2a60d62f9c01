import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from sha1sac import statistics as S
from sha1sac.statistics import DistributionParams, SampleSizeParams

REFERENCE_NORMAL_SIGMA = 0.019285397
REFERENCE_WEIBULL = (9.6116811, 0.52480750)


# --- erf_inverse ------------------------------------------------------------

def test_erf_inverse_zero_and_symmetry():
    assert S.erf_inverse(0.0) == 0.0
    for y in (0.1, 0.5, 0.9, 0.999):
        assert S.erf_inverse(-y) == -S.erf_inverse(y)


def test_erf_inverse_099_against_mpmath():
    expected = float(mpmath.erfinv(mpmath.mpf("0.99")))
    assert abs(expected - 1.82138637) < 1e-6
    assert S.erf_inverse(0.99) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("y", [-0.9999, -0.99, -0.5, 0.0, 0.5, 0.99, 0.9999])
def test_erf_of_erf_inverse(y):
    assert math.erf(S.erf_inverse(y)) == pytest.approx(y, rel=1e-12, abs=1e-300)


@given(st.floats(min_value=-0.999999, max_value=0.999999))
def test_erf_inverse_matches_mpmath_everywhere(y):
    expected = float(mpmath.erfinv(y))
    assert S.erf_inverse(y) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("y", [1.0, -1.0, 1.5, float("nan")])
def test_erf_inverse_domain(y):
    with pytest.raises(ValueError):
        S.erf_inverse(y)


# --- sample_size --------------------------------------------------------------

def test_sample_size_reference_value():
    assert S.sample_size(SampleSizeParams(0.99, 0.01)) == 16587
    assert S.sample_size() == 16587


def test_sample_size_half_precision():
    # (erfinv(0.99) / (0.02 sqrt 2))^2 = 4146.81 by mpmath
    exact = (mpmath.erfinv(mpmath.mpf("0.99")) / (mpmath.mpf("0.02") * mpmath.sqrt(2))) ** 2
    assert 4146.8 < exact < 4146.9
    assert S.sample_size(SampleSizeParams(0.99, 0.02)) == 4147


@pytest.mark.parametrize("c, m", [(1.0, 0.01), (0.0, 0.01), (0.99, 0.0), (0.99, 1.0), (-0.5, 0.1)])
def test_sample_size_params_validated(c, m):
    with pytest.raises(ValueError):
        SampleSizeParams(c, m)


@given(st.floats(0.5, 0.999), st.floats(0.005, 0.2), st.floats(0.005, 0.2))
def test_sample_size_monotone_in_margin(c, m1, m2):
    lo, hi = sorted((m1, m2))
    assert S.sample_size(SampleSizeParams(c, lo)) >= S.sample_size(SampleSizeParams(c, hi))


@given(st.floats(0.5, 0.999), st.floats(0.5, 0.999), st.floats(0.005, 0.2))
def test_sample_size_monotone_in_confidence(c1, c2, m):
    lo, hi = sorted((c1, c2))
    assert S.sample_size(SampleSizeParams(lo, m)) <= S.sample_size(SampleSizeParams(hi, m))


def test_doubling_margin_quarters_unrounded_size():
    def raw(m):
        return (S.erf_inverse(0.95) / (m * math.sqrt(2))) ** 2

    assert raw(0.02) == pytest.approx(raw(0.01) / 4, rel=1e-14)


# --- descriptive ----------------------------------------------------------------

def test_geometric_mean():
    assert S.geometric_mean([3.0, 3.0, 3.0]) == pytest.approx(3.0)
    assert S.geometric_mean([1, 4]) == pytest.approx(2.0)
    assert S.geometric_mean([0.0, 5.0]) == 0.0
    assert S.geometric_mean([1, 4], weights=[2, 0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        S.geometric_mean([])
    with pytest.raises(ValueError):
        S.geometric_mean([-1.0, 2.0])


@given(st.lists(st.floats(0.01, 100), min_size=2, max_size=30).filter(lambda xs: max(xs) > min(xs)))
def test_am_gm(xs):
    assert S.geometric_mean(xs) <= np.mean(xs) * (1 + 1e-12)


def test_five_figure_examples():
    assert S.five_figure([0, 1, 2, 3, 4]).as_tuple() == (0, 1, 2, 3, 4)
    assert S.five_figure([7.5] * 9).as_tuple() == (7.5,) * 5
    assert S.five_figure([1, 2, 3, 4]).as_tuple() == (1, 1.75, 2.5, 3.25, 4)
    with pytest.raises(ValueError):
        S.five_figure([])


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=40))
def test_five_figure_ordering_and_counts_route(xs):
    s = S.five_figure(xs)
    assert s.min <= s.q1 <= s.median <= s.q3 <= s.max
    values, counts = np.unique(xs, return_counts=True)
    # weighted route must agree with the expanded route
    t = S.five_figure_from_counts(values[::-1], counts[::-1])
    assert t.as_tuple() == pytest.approx(s.as_tuple(), abs=1e-12)


def test_histogram_basics():
    assert S.histogram([0.5], 10, (0.0, 1.0)) == [(pytest.approx(0.55), 1)]
    out = S.histogram([0.0, 1.0, 1.0, 2.0, -1.0], 4, (0.0, 1.0))
    assert sum(c for _, c in out) == 3
    assert out[-1][1] == 2  # values at hi go into the last bucket
    assert len(out) == 2  # empty buckets omitted
    with pytest.raises(ValueError):
        S.histogram([0.5], 0, (0.0, 1.0))
    with pytest.raises(ValueError):
        S.histogram([0.5], 3, (1.0, 1.0))


def test_histogram_weights_keep_integer_counts():
    out = S.histogram([0.1, 0.9], 2, (0.0, 1.0), weights=np.array([3, 4], dtype=np.uint64))
    assert out == [(0.25, 3), (0.75, 4)]
    assert all(isinstance(c, int) for _, c in out)


def test_histogram_uniform_within_binomial_bound():
    rng = np.random.default_rng(2024)
    xs = rng.uniform(0, 1, 100_000)
    sigma = math.sqrt(100_000 * 0.1 * 0.9)
    out = S.histogram(xs, 10, (0.0, 1.0))
    assert len(out) == 10
    for _, c in out:
        assert abs(c - 10_000) < 5 * sigma


# --- fitting ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(20150102)


def test_fit_normal_population_sd():
    d = S.fit_normal([1.0, 3.0])
    assert (d.p1, d.p2) == (2.0, 1.0)


def test_fit_normal_recovery(rng):
    xs = rng.normal(0.5, 0.02, 100_000)
    d = S.fit_normal(xs)
    assert abs(d.p1 - 0.5) < 0.001
    assert d.p2 == pytest.approx(0.02, rel=0.02)


def test_fit_lognormal_is_normal_of_logs(rng):
    ys = rng.normal(-0.7, 0.04, 10_000)
    a = S.fit_lognormal(np.exp(ys))
    b = S.fit_normal(ys)
    assert a.p1 == pytest.approx(b.p1, rel=1e-12)
    assert a.p2 == pytest.approx(b.p2, rel=1e-9)


def test_fit_rejects_nonpositive():
    with pytest.raises(ValueError):
        S.fit_lognormal([0.0, 1.0])
    with pytest.raises(ValueError):
        S.fit_weibull([-1.0, 1.0])


def test_fit_weibull_recovery(rng):
    k, lam = REFERENCE_WEIBULL
    xs = lam * rng.weibull(k, 100_000)
    d = S.fit_weibull(xs)
    assert d.p1 == pytest.approx(k, rel=0.02)
    assert d.p2 == pytest.approx(lam, rel=0.02)


def test_fit_weibull_agrees_with_scipy(rng):
    xs = 2.0 * rng.weibull(1.7, 5_000)
    ours = S.fit_weibull(xs)
    c, _, scale = sps.weibull_min.fit(xs, floc=0)
    assert ours.p1 == pytest.approx(c, rel=1e-4)
    assert ours.p2 == pytest.approx(scale, rel=1e-4)


def test_fit_weibull_weighted_equals_expanded():
    values = np.array([0.3, 0.5, 0.55, 0.7])
    counts = np.array([2, 5, 1, 3])
    a = S.fit_weibull(values, counts)
    b = S.fit_weibull(np.repeat(values, counts))
    assert a.p1 == pytest.approx(b.p1, rel=1e-9)
    assert a.p2 == pytest.approx(b.p2, rel=1e-9)


def test_fit_weibull_nonconvergence_reported():
    with pytest.raises(S.ConvergenceError, match="did not converge"):
        S.fit_weibull([0.3, 0.5, 0.9, 1.2], max_iter=1, tol=0.0)
    with pytest.raises(S.ConvergenceError):
        S.fit_weibull([0.5, 0.5, 0.5])


def test_fit_then_median_round_trip(rng):
    xs = 0.52 * rng.weibull(9.6, 20_000)
    d = S.fit_weibull(xs)
    true_median = 0.52 * math.log(2) ** (1 / 9.6)
    assert S.quantile(d, 0.5) == pytest.approx(true_median, rel=0.01)
    ys = rng.lognormal(-0.69, 0.06, 20_000)
    assert S.quantile(S.fit_lognormal(ys), 0.5) == pytest.approx(math.exp(-0.69), rel=0.01)


# --- quantile / qq --------------------------------------------------------------------

def test_quantile_examples():
    assert S.quantile(DistributionParams("normal", 0.5, 0.3), 0.5) == pytest.approx(0.5, abs=1e-15)
    assert S.quantile(DistributionParams("weibull", 1.0, 1.0), 1 - 1 / math.e) == pytest.approx(1.0, rel=1e-14)
    q = S.quantile(DistributionParams("normal", 0.5, REFERENCE_NORMAL_SIGMA), 0.99)
    assert q == pytest.approx(0.5 + REFERENCE_NORMAL_SIGMA * 2.326348, abs=1e-6)


@pytest.mark.parametrize(
    "d, dist",
    [
        (DistributionParams("normal", 0.5, 0.02), sps.norm(0.5, 0.02)),
        (DistributionParams("lognormal", -0.7, 0.06), sps.lognorm(0.06, scale=math.exp(-0.7))),
        (DistributionParams("weibull", 9.6, 0.52), sps.weibull_min(9.6, scale=0.52)),
    ],
)
def test_quantile_against_scipy(d, dist):
    for p in (0.001, 0.1, 0.5, 0.9, 0.999):
        assert S.quantile(d, p) == pytest.approx(dist.ppf(p), rel=1e-10)


@given(st.sampled_from(["normal", "lognormal", "weibull"]), st.floats(0.01, 0.98), st.floats(0.001, 0.01))
def test_quantile_strictly_increasing(family, p, dp):
    d = DistributionParams(family, 0.5 if family != "weibull" else 9.6, 0.05)
    assert S.quantile(d, p) < S.quantile(d, p + dp)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1])
def test_quantile_domain(p):
    with pytest.raises(ValueError):
        S.quantile(DistributionParams("normal", 0, 1), p)


def test_distribution_params_validated():
    with pytest.raises(ValueError):
        DistributionParams("normal", 0.5, 0.0)
    with pytest.raises(ValueError):
        DistributionParams("weibull", -1.0, 1.0)
    with pytest.raises(ValueError):
        DistributionParams("gamma", 1.0, 1.0)


def test_qq_fixed_point():
    d = DistributionParams("weibull", 3.0, 2.0)
    n = 50
    xs = [S.quantile(d, (i - 0.5) / n) for i in range(n, 0, -1)]
    pairs = S.qq_data(xs, d)
    assert len(pairs) == n
    for t, e in pairs:
        assert t == pytest.approx(e, rel=1e-14)


def test_qq_converges_for_own_fit(rng):
    xs = REFERENCE_WEIBULL[1] * rng.weibull(REFERENCE_WEIBULL[0], 100_000)
    d = S.fit_weibull(xs)
    pairs = np.array(S.qq_data(xs, d))
    gap = np.abs(pairs[:, 0] - pairs[:, 1])
    # The extreme order statistics scatter by ~k^-1 relative no matter how
    # large n is, so the 0.01 bound is checked on plotting positions in
    # [0.001, 0.999]; the 100 outermost ranks each side get a loose bound.
    interior = slice(100, -100)
    assert gap[interior].max() < 0.01
    assert gap.max() < 0.05


def test_qq_counts_route_equals_expanded():
    values = np.array([0.6, 0.4, 0.5])
    counts = np.array([2, 1, 3])
    d = DistributionParams("normal", 0.5, 0.1)
    assert S.qq_data_from_counts(values, counts, d) == S.qq_data(np.repeat(values, counts), d)
    thinned = S.qq_data_from_counts(values, counts, d, max_points=3)
    assert len(thinned) == 3 and thinned[0] == S.qq_data(np.repeat(values, counts), d)[0]
