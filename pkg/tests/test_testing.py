import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwdep.processes import RngContract, gen_iid_normal, gen_iid_uniform
from mwdep.testing import (
    NONPOSITIVE_VARIANCE,
    TIES,
    KnownDistribution,
    adjacent_test,
    normal_cdf,
    normal_quantile,
    one_sample_test,
    p_values,
    two_sample_test,
)
from mwdep.ustat import compute_u
from mwdep.varest import BandwidthConfig

# Frozen oracle values: Gaussian density integrated with mpmath.quad at 30
# digits; the quantile by bisection on that integral.
PHI_196 = 0.975002104851779563787
PHI_1645 = 0.950015094460878636553
Q_0975 = 1.959963984540053855604


def test_normal_cdf_against_oracle():
    assert normal_cdf(0.0) == 0.5
    assert abs(normal_cdf(1.96) - PHI_196) <= 1e-7
    assert abs(normal_cdf(1.645) - PHI_1645) <= 1e-7
    assert abs(normal_cdf(-1.96) - (1 - PHI_196)) <= 1e-7


def test_normal_quantile_against_oracle():
    assert abs(normal_quantile(0.975) - Q_0975) <= 1e-6
    assert normal_quantile(0.5) == 0.0
    for p in (1e-9, 0.01, 0.3, 0.77, 1 - 1e-9):
        assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-7


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_normal_quantile_rejects_endpoints(p):
    with pytest.raises(ValueError):
        normal_quantile(p)


def test_p_values_examples():
    one, two = p_values(1.96, "two-sided")
    assert two == pytest.approx(0.0500, abs=1e-4)
    assert two == pytest.approx(2 * (1 - PHI_196), abs=1e-9)
    one, two = p_values(0.0, "greater")
    assert (one, two) == (0.5, 1.0)
    one, _ = p_values(1.645, "greater")
    assert one == pytest.approx(0.0500, abs=2e-4)
    one, _ = p_values(1.645, "less")
    assert one == pytest.approx(PHI_1645, abs=1e-7)
    with pytest.raises(ValueError):
        p_values(float("inf"))


def test_two_sample_hand_example():
    r = two_sample_test([1, 2], [3, 4], BandwidthConfig(0, 0))
    assert r.u_stat == 1.0
    assert r.v_n == 0.0
    assert r.t_stat is None and r.p_one_sided is None and r.p_two_sided is None
    assert r.warnings == [NONPOSITIVE_VARIANCE]
    assert not r.defined and r.reject() is None


def test_two_sample_identical_constants():
    r = two_sample_test([2.0, 2.0, 2.0], [2.0, 2.0])
    assert r.u_stat == 0.0
    assert TIES in r.warnings
    r = two_sample_test([2.0, 2.0, 2.0], [2.0, 2.0], BandwidthConfig(ties="half-weight"))
    assert r.u_stat == 0.5
    assert TIES not in r.warnings


def test_two_sample_lag_preconditions():
    with pytest.raises(ValueError):
        two_sample_test([1, 2], [3, 4, 5], BandwidthConfig(a_lag=2))
    with pytest.raises(ValueError):
        two_sample_test([1, 2], [3, 4, 5], BandwidthConfig(b_lag=3))
    with pytest.raises(ValueError):
        two_sample_test([], [3.0])


def test_two_sample_iid_null_variance():
    ts = []
    for t in range(1000):
        x = gen_iid_normal(500, 0.0, 1.0, RngContract(314, 2 * t))
        y = gen_iid_normal(500, 0.0, 1.0, RngContract(314, 2 * t + 1))
        ts.append(two_sample_test(x, y).t_stat)
    assert 0.85 <= np.var(ts, ddof=1) <= 1.15


def test_one_sample_examples():
    r = one_sample_test([0.7], KnownDistribution.normal(0.7, 1.0))
    assert r.u_stat == 0.5
    assert r.t_stat is None and NONPOSITIVE_VARIANCE in r.warnings
    assert r.m == 0

    x = gen_iid_uniform(1000, 0.0, 1.0, RngContract(8, 0))
    r = one_sample_test(x, KnownDistribution.uniform(0.0, 1.0))
    assert r.v_n == pytest.approx(1 / 12, abs=0.01)

    shifted = gen_iid_normal(400, 50.0, 1.0, RngContract(8, 1))
    r = one_sample_test(shifted, KnownDistribution.normal(0.0, 1.0), alternative="greater")
    assert r.u_stat < 1e-12
    # H(X_i) is essentially constant at 0, so v_n collapses; only a
    # non-degenerate reference keeps the statistic defined
    r = one_sample_test(gen_iid_normal(400, 3.0, 1.0, RngContract(8, 2)), KnownDistribution.normal(0.0, 1.0))
    assert r.t_stat < -10
    assert r.p_one_sided > 0.999

    with pytest.raises(ValueError):
        one_sample_test([0.1, 0.2], KnownDistribution.uniform(), a_lag=2)


def test_known_distribution():
    d = KnownDistribution.parse("normal:0,1")
    assert d == KnownDistribution.normal()
    assert KnownDistribution.parse(d.to_text()) == d
    assert d.survival(-40.0) == 1.0 and d.survival(40.0) == 0.0
    u = KnownDistribution.parse("uniform:2,4")
    assert u.survival([1.0, 3.0, 5.0]).tolist() == [1.0, 0.5, 0.0]
    grid = np.linspace(-10, 10, 201)
    assert np.all(np.diff(d.survival(grid)) <= 0)
    for bad in ("normal:0,0", "uniform:1,1", "cauchy:0,1", "normal:0", "normal:a,b", "normal:nan,1"):
        with pytest.raises(ValueError):
            KnownDistribution.parse(bad)


def test_adjacent_examples():
    r = adjacent_test([1, 2, 3, 4], 2)
    assert r.u_stat == compute_u([1, 2], [3, 4]) == 1.0
    for bad in (0, 4, -1):
        with pytest.raises(ValueError):
            adjacent_test([1, 2, 3, 4], bad)


def test_adjacent_matches_two_sample(rng):
    x = rng.normal(size=300)
    y = rng.normal(size=200)
    bw = BandwidthConfig(3, 2, alternative="two-sided")
    assert adjacent_test(np.concatenate([x, y]), 300, bw).to_dict() | {"design": "two-sample"} == (
        two_sample_test(x, y, bw).to_dict()
    )


distinct_pairs = st.integers(2, 25).flatmap(
    lambda n: st.lists(st.integers(-10_000, 10_000), min_size=2 * n, max_size=2 * n, unique=True)
)


@settings(max_examples=100)
@given(distinct_pairs, st.integers(0, 1), st.integers(0, 1))
def test_antisymmetry(values, a, b):
    half = len(values) // 2
    x, y = np.array(values[:half], float), np.array(values[half:], float)
    r1 = two_sample_test(x, y, BandwidthConfig(a, b))
    r2 = two_sample_test(y, x, BandwidthConfig(b, a))
    assert r1.u_stat == pytest.approx(1 - r2.u_stat, abs=1e-12)
    assert r1.v_n == pytest.approx(r2.v_n, abs=1e-12)
    if r1.defined:
        assert r1.t_stat == pytest.approx(-r2.t_stat, abs=1e-10)


@settings(max_examples=100)
@given(distinct_pairs, st.integers(0, 1))
def test_monotone_invariance(values, a):
    half = len(values) // 2
    x, y = np.array(values[:half], float), np.array(values[half:], float)
    g = lambda v: np.arctan(v / 3000.0) * 7 + 1  # noqa: E731
    r1 = two_sample_test(x, y, BandwidthConfig(a, a))
    r2 = two_sample_test(g(x), g(y), BandwidthConfig(a, a))
    assert (r1.u_stat, r1.v_n, r1.t_stat) == (r2.u_stat, r2.v_n, r2.t_stat)


@settings(max_examples=150)
@given(
    st.lists(st.integers(0, 12), min_size=1, max_size=30),
    st.lists(st.integers(0, 12), min_size=1, max_size=30),
    st.sampled_from(["greater", "less", "two-sided"]),
    st.sampled_from(["strict", "half-weight"]),
)
def test_report_invariants(x, y, alternative, ties):
    r = two_sample_test(np.array(x, float), np.array(y, float), BandwidthConfig(ties=ties, alternative=alternative))
    assert 0.0 <= r.u_stat <= 1.0
    if r.v_n > 0:
        assert r.t_stat == pytest.approx(math.sqrt(r.n) * (r.u_stat - 0.5) / math.sqrt(r.v_n), rel=1e-12, abs=1e-12)
        assert r.p_two_sided == pytest.approx(2 * (1 - normal_cdf(abs(r.t_stat))), abs=1e-12)
        assert 0 <= r.p_one_sided <= 1 and 0 <= r.p_two_sided <= 1
        if alternative == "greater" and r.t_stat >= 0:
            assert r.p_two_sided >= r.p_one_sided
        assert NONPOSITIVE_VARIANCE not in r.warnings
    else:
        assert r.t_stat is None and r.p_one_sided is None and r.p_two_sided is None
        assert NONPOSITIVE_VARIANCE in r.warnings


def test_report_dict_round_trip():
    r = two_sample_test([0.1, 0.5, 0.3], [0.2, 0.9, 0.4], BandwidthConfig(1, 1))
    assert type(r).from_dict(r.to_dict()) == r
