import math
import threading

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rumour import _kernels
from rumour.distributions import (
    BSequence,
    CriticalTail,
    FiniteTable,
    Geometric,
    PowerLaw,
    as_schedule,
    catalog,
    distribution_from_spec,
    make_example_schedule,
    make_power_law,
    mean,
    point_mass,
    sample,
    strict_cdf,
    tail,
)

SIX_OVER_PI2 = 6 / math.pi**2
HALF = FiniteTable({0: 0.5, 1: 0.5})
LOG_HARMONIC = BSequence("log_harmonic", 1.0)


def _zeta_by_summation(alpha, N=2000):
    # independent oracle: direct partial sum plus Euler-Maclaurin remainder at high precision
    with mpmath.workdps(40):
        a = mpmath.mpf(alpha)
        head = mpmath.fsum(mpmath.mpf(j) ** -a for j in range(1, N))
        n = mpmath.mpf(N)
        rem = (n ** (1 - a) / (a - 1) + n ** -a / 2 + a * n ** (-a - 1) / 12
               - a * (a + 1) * (a + 2) * n ** (-a - 3) / 720)
        return head + rem


def _power_tail_oracle(alpha, k):
    # P(R >= k) = Z * sum_{j > k} j^-alpha
    return float(mpmath.zeta(alpha, k + 1) / _zeta_by_summation(alpha))


# --- power law ---------------------------------------------------------------


def test_power_law_normalization_alpha2():
    d = make_power_law(2.0)
    assert d.Z == pytest.approx(float(1 / _zeta_by_summation(2)), abs=1e-12)
    assert d.Z == pytest.approx(SIX_OVER_PI2, abs=1e-12)
    assert d.pmf(0) == pytest.approx(SIX_OVER_PI2, abs=1e-12)


@pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0, 2.5, 3.0, 4.7])
def test_power_law_tail_matches_oracle(alpha):
    d = PowerLaw(alpha)
    for k in [0, 1, 2, 5, 10, 100, 10**4, 10**6]:
        assert d.tail(k) == pytest.approx(_power_tail_oracle(alpha, k), rel=1e-10, abs=1e-12)


def test_power_law_examples():
    d = PowerLaw(2.0)
    assert tail(d, 1) == pytest.approx(1 - SIX_OVER_PI2, abs=1e-12)
    assert strict_cdf(d, 1) == pytest.approx(SIX_OVER_PI2, abs=1e-12)
    assert sample(d, 0.607) == 0
    assert sample(d, 0.608) == 1


@pytest.mark.parametrize("alpha", [1.0, 0.5, -2.0, float("nan")])
def test_power_law_rejects_nonnormalizable(alpha):
    with pytest.raises(ValueError):
        make_power_law(alpha)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 2.5])
def test_power_law_integral_bracket(alpha):
    d = PowerLaw(alpha)
    n = np.arange(1, 10**4 + 1)
    t = np.asarray(d.tail(n))
    lo = d.Z / ((alpha - 1) * (n + 1.0) ** (alpha - 1))
    hi = d.Z / ((alpha - 1) * n.astype(float) ** (alpha - 1))
    assert np.all(lo <= t * (1 + 1e-12))
    assert np.all(t <= hi * (1 + 1e-12))


def test_alpha2_limit_anchor():
    n = 10**4
    assert abs(n * PowerLaw(2.0).tail(n) - SIX_OVER_PI2) <= 1e-3


def test_power_law_mean():
    assert mean(PowerLaw(2.0)) == math.inf
    assert mean(PowerLaw(1.5)) == math.inf
    m3 = mean(PowerLaw(3.0))
    # E[R] = sum_k k Z/(k+1)^3 = Z (zeta(2) - zeta(3))
    oracle = float((mpmath.pi**2 / 6 - _zeta_by_summation(3)) / _zeta_by_summation(3))
    assert m3 == pytest.approx(oracle, abs=1e-9)


# --- other catalog laws -----------------------------------------------------------


def test_geometric_tail():
    assert tail(Geometric(0.5), 3) == 0.125
    assert mean(Geometric(0.5)) == pytest.approx(1.0)


def test_finite_table_examples():
    assert strict_cdf(HALF, 1) == 0.5
    assert strict_cdf(HALF, 2) == 1.0
    assert strict_cdf(HALF, 1.5) == 1.0
    assert mean(HALF) == 0.5
    assert sample(HALF, 0.25) == 0
    assert sample(HALF, 0.75) == 1
    assert sample(HALF, 0.5) == 0


def test_finite_table_validation():
    with pytest.raises(ValueError):
        FiniteTable({0: 0.5, 1: 0.6})
    with pytest.raises(ValueError):
        FiniteTable({-1: 1.0})
    with pytest.raises(ValueError):
        FiniteTable({0: -0.1, 1: 1.1})
    assert FiniteTable({"0": 0.25, "3": 0.75}) == FiniteTable({0: 0.25, 3: 0.75})


def test_critical_tail_law():
    d = CriticalTail()
    n = np.arange(1, 1000)
    np.testing.assert_allclose(d.tail(n), 1 / (n + 1.0), rtol=1e-14)
    assert d.strict_cdf(1) == 0.5
    assert mean(d) == math.inf


@pytest.mark.parametrize("dist", catalog(), ids=lambda d: d.label)
def test_zero_tail_is_one(dist):
    assert tail(dist, 0) == 1.0


@pytest.mark.parametrize("dist", catalog(), ids=lambda d: d.label)
def test_pmf_tail_consistency(dist):
    k = np.arange(0, 10**4 + 1)
    t = np.asarray(dist.tail(k))
    assert np.all(np.diff(t) <= 0)
    assert np.all((t >= 0) & (t <= 1))
    np.testing.assert_allclose(dist.pmf(k), t - np.asarray(dist.tail(k + 1)), atol=1e-12)
    np.testing.assert_allclose(np.asarray(dist.strict_cdf(k)) + t, 1.0, atol=1e-15)


@pytest.mark.parametrize("dist", catalog(), ids=lambda d: d.label)
def test_pmf_sums_to_one(dist):
    k = np.arange(0, 10**6)
    total = math.fsum(np.asarray(dist.pmf(k)).tolist()) + float(dist.tail(10**6))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_strict_cdf_rejects_negative():
    with pytest.raises(ValueError):
        strict_cdf(HALF, -0.5)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_sample_rejects_out_of_range(u):
    with pytest.raises(ValueError):
        sample(HALF, u)


def test_sampling_frequencies_scalar_path():
    d = PowerLaw(1.5)
    u = _kernels.uniforms(np.uint64(11), 0, 10**6)
    r = np.array([d.sample(x) for x in u])
    for k in (1, 2, 5, 10):
        p = float(d.tail(k))
        assert abs((r >= k).mean() - p) <= 4 * math.sqrt(p * (1 - p) / r.size)


@pytest.mark.parametrize("dist", catalog(), ids=lambda d: d.label)
def test_sampling_frequencies_table_path(dist):
    u = _kernels.uniforms(np.uint64(12), 1, 10**6)
    r = np.searchsorted(dist.cdf_table(64), u)
    for k in (1, 2, 5, 10):
        p = float(dist.tail(k))
        assert abs((r >= k).mean() - p) <= 4 * math.sqrt(max(p * (1 - p), 1e-300) / r.size)


def test_sample_is_smallest_quantile_deep_tail():
    d = PowerLaw(1.5)
    for u in (0.9, 0.999, 1 - 1e-6, 1 - 1e-9):
        k = d.sample(u)
        assert d.cdf(k) >= u
        assert k == 0 or d.cdf(k - 1) < u


def test_sample_clamps_beyond_max_radius():
    from rumour.distributions import MAX_RADIUS

    assert PowerLaw(1.2).sample(1 - 2**-52) == MAX_RADIUS


def test_capped_sample():
    d = PowerLaw(1.5)
    u = 0.99999
    assert d.sample_capped(u, 10) == min(d.sample(u), 10)


def test_concurrent_sampling_matches_serial():
    u = _kernels.uniforms(np.uint64(3), 0, 5000)
    reference = PowerLaw(1.3)
    serial = [reference.sample(x) for x in u]
    shared = PowerLaw(1.3)
    results = [None] * 8

    def work(i):
        results[i] = [shared.sample(x) for x in u[::-1]][::-1]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == serial for r in results)


@settings(max_examples=200, deadline=None)
@given(
    weights=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6),
    u=st.floats(1e-12, 1 - 1e-12),
)
def test_finite_inverse_cdf_property(weights, u):
    total = sum(weights)
    d = FiniteTable({i: w / total for i, w in enumerate(weights)})
    k = d.sample(u)
    assert d.cdf(k) >= u
    assert k == 0 or d.cdf(k - 1) < u


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(1.05, 6.0), k=st.integers(0, 10**5))
def test_power_law_tail_property(alpha, k):
    d = PowerLaw(alpha)
    assert 0.0 <= d.tail(k + 1) <= d.tail(k) <= 1.0
    assert d.strict_cdf(k) + d.tail(k) == pytest.approx(1.0, abs=1e-15)


# --- b sequences and example schedules ------------------------------------------------------


def test_log_harmonic_b0():
    assert LOG_HARMONIC(0) == pytest.approx(1 / (2 * math.log(2)), abs=1e-15)
    assert LOG_HARMONIC(0) == pytest.approx(0.7213, abs=1e-4)


def test_b_sequence_validation():
    with pytest.raises(ValueError):
        BSequence("user_table", table=(0.5, 0.6))
    with pytest.raises(ValueError):
        BSequence("user_table", table=(1.0, 0.5))
    with pytest.raises(ValueError):
        BSequence("log_harmonic", 2.0)  # b_0 >= 1
    with pytest.raises(ValueError):
        BSequence("nonsense", 1.0)
    b = BSequence("user_table", table=(0.5, 0.25, 0.1))
    assert b(1) == 0.25 and b(10) == 0.0
    assert b.summable


def test_b_family_summability():
    assert not LOG_HARMONIC.summable
    assert BSequence("inverse_square", 1.0).summable


def test_ex41_tails():
    s = make_example_schedule("ex41", LOG_HARMONIC)
    for n in (0, 1, 5, 50):
        assert s.tail(n, 1) == pytest.approx(LOG_HARMONIC(n), rel=1e-14)
        for j in (2, 3, 10):
            assert s.tail(n, j) == pytest.approx(LOG_HARMONIC(n + j - 1), rel=1e-14)
        law = s.law(n)
        assert law.pmf(0) == pytest.approx(1 - LOG_HARMONIC(n))
        assert law.pmf(2) == pytest.approx(LOG_HARMONIC(n + 1) - LOG_HARMONIC(n + 2))


def test_ex42_and_ex43_laws():
    s42 = make_example_schedule("ex42", LOG_HARMONIC)
    assert s42.law(3).pmf(0) == pytest.approx(LOG_HARMONIC(3))
    assert s42.law(3).pmf(1) == pytest.approx(1 - LOG_HARMONIC(3))
    s43 = make_example_schedule("ex43", LOG_HARMONIC)
    assert s43.law(0).pmf(0) == 1.0
    assert s43.law(7).pmf(7) == pytest.approx(LOG_HARMONIC(7))
    assert s43.law(7).pmf(0) == pytest.approx(1 - LOG_HARMONIC(7))
    assert s43.law(7).tail(8) == 0.0


def test_example_member_mean():
    s41 = make_example_schedule("ex41", LOG_HARMONIC)
    assert s41.law(4).mean() == math.inf
    s41s = make_example_schedule("ex41", BSequence("inverse_square", 1.0))
    # E[R_n] = sum_{j>=1} b_{n+j-1}
    b = BSequence("inverse_square", 1.0)
    oracle = float(mpmath.pi**2 / 6 - mpmath.fsum(1 / mpmath.mpf(i) ** 2 for i in range(1, 6)))
    assert s41s.law(4).mean() == pytest.approx(oracle, rel=1e-9)
    assert b(0) == 0.25


def test_schedule_is_deterministic():
    s = make_example_schedule("ex41", LOG_HARMONIC)
    assert s.law(12) is s.law(12) or s.law(12) == s.law(12)
    h = as_schedule(PowerLaw(2.0))
    assert h.law(0) == h.law(10**6)


@pytest.mark.parametrize("dist", catalog() + [point_mass(3)], ids=lambda d: d.label)
def test_spec_round_trip(dist):
    assert distribution_from_spec(dist.to_spec()) == dist


def test_schedule_spec_round_trip():
    spec = {"kind": "schedule", "example": "ex43", "b": {"family": "log_harmonic", "c": 1.0}}
    s = distribution_from_spec(spec)
    assert s.to_spec() == spec


def test_unknown_spec_kind():
    with pytest.raises(ValueError):
        distribution_from_spec({"kind": "lognormal"})
