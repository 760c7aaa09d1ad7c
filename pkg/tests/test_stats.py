import cmath
import itertools
import json
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from klpaths.arith import DomainError, field_context
from klpaths.families import Kind, SumFamily, partial_sum_vector, path_eval
from klpaths.limit_series import beta
from klpaths.sato_tate import SatoTateSampler, joint_moment
from klpaths.stats import (
    Empirical,
    Expansion,
    FourthMomentVariant,
    IntervalSpec,
    MomentSpec,
    MonteCarlo,
    Simulated,
    StatRecord,
    empirical_mixed_moment,
    energy_counts,
    expansion_moment,
    fourth_moment_count,
    fourth_moment_count_exhaustive,
    kloosterman2_fourth_moment_from_counts,
    ks_distance,
    loglog_slope,
    main_term,
    short_sum_moment,
    sums_of_products,
    sup_norm_samples,
    sup_norm_tail,
    tail_from_samples,
    theoretical_mixed_moment,
)
from klpaths.limit_series import SeriesConfig


def kl(a, p):
    return sum(cmath.exp(2j * math.pi * ((a * x + pow(x, -1, p)) % p) / p) for x in range(1, p)) / math.sqrt(p)


# -- moment specs ------------------------------------------------------------


def test_moment_spec_validation_and_parsing():
    s = MomentSpec.parse("0.25:1,0; 0.5:2,1")
    assert s.points == ((0.25, 1, 0), (0.5, 2, 1))
    assert (s.n, s.m, s.degree) == (3, 1, 4)
    with pytest.raises(ValueError):
        MomentSpec(((0.5, 1, 0), (0.5, 0, 1)))
    with pytest.raises(ValueError):
        MomentSpec(((1.5, 1, 0),))
    with pytest.raises(ValueError):
        MomentSpec(((0.5, -1, 0),))


# -- empirical moments -------------------------------------------------------


def test_empirical_moment_examples():
    ctx = field_context(5)
    v = empirical_mixed_moment(Kind.KLOOSTERMAN, ctx, MomentSpec(((1.0, 1, 0),)))
    assert abs(v - (1 / math.sqrt(5)) / 4) < 1e-12
    assert abs(v - (-kl(0, 5) / 4)) < 1e-12
    for kind in Kind:
        assert empirical_mixed_moment(kind, field_context(11), MomentSpec(((0.0, 2, 1),))) == 0
    assert empirical_mixed_moment(Kind.BIRCH, ctx, MomentSpec(((0.5, 0, 0),))) == 1


def test_empirical_moment_against_direct_paths():
    p = 31
    ctx = field_context(p)
    spec = MomentSpec(((0.2, 1, 0), (0.6, 1, 2)))
    for kind in (Kind.KLOOSTERMAN, Kind.BIRCH):
        acc = 0j
        for a in range(1, p):
            path = partial_sum_vector(SumFamily(kind, a), ctx)
            z1, z2 = path_eval(path, 0.2), path_eval(path, 0.6)
            acc += z1 * z2 * z2.conjugate() ** 2
        assert abs(empirical_mixed_moment(kind, ctx, spec) - acc / (p - 1)) < 1e-12


def test_second_moment_at_large_prime(kloosterman_values):
    p = 10007
    z = kloosterman_values[p]
    v = empirical_mixed_moment(Kind.KLOOSTERMAN, field_context(p), MomentSpec(((1.0, 1, 1),)))
    assert abs(v - 1) <= 10 * p**-0.5 * math.log(p) ** 2
    assert abs(v - 1) < 0.01
    assert abs(np.mean(np.abs(z[0.5]) ** 2) - 0.5) < 0.01


# -- theoretical moments -----------------------------------------------------


def literal_expansion(spec, H):
    hs = range(-(H - 1), H)
    slots = []
    for t, n, m in spec.points:
        slots += [(t, False)] * n + [(t, True)] * m
    total = 0j
    for tup in itertools.product(hs, repeat=len(slots)):
        c = 1 + 0j
        for (t, conj), h in zip(slots, tup):
            b = beta(h, t)
            c *= b.conjugate() if conj else b
        if c:
            total += c * joint_moment(Counter(tup))
    return total


@pytest.mark.parametrize(
    "points",
    [
        ((0.5, 1, 1),),
        ((0.75, 2, 0),),
        ((0.3, 2, 2),),
        ((0.2, 1, 1), (0.7, 1, 1)),
        ((0.1, 1, 0), (0.4, 2, 1)),
        ((0.6, 3, 0),),
        ((0.9, 4, 0),),
    ],
)
def test_grouped_expansion_equals_literal_expansion(points):
    spec = MomentSpec(points)
    H = 4
    assert abs(expansion_moment(spec, H).value - literal_expansion(spec, H)) < 1e-12


@pytest.mark.parametrize("t", [0.1, 0.5, 0.8])
def test_expansion_examples(t):
    one = theoretical_mixed_moment(MomentSpec(((t, 1, 0),)))
    assert abs(one.value) < 1e-12
    est = theoretical_mixed_moment(MomentSpec(((t, 1, 1),)))
    assert abs(est.value - t) <= 1e-4
    assert abs(est.value - t) <= est.error
    est = theoretical_mixed_moment(MomentSpec(((0.75, 2, 0),)))
    assert abs(est.value - 0.5) <= 1e-3


def test_expansion_fourth_moment_against_monte_carlo():
    spec = MomentSpec(((0.5, 2, 2),))
    ex = theoretical_mixed_moment(spec, Expansion(2000))
    mc = theoretical_mixed_moment(spec, MonteCarlo(20000, 300, seed=3))
    assert abs(ex.value - mc.value) <= 5 * mc.error + 0.02
    with pytest.raises(ValueError):
        expansion_moment(MomentSpec(((0.5, 3, 2),)))
    assert expansion_moment(MomentSpec(((0.5, 0, 0),))).value == 1


def test_monte_carlo_second_moment():
    mc = theoretical_mixed_moment(MomentSpec(((0.5, 1, 1),)), MonteCarlo(20000, 200, seed=1))
    assert abs(mc.value - 0.5) <= 5 * mc.error + 2 / (math.pi**2 * 199)
    again = theoretical_mixed_moment(MomentSpec(((0.5, 1, 1),)), MonteCarlo(20000, 200, seed=1))
    assert again == mc


# -- sums of products --------------------------------------------------------


def test_sums_of_products_examples():
    p = 5
    v = sums_of_products(p, [-1])
    assert abs(v - (-kl(1, p) / (p - 1))) < 1e-12
    assert abs(v - (-0.042705)) < 1e-6
    assert sums_of_products(p, {3: 0}) == 1
    assert main_term([0, 0, 1, 1], 101) == 1
    assert main_term([0, 0, 0, 0], 101) == 2
    assert main_term([0, 1], 101) == 0
    assert main_term([0, 101], 101) == 1


def test_sums_of_products_direct():
    p = 23
    direct = np.mean([kl((a - 2) % p, p) ** 2 * kl((a + 1) % p, p) if (a - 2) % p and (a + 1) % p else
                      (kl((a - 2) % p, p) if (a - 2) % p else -1 / math.sqrt(p)) ** 2
                      * (kl((a + 1) % p, p) if (a + 1) % p else -1 / math.sqrt(p))
                      for a in range(1, p)])
    assert abs(sums_of_products(p, {2: 2, -1: 1}) - direct) < 1e-12


@pytest.mark.parametrize("p", [101, 499, 1009])
def test_sums_of_products_main_terms(p, calibration):
    c = calibration["frozen"]["katz_constant"]
    assert abs(sums_of_products(p, {7: 2}) - 1) <= c / math.sqrt(p)
    assert abs(sums_of_products(p, {7: 1, 9: 1})) <= c / math.sqrt(p)


def test_katz_constants_do_not_grow(calibration):
    frozen = calibration["frozen"]
    for key, cap in (("katz_scaled_error", "katz_constant"), ("katz_scaled_error_birch", "katz_constant_birch")):
        errs = calibration[key]
        assert set(errs) == {"101", "199", "499", "1009"}
        assert max(errs.values()) <= frozen[cap]


# -- distances ---------------------------------------------------------------


def test_ks_examples():
    x = np.random.default_rng(0).normal(size=500)
    assert ks_distance(x, x) == 0
    assert ks_distance([0, 0, 0], [1, 1, 1]) == 1
    with pytest.raises(ValueError):
        ks_distance([], [1.0])


@settings(max_examples=60)
@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=40),
    st.lists(st.integers(-5, 5), min_size=1, max_size=40),
)
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_ks_against_scipy(a, b):
    assert ks_distance(a, b) == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_two_sato_tate_samples():
    a = SatoTateSampler(1).sample_n(10**5)
    b = SatoTateSampler(2).sample_n(10**5)
    assert ks_distance(a, b) <= 0.01


# -- tails -------------------------------------------------------------------


def test_tail_basics():
    t = tail_from_samples(np.array([0.5, 1.0, 2.0, 3.0]), [0.0, 1.0, 2.5])
    assert t.probabilities == [1.0, 0.75, 0.25]
    assert t.exceedances == [4, 3, 1]
    with pytest.raises(ValueError):
        tail_from_samples(np.ones(3), [1.0, 0.5])


def test_birch_tails_are_monotone(birch_sups_1009):
    ths = [0.0, 0.5, 1.0, 1.5, 2.1, 2.5, 3.0]
    est = tail_from_samples(birch_sups_1009, ths)
    assert est.samples == 1008  # a ranges over the units
    assert est.probabilities[0] == 1
    assert all(0 <= q <= 1 for q in est.probabilities)
    assert all(b <= a for a, b in zip(est.probabilities, est.probabilities[1:]))


def test_simulated_tails_reproducible():
    src = Simulated(SeriesConfig.uniform(64, 128), 600, seed=8)
    a = sup_norm_tail(src, [0.5, 1.0, 2.0])
    b = sup_norm_tail(src, [0.5, 1.0, 2.0], workers=2)
    assert a == b
    assert all(y <= x for x, y in zip(a.probabilities, a.probabilities[1:]))


def test_empirical_sups_match_paths():
    p = 101
    sups = sup_norm_samples(Empirical(Kind.KLOOSTERMAN, p))
    path = partial_sum_vector(SumFamily(Kind.KLOOSTERMAN, 17), field_context(p))
    assert sups[16] == pytest.approx(np.max(np.abs(path.vertices)), abs=1e-15)


# -- short sums --------------------------------------------------------------


def test_short_sum_examples():
    ctx = field_context(101)
    assert short_sum_moment(Kind.KLOOSTERMAN, ctx, IntervalSpec(5, 0), 4) == 0
    with pytest.raises(ValueError):
        short_sum_moment(Kind.KLOOSTERMAN, ctx, IntervalSpec(5, 3), 3)
    with pytest.raises(DomainError):
        short_sum_moment(Kind.KLOOSTERMAN, ctx, IntervalSpec(0, 3), 2)
    with pytest.raises(DomainError):
        short_sum_moment(Kind.KLOOSTERMAN, ctx, IntervalSpec(99, 5), 2)
    short_sum_moment(Kind.BIRCH, ctx, IntervalSpec(0, 3), 2)


def test_short_sum_against_direct():
    p = 13
    ctx = field_context(p)
    I = IntervalSpec(2, 4)
    acc = 0.0
    for al in range(1, p):
        for a in range(1, p):
            s = sum(cmath.exp(2j * math.pi * ((a * x + al * pow(x, -1, p)) % p) / p) for x in range(2, 6))
            acc += abs(s / math.sqrt(p)) ** 6
    assert short_sum_moment(Kind.KLOOSTERMAN2, ctx, I, 6) == pytest.approx(acc / (p - 1) ** 2, rel=1e-12)


@pytest.mark.parametrize("p,start,length", [(13, 1, 5), (101, 3, 11), (211, 20, 15), (211, 1, 210)])
def test_two_parameter_fourth_moment_identity(p, start, length):
    I = IntervalSpec(start, length)
    direct = short_sum_moment(Kind.KLOOSTERMAN2, field_context(p), I, 4)
    assert abs(direct - kloosterman2_fourth_moment_from_counts(p, I)) <= 1e-8 * max(1.0, direct)


def test_birch_short_sum_exponent(calibration):
    p = 1009
    length = math.isqrt(p - 1) + 1
    assert length == math.ceil(math.sqrt(p))
    val = short_sum_moment(Kind.BIRCH, field_context(p), IntervalSpec(1, length), 8)
    rec = calibration["birch_short_sum"]
    assert val == pytest.approx(rec["value"], rel=1e-9)
    delta2 = calibration["frozen"]["birch_delta2"]
    assert delta2 > 0
    assert val <= p ** (-0.5 - delta2)


# -- fourth-moment counts ----------------------------------------------------


def test_count_examples():
    assert fourth_moment_count(7, IntervalSpec(1, 2)) == 6
    assert fourth_moment_count_exhaustive(7, IntervalSpec(1, 2)) == 6
    for p in (7, 101):
        for v in FourthMomentVariant:
            assert fourth_moment_count(p, IntervalSpec(3, 1), v) == 1
    with pytest.raises(DomainError):
        fourth_moment_count(7, IntervalSpec(5, 3))
    with pytest.raises(ValueError):
        fourth_moment_count(7, IntervalSpec(1, 0))


def test_count_bound_at_211():
    p = 211
    length = math.ceil(math.sqrt(p))
    n = fourth_moment_count(p, IntervalSpec(1, length))
    assert 2 * length**2 - length <= n <= 3 * length**2


@pytest.mark.parametrize("p", [11, 13, 101])
def test_hashed_count_equals_exhaustive(p):
    lengths = range(1, 13) if p > 13 else range(1, min(12, p - 1) + 1)
    for length in lengths:
        starts = range(1, p - length + 1) if p <= 13 else (1, 7, 50, p - length)
        for start in starts:
            I = IntervalSpec(start, length)
            for v in FourthMomentVariant:
                assert fourth_moment_count(p, I, v) == fourth_moment_count_exhaustive(p, I, v)


def test_energy_counts_consistency():
    c = energy_counts(101, IntervalSpec(4, 9))
    assert c["both"] <= min(c["sum"], c["inverse"])
    assert c["sum"] == sum(
        1 for q in itertools.product(range(4, 13), repeat=4) if (q[0] + q[1] - q[2] - q[3]) % 101 == 0
    )


def test_loglog_slope():
    xs = [10, 100, 1000]
    assert loglog_slope(xs, [3 * x**-0.5 for x in xs]) == pytest.approx(-0.5)


# -- records -----------------------------------------------------------------


def test_stat_record_json():
    rec = StatRecord("moment", "kloosterman", 101, {"t": 0.5}, 0.25 + 0.5j, 1e-3, seed=4)
    d = json.loads(rec.to_json())
    assert d["value"] == {"re": 0.25, "im": 0.5}
    assert d["statistic"] == "moment"
    assert d["version"]
    assert rec.to_json() == rec.to_json()


def test_ks_distance_shrinks_with_p(kloosterman_values, simulated_half):
    d = [ks_distance(kloosterman_values[p][0.5].real, simulated_half.real) for p in (101, 1009, 10007)]
    assert d[0] > d[1] > d[2]


@pytest.mark.parametrize("p", [1009, 10007])
def test_empirical_variance_tracks_t(p, kloosterman_values):
    for t, z in kloosterman_values[p].items():
        assert abs(np.mean(np.abs(z) ** 2) - t) <= 10 * p**-0.5 * math.log(p) ** 2
