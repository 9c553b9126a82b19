import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from clt_bounds.dists import FiniteLattice, Rademacher, UniformSymmetric
from clt_bounds.errors import ResourceError
from clt_bounds.limitlaws import LimitLaw
from clt_bounds.randomsums import (
    CountingLaw,
    LatticeDistribution,
    Scenario,
    counting_pmf,
    counting_pmf_array,
    dkw_margin,
    exact_random_sum,
    exact_sum_hetero,
    kolmogorov_distance_exact,
    kolmogorov_distance_sample,
    lemma6_check,
    pig_pmf_quadrature,
    sample_random_sum,
    truncation_point,
    verify_bound,
)
from clt_bounds.specfun import std_normal_cdf

R = Rademacher()
THREE = FiniteLattice(((-2, 0.25), (0, 0.5), (2, 0.25)))
NORMAL = LimitLaw("normal")


# -- counting laws ----------------------------------------------------------


def test_geometric_pmf():
    for k in range(40):
        assert counting_pmf(CountingLaw.geometric(1.0), k) == pytest.approx(0.5 ** (k + 1), rel=1e-14)


def test_negative_binomial_r1_is_geometric():
    for n in (0.3, 4.0, 75.0):
        a = counting_pmf_array(CountingLaw.negative_binomial(1.0, n), 50)
        b = counting_pmf_array(CountingLaw.geometric(n), 50)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_negative_binomial_closed_form():
    r, n = 2.7, 6.0
    for k in (0, 1, 5, 30):
        direct = math.exp(math.lgamma(r + k) - math.lgamma(r) - math.lgamma(k + 1)) * (1 / (1 + n)) ** r * (n / (1 + n)) ** k
        assert counting_pmf(CountingLaw.negative_binomial(r, n), k) == pytest.approx(direct, rel=1e-12)


def test_poisson_and_binomial_pmf():
    assert counting_pmf(CountingLaw.poisson(3.5), 0) == pytest.approx(math.exp(-3.5), rel=1e-15)
    ks = np.arange(30)
    assert np.allclose(counting_pmf_array(CountingLaw.poisson(7.0), 29), stats.poisson.pmf(ks, 7.0), rtol=1e-12, atol=0)
    assert np.allclose(counting_pmf_array(CountingLaw.binomial(12, 0.3), 12), stats.binom.pmf(np.arange(13), 12, 0.3), atol=1e-15)


def test_poisson_binomial_pmf_dp():
    p = [0.2, 0.9, 0.5, 0.7]
    # brute force over the 16 outcomes
    brute = np.zeros(5)
    for bits in range(16):
        prob = 1.0
        for j, pj in enumerate(p):
            prob *= pj if bits >> j & 1 else 1 - pj
        brute[bin(bits).count("1")] += prob
    assert np.allclose(counting_pmf_array(CountingLaw.poisson_binomial(p), 4), brute, atol=1e-15)


@pytest.mark.parametrize("r,n", [(3.0, 5.0), (2.5, 40.0), (7.0, 1.0), (4.0, 300.0)])
def test_pig_two_routes(r, n):
    law = CountingLaw.poisson_inverse_gamma(r, n)
    arr = counting_pmf_array(law, 60)
    for k in (0, 1, 2, 7, 20, 60):
        assert abs(arr[k] - pig_pmf_quadrature(r, n, k)) <= 1e-10


def test_counting_means():
    for law, mean in [
        (CountingLaw.geometric(12.0), 12.0),
        (CountingLaw.negative_binomial(2.5, 4.0), 10.0),
        (CountingLaw.poisson(6.0), 6.0),
        (CountingLaw.binomial(9, 0.4), 3.6),
        (CountingLaw.poisson_inverse_gamma(14.0, 8.0), 8.0 / (14.0 - 2.0)),
    ]:
        K, pmf = truncation_point(law, 1e-12)
        assert float(np.dot(np.arange(K + 1), pmf)) == pytest.approx(mean, abs=1e-9)
        assert law.mean == pytest.approx(mean)


@pytest.mark.parametrize(
    "bad",
    [
        lambda: CountingLaw.poisson(0.0),
        lambda: CountingLaw.binomial(3, 1.5),
        lambda: CountingLaw.geometric(-1.0),
        lambda: CountingLaw.negative_binomial(0.0, 1.0),
        lambda: CountingLaw.poisson_binomial([]),
    ],
)
def test_counting_law_domain(bad):
    with pytest.raises(ValueError):
        bad()


# -- exact sums -------------------------------------------------------------


def test_exact_examples():
    s = exact_random_sum(R, CountingLaw.deterministic(2))
    assert s.as_dict(1e-300) == {-2.0: 0.25, 0.0: 0.5, 2.0: 0.25}
    b = exact_random_sum(R, CountingLaw.binomial(2, 1.0))
    assert b.as_dict(1e-300) == s.as_dict(1e-300)


def test_exact_poisson_atom_at_zero():
    s = exact_random_sum(R, CountingLaw.poisson(1.0), tail_tol=1e-12)
    assert s.step == 1.0
    direct = math.fsum(
        math.exp(-1) / math.factorial(k) * (math.comb(k, k // 2) / 2**k if k % 2 == 0 else 0.0) for k in range(80)
    )
    assert s.mass_at(0.0) == pytest.approx(direct, abs=1e-13)
    assert s.mass_at(0.0) >= math.exp(-1)


@pytest.mark.parametrize(
    "law",
    [CountingLaw.poisson(4.0), CountingLaw.geometric(3.0), CountingLaw.negative_binomial(2.0, 2.0), CountingLaw.poisson_inverse_gamma(30.0, 40.0)],
    ids=lambda law: law.describe(),
)
@pytest.mark.parametrize("tol", [1e-6, 1e-12])
def test_mass_deficit(law, tol):
    s = exact_random_sum(THREE, law, tail_tol=tol)
    assert s.deficit <= tol
    assert np.all(s.masses >= 0)


def test_hetero_sum():
    s = exact_sum_hetero([R, FiniteLattice(((-1, 0.25), (0, 0.5), (1, 0.25)))])
    assert s.as_dict(1e-300) == {-2.0: 0.125, -1.0: 0.25, 0.0: 0.25, 1.0: 0.25, 2.0: 0.125}
    with pytest.raises(TypeError):
        exact_sum_hetero([R, THREE])
    with pytest.raises(TypeError):
        exact_random_sum(UniformSymmetric(1.0), CountingLaw.poisson(1.0))


def test_resource_guard():
    with pytest.raises(ResourceError, match="Monte Carlo"):
        exact_random_sum(R, CountingLaw.poisson_inverse_gamma(2.5, 50.0))
    # tail ~ k^(-r/2): a 1e-12 cut is out of reach for r = 5 but fine at 1e-6
    with pytest.raises(ResourceError):
        exact_random_sum(THREE, CountingLaw.poisson_inverse_gamma(5.0, 4.0), tail_tol=1e-12)
    assert exact_random_sum(THREE, CountingLaw.poisson_inverse_gamma(5.0, 4.0), tail_tol=1e-6).deficit <= 1e-6
    with pytest.raises(ResourceError):
        exact_random_sum(R, CountingLaw.poisson(1e6))


# -- thinning identity ------------------------------------------------------


def test_lemma6_examples():
    assert lemma6_check(R, [0.3]) == 0.0
    s = exact_random_sum(R, CountingLaw.poisson_binomial([0.3]), tail_tol=0.0)
    assert s.as_dict(1e-300) == pytest.approx({-1.0: 0.15, 0.0: 0.7, 1.0: 0.15})
    assert lemma6_check(THREE, [1.0] * 4) <= 1e-15
    rng = np.random.default_rng(5)
    assert lemma6_check(THREE, list(rng.uniform(0, 1, 5))) <= 1e-12


def _symmetric(pairs, zero):
    total = 2 * sum(w for _, w in pairs) + zero
    atoms = [(float(v), w / total) for v, w in pairs] + [(-float(v), w / total) for v, w in pairs]
    if zero > 0:
        atoms.append((0.0, zero / total))
    return FiniteLattice(tuple(atoms))


lattice_summands = st.builds(
    _symmetric,
    st.lists(st.tuples(st.integers(1, 4), st.floats(0.05, 1.0)), min_size=1, max_size=3, unique_by=lambda t: t[0]),
    st.sampled_from([0.0, 0.3, 1.0]),
)


@settings(max_examples=100, deadline=None)
@given(lattice_summands, st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=8))
def test_lemma6_property(d, p):
    assert lemma6_check(d, p) <= 1e-12


# -- Kolmogorov distance ----------------------------------------------------


def test_kolmogorov_examples():
    s4 = exact_random_sum(R, CountingLaw.deterministic(4))
    assert kolmogorov_distance_exact(s4, NORMAL, 2.0) == pytest.approx(0.1875, abs=1e-15)
    s1 = exact_random_sum(R, CountingLaw.deterministic(1))
    assert kolmogorov_distance_exact(s1, NORMAL, 1.0) == pytest.approx(std_normal_cdf(1.0) - 0.5, abs=1e-15)
    assert kolmogorov_distance_exact(s1, std_normal_cdf, 1.0) == pytest.approx(0.3413, abs=1e-4)


def test_kolmogorov_fine_discretization():
    h = 1e-3
    xs = np.arange(-9.0, 9.0 + h / 2, h)
    masses = stats.norm.cdf(xs + h / 2) - stats.norm.cdf(xs - h / 2)
    masses /= masses.sum()
    s = LatticeDistribution(xs[0], h, masses)
    assert kolmogorov_distance_exact(s, NORMAL, 1.0) <= h


def test_kolmogorov_sample_matches_exact_on_atoms():
    sample = np.array([-1.0, 1.0, 1.0, -1.0, 1.0])
    assert kolmogorov_distance_sample(sample, NORMAL, 1.0) == pytest.approx(max(std_normal_cdf(1) - 0.4, 0.6 - std_normal_cdf(-1)))


def test_sample_bracketing_is_conservative():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(4000) * 1.1
    law = LimitLaw("variance_gamma", 40.0)
    coarse = kolmogorov_distance_sample(x, law, math.sqrt(40.0), max_evals=300)
    fine = kolmogorov_distance_sample(x, law, math.sqrt(40.0), max_evals=10**9)
    assert fine <= coarse <= fine + 0.01


def test_dkw():
    assert dkw_margin(10**6, 0.01) == pytest.approx(0.00163, abs=1e-5)
    assert dkw_margin(1000, 0.01) > dkw_margin(10**6, 0.01)


# -- Monte Carlo ------------------------------------------------------------


def test_sampling_deterministic_and_thread_independent():
    law = CountingLaw.negative_binomial(2.0, 10.0)
    a = sample_random_sum(THREE, law, 7, 200_000)
    b = sample_random_sum(THREE, law, 7, 200_000, workers=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_random_sum(THREE, law, 8, 200_000))


def test_binomial_p1_is_full_sum():
    x = sample_random_sum(R, CountingLaw.binomial(3, 1.0), 1, 5000)
    assert set(np.unique(x)) <= {-3.0, -1.0, 1.0, 3.0}
    assert set(np.unique(x)) == {-3.0, -1.0, 1.0, 3.0}


@pytest.mark.parametrize("d", [THREE, UniformSymmetric(1.5)], ids=["lattice", "uniform"])
def test_poisson_moments(d):
    lam, m = 6.0, 400_000
    x = sample_random_sum(d, CountingLaw.poisson(lam), 99, m)
    assert abs(x.mean()) <= 4 * math.sqrt(lam * d.sigma2 / m)
    # Var S = lam sigma^2; SE of a sample variance ~ sqrt(E S^4 / m)
    var = lam * d.sigma2
    assert x.var() == pytest.approx(var, rel=0.02)


def test_mixed_law_sampling_mean():
    law = CountingLaw.poisson_inverse_gamma(6.0, 8.0)
    rng = np.random.default_rng(1)
    n = law.sample(rng, 400_000)
    assert n.mean() == pytest.approx(2.0, rel=0.02)


def test_mc_agrees_with_exact_within_dkw():
    law = CountingLaw.geometric(5.0)
    exact = kolmogorov_distance_exact(exact_random_sum(R, law), LimitLaw("laplace"), math.sqrt(5.0))
    m, delta = 10_000, 0.01
    margin = dkw_margin(m, delta)
    seeds = range(100)
    hits = sum(
        abs(kolmogorov_distance_sample(sample_random_sum(R, law, s, m), LimitLaw("laplace"), math.sqrt(5.0)) - exact) <= margin
        for s in seeds
    )
    assert hits >= 99


# -- verification -----------------------------------------------------------


def test_verify_examples():
    rep = verify_bound(Scenario("n4", R, CountingLaw.deterministic(4), "fixed_iid"))
    assert rep.measured_delta == pytest.approx(0.1875, abs=1e-12)
    assert rep.bound.bound_value == pytest.approx(0.2345, abs=1e-12)
    assert rep.passed and rep.dkw_margin == 0.0
    rep = verify_bound(Scenario("p9", R, CountingLaw.poisson(9.0), "poisson"))
    assert rep.passed and rep.bound.bound_value == pytest.approx(0.6182)
    assert rep.mass_deficit <= 1e-12


def test_verify_montecarlo_geometric():
    sc = Scenario("geo", R, CountingLaw.geometric(50.0), "geometric", method="montecarlo")
    rep = verify_bound(sc)
    assert rep.passed and rep.dkw_margin == pytest.approx(0.00163, abs=1e-5)
    assert rep.generator == "PCG64" and rep.replications == 10**6
    assert set(rep.row()) == {"scenario_id", "method", "measured_delta", "dkw_margin", "bound", "constant_used", "pass"}


def test_verify_negative_control():
    rep = verify_bound(Scenario("neg", R, CountingLaw.poisson(9.0), "poisson", constant_override=0.01))
    assert not rep.passed


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario("x", R, CountingLaw.poisson(1.0), "geometric")
    with pytest.raises(ValueError):
        Scenario("x", R, CountingLaw.poisson(1.0), "poisson_growth")
    with pytest.raises(ValueError):
        Scenario("x", R, CountingLaw.poisson(1.0), "poisson", method="bootstrap")
