import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from clt_bounds.dists import (
    FiniteLattice,
    GrowthFunction,
    Rademacher,
    SymmetricPareto,
    TwoPointSymmetric,
    UniformSymmetric,
    growth_abs,
    growth_capped,
    growth_log1p,
    growth_power,
    load_lattice_csv,
    parse_growth,
    trunc_second_moment_core,
    trunc_second_moment_tail,
    trunc_third_abs_moment_core,
    variance,
    verify_growth_function,
    weighted_second_moment,
)

THREE = FiniteLattice(((-2, 0.25), (0, 0.5), (2, 0.25)))
FAMILIES = [
    Rademacher(),
    TwoPointSymmetric(2.5),
    UniformSymmetric(1.7),
    SymmetricPareto(2.5, 1.0),
    SymmetricPareto(3.0, 0.7),
    SymmetricPareto(4.5, 2.0),
    THREE,
    FiniteLattice(((-1, 0.6), (1.5, 0.4))),
]


def test_variances():
    assert variance(Rademacher()) == 1.0
    assert variance(UniformSymmetric(3.0)) == pytest.approx(3.0)
    assert variance(THREE) == 2.0
    assert variance(SymmetricPareto(4.0, 1.0)) == pytest.approx(2.0)


def test_rademacher_truncated_moments():
    r = Rademacher()
    assert trunc_second_moment_tail(r, 0.5) == 1.0
    assert trunc_second_moment_tail(r, 2.0) == 0.0
    assert trunc_third_abs_moment_core(r, 0.5) == 0.0
    assert trunc_third_abs_moment_core(r, 2.0) == 1.0
    # |X| = t belongs to the tail
    assert trunc_second_moment_tail(r, 1.0) == 1.0


def test_pareto_tail_closed_form_and_quadrature():
    a = 2.5
    d = SymmetricPareto(a, 1.0)
    closed = a / (a - 2) * 2 ** (2 - a)
    quad, _ = integrate.quad(lambda x: 2 * x * x * (a / 2) * x ** (-a - 1), 2, math.inf, epsrel=1e-13)
    assert trunc_second_moment_tail(d, 2.0) == pytest.approx(closed, rel=1e-14)
    assert trunc_second_moment_tail(d, 2.0) == pytest.approx(quad, rel=1e-9)
    assert trunc_third_abs_moment_core(d, math.inf) == math.inf


def test_uniform_third_core():
    assert trunc_third_abs_moment_core(UniformSymmetric(1.0), 1.0) == pytest.approx(0.25)


@pytest.mark.parametrize("d", FAMILIES, ids=lambda d: d.describe())
def test_second_moment_split(d):
    for t in (0.05, 0.5, 1.0, 1.9, 3.3, 17.0):
        assert trunc_second_moment_tail(d, t) + trunc_second_moment_core(d, t) == pytest.approx(d.sigma2, rel=1e-12)


@pytest.mark.parametrize("d", FAMILIES, ids=lambda d: d.describe())
def test_truncated_moments_monotone(d):
    ts = np.geomspace(0.01, 100, 120)
    tails = [trunc_second_moment_tail(d, t) for t in ts]
    cores = [trunc_third_abs_moment_core(d, t) for t in ts]
    assert np.all(np.diff(tails) <= 1e-15)
    assert np.all(np.diff(cores) >= -1e-15)


@pytest.mark.parametrize("d", [UniformSymmetric(1.7), SymmetricPareto(2.5, 1.0), SymmetricPareto(3.0, 0.7), SymmetricPareto(4.5, 2.0)], ids=lambda d: d.describe())
def test_closed_forms_against_quadrature(d):
    dens = d.density if hasattr(d, "density") else (lambda x: 0.5 / d.halfwidth if abs(x) <= d.halfwidth else 0.0)
    lo = getattr(d, "scale", 0.0) if isinstance(d, SymmetricPareto) else 0.0
    hi = d.halfwidth if isinstance(d, UniformSymmetric) else math.inf
    for t in (0.9, 1.6, 4.0):
        tail = 2 * integrate.quad(lambda x: x * x * dens(x), max(t, lo), hi, epsabs=0, epsrel=1e-12)[0] if t < hi else 0.0
        core = 2 * integrate.quad(lambda x: x**3 * dens(x), lo, min(t, hi), epsabs=0, epsrel=1e-12)[0] if t > lo else 0.0
        assert trunc_second_moment_tail(d, t) == pytest.approx(tail, rel=1e-9, abs=1e-15)
        assert trunc_third_abs_moment_core(d, t) == pytest.approx(core, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("alpha", [2.05, 2.5, 3.0, 3.5, 7.0])
def test_pareto_expectation_routes_agree(alpha):
    d = SymmetricPareto(alpha, 1.3)
    assert d.expect(lambda x: x * x) == pytest.approx(d.sigma2, rel=1e-12)
    assert d.expect(lambda x: 1.0) == pytest.approx(1.0, rel=1e-12)
    c = 3.7
    kinked = d.expect(lambda x: x * x * min(1.0, abs(x) / c), [c])
    assert kinked == pytest.approx(d.tail2(c) + d.core3(c) / c, rel=1e-11)


def test_lattice_validation():
    with pytest.raises(ValueError):
        FiniteLattice(((-1, 0.5), (1, 0.6)))
    with pytest.raises(ValueError):
        FiniteLattice(((0, 0.5), (1, 0.5)))  # mean 1/2
    with pytest.raises(ValueError):
        FiniteLattice(((0, 1.0),))
    with pytest.raises(ValueError):
        FiniteLattice(((-1, -0.1), (1, 1.1)))
    # tiny mean is recentred
    d = FiniteLattice(((-1, 0.5), (1 + 1e-10, 0.5)))
    assert abs(sum(v * p for v, p in d.atoms)) < 1e-15
    merged = FiniteLattice(((-1, 0.25), (-1, 0.25), (1, 0.5)))
    assert merged.atoms == ((-1.0, 0.5), (1.0, 0.5))


def test_symmetry_flags():
    assert THREE.symmetric
    assert Rademacher().symmetric
    assert not FiniteLattice(((-1, 0.6), (1.5, 0.4))).symmetric


def test_integer_grid():
    step, pmf, kmin = THREE.integer_grid()
    assert step == 2.0 and kmin == -1 and list(pmf) == [0.25, 0.5, 0.25]
    step, pmf, kmin = FiniteLattice(((-1, 0.6), (1.5, 0.4))).integer_grid()
    assert step == 0.5 and kmin == -2 and len(pmf) == 6


def test_scale_equivariance():
    for d in FAMILIES:
        c = d.scaled(3.0)
        assert c.sigma2 == pytest.approx(9 * d.sigma2)
        assert c.tail2(3.0) == pytest.approx(9 * d.tail2(1.0))


def test_sampling_moments():
    rng = np.random.default_rng(5)
    for d in (Rademacher(), UniformSymmetric(2.0), THREE, SymmetricPareto(5.0, 1.0)):
        x = d.sample(rng, 400_000)
        assert abs(x.mean()) < 5 * d.sigma / math.sqrt(len(x))
        assert x.var() == pytest.approx(d.sigma2, rel=0.03)


def test_weighted_second_moment_examples():
    r = Rademacher()
    assert weighted_second_moment(r, growth_abs()) == 1.0
    assert weighted_second_moment(r, growth_capped(1.0)) == 1.0
    assert weighted_second_moment(UniformSymmetric(1.0), growth_abs()) == pytest.approx(0.25)
    assert weighted_second_moment(SymmetricPareto(2.5, 1.0), growth_abs()) == math.inf
    assert weighted_second_moment(SymmetricPareto(2.5, 1.0), growth_power(0.4)) == pytest.approx(
        2.5 / (2.5 - 2.4), rel=1e-9
    )


def test_growth_class_checks():
    assert verify_growth_function(growth_abs())
    assert verify_growth_function(growth_log1p())
    for c in (1e-3, 0.5, 7.0, 1e4):
        assert verify_growth_function(growth_capped(c))
    sq = verify_growth_function(growth_power(2.0))
    assert not sq and sq.violation
    bumpy = GrowthFunction(lambda x: abs(math.sin(x)) + 1.0, "bumpy")
    assert not verify_growth_function(bumpy)
    with pytest.raises(ValueError):
        verify_growth_function(growth_abs(), grid=[], include_default=False)
    with pytest.raises(ValueError):
        verify_growth_function(growth_abs(), grid=[2.0, 1.0])


def test_parse_growth():
    assert parse_growth("abs")(-3.0) == 3.0
    assert parse_growth("min:2")(5.0) == 2.0
    assert parse_growth("pow:0.5")(4.0) == 2.0
    with pytest.raises(ValueError):
        parse_growth("cube")


def test_load_lattice_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("# comment\nvalue,probability\n-2,0.25\n0,0.5\n2,0.25\n")
    assert load_lattice_csv(p) == THREE


@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(1, 9)), min_size=2, max_size=6))
def test_random_lattices_split_identity(raw):
    vals = {}
    for v, w in raw:
        vals[v] = vals.get(v, 0) + w
    if len(vals) < 2:
        return
    tot = sum(vals.values())
    mean = sum(v * w for v, w in vals.items()) / tot
    d = FiniteLattice(tuple((v - mean, w / tot) for v, w in vals.items()))
    for t in (0.3, 1.0, 2.5, 9.0):
        assert d.tail2(t) + d.core2(t) == pytest.approx(d.sigma2, rel=1e-12)
