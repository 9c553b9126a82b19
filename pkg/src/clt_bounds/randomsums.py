"""Ground truth for random sums: exact lattice convolutions and Monte Carlo.

A random sum S_N = X_1 + ... + X_N has S_0 = 0.  For lattice summands its law
is the finite mixture sum_k P(N = k) * (k-fold convolution), computed exactly
up to a counting-law tail of at most ``tail_tol``.  For any summand it can be
simulated; every Monte Carlo run splits its replications into fixed-size
blocks whose PCG64 streams are derived from ``SeedSequence(seed, spawn_key=(block,))``,
so samples do not depend on execution order or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special, stats

from .bounds import (
    BoundReport,
    bound_be_poisson,
    bound_binomial,
    bound_fixed_n,
    bound_geometric,
    bound_growth,
    bound_growth_random,
    bound_mixed_poisson,
    bound_negative_binomial,
    bound_osipov,
    bound_poisson,
    bound_poisson_binomial,
    bound_sichel,
)
from .dists import GrowthFunction, SummandDistribution
from .errors import DomainError, ResourceError
from .limitlaws import LimitLaw, MixingLaw

__all__ = [
    "CountingLaw",
    "LatticeDistribution",
    "counting_pmf",
    "counting_pmf_array",
    "pig_pmf_quadrature",
    "truncation_point",
    "exact_random_sum",
    "exact_sum_hetero",
    "lemma6_check",
    "kolmogorov_distance",
    "kolmogorov_distance_exact",
    "kolmogorov_distance_sample",
    "dkw_margin",
    "sample_random_sum",
    "Scenario",
    "VerificationReport",
    "compute_bound",
    "verify_bound",
    "BOUND_SELECTORS",
    "GENERATOR_NAME",
]

GENERATOR_NAME = "PCG64"
DEFAULT_TAIL_TOL = 1e-12
DEFAULT_MAX_CELLS = 200_000
DEFAULT_BLOCK = 1 << 16


# -- counting laws --------------------------------------------------------------

_KINDS = ("deterministic", "poisson_binomial", "binomial", "poisson", "geometric", "negative_binomial", "poisson_inverse_gamma")


@dataclass(frozen=True)
class CountingLaw:
    """Law of the random number of summands.

    ``geometric(n)``: P(N = k) = (1/(n+1)) (n/(n+1))^k, mean n.
    ``negative_binomial(r, n)``: Poisson with Gamma(r, scale n) intensity, mean n r.
    ``poisson_inverse_gamma(r, n)``: Poisson with inverse-gamma(r/2, rate n/2) intensity.
    """

    kind: str
    n: float | None = None
    p: float | None = None
    lam: float | None = None
    r: float | None = None
    p_vec: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown counting law {self.kind!r}")
        k = self.kind
        if k in ("deterministic", "binomial"):
            if self.n is None or self.n < 1 or int(self.n) != self.n:
                raise DomainError(f"{k} needs a positive integer n")
        if k == "binomial" and not (self.p is not None and 0.0 < self.p <= 1.0):
            raise DomainError("binomial needs p in (0, 1]")
        if k == "poisson" and not (self.lam is not None and self.lam > 0):
            raise DomainError("poisson needs lambda > 0")
        if k == "poisson_binomial":
            if not self.p_vec or any(not 0.0 < p <= 1.0 for p in self.p_vec):
                raise DomainError("poisson_binomial needs a nonempty p-vector in (0, 1]")
        if k in ("geometric", "negative_binomial", "poisson_inverse_gamma"):
            if self.n is None or not self.n > 0:
                raise DomainError(f"{k} needs n > 0")
        if k in ("negative_binomial", "poisson_inverse_gamma"):
            if self.r is None or not self.r > 0:
                raise DomainError(f"{k} needs r > 0")

    # constructors
    @classmethod
    def deterministic(cls, n: int) -> "CountingLaw":
        return cls("deterministic", n=int(n))

    @classmethod
    def poisson_binomial(cls, p_vec: Sequence[float]) -> "CountingLaw":
        return cls("poisson_binomial", p_vec=tuple(float(p) for p in p_vec))

    @classmethod
    def binomial(cls, n: int, p: float) -> "CountingLaw":
        return cls("binomial", n=int(n), p=float(p))

    @classmethod
    def poisson(cls, lam: float) -> "CountingLaw":
        return cls("poisson", lam=float(lam))

    @classmethod
    def geometric(cls, n: float) -> "CountingLaw":
        return cls("geometric", n=n)

    @classmethod
    def negative_binomial(cls, r: float, n: float) -> "CountingLaw":
        return cls("negative_binomial", n=n, r=float(r))

    @classmethod
    def poisson_inverse_gamma(cls, r: float, n: float) -> "CountingLaw":
        return cls("poisson_inverse_gamma", n=n, r=float(r))

    @property
    def finite_support(self) -> int | None:
        if self.kind in ("deterministic", "binomial"):
            return int(self.n)
        if self.kind == "poisson_binomial":
            return len(self.p_vec)
        return None

    def mixing_law(self) -> MixingLaw:
        if self.kind == "poisson":
            return MixingLaw.degenerate(self.lam)
        if self.kind == "geometric":
            return MixingLaw.exponential(self.n)
        if self.kind == "negative_binomial":
            return MixingLaw.gamma(self.r, self.n)
        if self.kind == "poisson_inverse_gamma":
            return MixingLaw.inverse_gamma(0.5 * self.r, 0.5 * self.n)
        raise ValueError(f"{self.kind} is not a mixed Poisson law")

    @property
    def mean(self) -> float:
        if self.kind == "deterministic":
            return float(self.n)
        if self.kind == "binomial":
            return self.n * self.p
        if self.kind == "poisson_binomial":
            return math.fsum(self.p_vec)
        return self.mixing_law().mean

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        k = self.kind
        if k == "deterministic":
            return np.full(size, int(self.n), dtype=np.int64)
        if k == "binomial":
            return rng.binomial(int(self.n), self.p, size=size)
        if k == "poisson_binomial":
            u = rng.random((size, len(self.p_vec)))
            return (u < np.asarray(self.p_vec)).sum(axis=1)
        if k == "poisson":
            return rng.poisson(self.lam, size=size)
        return rng.poisson(self.mixing_law().sample(rng, size))

    def describe(self) -> str:
        if self.kind == "poisson_binomial":
            return f"poisson_binomial({','.join(f'{p:g}' for p in self.p_vec)})"
        parts = [f"{k}={getattr(self, k):g}" for k in ("n", "p", "lam", "r") if getattr(self, k) is not None]
        return f"{self.kind}({', '.join(parts)})"


def _poisson_binomial_pmf(p_vec: Sequence[float]) -> np.ndarray:
    pmf = np.array([1.0])
    for p in p_vec:
        nxt = np.zeros(len(pmf) + 1)
        nxt[:-1] += (1.0 - p) * pmf
        nxt[1:] += p * pmf
        pmf = nxt
    return pmf


def _log_poisson(ks: np.ndarray, lam: float) -> np.ndarray:
    return ks * math.log(lam) - lam - special.gammaln(ks + 1.0)


def _pig_pmf_head(r: float, n: float, kmax: int) -> np.ndarray:
    """Poisson-inverse gamma pmf for k = 0..kmax via modified Bessel functions.

    P(k) = 2 b^((k+a)/2) K_{k-a}(2 sqrt b) / (Gamma(a) k!),  a = r/2, b = n/2;
    successive orders follow K_{v+1} = K_{v-1} + (2v/z) K_v, carried as ratios.
    """
    a, b = 0.5 * r, 0.5 * n
    z = 2.0 * math.sqrt(b)
    out = np.empty(kmax + 1)
    log_k = math.log(special.kve(-a, z)) - z
    out[0] = math.exp(math.log(2.0) + 0.5 * a * math.log(b) + log_k - math.lgamma(a))
    if kmax == 0:
        return out
    ratio = special.kve(1.0 - a, z) / special.kve(-a, z)  # K_{1-a} / K_{-a}
    sqrt_b = math.sqrt(b)
    for k in range(kmax):
        out[k + 1] = out[k] * sqrt_b * ratio / (k + 1.0)
        nu = k + 1.0 - a
        ratio = 1.0 / ratio + 2.0 * nu / z
    return out


def pig_pmf_quadrature(r: float, n: float, k: int) -> float:
    """Poisson-inverse gamma pmf by direct quadrature of the mixture integral."""
    a, b = 0.5 * r, 0.5 * n

    def f(u):  # lambda = e^u
        log_val = (k - a) * u - math.exp(u) - b * math.exp(-u) + a * math.log(b) - math.lgamma(a) - math.lgamma(k + 1.0)
        return math.exp(log_val) if log_val > -745 else 0.0

    # integrand peaks where k - a = e^u - b e^{-u}
    c = k - a
    peak = math.log((c + math.sqrt(c * c + 4.0 * b)) / 2.0)
    width = 40.0 + 50.0 / a
    lo, _ = integrate.quad(f, peak - width, peak, epsabs=1e-16, epsrel=1e-12, limit=400)
    hi, _ = integrate.quad(f, peak, peak + 40.0, epsabs=1e-16, epsrel=1e-12, limit=400)
    return lo + hi


def counting_pmf_array(law: CountingLaw, kmax: int) -> np.ndarray:
    """P(N = k) for k = 0..kmax."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    ks = np.arange(kmax + 1, dtype=float)
    k = law.kind
    if k == "deterministic":
        out = np.zeros(kmax + 1)
        if law.n <= kmax:
            out[int(law.n)] = 1.0
        return out
    if k == "poisson_binomial":
        pmf = _poisson_binomial_pmf(law.p_vec)
        out = np.zeros(kmax + 1)
        m = min(len(pmf), kmax + 1)
        out[:m] = pmf[:m]
        return out
    if k == "binomial":
        n, p = int(law.n), law.p
        out = np.zeros(kmax + 1)
        kk = ks[: n + 1] if kmax >= n else ks
        if p == 1.0:
            if n <= kmax:
                out[n] = 1.0
            return out
        logs = special.gammaln(n + 1.0) - special.gammaln(kk + 1.0) - special.gammaln(n - kk + 1.0) + kk * math.log(p) + (n - kk) * math.log1p(-p)
        out[: len(kk)] = np.exp(logs)
        return out
    if k == "poisson":
        return np.exp(_log_poisson(ks, law.lam))
    if k == "geometric":
        n = law.n
        return np.exp(-math.log1p(n) + ks * (math.log(n) - math.log1p(n)))
    if k == "negative_binomial":
        r, n = law.r, law.n
        logs = special.gammaln(r + ks) - special.gammaln(r) - special.gammaln(ks + 1.0) - r * math.log1p(n) + ks * (math.log(n) - math.log1p(n))
        return np.exp(logs)
    return _pig_pmf_head(law.r, law.n, kmax)


def counting_pmf(law: CountingLaw, k: int) -> float:
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    return float(counting_pmf_array(law, int(k))[int(k)])


def truncation_point(law: CountingLaw, tail_tol: float = DEFAULT_TAIL_TOL, max_k: int = 10_000_000) -> tuple[int, np.ndarray]:
    """Smallest K with P(N > K) <= tail_tol, with the pmf on 0..K."""
    fin = law.finite_support
    if fin is not None:
        return fin, counting_pmf_array(law, fin)
    if law.kind in ("geometric", "negative_binomial", "poisson_inverse_gamma"):
        # P(N > K) >= P(Lambda > 2K) P(Poisson(2K) > K) ~ P(Lambda > 2K): give up early
        m = law.mixing_law()
        if m.kind.name == "INVERSE_GAMMA":
            heavy = stats.invgamma.sf(2.0 * max_k, m.shape, scale=m.scale)
        else:
            heavy = stats.gamma.sf(2.0 * max_k, m.shape, scale=m.scale)
        if heavy > tail_tol:
            raise ResourceError(f"{law.describe()} needs more than {max_k} terms for tail {tail_tol:g}")
    size = max(64, int(4 * law.mean + 64)) if math.isfinite(law.mean) else 1024
    while True:
        pmf = counting_pmf_array(law, size)
        tails = 1.0 - np.cumsum(pmf)
        hit = np.nonzero(tails <= tail_tol)[0]
        if len(hit):
            K = int(hit[0])
            return K, pmf[: K + 1]
        if size >= max_k:
            raise ResourceError(f"{law.describe()} needs more than {max_k} terms for tail {tail_tol:g}")
        size = min(2 * size, max_k)


# -- exact lattice distributions ----------------------------------------------


@dataclass(frozen=True)
class LatticeDistribution:
    """Masses on origin + step * j, j = 0..len(masses)-1."""

    origin: float
    step: float
    masses: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if np.any(self.masses < -1e-15):
            raise ValueError("negative mass")

    @property
    def values(self) -> np.ndarray:
        return self.origin + self.step * np.arange(len(self.masses))

    @property
    def deficit(self) -> float:
        return max(0.0, 1.0 - float(math.fsum(self.masses)))

    def as_dict(self, tol: float = 0.0) -> dict[float, float]:
        return {float(v): float(m) for v, m in zip(self.values, self.masses) if m > tol}

    def mass_at(self, x: float) -> float:
        j = (x - self.origin) / self.step
        jr = round(j)
        if abs(j - jr) > 1e-9 or not 0 <= jr < len(self.masses):
            return 0.0
        return float(self.masses[jr])


def _grid(d: SummandDistribution):
    if not getattr(d, "is_lattice", False):
        raise TypeError(f"exact random sums need a lattice summand, got {d.describe()}")
    return d.integer_grid()


def exact_random_sum(
    d: SummandDistribution,
    law: CountingLaw,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> LatticeDistribution:
    """Law of S_N as the mixture of k-fold convolutions, k <= K*."""
    step, base, kmin = _grid(d)
    width = len(base) - 1
    max_k = max(1, max_cells // max(width, 1))
    try:
        K, pmf = truncation_point(law, tail_tol, max_k=max_k)
    except ResourceError as exc:
        raise ResourceError(f"{exc}; exact path infeasible, use the Monte Carlo method") from None
    if K * width > max_cells:
        raise ResourceError(f"exact path needs {K * width} cells (budget {max_cells}); use the Monte Carlo method")
    out = np.zeros(K * width + 1)
    conv = np.array([1.0])
    for k in range(K + 1):
        if pmf[k] > 0:
            start = k * kmin - K * kmin
            out[start : start + len(conv)] += pmf[k] * conv
        if k < K:
            conv = np.convolve(conv, base)
    return LatticeDistribution(K * kmin * step, step, out)


def exact_sum_hetero(ds: Sequence[SummandDistribution]) -> LatticeDistribution:
    """Law of X_1 + ... + X_n for independent lattice summands on a common step."""
    grids = [_grid(d) for d in ds]
    steps = {round(g[0], 12) for g in grids}
    step = grids[0][0]
    if len(steps) != 1:
        raise TypeError("summands must share a lattice step")
    conv = np.array([1.0])
    origin = 0
    for _, base, kmin in grids:
        conv = np.convolve(conv, base)
        origin += kmin
    return LatticeDistribution(origin * step, step, conv)


def lemma6_check(d: SummandDistribution, p_vec: Sequence[float]) -> float:
    """Max pmf gap between S_N (N Poisson-binomial) and a sum of thinned summands.

    The right side convolves the laws p_j F + (1 - p_j) (unit mass at 0).
    """
    left = exact_random_sum(d, CountingLaw.poisson_binomial(p_vec), tail_tol=0.0)
    step, base, kmin = _grid(d)
    zero = np.zeros_like(base)
    zero[-kmin] = 1.0
    right = np.array([1.0])
    for p in p_vec:
        right = np.convolve(right, p * base + (1.0 - p) * zero)
    if len(right) != len(left.masses) or abs(left.origin - len(p_vec) * kmin * step) > 1e-9:
        raise AssertionError("lattice alignment mismatch")
    return float(np.max(np.abs(left.masses - right)))


# -- Kolmogorov distance --------------------------------------------------------


CdfArray = Callable[[np.ndarray], np.ndarray]


def kolmogorov_distance(values: np.ndarray, masses: np.ndarray, cdf: CdfArray) -> float:
    """sup_x |P(S < x) - G(x)| for a discrete S with the given atoms and continuous G.

    P(S < x) is constant between atoms, so the sup is attained as x approaches
    an atom from either side: compare G(a) with both P(S < a) and P(S <= a).
    """
    order = np.argsort(values)
    values = np.asarray(values, dtype=float)[order]
    masses = np.asarray(masses, dtype=float)[order]
    right = np.cumsum(masses)
    left = right - masses
    g = cdf(values)
    return float(max(np.max(np.abs(left - g)), np.max(np.abs(right - g))))


def _cdf_array(limit) -> CdfArray:
    if isinstance(limit, LimitLaw):
        return limit.cdf_array
    return lambda xs: np.array([limit(x) for x in np.asarray(xs)])


def kolmogorov_distance_exact(s: LatticeDistribution, limit, normalization: float) -> float:
    """Exact uniform distance between S / normalization and a continuous CDF.

    Cells with zero mass are skipped; they cannot raise the supremum.
    """
    keep = s.masses > 0
    return kolmogorov_distance(s.values[keep] / normalization, s.masses[keep], _cdf_array(limit))


def dkw_margin(m: int, delta: float) -> float:
    """Two-sided DKW radius: P(sup |F_m - F| > eps) <= delta."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def kolmogorov_distance_sample(sample: np.ndarray, limit, normalization: float, max_evals: int = 4000) -> float:
    """Uniform distance between the empirical CDF of sample / normalization and ``limit``.

    When the sample has more distinct values than ``max_evals`` and the limit
    CDF is not vectorised, G is evaluated only at ``max_evals`` sample
    quantiles and bracketed in between by monotonicity.  The result then
    over-estimates the distance by at most the G-mass of one bracket.
    """
    xs, counts = np.unique(np.asarray(sample, dtype=float) / normalization, return_counts=True)
    masses = counts / counts.sum()
    fast = isinstance(limit, LimitLaw) and limit.kind in ("normal", "laplace")
    if fast or len(xs) <= max_evals:
        return kolmogorov_distance(xs, masses, _cdf_array(limit))
    grid = xs[np.unique(np.linspace(0, len(xs) - 1, max_evals).astype(np.int64))]
    g = _cdf_array(limit)(grid)
    idx = np.clip(np.searchsorted(grid, xs, side="right") - 1, 0, len(grid) - 2)
    g_lo, g_hi = g[idx], g[idx + 1]
    right = np.cumsum(masses)
    left = right - masses
    dev = np.maximum.reduce([np.abs(left - g_lo), np.abs(left - g_hi), np.abs(right - g_lo), np.abs(right - g_hi)])
    return float(dev.max())


# -- Monte Carlo ----------------------------------------------------------------


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _sample_block(d: SummandDistribution, law: CountingLaw, rng: np.random.Generator, size: int) -> np.ndarray:
    counts_n = law.sample(rng, size).astype(np.int64)
    if getattr(d, "is_lattice", False):
        multi = rng.multinomial(counts_n, d.probs)
        return multi @ d.values
    draws = d.sample(rng, int(counts_n.sum()))
    owner = np.repeat(np.arange(size), counts_n)
    return np.bincount(owner, weights=draws, minlength=size)


def sample_random_sum(
    d: SummandDistribution,
    law: CountingLaw,
    seed: int,
    m: int,
    *,
    block_size: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> np.ndarray:
    """m independent draws of S_N, reproducible from ``seed`` alone."""
    if m < 1:
        raise ValueError("m must be positive")
    nblocks = -(-m // block_size)
    sizes = [min(block_size, m - b * block_size) for b in range(nblocks)]

    def run(b):
        return _sample_block(d, law, _block_rng(seed, b), sizes[b])

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(nblocks)))
    else:
        parts = [run(b) for b in range(nblocks)]
    return np.concatenate(parts)


# -- verification -----------------------------------------------------------------

BOUND_SELECTORS = {
    "fixed_general": ("deterministic",),
    "fixed_iid": ("deterministic",),
    "fixed_symmetric": ("deterministic",),
    "fixed_iid_symmetric": ("deterministic",),
    "truncated": ("deterministic",),
    "growth": ("deterministic",),
    "poisson_binomial": ("poisson_binomial",),
    "poisson_binomial_growth": ("poisson_binomial",),
    "binomial": ("binomial",),
    "binomial_growth": ("binomial",),
    "poisson": ("poisson",),
    "poisson_growth": ("poisson",),
    "poisson_berry_esseen": ("poisson",),
    "mixed_poisson": ("poisson", "geometric", "negative_binomial", "poisson_inverse_gamma"),
    "geometric": ("geometric",),
    "negative_binomial": ("negative_binomial",),
    "sichel": ("poisson_inverse_gamma",),
}

_VARIANTS = {"fixed_general": 1, "fixed_iid": 2, "fixed_symmetric": 3, "fixed_iid_symmetric": 4}


@dataclass(frozen=True)
class Scenario:
    id: str
    summand: SummandDistribution
    law: CountingLaw
    bound: str
    method: str = "exact"
    replications: int = 1_000_000
    confidence: float = 0.01
    seed: int = 20_240_601
    growth: GrowthFunction | None = None
    eps: float = 1.0
    constant_override: float | None = None
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.bound not in BOUND_SELECTORS:
            raise ValueError(f"unknown bound {self.bound!r}")
        if self.law.kind not in BOUND_SELECTORS[self.bound]:
            raise ValueError(f"bound {self.bound!r} does not apply to a {self.law.kind} counting law")
        if self.method not in ("exact", "montecarlo"):
            raise ValueError(f"method must be exact or montecarlo, got {self.method!r}")
        if self.bound.endswith("growth") and self.growth is None:
            raise ValueError(f"bound {self.bound!r} needs a growth function")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence (delta) must lie in (0, 1)")
        if self.replications < 1:
            raise ValueError("replications must be positive")


def compute_bound(sc: Scenario) -> BoundReport:
    d, law, b = sc.summand, sc.law, sc.bound
    if b in _VARIANTS:
        rep = bound_fixed_n(_VARIANTS[b], d, int(law.n))
    elif b == "truncated":
        rep = bound_osipov(d, int(law.n), sc.eps)
    elif b == "growth":
        rep = bound_growth(d, int(law.n), sc.growth)
    elif b == "poisson_binomial":
        rep = bound_poisson_binomial(d, law.p_vec)
    elif b == "binomial":
        rep = bound_binomial(d, int(law.n), law.p)
    elif b == "poisson":
        rep = bound_poisson(d, law.lam)
    elif b == "poisson_binomial_growth":
        rep = bound_growth_random("poisson_binomial", d, {"p_vec": law.p_vec}, sc.growth)
    elif b == "binomial_growth":
        rep = bound_growth_random("binomial", d, {"n": int(law.n), "p": law.p}, sc.growth)
    elif b == "poisson_growth":
        rep = bound_growth_random("poisson", d, {"lambda": law.lam}, sc.growth)
    elif b == "poisson_berry_esseen":
        rep = bound_be_poisson(d, law.lam)
    elif b == "mixed_poisson":
        rep = bound_mixed_poisson(d, law.mixing_law())
    elif b == "geometric":
        rep = bound_geometric(d, law.n)
    elif b == "negative_binomial":
        rep = bound_negative_binomial(d, law.n, law.r)
    else:
        rep = bound_sichel(d, law.n, law.r)
    if sc.constant_override is not None:
        rep = rep.with_constant(sc.constant_override)
    return rep


@dataclass(frozen=True)
class VerificationReport:
    scenario_id: str
    method: str
    measured_delta: float
    dkw_margin: float
    bound: BoundReport
    passed: bool
    replications: int = 0
    confidence: float = 0.0
    seed: int | None = None
    generator: str | None = None
    mass_deficit: float = 0.0

    def row(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "method": self.method,
            "measured_delta": self.measured_delta,
            "dkw_margin": self.dkw_margin,
            "bound": self.bound.bound_value,
            "constant_used": self.bound.constant_used,
            "pass": self.passed,
        }


def verify_bound(sc: Scenario, *, workers: int = 1) -> VerificationReport:
    """Measure the uniform distance for a scenario and compare it with its bound.

    Exact: the truncated mixture's distance plus its mass deficit (an upper
    bound on the true distance).  Monte Carlo: the empirical distance, passing
    when it is within the DKW radius of the bound.
    """
    rep = compute_bound(sc)
    if sc.method == "exact":
        s = exact_random_sum(sc.summand, sc.law, sc.tail_tol)
        delta = kolmogorov_distance_exact(s, rep.limit_law, rep.normalization) + s.deficit
        return VerificationReport(sc.id, "exact", delta, 0.0, rep, bool(delta <= rep.bound_value), mass_deficit=s.deficit)
    sample = sample_random_sum(sc.summand, sc.law, sc.seed, sc.replications, workers=workers)
    delta = kolmogorov_distance_sample(sample, rep.limit_law, rep.normalization)
    margin = dkw_margin(sc.replications, sc.confidence)
    return VerificationReport(
        sc.id,
        "montecarlo",
        delta,
        margin,
        rep,
        bool(delta <= rep.bound_value + margin),
        replications=sc.replications,
        confidence=sc.confidence,
        seed=sc.seed,
        generator=GENERATOR_NAME,
    )
