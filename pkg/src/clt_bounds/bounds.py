"""Uniform-distance bounds for sums and random sums.

Every evaluator returns a :class:`BoundReport`.  ``normalization`` is the
divisor applied to the (random) sum before comparing it with ``limit_law``;
the reported ``L`` and ``M`` are the Lindeberg and truncated third-moment
fractions at that normalization (for mixed Poisson sums, the two parts of
E X^2 G(X) / sigma^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .constants import REGISTRY, ConstantVariant, c_gamma
from .dists import GrowthFunction, SummandDistribution, verify_growth_function, weighted_second_moment
from .errors import PreconditionError, UnboundedResultError
from .functionals import functionals, functionals_iid
from .limitlaws import LimitLaw, MixingKind, MixingLaw
from .specfun import DomainError, gamma_fn, inc_gamma_pair

__all__ = [
    "BoundReport",
    "NORMAL",
    "bound_fixed_n",
    "bound_osipov",
    "bound_growth",
    "bound_poisson_binomial",
    "bound_binomial",
    "bound_poisson",
    "bound_growth_random",
    "bound_be_poisson",
    "mixed_poisson_g",
    "bound_mixed_poisson",
    "bound_geometric",
    "bound_negative_binomial",
    "bound_sichel",
    "tv_binomial_poisson",
]

NORMAL = LimitLaw("normal")

C_GENERAL = REGISTRY["universal_general"].value
C_IID = REGISTRY["universal_iid"].value
C_BE_POISSON = REGISTRY["be_poisson"].value


@dataclass(frozen=True)
class BoundReport:
    theorem_id: str
    bound_value: float
    constant_used: float
    gamma: float
    L: float
    M: float
    normalization: float
    limit_law: LimitLaw

    def __post_init__(self):
        if not self.bound_value >= 0:
            raise ValueError(f"negative bound {self.bound_value}")
        if not self.normalization > 0:
            raise ValueError(f"nonpositive normalization {self.normalization}")

    def with_constant(self, constant: float) -> "BoundReport":
        """Same report rescaled to another leading constant (used for negative controls)."""
        factor = constant / self.constant_used
        return replace(self, bound_value=self.bound_value * factor, constant_used=constant)

    def row(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "bound": self.bound_value,
            "constant": self.constant_used,
            "gamma": self.gamma,
            "L": self.L,
            "M": self.M,
            "normalization": self.normalization,
            "limit_law": self.limit_law.label(),
        }


def _ratio(L: float, M: float) -> float:
    return M / L if L > 0 else math.inf


# -- sums with a fixed number of summands ------------------------------------

_FIXED_IDS = {
    ConstantVariant.GENERAL: "fixed_general",
    ConstantVariant.IID_GENERAL: "fixed_iid",
    ConstantVariant.SYMMETRIC: "fixed_symmetric",
    ConstantVariant.IID_SYMMETRIC: "fixed_iid_symmetric",
}


def bound_fixed_n(v, d_or_ds, n: int | None = None) -> BoundReport:
    """(1 + gamma) C(gamma) L_n(1), written as C(gamma) (L_n(1) + M_n(1))."""
    v = ConstantVariant.of(v)
    if isinstance(d_or_ds, SummandDistribution):
        laws = [d_or_ds]
    else:
        laws = list(d_or_ds)
        if v.requires_iid and any(d != laws[0] for d in laws):
            raise PreconditionError(f"variant {v.value} needs identically distributed summands")
    if v.requires_symmetric and not all(d.symmetric for d in laws):
        raise PreconditionError(f"variant {v.value} needs symmetric summands")
    fv = functionals(d_or_ds, n, 1.0)
    gamma = fv.gamma
    const = c_gamma(v, gamma)
    return BoundReport(_FIXED_IDS[v], const * (fv.L + fv.M), const, gamma, fv.L, fv.M, fv.B_n, NORMAL)


def bound_osipov(d_or_ds, n: int | None = None, eps: float = 1.0) -> BoundReport:
    """C [L_n(eps) + M_n(eps)]; smallest at eps = 1."""
    fv = functionals(d_or_ds, n, eps)
    return BoundReport("truncated", C_GENERAL * (fv.L + fv.M), C_GENERAL, fv.gamma, fv.L, fv.M, fv.B_n, NORMAL)


def _check_growth(g: GrowthFunction):
    check = verify_growth_function(g)
    if not check:
        raise PreconditionError(f"growth function {g.label!r} fails class check: {check.violation} at x={check.at}")


def _weighted(d: SummandDistribution, g: GrowthFunction) -> float:
    w = weighted_second_moment(d, g)
    if not math.isfinite(w):
        raise UnboundedResultError(f"E X^2 g(X) is infinite for {d.describe()} with g={g.label}")
    return w


def bound_growth(d_or_ds, n: int | None, g: GrowthFunction, constant: float | None = None) -> BoundReport:
    """constant * sum E X_i^2 g(X_i) / (B_n^2 g(B_n)).

    Default constant: 1.8546 for a single i.i.d. law, 1.8627 for a list.
    """
    _check_growth(g)
    if isinstance(d_or_ds, SummandDistribution):
        if n is None or n < 1:
            raise ValueError("n must be a positive integer")
        laws = [d_or_ds] * int(n)
        default = C_IID
    else:
        laws = list(d_or_ds)
        default = C_GENERAL
    constant = default if constant is None else constant
    b2 = math.fsum(d.sigma2 for d in laws)
    b = math.sqrt(b2)
    total = math.fsum(_weighted(d, g) for d in laws)
    fv = functionals(d_or_ds, n, 1.0)
    value = constant * total / (b2 * g(b))
    return BoundReport("growth", value, constant, fv.gamma, fv.L, fv.M, b, NORMAL)


# -- Poisson-binomial, binomial and Poisson random sums ----------------------


def _truncated_report(tid: str, d: SummandDistribution, theta: float, constant: float) -> BoundReport:
    """constant / sigma^2 * E X^2 min{1, |X| / (sigma sqrt(theta))}."""
    s2 = d.sigma2
    t = math.sqrt(theta * s2)
    L = d.tail2(t) / s2
    M = d.core3(t) / (s2 * t)
    return BoundReport(tid, constant * (L + M), constant, _ratio(L, M), L, M, t, NORMAL)


def _check_probs(p_vec: Sequence[float]):
    if len(p_vec) == 0:
        raise ValueError("probability vector must be nonempty")
    for p in p_vec:
        if not 0.0 < p <= 1.0:
            raise DomainError(f"probabilities must lie in (0, 1], got {p}")


def bound_poisson_binomial(d: SummandDistribution, p_vec: Sequence[float]) -> BoundReport:
    _check_probs(p_vec)
    return _truncated_report("poisson_binomial", d, math.fsum(p_vec), C_GENERAL)


def bound_binomial(d: SummandDistribution, n: int, p: float) -> BoundReport:
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    _check_probs([p])
    return _truncated_report("binomial", d, n * p, C_IID)


def bound_poisson(d: SummandDistribution, lam: float) -> BoundReport:
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"lambda must be positive, got {lam}")
    return _truncated_report("poisson", d, lam, C_IID)


def bound_growth_random(kind: str, d: SummandDistribution, params: dict, g: GrowthFunction) -> BoundReport:
    """constant * E X^2 g(X) / (sigma^2 g(sigma sqrt(theta))) for the three counting laws.

    ``params``: ``{"p_vec": [...]}``, ``{"n": n, "p": p}`` or ``{"lambda": lam}``.
    """
    if kind == "poisson_binomial":
        _check_probs(params["p_vec"])
        theta, constant = math.fsum(params["p_vec"]), C_GENERAL
    elif kind == "binomial":
        _check_probs([params["p"]])
        theta, constant = params["n"] * params["p"], C_IID
    elif kind == "poisson":
        theta, constant = params["lambda"], C_IID
        if not theta > 0:
            raise DomainError("lambda must be positive")
    else:
        raise ValueError(f"unknown counting law {kind!r}")
    _check_growth(g)
    s2 = d.sigma2
    t = math.sqrt(theta * s2)
    base = _truncated_report(kind + "_growth", d, theta, constant)
    value = constant * _weighted(d, g) / (s2 * g(t))
    return replace(base, bound_value=value)


def bound_be_poisson(d: SummandDistribution, lam: float) -> BoundReport:
    """0.3031 E|X|^3 / (sigma^3 sqrt(lambda)); needs a finite third moment."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    third = d.third_abs_moment()
    if not math.isfinite(third):
        raise UnboundedResultError(f"third moment infinite for {d.describe()}; use the truncated Poisson bound")
    s2 = d.sigma2
    t = math.sqrt(lam * s2)
    value = C_BE_POISSON * third / (s2 * t)
    return BoundReport("poisson_berry_esseen", value, C_BE_POISSON, math.inf, 0.0, third / (s2 * t), t, NORMAL)


# -- mixed Poisson random sums -----------------------------------------------


def _inc(a: float, z: float) -> tuple[float, float]:
    if math.isinf(z) or z > 1e300:
        return gamma_fn(a), 0.0
    return inc_gamma_pair(a, z)


def _check_mixing(m: MixingLaw):
    if not m.has_mean:
        raise DomainError("mixing law has no finite mean (inverse gamma needs shape > 1)")
    if m.kind in (MixingKind.EXPONENTIAL, MixingKind.GAMMA) and m.shape <= 0.5:
        raise DomainError("gamma mixing needs shape > 1/2")


def mixed_poisson_g(m: MixingLaw, sigma: float):
    """Return the pair of parts (P-part, E-part) of G(x) = E min{1, |x| / (sigma sqrt(Lambda))}.

    The first part is P(Lambda < x^2 / sigma^2), the second is
    (|x| / sigma) E Lambda^(-1/2) 1{Lambda >= x^2 / sigma^2}.
    """
    _check_mixing(m)
    a, s = m.shape, m.scale

    if m.kind is MixingKind.DEGENERATE:
        def parts(x):
            ax = abs(x)
            t = sigma * math.sqrt(s)
            return (1.0, 0.0) if ax >= t else (0.0, ax / t)

    elif m.kind in (MixingKind.EXPONENTIAL, MixingKind.GAMMA):
        norm = gamma_fn(a)

        def parts(x):
            z = x * x / (s * sigma * sigma)
            low, _ = _inc(a, z)
            _, up = _inc(a - 0.5, z)
            return low / norm, abs(x) / (sigma * math.sqrt(s)) * up / norm

    else:
        norm = gamma_fn(a)

        def parts(x):
            if x == 0:
                return 0.0, 0.0
            z = s * sigma * sigma / (x * x)
            _, up = _inc(a, z)
            low, _ = _inc(a + 0.5, z)
            return up / norm, abs(x) / (sigma * math.sqrt(s)) * low / norm

    return parts


def _mixed_report(tid, d, parts, constant, normalization, limit) -> BoundReport:
    s2 = d.sigma2
    L = d.expect(lambda x: x * x * parts(x)[0]) / s2
    M = d.expect(lambda x: x * x * parts(x)[1]) / s2
    return BoundReport(tid, constant * (L + M), constant, _ratio(L, M), L, M, normalization, limit)


def bound_mixed_poisson(d: SummandDistribution, m: MixingLaw) -> BoundReport:
    """1.8546 / sigma^2 * E X^2 G(X) for a Poisson sum with random intensity Lambda ~ m.

    The sum is normalized by sigma sqrt(E Lambda) and compared with
    E Phi(x sqrt(E Lambda / Lambda)).
    """
    parts = mixed_poisson_g(m, d.sigma)
    mean = m.mean
    limit = LimitLaw("mixture", mixing=m, mixing_normalization=mean)
    return _mixed_report("mixed_poisson", d, parts, C_IID, math.sqrt(mean * d.sigma2), limit)


def _check_n(n):
    if not (n > 0 and math.isfinite(n)):
        raise DomainError(f"n must be positive, got {n}")


def bound_geometric(d: SummandDistribution, n: float) -> BoundReport:
    """Geometric random sum (mean n) against the Laplace law, normalized by sigma sqrt(n)."""
    _check_n(n)
    s2 = d.sigma2
    sd = math.sqrt(n * s2)

    def parts(x):
        z = x * x / (n * s2)
        low1, _ = _inc(1.0, z)
        _, up_half = _inc(0.5, z)
        return low1, abs(x) / sd * up_half

    return _mixed_report("geometric", d, parts, C_IID, sd, LimitLaw("laplace"))


def bound_negative_binomial(d: SummandDistribution, n: float, r: float) -> BoundReport:
    """Negative binomial random sum against VG_r, normalized by sigma sqrt(n)."""
    _check_n(n)
    if not r > 0.5:
        raise DomainError(f"negative binomial bound needs r > 1/2 (Gamma(r - 1/2, .) appears), got {r}")
    s2 = d.sigma2
    sd = math.sqrt(n * s2)
    norm = gamma_fn(r)

    def parts(x):
        z = x * x / (n * s2)
        low, _ = _inc(r, z)
        _, up = _inc(r - 0.5, z)
        return low / norm, abs(x) / sd * up / norm

    return _mixed_report("negative_binomial", d, parts, C_IID, sd, LimitLaw("variance_gamma", r))


def bound_sichel(d: SummandDistribution, n: float, r: float) -> BoundReport:
    """Poisson-inverse gamma random sum against Student T_r, normalized by sigma sqrt(n / r).

    The second term carries sqrt(2 / n): with 1/Lambda ~ Gamma(r/2, rate n/2),
    E Lambda^(-1/2) 1{Lambda >= y} = sqrt(2/n) gamma((r+1)/2, n / (2y)) / Gamma(r/2).
    """
    _check_n(n)
    if not r > 2:
        raise DomainError(f"Poisson-inverse gamma bound needs r > 2 for a finite mean intensity, got {r}")
    s2 = d.sigma2
    sigma = math.sqrt(s2)
    norm = gamma_fn(0.5 * r)
    coef = math.sqrt(2.0 / n) / sigma

    def parts(x):
        if x == 0:
            return 0.0, 0.0
        z = n * s2 / (2.0 * x * x)
        _, up = _inc(0.5 * r, z)
        low, _ = _inc(0.5 * (r + 1.0), z)
        return up / norm, coef * abs(x) * low / norm

    return _mixed_report("sichel", d, parts, C_IID, math.sqrt(n * s2 / r), LimitLaw("student", r))


# -- total variation between binomial and Poisson ------------------------------


def tv_binomial_poisson(n: int, p: float) -> float:
    """Exact sum over k of |P(Bin(n, p) = k) - P(Pois(np) = k)|, checked against 2p min{2, np}."""
    if n < 1:
        raise DomainError("n must be positive")
    _check_probs([p])
    lam = n * p
    total = 0.0
    for k in range(n + 1):
        if p == 1.0:
            b = 1.0 if k == n else 0.0
        else:
            b = math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                         + k * math.log(p) + (n - k) * math.log1p(-p))
        q = math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))
        total += abs(b - q)
    k = n + 1
    while True:
        q = math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))
        total += q
        if q < 1e-17 and k > lam:
            break
        k += 1
    limit = 2.0 * p * min(2.0, lam)
    assert total <= limit + 1e-12, (n, p, total, limit)
    return total
