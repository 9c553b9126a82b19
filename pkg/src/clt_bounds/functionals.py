"""Lindeberg and truncated-Lyapunov fractions of a sum of independent summands.

For summands X_1..X_n with B_n^2 = sum of variances,

    L_n(eps) = B_n^-2 * sum E X_i^2 1{|X_i| >= eps B_n}
    M_n(eps) = B_n^-3 * sum E |X_i|^3 1{|X_i| <  eps B_n}

and gamma = M_n(1) / L_n(1) (infinite when L_n(1) = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dists import FiniteLattice, SummandDistribution, TwoPointSymmetric, _geq

__all__ = [
    "K_CONST",
    "FunctionalValues",
    "functionals_iid",
    "functionals_hetero",
    "functionals",
    "lemma1_gap",
    "Lemma2Result",
    "lemma2_check",
]

K_CONST = (17.0 + 7.0 * math.sqrt(7.0)) / 27.0
assert K_CONST < 1.3156


@dataclass(frozen=True)
class FunctionalValues:
    n: int
    epsilon: float
    L: float
    M: float
    B_n: float

    @property
    def gamma(self) -> float:
        if self.L > 0:
            return self.M / self.L
        return math.inf


def functionals_iid(d: SummandDistribution, n: int, eps: float = 1.0) -> FunctionalValues:
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = int(n)
    s2 = d.sigma2
    b = math.sqrt(n * s2)
    t = eps * b
    L = d.tail2(t) / s2
    M = d.core3(t) / (s2 * math.sqrt(s2) * math.sqrt(n))
    return FunctionalValues(n, float(eps), L, M, b)


def functionals_hetero(ds: Sequence[SummandDistribution], eps: float = 1.0) -> FunctionalValues:
    if len(ds) == 0:
        raise ValueError("need at least one summand distribution")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    b2 = math.fsum(d.sigma2 for d in ds)
    b = math.sqrt(b2)
    t = eps * b
    L = math.fsum(d.tail2(t) for d in ds) / b2
    M = math.fsum(d.core3(t) for d in ds) / (b2 * b)
    return FunctionalValues(len(ds), float(eps), L, M, b)


def functionals(d_or_ds, n: int | None = None, eps: float = 1.0) -> FunctionalValues:
    """Dispatch on a single i.i.d. law (needs ``n``) or a list of laws."""
    if isinstance(d_or_ds, SummandDistribution):
        if n is None:
            raise ValueError("n is required for a single distribution")
        return functionals_iid(d_or_ds, n, eps)
    return functionals_hetero(list(d_or_ds), eps)


def lemma1_gap(d_or_ds, n: int | None = None, eps: float = 1.0) -> float:
    """[L(eps) + M(eps)] - [L(1) + M(1)]; never negative up to rounding."""
    at_eps = functionals(d_or_ds, n, eps)
    at_one = functionals(d_or_ds, n, 1.0)
    return (at_eps.L + at_eps.M) - (at_one.L + at_one.M)


def _atoms(d: SummandDistribution):
    if isinstance(d, (FiniteLattice, TwoPointSymmetric)):
        return d.values, d.probs
    raise TypeError(f"exact enumeration needs a lattice summand, got {d.describe()}")


@dataclass(frozen=True)
class Lemma2Result:
    x: float
    p: float
    centered_third: float
    bound_k: float
    bound_p: float
    var_w: float
    var_lower: float
    stmt3_lhs: float
    stmt3_rhs: float
    passed: bool


def lemma2_check(ds: Sequence[SummandDistribution], x: float, p: float = 1.0, *, atol: float = 1e-12) -> Lemma2Result:
    """Check the truncated-summand inequalities by exact enumeration.

    With Y_i(x) = X_i 1{|X_i| < (1+x) B_n} / B_n and W_n(x) = sum Y_i(x):

    1. sum E|Y_i(x) - E Y_i(x)|^3 <= min{K M, p M + (5 - p) L / (1 + x)},
       L, M evaluated at 1 + x;
    2. 1 - 2 L_n(1 + x) <= Var W_n(x) <= 1;
    3. sum E|Y_i - E Y_i|^3 <= min{K M_n(1), M_n(1) + 4 L_n(1)}  (x = 0 form).

    ``atol`` absorbs floating-point rounding only.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if not 1.0 <= p <= K_CONST:
        raise ValueError(f"p must lie in [1, K], got {p}")
    ds = list(ds)
    atoms = [_atoms(d) for d in ds]
    b = math.sqrt(math.fsum(d.sigma2 for d in ds))

    def centered(level):
        third = 0.0
        var = 0.0
        for vals, probs in atoms:
            keep = np.array([not _geq(abs(v), level * b) for v in vals])
            y = np.where(keep, vals / b, 0.0)
            mu = float(np.dot(probs, y))
            third += float(np.dot(probs, np.abs(y - mu) ** 3))
            var += float(np.dot(probs, (y - mu) ** 2))
        return third, var

    fv = functionals_hetero(ds, 1.0 + x)
    third, var_w = centered(1.0 + x)
    bound_k = K_CONST * fv.M
    bound_p = p * fv.M + (5.0 - p) * fv.L / (1.0 + x)
    var_lower = 1.0 - 2.0 * fv.L

    fv1 = functionals_hetero(ds, 1.0)
    third0, _ = centered(1.0)
    stmt3_rhs = min(K_CONST * fv1.M, fv1.M + 4.0 * fv1.L)

    passed = (
        third <= min(bound_k, bound_p) + atol
        and var_lower - atol <= var_w <= 1.0 + atol
        and third0 <= stmt3_rhs + atol
    )
    return Lemma2Result(x, p, third, bound_k, bound_p, var_w, var_lower, third0, stmt3_rhs, passed)
