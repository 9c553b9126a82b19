"""Scale mixtures of the normal law: Laplace, variance-gamma and Student.

All three are CDFs of Z * sqrt(V) for Z standard normal and V a positive
mixing variable independent of Z.  Values for x > 0 are obtained by symmetry
from x < 0 so that both tails keep full absolute accuracy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .specfun import DomainError, gamma_fn, std_normal_cdf

__all__ = [
    "laplace_cdf",
    "variance_gamma_cdf",
    "student_cdf",
    "student_cdf_density",
    "MixingKind",
    "MixingLaw",
    "mixture_cdf",
    "LimitLaw",
]

_SQRT2 = math.sqrt(2.0)
_QUAD = dict(epsabs=1e-14, epsrel=1e-12, limit=500)


def _check_x(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    return x


def laplace_cdf(x: float) -> float:
    """Laplace law with unit variance (density exp(-sqrt2 |x|) / sqrt2)."""
    x = _check_x(x)
    if x <= 0:
        return 0.5 * math.exp(_SQRT2 * x)
    return 1.0 - 0.5 * math.exp(-_SQRT2 * x)


_QUAD_REL = dict(epsabs=0.0, epsrel=1e-12, limit=500)


def _log_weight(inverse: bool, a: float, s: float):
    """log of (mixing density at e^u) * e^u, and a u-range holding all but e^-40 of it."""
    bulk = math.log(a + 40.0 * math.sqrt(a) + 60.0)
    thin = 50.0 / a + 5.0
    if inverse:
        def log_w(u):
            return a * math.log(s) - math.lgamma(a) - a * u - s * math.exp(-u)

        return log_w, math.log(s / a), (math.log(s) - bulk, math.log(s) + thin)

    def log_w(u):
        return a * (u - math.log(s)) - math.lgamma(a) - math.exp(u) / s

    return log_w, math.log(a * s), (math.log(s) - thin, math.log(s) + bulk)


def _mix_left(c: float, power: float, inverse: bool, a: float, s: float) -> float:
    """E Phi(c L^power) for c < 0, L gamma (or inverse gamma) with shape a, scale (rate) s.

    Integrates over u = log L, split at the weight's mode and at the point
    where c L^power = -1, beyond which the normal factor dies off.
    """
    log_w, centre, (u_lo, u_hi) = _log_weight(inverse, a, s)

    def f(u):
        lw = log_w(u)
        if lw < -745.0:
            return 0.0
        return std_normal_cdf(c * math.exp(power * u)) * math.exp(lw)

    u_star = -math.log(-c) / power
    cuts = sorted({u_lo, u_hi, min(max(centre, u_lo), u_hi), min(max(u_star, u_lo), u_hi)})
    return math.fsum(integrate.quad(f, lo, hi, **_QUAD_REL)[0] for lo, hi in zip(cuts, cuts[1:]))


def variance_gamma_cdf(r: float, x: float) -> float:
    """Symmetric variance-gamma CDF: E Phi(x / sqrt(V)), V ~ Gamma(r, 1)."""
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"shape r must be positive, got {r}")
    x = _check_x(x)
    if x == 0:
        return 0.5
    left = _mix_left(-abs(x), -0.5, False, r, 1.0)
    return left if x < 0 else 1.0 - left


def student_cdf(r: float, x: float) -> float:
    """Student CDF with r degrees of freedom via its gamma-mixture form.

    T_r(x) = E Phi(x sqrt(2U / r)) with U ~ Gamma(r/2, 1).
    """
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"degrees of freedom must be positive, got {r}")
    x = _check_x(x)
    if x == 0:
        return 0.5
    left = _mix_left(-abs(x) * math.sqrt(2.0 / r), 0.5, False, 0.5 * r, 1.0)
    return left if x < 0 else 1.0 - left


def _student_density(r: float, t: float) -> float:
    log_c = math.lgamma(0.5 * (r + 1.0)) - math.lgamma(0.5 * r) - 0.5 * math.log(math.pi * r)
    return math.exp(log_c - 0.5 * (r + 1.0) * math.log1p(t * t / r))


def student_cdf_density(r: float, x: float) -> float:
    """Student CDF by direct quadrature of the density (independent route)."""
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"degrees of freedom must be positive, got {r}")
    x = _check_x(x)
    if x == 0:
        return 0.5
    a = abs(x)
    # the left tail integral over (-inf, -a): substitute t = -a / s, s in (0, 1]
    def g(s):
        return _student_density(r, a / s) * a / (s * s) if s > 0 else 0.0

    left, _ = integrate.quad(g, 0.0, 1.0, **_QUAD)
    return left if x < 0 else 1.0 - left


class MixingKind(enum.Enum):
    DEGENERATE = "degenerate"
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    INVERSE_GAMMA = "inverse_gamma"


@dataclass(frozen=True)
class MixingLaw:
    """Law of a positive mixing variable Lambda.

    ``gamma``: density lambda^(shape-1) e^(-lambda/scale) / (scale^shape Gamma(shape)).
    ``inverse_gamma``: density rate^shape lambda^(-shape-1) e^(-rate/lambda) / Gamma(shape).
    ``exponential`` is gamma with shape 1; ``degenerate`` puts all mass at ``scale``.
    """

    kind: MixingKind
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("mixing-law parameters must be positive")

    @classmethod
    def degenerate(cls, value: float) -> "MixingLaw":
        return cls(MixingKind.DEGENERATE, 1.0, value)

    @classmethod
    def exponential(cls, mean: float = 1.0) -> "MixingLaw":
        return cls(MixingKind.EXPONENTIAL, 1.0, mean)

    @classmethod
    def gamma(cls, shape: float, scale: float = 1.0) -> "MixingLaw":
        return cls(MixingKind.GAMMA, shape, scale)

    @classmethod
    def inverse_gamma(cls, shape: float, rate: float) -> "MixingLaw":
        return cls(MixingKind.INVERSE_GAMMA, shape, rate)

    @property
    def has_mean(self) -> bool:
        return self.kind is not MixingKind.INVERSE_GAMMA or self.shape > 1.0

    @property
    def mean(self) -> float:
        if self.kind is MixingKind.DEGENERATE:
            return self.scale
        if self.kind in (MixingKind.EXPONENTIAL, MixingKind.GAMMA):
            return self.shape * self.scale
        if self.shape > 1.0:
            return self.scale / (self.shape - 1.0)
        return math.inf

    def density(self, lam: float) -> float:
        if lam <= 0:
            return 0.0
        a, s = self.shape, self.scale
        if self.kind in (MixingKind.EXPONENTIAL, MixingKind.GAMMA):
            return math.exp((a - 1.0) * math.log(lam) - lam / s - a * math.log(s) - math.lgamma(a))
        if self.kind is MixingKind.INVERSE_GAMMA:
            return math.exp(a * math.log(s) - (a + 1.0) * math.log(lam) - s / lam - math.lgamma(a))
        raise ValueError("degenerate law has no density")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind is MixingKind.DEGENERATE:
            return np.full(size, self.scale)
        if self.kind in (MixingKind.EXPONENTIAL, MixingKind.GAMMA):
            return rng.gamma(self.shape, self.scale, size=size)
        return self.scale / rng.gamma(self.shape, 1.0, size=size)


def mixture_cdf(m: MixingLaw, x: float, normalization: float) -> float:
    """E Phi(x sqrt(normalization / Lambda)) by quadrature over the mixing density.

    With ``normalization = E Lambda`` this is the limit law of a mixed Poisson
    random sum divided by sigma sqrt(E Lambda).  The integral runs over
    u = log(lambda), where every supported mixing density is smooth and unimodal.
    """
    if not normalization > 0:
        raise ValueError("normalization must be positive")
    x = _check_x(x)
    if x == 0:
        return 0.5
    if m.kind is MixingKind.DEGENERATE:
        return std_normal_cdf(x * math.sqrt(normalization / m.scale))
    inverse = m.kind is MixingKind.INVERSE_GAMMA
    left = _mix_left(-abs(x) * math.sqrt(normalization), -0.5, inverse, m.shape, m.scale)
    return left if x < 0 else 1.0 - left


@dataclass(frozen=True)
class LimitLaw:
    """Limit distribution attached to a bound: Normal, Laplace, VG(r), Student(r), Mixture."""

    kind: str
    r: float | None = None
    mixing: MixingLaw | None = None
    mixing_normalization: float | None = None

    def cdf(self, x: float) -> float:
        if self.kind == "normal":
            return std_normal_cdf(x)
        if self.kind == "laplace":
            return laplace_cdf(x)
        if self.kind == "variance_gamma":
            return variance_gamma_cdf(self.r, x)
        if self.kind == "student":
            return student_cdf(self.r, x)
        if self.kind == "mixture":
            return mixture_cdf(self.mixing, x, self.mixing_normalization)
        raise ValueError(f"unknown limit law {self.kind!r}")

    def cdf_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == "normal":
            from scipy.special import ndtr

            return ndtr(xs)
        if self.kind == "laplace":
            return np.where(xs <= 0, 0.5 * np.exp(_SQRT2 * np.minimum(xs, 0)), 1 - 0.5 * np.exp(-_SQRT2 * np.maximum(xs, 0)))
        return np.array([self.cdf(x) for x in xs])

    def label(self) -> str:
        if self.kind in ("variance_gamma", "student"):
            return f"{self.kind}({self.r:g})"
        return self.kind
