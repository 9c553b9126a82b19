"""Zero-mean summand distributions and the growth-function class.

Every bound in the package consumes the summand only through a handful of
truncated moments, so each family exposes exact evaluators for them:

* ``trunc_second_moment_tail(d, t)``  = E X^2 1{|X| >= t}
* ``trunc_second_moment_core(d, t)``  = E X^2 1{|X| <  t}
* ``trunc_third_abs_moment_core(d, t)`` = E |X|^3 1{|X| < t}
* ``weighted_second_moment(d, g)``    = E X^2 g(X)
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "SummandDistribution",
    "FiniteLattice",
    "Rademacher",
    "TwoPointSymmetric",
    "UniformSymmetric",
    "SymmetricPareto",
    "GrowthFunction",
    "GrowthCheck",
    "variance",
    "trunc_second_moment_tail",
    "trunc_second_moment_core",
    "trunc_third_abs_moment_core",
    "weighted_second_moment",
    "verify_growth_function",
    "default_growth_grid",
    "load_lattice_csv",
    "growth_abs",
    "growth_capped",
    "growth_power",
    "growth_log1p",
    "parse_growth",
]

MEAN_TOL = 1e-9
PROB_TOL = 1e-12
# relative slack when comparing |x| with a truncation level; keeps atoms that sit
# exactly on B_n on the ">=" side despite rounding in sqrt(n * sigma^2)
TIE_RTOL = 1e-12


def _geq(x: float, t: float) -> bool:
    return x >= t * (1.0 - TIE_RTOL)


class SummandDistribution:
    """Base class for a zero-mean, finite positive variance summand law."""

    symmetric: bool = True
    is_lattice: bool = False

    @property
    def sigma2(self) -> float:
        raise NotImplementedError

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def tail2(self, t: float) -> float:
        raise NotImplementedError

    def core3(self, t: float) -> float:
        raise NotImplementedError

    def core2(self, t: float) -> float:
        return self.sigma2 - self.tail2(t)

    def third_abs_moment(self) -> float:
        return self.core3(math.inf)

    def expect(self, h: Callable[[float], float], breaks: Sequence[float] = ()) -> float:
        """E h(X) for a function vanishing fast enough in the tails.

        ``breaks`` lists |x| values where h jumps or kinks; continuous laws
        split their quadrature there.
        """
        raise NotImplementedError

    def scaled(self, c: float) -> "SummandDistribution":
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class FiniteLattice(SummandDistribution):
    """Finitely supported law given by ``(value, probability)`` atoms.

    Atoms with equal values are merged, zero-probability atoms dropped, and a
    mean within ``MEAN_TOL`` of zero is subtracted off.
    """

    atoms: tuple[tuple[float, float], ...]
    _sigma2: float = field(init=False, repr=False, compare=False)

    is_lattice = True

    def __post_init__(self):
        merged: dict[float, float] = {}
        for v, p in self.atoms:
            v, p = float(v), float(p)
            if not (math.isfinite(v) and math.isfinite(p)):
                raise ValueError("lattice atoms must be finite")
            if p < -PROB_TOL:
                raise ValueError(f"negative probability {p} at value {v}")
            merged[v] = merged.get(v, 0.0) + max(p, 0.0)
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        mean = sum(v * p for v, p in merged.items())
        if abs(mean) > MEAN_TOL:
            raise ValueError(f"lattice mean is {mean!r}; summands must have zero mean")
        atoms = tuple(sorted((v - mean, p) for v, p in merged.items() if p > 0.0))
        s2 = sum(v * v * p for v, p in atoms)
        if not s2 > 0.0:
            raise ValueError("lattice variance must be positive")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_sigma2", s2)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    @property
    def symmetric(self) -> bool:  # type: ignore[override]
        lookup = dict(self.atoms)
        scale = max(abs(v) for v, _ in self.atoms)
        for v, p in self.atoms:
            match = [q for w, q in lookup.items() if abs(w + v) <= 1e-12 * scale]
            if len(match) != 1 or abs(match[0] - p) > PROB_TOL:
                return False
        return True

    @property
    def sigma2(self) -> float:
        return self._sigma2

    def tail2(self, t):
        return sum(v * v * p for v, p in self.atoms if _geq(abs(v), t))

    def core2(self, t):
        return sum(v * v * p for v, p in self.atoms if not _geq(abs(v), t))

    def core3(self, t):
        return sum(abs(v) ** 3 * p for v, p in self.atoms if not _geq(abs(v), t))

    def expect(self, h, breaks=()):
        return math.fsum(h(v) * p for v, p in self.atoms)

    def scaled(self, c):
        return FiniteLattice(tuple((c * v, p) for v, p in self.atoms))

    def sample(self, rng, size):
        return rng.choice(self.values, size=size, p=self.probs)

    def integer_grid(self) -> tuple[float, np.ndarray, int]:
        """Express the atoms as ``step * k`` for integers ``k``.

        Returns ``(step, pmf, kmin)`` with ``pmf[j]`` the mass at ``step * (kmin + j)``.
        Raises ``ValueError`` when the values are not commensurate.
        """
        fracs = [Fraction(v).limit_denominator(10**6) for v, _ in self.atoms]
        for (v, _), f in zip(self.atoms, fracs):
            if abs(float(f) - v) > 1e-9 * max(1.0, abs(v)):
                raise ValueError(f"value {v} is not on a rational lattice")
        nonzero = [abs(f) for f in fracs if f != 0]
        step_frac = reduce(_frac_gcd, nonzero)
        ks = [int(f / step_frac) for f in fracs]
        kmin, kmax = min(ks), max(ks)
        pmf = np.zeros(kmax - kmin + 1)
        for k, (_, p) in zip(ks, self.atoms):
            pmf[k - kmin] += p
        return float(step_frac), pmf, kmin

    def describe(self):
        body = ", ".join(f"{v:g}:{p:g}" for v, p in self.atoms)
        return f"lattice({body})"


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


@dataclass(frozen=True)
class TwoPointSymmetric(SummandDistribution):
    """X = +-scale with probability 1/2 each."""

    scale: float = 1.0

    is_lattice = True

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def sigma2(self):
        return self.scale**2

    def tail2(self, t):
        return self.scale**2 if _geq(self.scale, t) else 0.0

    def core3(self, t):
        return 0.0 if _geq(self.scale, t) else self.scale**3

    def expect(self, h, breaks=()):
        return 0.5 * (h(self.scale) + h(-self.scale))

    def scaled(self, c):
        return TwoPointSymmetric(self.scale * c)

    def as_lattice(self) -> FiniteLattice:
        return FiniteLattice(((-self.scale, 0.5), (self.scale, 0.5)))

    @property
    def atoms(self):
        return self.as_lattice().atoms

    @property
    def values(self):
        return np.array([-self.scale, self.scale])

    @property
    def probs(self):
        return np.array([0.5, 0.5])

    def integer_grid(self):
        return self.scale, np.array([0.5, 0.0, 0.5]), -1

    def sample(self, rng, size):
        return self.scale * (2.0 * rng.integers(0, 2, size=size) - 1.0)

    def describe(self):
        return f"two_point({self.scale:g})"


class Rademacher(TwoPointSymmetric):
    """X = +-1 with probability 1/2 each."""

    def __init__(self):
        super().__init__(1.0)

    def __repr__(self):
        return "Rademacher()"

    def describe(self):
        return "rademacher"


@dataclass(frozen=True)
class UniformSymmetric(SummandDistribution):
    """Uniform law on [-halfwidth, halfwidth]."""

    halfwidth: float = 1.0

    def __post_init__(self):
        if not (self.halfwidth > 0 and math.isfinite(self.halfwidth)):
            raise ValueError(f"halfwidth must be positive, got {self.halfwidth}")

    @property
    def sigma2(self):
        return self.halfwidth**2 / 3.0

    def tail2(self, t):
        a = self.halfwidth
        t = min(max(t, 0.0), a)
        return (a**3 - t**3) / (3.0 * a)

    def core2(self, t):
        a = self.halfwidth
        t = min(max(t, 0.0), a)
        return t**3 / (3.0 * a)

    def core3(self, t):
        a = self.halfwidth
        t = min(max(t, 0.0), a)
        return t**4 / (4.0 * a)

    def expect(self, h, breaks=()):
        a = self.halfwidth
        cuts = sorted({0.0, a, *(abs(b) for b in breaks if 0.0 < abs(b) < a)})
        f = lambda x: h(x) + h(-x)  # noqa: E731
        val = math.fsum(integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)[0] for lo, hi in zip(cuts, cuts[1:]))
        return val / (2.0 * a)

    def scaled(self, c):
        return UniformSymmetric(self.halfwidth * c)

    def sample(self, rng, size):
        return rng.uniform(-self.halfwidth, self.halfwidth, size=size)

    def describe(self):
        return f"uniform({self.halfwidth:g})"


@dataclass(frozen=True)
class SymmetricPareto(SummandDistribution):
    """Symmetric Pareto law with density (alpha/2) s^alpha |x|^(-alpha-1) on |x| >= s.

    ``alpha > 2`` keeps the variance finite; for ``alpha <= 3`` the third
    absolute moment is infinite.
    """

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 2 and math.isfinite(self.alpha)):
            raise ValueError(f"tail index alpha must exceed 2, got {self.alpha}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def sigma2(self):
        return self.alpha * self.scale**2 / (self.alpha - 2.0)

    def tail2(self, t):
        a, s = self.alpha, self.scale
        if t <= s:
            return self.sigma2
        return a * s**a * t ** (2.0 - a) / (a - 2.0)

    def core3(self, t):
        a, s = self.alpha, self.scale
        if t <= s:
            return 0.0
        if math.isinf(t):
            return math.inf if a <= 3.0 else a * s**3 / (a - 3.0)
        if a == 3.0:
            return a * s**3 * math.log(t / s)
        return a * s**a * (t ** (3.0 - a) - s ** (3.0 - a)) / (3.0 - a)

    def density(self, x: float) -> float:
        x = abs(x)
        if x < self.scale:
            return 0.0
        return 0.5 * self.alpha * self.scale**self.alpha * x ** (-self.alpha - 1.0)

    def expect(self, h, breaks=()):
        """E h(X) via w = (s/|x|)^(a-2), under which E X^2 q(X) = sigma^2 * integral of q over (0, 1].

        The sliver w < w_min (|x| > 1e100) is closed with the endpoint value of
        h(x)/x^2, exact when that ratio settles at infinity, as it does for
        every functional used by the bounds.
        """
        a, s = self.alpha, self.scale
        p = 1.0 / (a - 2.0)

        def q(w):
            x = s * w ** (-p)
            return 0.5 * (h(x) + h(-x)) / (x * x)

        log_wmin = (a - 2.0) * (math.log(s) - math.log(1e100))
        log_wmin = min(max(log_wmin, -600.0), -1.0)
        cuts = set(np.exp(np.linspace(log_wmin, 0.0, int(-log_wmin // 2.0) + 2)))
        cuts |= {(s / abs(b)) ** (a - 2.0) for b in breaks if abs(b) > s and (a - 2.0) * math.log(s / abs(b)) > log_wmin}
        cuts = sorted(cuts)
        body = math.fsum(integrate.quad(q, lo, hi, epsabs=1e-16, epsrel=1e-11, limit=200)[0] for lo, hi in zip(cuts, cuts[1:]))
        return self.sigma2 * (body + cuts[0] * q(cuts[0]))

    def scaled(self, c):
        return SymmetricPareto(self.alpha, self.scale * c)

    def sample(self, rng, size):
        mag = self.scale * rng.random(size) ** (-1.0 / self.alpha)
        return np.where(rng.random(size) < 0.5, -mag, mag)

    def describe(self):
        return f"pareto(alpha={self.alpha:g}, scale={self.scale:g})"


def variance(d: SummandDistribution) -> float:
    return d.sigma2


def trunc_second_moment_tail(d: SummandDistribution, t: float) -> float:
    if not t > 0:
        raise ValueError(f"truncation level must be positive, got {t}")
    return d.tail2(t)


def trunc_second_moment_core(d: SummandDistribution, t: float) -> float:
    if not t > 0:
        raise ValueError(f"truncation level must be positive, got {t}")
    return d.core2(t)


def trunc_third_abs_moment_core(d: SummandDistribution, t: float) -> float:
    if not t > 0:
        raise ValueError(f"truncation level must be positive, got {t}")
    return d.core3(t)


# --------------------------------------------------------------------------
# growth functions


@dataclass(frozen=True)
class GrowthFunction:
    """Member (candidate) of the class of even growth functions.

    ``power`` is the exponent p with g(x) ~ x**p at infinity when known
    analytically; it is used to decide divergence of E X^2 g(X) for
    power-tailed summands.
    """

    evaluator: Callable[[float], float]
    label: str
    power: float | None = None
    kinks: tuple[float, ...] = ()

    def __call__(self, x: float) -> float:
        return float(self.evaluator(x))


def growth_abs() -> GrowthFunction:
    return GrowthFunction(abs, "abs", power=1.0)


def growth_capped(cap: float) -> GrowthFunction:
    if not cap > 0:
        raise ValueError("cap must be positive")
    return GrowthFunction(lambda x: min(abs(x), cap), f"min:{cap:g}", power=0.0, kinks=(cap,))


def growth_power(p: float) -> GrowthFunction:
    return GrowthFunction(lambda x: abs(x) ** p, f"pow:{p:g}", power=p)


def growth_log1p() -> GrowthFunction:
    return GrowthFunction(lambda x: math.log1p(abs(x)), "log1p", power=0.0)


def parse_growth(spec: str) -> GrowthFunction:
    """Build a growth function from ``abs``, ``log1p``, ``min:C`` or ``pow:P``."""
    spec = spec.strip()
    if spec == "abs":
        return growth_abs()
    if spec == "log1p":
        return growth_log1p()
    name, _, arg = spec.partition(":")
    if name == "min" and arg:
        return growth_capped(float(arg))
    if name == "pow" and arg:
        return growth_power(float(arg))
    raise ValueError(f"unknown growth function {spec!r}")


def default_growth_grid() -> np.ndarray:
    return np.logspace(-6, 6, 200)


@dataclass(frozen=True)
class GrowthCheck:
    passed: bool
    violation: str | None = None
    at: float | None = None

    def __bool__(self):
        return self.passed


def verify_growth_function(
    g: GrowthFunction, grid: Sequence[float] | None = None, *, include_default: bool = True
) -> GrowthCheck:
    """Best-effort check of the class properties on a grid of positive points.

    Checks evenness, nonnegativity (strict positivity for x > 0) and that both
    g(x) and x/g(x) are nondecreasing.  Passing means no violation was found on
    the grid, not a proof of membership.
    """
    if grid is not None and len(grid) == 0:
        raise ValueError("growth-function grid must be nonempty")
    pts = [] if grid is None else [float(x) for x in grid]
    if any(b < a for a, b in zip(pts, pts[1:])):
        raise ValueError("grid must be sorted ascending")
    if any(x <= 0 for x in pts):
        raise ValueError("grid points must be positive")
    if include_default or not pts:
        pts = sorted(set(pts) | set(default_growth_grid().tolist()))

    rtol = 1e-12
    if g(0.0) < 0:
        return GrowthCheck(False, "negative at 0", 0.0)
    prev_g = prev_ratio = None
    for x in pts:
        gx = g(x)
        if not math.isfinite(gx):
            return GrowthCheck(False, "non-finite value", x)
        if abs(g(-x) - gx) > rtol * max(1.0, abs(gx)):
            return GrowthCheck(False, "not even", x)
        if gx <= 0:
            return GrowthCheck(False, "not positive for x > 0", x)
        ratio = x / gx
        if prev_g is not None:
            if gx < prev_g * (1 - rtol):
                return GrowthCheck(False, "g decreasing", x)
            if ratio < prev_ratio * (1 - rtol):
                return GrowthCheck(False, "x/g(x) decreasing", x)
        prev_g, prev_ratio = gx, ratio
    return GrowthCheck(True)


def _tail_power(g: GrowthFunction) -> float:
    if g.power is not None:
        return g.power
    x1, x2 = 1e8, 1e10
    return math.log(g(x2) / g(x1)) / math.log(x2 / x1)


def weighted_second_moment(d: SummandDistribution, g: GrowthFunction) -> float:
    """E X^2 g(X); ``math.inf`` when the integral diverges."""
    if isinstance(d, SymmetricPareto):
        # integrand ~ x^(1 - alpha + p) at infinity
        if _tail_power(g) >= d.alpha - 2.0 - 1e-9:
            return math.inf
    return d.expect(lambda x: x * x * g(x), g.kinks)


def load_lattice_csv(path) -> FiniteLattice:
    """Read ``value,probability`` rows (header and ``#`` comments allowed)."""
    atoms = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                v, p = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if atoms:
                    raise ValueError(f"bad lattice row {row!r} in {path}") from None
                continue  # header line
            atoms.append((v, p))
    if not atoms:
        raise ValueError(f"no atoms found in {path}")
    return FiniteLattice(tuple(atoms))
