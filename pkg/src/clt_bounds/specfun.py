"""Scalar special functions: normal CDF, gamma and incomplete gamma functions.

The incomplete gamma pair uses the usual regime split: a power series for
``z < a + 1`` and a modified-Lentz continued fraction otherwise.  In each
regime the directly computed piece is exact to a few ulps and its complement
is obtained from ``Gamma(a)``, so ``lower + upper == Gamma(a)`` holds to
rounding.
"""

import math

__all__ = [
    "DomainError",
    "std_normal_cdf",
    "gamma_fn",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "inc_gamma_pair",
]

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_ITER = 10_000
_SQRT1_2 = 0.7071067811865476


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _finite(name, value):
    x = float(value)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return x


def std_normal_cdf(x):
    """Standard normal distribution function via ``erfc``."""
    x = _finite("x", x)
    return 0.5 * math.erfc(-x * _SQRT1_2)


def gamma_fn(a):
    a = _finite("a", a)
    if a <= 0.0:
        raise DomainError(f"gamma_fn requires a > 0, got {a}")
    return math.gamma(a)


def _prefactor(a, z):
    # z**a * exp(-z), evaluated in log space to dodge overflow for large a
    return math.exp(a * math.log(z) - z)


def _lower_series(a, z):
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _prefactor(a, z)
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, z={z})")


def _upper_cfrac(a, z):
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _prefactor(a, z)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, z={z})")


def inc_gamma_pair(a, z):
    """Return ``(lower, upper)`` incomplete gamma values at ``(a, z)``."""
    a = _finite("a", a)
    z = _finite("z", z)
    if a <= 0.0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a}")
    if z < 0.0:
        raise DomainError(f"incomplete gamma requires z >= 0, got {z}")
    full = math.gamma(a)
    if z == 0.0:
        return 0.0, full
    if z < a + 1.0:
        lower = _lower_series(a, z)
        return lower, full - lower
    upper = _upper_cfrac(a, z)
    return full - upper, upper


def lower_inc_gamma(a, z):
    """Lower incomplete gamma function, the integral of y**(a-1) e**-y over (0, z)."""
    return inc_gamma_pair(a, z)[0]


def upper_inc_gamma(a, z):
    """Upper incomplete gamma function, the integral of y**(a-1) e**-y over (z, inf)."""
    return inc_gamma_pair(a, z)[1]
