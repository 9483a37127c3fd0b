"""Hand-rolled special functions: Lambert W0, upper incomplete gamma, zeta.

Implementations follow the classic numerical recipes: Halley iteration for W0,
a power-series / Legendre-continued-fraction split at x = a + 1 for the
incomplete gamma, and Euler--Maclaurin summation for zeta.
"""

import math

from .errors import DomainError

_INV_E = math.exp(-1.0)


def lambert_w0(x):
    """Principal branch of the product logarithm, defined for x >= -1/e."""
    if x < -_INV_E - 1e-12:
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x <= -_INV_E:
        return -1.0
    if x == 0.0:
        return 0.0
    # starting guess
    if x < 1.0:
        # series around 0: w = x - x^2 + 3/2 x^3 ...
        w = x * (1.0 - x + 1.5 * x * x)
        if x < -0.3:
            # near the branch point use the standard sqrt expansion
            p = math.sqrt(2.0 * (math.e * x + 1.0))
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    else:
        w = math.log(x)
        if w > 1.0:
            w -= math.log(w)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        # Halley step
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def _lower_gamma_series(a, x):
    # gamma(a,x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x))


def _upper_gamma_cf(a, x):
    # Legendre continued fraction, modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x))


def upper_incomplete_gamma(a, x):
    """Gamma(a, x) = int_x^inf t^(a-1) e^-t dt for a > 0, x >= 0."""
    if a <= 0:
        raise DomainError(f"upper_incomplete_gamma requires a > 0, got a={a}")
    if x < 0:
        raise DomainError(f"upper_incomplete_gamma requires x >= 0, got x={x}")
    if x == 0.0:
        return math.gamma(a)
    if x < a + 1.0:
        return math.gamma(a) - _lower_gamma_series(a, x)
    return _upper_gamma_cf(a, x)


# Bernoulli numbers B_2 .. B_16 for the Euler--Maclaurin tail
_BERNOULLI = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
]


def riemann_zeta(r):
    """zeta(r) for real r > 1 via Euler--Maclaurin with N=24 explicit terms."""
    if r <= 1.0:
        raise DomainError(f"riemann_zeta requires r > 1, got {r}")
    n = 24
    total = 0.0
    for k in range(1, n):
        total += k ** (-r)
    total += 0.5 * n ** (-r)
    total += n ** (1.0 - r) / (r - 1.0)
    # correction terms: B_2j/(2j)! * (r)(r+1)...(r+2j-2) * n^(-r-2j+1)
    factor = n ** (-r - 1.0) * r
    fact = 2.0
    for j, b2j in enumerate(_BERNOULLI, start=1):
        total += b2j / fact * factor
        # advance to the next even order
        factor *= (r + 2 * j - 1) * (r + 2 * j) / (n * n)
        fact *= (2 * j + 1) * (2 * j + 2)
    return total
