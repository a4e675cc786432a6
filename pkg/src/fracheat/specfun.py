"""Complex log-Gamma, 1/Gamma, Gamma ratios and the upper incomplete Gamma.

log_gamma uses the Stirling series with Bernoulli corrections once |z| >= 12
and Re z >= 0, and a recurrence ladder to get there.  Summing principal
logarithms along the ladder keeps the result on the principal branch (the
continuation of the real log-Gamma with a cut on the negative axis).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleEncountered
from .power import as_power

STIRLING_CROSSOVER = 12.0
STIRLING_TERMS = 10
INCGAMMA_CF_THRESHOLD = 40.0
EULER_GAMMA = 0.57721566490153286060651209008240243

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@lru_cache(maxsize=None)
def bernoulli_table(order: int = 12) -> tuple[Fraction, ...]:
    """Exact B_2, B_4, ..., B_{2*order} (Akiyama-Tanigawa)."""
    size = 2 * order + 1
    a = [Fraction(0)] * (size + 1)
    out = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return tuple(out)


_STIRLING_COEFFS = tuple(
    float(b) / ((2 * j) * (2 * j - 1))
    for j, b in enumerate(bernoulli_table(STIRLING_TERMS), start=1)
)


def stirling_remainder_bound(z: complex, nterms: int = STIRLING_TERMS) -> float:
    """Bound on the Stirling remainder after ``nterms`` Bernoulli corrections."""
    N = nterms + 1
    b2n = abs(float(bernoulli_table(N)[N - 1]))
    sec = 1.0 / math.cos(cmath.phase(z) / 2.0)
    return b2n / (2 * N * (2 * N - 1)) * sec ** (2 * N) / abs(z) ** (2 * N - 1)


def _zeta_int(k: int) -> float:
    # Riemann zeta at integer k >= 2 by Euler-Maclaurin from N = 10
    N = 10
    head = math.fsum(n ** -float(k) for n in range(1, N))
    tail = N ** (1.0 - k) / (k - 1) + 0.5 * N ** -float(k)
    poch = float(k)
    for j, b in enumerate(bernoulli_table(8), start=1):
        tail += float(b) / math.factorial(2 * j) * poch * N ** (-k - 2 * j + 1)
        poch *= (k + 2 * j - 1) * (k + 2 * j)
    return head + tail


# log Gamma(1+e) = -gamma e + sum_{k>=2} (-1)^k zeta(k) e^k / k
_LOGGAMMA1_TAYLOR = tuple(
    (-1) ** k * _zeta_int(k) / k for k in range(2, 40)
)


def _log_gamma_near_one(eps: complex) -> complex:
    total = 0j
    for c in reversed(_LOGGAMMA1_TAYLOR):
        total = (total + c) * eps
    return (total - EULER_GAMMA) * eps


def is_gamma_pole(z) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _stirling(z: complex) -> complex:
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    corr = 0j
    p = zinv
    for c in _STIRLING_COEFFS:
        corr += c * p
        p *= zinv2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + corr


def log_gamma(z) -> complex:
    """Principal-branch log Gamma(z)."""
    z = complex(z)
    if is_gamma_pole(z):
        raise PoleEncountered(z, "log_gamma: pole of Gamma")
    if z.imag == 0.0 and z.real > 0.0 and z.real < 171.0 and z.real == math.floor(z.real):
        return complex(math.lgamma(z.real))
    # the ladder cancels to nothing near the zeros at 1 and 2
    if abs(z - 1.0) < 0.25:
        return _log_gamma_near_one(z - 1.0)
    if abs(z - 2.0) < 0.25:
        e = z - 2.0
        l1p = cmath.log(1.0 + e) if abs(e) > 1e-3 else e * (1 - e / 2 + e * e / 3 - e ** 3 / 4 + e ** 4 / 5)
        return _log_gamma_near_one(e) + l1p
    m = 0
    if z.real < 0.0:
        m = int(math.ceil(-z.real))
    while abs(z + m) < STIRLING_CROSSOVER:
        m += 1
    if m == 0:
        return _stirling(z)
    ladder = 0j
    for k in range(m):
        ladder += cmath.log(z + k)
    return _stirling(z + m) - ladder


def gamma(z) -> complex:
    return cmath.exp(log_gamma(z))


def recip_gamma(z) -> complex:
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    z = complex(z)
    if is_gamma_pole(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def recip_gamma_over_linear(s, p) -> complex:
    """(1/Gamma(s)) / (s - p), continuous at s = p for a non-positive integer p.

    Uses 1/Gamma(s) = Gamma(1-s) sin(pi s)/pi so that the zero of 1/Gamma at
    p cancels the linear factor without loss of precision.
    """
    s = complex(s)
    eps = s - p
    if not is_gamma_pole(p):
        if eps == 0:
            raise ZeroDivisionError("s equals p")
        return recip_gamma(s) / eps
    k = int(round(complex(p).real))
    if abs(eps) > 0.25:
        return recip_gamma(s) / eps
    x = math.pi * eps
    if abs(x) < 1e-4:
        sinc = 1.0 - x * x / 6.0 + x ** 4 / 120.0
    else:
        sinc = cmath.sin(x) / x
    sign = -1.0 if (k % 2) else 1.0
    return sign * gamma(1.0 - s) * sinc


def gamma_ratio(s, r) -> complex:
    """Gamma(s) / Gamma(r s).

    At common poles the ratio of residues is returned.  A pole of Gamma(s)
    where Gamma(rs) stays finite raises PoleEncountered.
    """
    r = as_power(r)
    s = complex(s)
    rs = r.value * s
    if is_gamma_pole(s):
        m = -int(round(s.real))
        if r.times_is_integer(m):
            k = (m * r.alpha) // r.beta if r.is_rational else 0
            sign = -1.0 if (m - k) % 2 else 1.0
            return complex(sign * r.value * math.factorial(k) / math.factorial(m))
        raise PoleEncountered(s, "Gamma(s) has a pole where Gamma(rs) is finite")
    if r.is_rational and s.imag == 0.0:
        rs_exact = Fraction(s.real).limit_denominator(10**9) * r.exact
        if rs_exact.denominator == 1 and rs_exact <= 0:
            return 0j
    if is_gamma_pole(rs):
        return 0j
    return cmath.exp(log_gamma(s) - log_gamma(rs))


def decay_profile(r, a: float, k: float, b_grid, log: bool = False) -> np.ndarray:
    """|a+ib|^k |Gamma(a+ib)/Gamma(r(a+ib))| over b_grid (or its logarithm)."""
    r = as_power(r)
    b = np.asarray(b_grid, dtype=float)
    if b.ndim != 1 or np.any(b <= 0) or np.any(np.diff(b) <= 0):
        raise ValueError("b_grid must be positive and strictly increasing")
    out = np.empty_like(b)
    for i, bi in enumerate(b):
        s = complex(a, bi)
        lv = k * math.log(abs(s)) + (log_gamma(s) - log_gamma(r.value * s)).real
        out[i] = lv
    return out if log else np.exp(out)


# ---------------------------------------------------------------------------
# upper incomplete Gamma, real order


def _exp1_series(x: float) -> float:
    # Gamma(0, x) = -gamma - log x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        add = term / k
        total += add
        if abs(add) < 1e-17 * max(abs(total), 1e-300) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _gamma_cf(z: float, x: float) -> float:
    """Legendre continued fraction for Gamma(z, x), modified Lentz."""
    tiny = 1e-300
    b = x + 1.0 - z
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, 5000):
        an = -i * (i - z)
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
    else:  # pragma: no cover
        raise ArithmeticError("continued fraction did not converge")
    return math.exp(-x + z * math.log(x)) * h


def _lower_series(z: float, x: float) -> float:
    # gamma(z, x) = x^z e^{-x} sum_k x^k / (z (z+1) ... (z+k))
    term = 1.0 / z
    total = term
    a = z
    for _ in range(10000):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total * math.exp(-x + z * math.log(x))


def _incgamma_base(z: float, x: float) -> float:
    if z == 1.0:
        return math.exp(-x)
    if z == 0.5:
        return math.sqrt(math.pi) * math.erfc(math.sqrt(x))
    if z == 0.0:
        return _exp1_series(x) if x <= 1.0 else _gamma_cf(0.0, x)
    raise ValueError(z)


def upper_incomplete_gamma(z: float, xi: float) -> float:
    """Gamma(z, xi) = int_xi^inf u^(z-1) e^(-u) du for real z and xi > 0."""
    z = float(z)
    xi = float(xi)
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    if xi > INCGAMMA_CF_THRESHOLD:
        return _gamma_cf(z, xi)
    twice = 2.0 * z
    if twice == math.floor(twice) and abs(z) <= 200:
        base = 1.0 if z == math.floor(z) else 0.5
        if z >= base:
            # upward: Gamma(z+1) = z Gamma(z) + xi^z e^{-xi}; all terms positive
            g = _incgamma_base(base, xi)
            w = base
            while w < z:
                g = w * g + math.exp(w * math.log(xi) - xi)
                w += 1.0
            return g
        if xi > 1.0:
            return _gamma_cf(z, xi)
        base = 0.0 if z == math.floor(z) else 0.5
        g = _incgamma_base(base, xi)
        w = base
        while w > z:
            # downward: Gamma(w-1) = (Gamma(w) - xi^(w-1) e^{-xi}) / (w-1)
            w -= 1.0
            g = (g - math.exp(w * math.log(xi) - xi)) / w
        return g
    if z > 0.0:
        if xi < z + 1.0:
            return math.gamma(z) - _lower_series(z, xi) if z < 171 else _gamma_cf(z, xi)
        return _gamma_cf(z, xi)
    if xi > 1.0:
        return _gamma_cf(z, xi)
    # negative non-half-integer order, small xi: recur down from (0, 1)
    w = z - math.floor(z)
    g = math.gamma(w) - _lower_series(w, xi)
    while w > z:
        w -= 1.0
        g = (g - math.exp(w * math.log(xi) - xi)) / w
    return g


def recip_gamma_derivative(z, radius: float = 0.25, nodes: int = 48) -> complex:
    """d/dz 1/Gamma(z) by the Cauchy integral; 1/Gamma is entire, so the rule converges geometrically."""
    z = complex(z)
    acc = 0j
    for j in range(nodes):
        e = cmath.exp(2j * math.pi * j / nodes)
        acc += recip_gamma(z + radius * e) / e
    return acc / (nodes * radius)
