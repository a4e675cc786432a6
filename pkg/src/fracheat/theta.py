"""One-dimensional theta sums and the quadrature rules built on them."""

from __future__ import annotations

import math

import numpy as np

LOG_TINY = -745.0


def log_excess(t: np.ndarray, w: float) -> np.ndarray:
    """log f where f(t) = 2 sum_{k>=1} exp(-t w k^2), elementwise for t > 0.

    Small t w goes through the Poisson dual so the number of terms stays bounded.
    """
    t = np.asarray(t, dtype=float)
    tw = t * w
    out = np.empty_like(tw)
    small = tw < 1.0
    if np.any(small):
        a = tw[small]
        theta = np.sqrt(np.pi / a)
        m = 1
        while True:
            term = 2.0 * np.sqrt(np.pi / a) * np.exp(-(np.pi * m) ** 2 / a)
            theta = theta + term
            if np.all(term < 1e-18 * theta):
                break
            m += 1
        out[small] = np.log(theta - 1.0)
    big = ~small
    if np.any(big):
        a = tw[big]
        kmax = int(math.ceil(math.sqrt(40.0 / float(a.min()) + 1.0))) + 1
        s = np.ones_like(a)
        for k in range(2, kmax + 1):
            s += np.exp(-a * (k * k - 1))
        out[big] = -a + np.log(2.0 * s)
    return out


def log_product_minus_one(logf: list[np.ndarray]) -> np.ndarray:
    """log(prod_j (1 + f_j) - 1) from log f_j, without cancellation."""
    stack = np.vstack(logf)
    top = stack.max(axis=0)
    out = np.empty_like(top)
    tiny = top < -30.0
    # prod(1+f) - 1 = sum f_j + O(f^2); relative O(e^-30) when every f_j < e^-30
    if np.any(tiny):
        s = stack[:, tiny]
        m = s.max(axis=0)
        out[tiny] = m + np.log(np.sum(np.exp(s - m), axis=0))
    if np.any(~tiny):
        f = np.exp(stack[:, ~tiny])
        out[~tiny] = np.log(np.expm1(np.sum(np.log1p(f), axis=0)))
    return out


def log_product(logf: list[np.ndarray]) -> np.ndarray:
    """log prod_j (1 + f_j)."""
    return np.sum(np.log1p(np.exp(np.vstack(logf))), axis=0)


def image_sum(phi: float, p: float, t: float) -> tuple[float, float]:
    """(4 pi t)^{-1/2} sum_m exp(-(p (phi + 2 pi m))^2 / (4t)) and a bound on the omitted terms.

    phi should be wrapped into [-pi, pi].
    """
    pref = 1.0 / math.sqrt(4 * math.pi * t)
    terms = [math.exp(-((p * phi) ** 2) / (4 * t))]
    m = 1
    while True:
        a = math.exp(-((p * (phi + 2 * math.pi * m)) ** 2) / (4 * t))
        b = math.exp(-((p * (phi - 2 * math.pi * m)) ** 2) / (4 * t))
        terms.extend([a, b])
        if max(a, b) < 1e-18 * terms[0] or max(a, b) == 0.0:
            break
        m += 1
    total = math.fsum(terms)
    # Gaussian tails decay faster than geometrically past the last kept term
    nxt = math.exp(-((p * (2 * math.pi * (m + 1) - abs(phi))) ** 2) / (4 * t))
    return pref * total, pref * 2 * nxt / (1 - math.exp(-(p * math.pi) ** 2 / t))


def spectral_sum(phi: float, p: float, t: float, tol: float = 1e-18) -> float:
    """(1 / (2 pi p)) sum_k exp(-t k^2 / p^2) cos(k phi)."""
    terms = [1.0]
    k = 1
    while True:
        e = math.exp(-t * k * k / (p * p))
        terms.append(2 * e * math.cos(k * phi))
        if e < tol:
            break
        k += 1
    return math.fsum(terms) / (2 * math.pi * p)


# ---------------------------------------------------------------------------
# exp-sinh double exponential rule on [c, inf)


def exp_sinh_nodes(c: float, h: float = 1.0 / 32, xmax: float = 4.5):
    """Nodes u and weights w for int_c^inf g(u) du ~ sum w g(u)."""
    x = np.arange(-xmax, xmax + h / 2, h)
    e = np.exp(0.5 * np.pi * np.sinh(x))
    u = c + e
    w = h * 0.5 * np.pi * np.cosh(x) * e
    keep = u < 1e300
    return u[keep], w[keep]


def richardson(values, ratio: float, orders) -> np.ndarray:
    """Richardson table for samples at h, h*ratio, h*ratio^2, ...

    ``orders`` are the error exponents eliminated one per stage.  Returns
    the last row of the table; the final entry is the best estimate.
    """
    row = np.asarray(values, dtype=float)
    for p in orders:
        if row.size < 2:
            break
        f = ratio ** p
        row = (row[1:] - f * row[:-1]) / (1 - f)
    return row


def excess_complex(t: np.ndarray, w: float) -> np.ndarray:
    """f(t) = 2 sum_{k>=1} exp(-t w k^2) for complex t with Re t > 0."""
    t = np.asarray(t, dtype=complex)
    tw = t * w
    out = np.empty_like(tw)
    small = np.abs(tw) < 1.0
    if np.any(small):
        a = tw[small]
        root = np.sqrt(np.pi / a)
        theta = root.copy()
        m = 1
        while True:
            term = 2.0 * root * np.exp(-(np.pi * m) ** 2 / a)
            theta = theta + term
            if np.all(np.abs(term) < 1e-18 * np.abs(theta)):
                break
            m += 1
        out[small] = theta - 1.0
    big = ~small
    if np.any(big):
        a = tw[big]
        kmax = int(math.ceil(math.sqrt(40.0 / float(a.real.min())))) + 1
        s = np.zeros_like(a)
        for k in range(kmax, 0, -1):
            s += np.exp(-a * k * k)
        out[big] = 2.0 * s
    return out


def product_minus_one(f: list[np.ndarray]) -> np.ndarray:
    """prod_j (1 + f_j) - 1, accumulated without cancellation for small f."""
    acc = np.zeros_like(f[0])
    for fj in f:
        acc = acc + fj + acc * fj
    return acc
