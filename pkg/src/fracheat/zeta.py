"""Continued spectral zeta functions and kernels of complex powers.

For a torus model with heat trace Theta(t) = e^{-t xi} prod_j theta_j(t),
theta_j(t) = sum_k exp(-t k^2 / p_j^2), the Mellin integral

    Gamma(s) Z(s) = int_0^inf t^{s-1} (Theta(t) - P0) dt,   P0 = [xi == 0],

is split at t0.  Above t0 the integrand decays exponentially.  Below t0,
Poisson summation gives Theta(t) = e^{-t xi} V t^{-n/2} (1 + Ftil(pi^2/t))
with V = pi^{n/2} prod p_j and Ftil(u) = prod_j sum_m exp(-u p_j^2 m^2) - 1,
so that

    Gamma(s) Z(s) = I_large(s) + V pi^{2s-n} I_dual(n/2 - s)
                    + sum_m c_m t0^{s-p_m} / (s - p_m) - P0 t0^s / s,

with p_m = n/2 - m and c_m = V (-xi)^m / m!.  Multiplying by 1/Gamma(s)
and pairing each 1/(s - p_m) with it (recip_gamma_over_linear) gives Z on
all of C, exactly zero where the Gamma factor forces it.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NearPoleWarning, OnDiagonal, PoleEncountered, DomainError
from .models import SpectralModel, angle_difference, kernel_projection_density, torus_distance
from .power import as_power
from .specfun import is_gamma_pole, recip_gamma, recip_gamma_derivative, recip_gamma_over_linear
from .theta import (
    excess_complex,
    exp_sinh_nodes,
    log_excess,
    log_product,
    log_product_minus_one,
    product_minus_one,
)

NEAR_POLE = 1e-6
DE_STEP = 1.0 / 128


@dataclass(frozen=True)
class ZetaValue:
    s: complex
    value: complex | None
    is_pole: bool = False
    residue: complex | None = None

    def to_dict(self) -> dict:
        def pair(z):
            return None if z is None else [z.real, z.imag]

        return {"s": pair(self.s), "value": pair(self.value), "is_pole": self.is_pole, "residue": pair(self.residue)}


@dataclass(frozen=True)
class QKernelValue:
    """Value of the kernel of Laplacian^{-s} at (x, y)."""

    s: complex
    x: tuple
    y: tuple
    value: complex


# ---------------------------------------------------------------------------
# cached theta data on quadrature nodes


@dataclass(frozen=True)
class _DiagData:
    t0: float
    u0: float
    theta: float
    V: float
    P0: float
    poles: tuple  # (p_m, c_m)
    lu_large: np.ndarray
    lw_large: np.ndarray  # log(weight) + log G
    lu_dual: np.ndarray
    lw_dual: np.ndarray

    @property
    def log_t0(self) -> complex:
        return complex(math.log(self.t0), self.theta)


def split_point(model: SpectralModel) -> float:
    g2 = math.exp(2 * np.mean(np.log(model.radii)))
    t0 = math.pi * g2
    if model.shift * t0 > 1.0:
        t0 = 1.0 / model.shift
    return t0


# Ray angle for the Mellin integral.  Along arg t = theta every piece of
# Gamma(s) Z(s), the explicit pole terms included, carries e^{-theta Im s},
# offsetting the e^{-pi |Im s| / 2} decay of Gamma that would otherwise be
# lost to cancellation.  The best angle is the steepest-descent direction of
# whichever of t^{s-1} (large part) or u^{n/2-s-1} (dual part) dominates.
RAY_STEP = 0.05
RAY_MAX = 1.25


def ray_angle(s: complex, n: int = 1) -> float:
    b = abs(s.imag)
    if b <= 4.0:
        return 0.0
    A = max(s.real, n / 2 - s.real, 1.0)
    th = min(round(math.atan(b / A) / RAY_STEP) * RAY_STEP, RAY_MAX)
    return math.copysign(th, s.imag)


def _pole_ladder(model: SpectralModel, t0: float, V: float) -> tuple:
    xi = model.shift
    out = [(model.n / 2, V)]
    if xi == 0.0:
        return tuple(out)
    c = V
    m = 0
    while True:
        m += 1
        c *= -xi / m
        out.append((model.n / 2 - m, c))
        if abs(c) * t0 ** m < 1e-18 * V and m > 2:
            break
    return tuple(out)


@lru_cache(maxsize=128)
def _diag_data(model: SpectralModel, theta: float = 0.0) -> _DiagData:
    n = model.n
    xi = model.shift
    t0 = split_point(model)
    u0 = math.pi ** 2 / t0
    V = math.pi ** (n / 2) * math.prod(model.radii)
    P0 = 1.0 if xi == 0.0 else 0.0

    t, w = exp_sinh_nodes(t0, DE_STEP)
    u, wd = exp_sinh_nodes(u0, DE_STEP)
    if theta == 0.0:
        lf = [log_excess(t, 1.0 / p ** 2) for p in model.radii]
        lG = log_product_minus_one(lf) if xi == 0.0 else log_product(lf) - xi * t
        lg = [log_excess(u, p ** 2) for p in model.radii]
        lF = log_product_minus_one(lg) - math.pi ** 2 * xi / u
        lt, lu = np.log(t), np.log(u)
    else:
        rot = cmath.exp(1j * theta)
        tc, uc = t * rot, u / rot
        fc = [excess_complex(tc, 1.0 / p ** 2) for p in model.radii]
        G = product_minus_one(fc) if xi == 0.0 else np.exp(-xi * tc) * (1.0 + product_minus_one(fc))
        gc = [excess_complex(uc, p ** 2) for p in model.radii]
        F = product_minus_one(gc) * np.exp(-math.pi ** 2 * xi / uc)
        with np.errstate(divide="ignore"):
            lG = np.log(G) + 1j * theta
            lF = np.log(F) - 1j * theta
        lt, lu = np.log(t) + 1j * theta, np.log(u) - 1j * theta

    keep = np.isfinite(lG) & (lG.real > -745.0)
    keepd = np.isfinite(lF) & (lF.real > -745.0)
    return _DiagData(
        t0,
        u0,
        theta,
        V,
        P0,
        _pole_ladder(model, t0, V),
        lt[keep],
        np.log(w[keep]) + lG[keep],
        lu[keepd],
        np.log(wd[keepd]) + lF[keepd],
    )


def _mellin(lu: np.ndarray, lw: np.ndarray, w: complex) -> complex:
    """sum_i weight_i u_i^{w-1} G(u_i), all in log space."""
    z = (w - 1.0) * lu + lw
    return complex(np.sum(np.exp(z)))


def _entire_part(d: _DiagData, n: int, s: complex) -> complex:
    """I_large(s) + V pi^{2s-n} I_dual(n/2 - s)."""
    big = _mellin(d.lu_large, d.lw_large, s)
    dual = _mellin(d.lu_dual, d.lw_dual, n / 2 - s)
    return big + d.V * cmath.exp((2 * s - n) * math.log(math.pi)) * dual


def _pole_index(d: _DiagData, s: complex):
    for i, (p, c) in enumerate(d.poles):
        if s == p and not is_gamma_pole(p):
            return i
    return None


def _check_near_pole(d: _DiagData, s: complex):
    for p, _ in d.poles:
        if is_gamma_pole(p):
            continue
        dist = abs(s - p)
        if 0 < dist < NEAR_POLE:
            warnings.warn(f"s={s} is within {dist:.1e} of the pole {p}", NearPoleWarning, stacklevel=3)


def zeta_poles(model: SpectralModel) -> list[tuple[float, complex]]:
    """(pole, residue) pairs of the continued zeta function."""
    d = _diag_data(model, 0.0)
    return [(p, c * recip_gamma(p)) for p, c in d.poles if not is_gamma_pole(p)]


def _zeta_value(model: SpectralModel, s: complex) -> complex:
    d = _diag_data(model, ray_angle(s, model.n))
    total = recip_gamma(s) * _entire_part(d, model.n, s)
    lt0 = d.log_t0
    for p, c in d.poles:
        total += c * cmath.exp((s - p) * lt0) * recip_gamma_over_linear(s, p)
    if d.P0:
        total -= d.P0 * cmath.exp(s * lt0) * recip_gamma_over_linear(s, 0)
    return total


def spectral_zeta(model: SpectralModel, s) -> ZetaValue:
    """Z(s) = sum over nonzero eigenvalues of lambda^{-s}, continued to C.

    Raises PoleEncountered (carrying the residue) at a pole.
    """
    s = complex(s)
    d = _diag_data(model, ray_angle(s, model.n))
    i = _pole_index(d, s)
    if i is not None:
        p, c = d.poles[i]
        raise PoleEncountered(s, f"zeta pole at s={p}", residue=c * recip_gamma(p))
    _check_near_pole(d, s)
    return ZetaValue(s, _zeta_value(model, s))


def epstein_zeta(model: SpectralModel, s) -> ZetaValue:
    """Epstein zeta sum_{k != 0} (sum_j k_j^2/p_j^2 + xi)^{-s}; alias of spectral_zeta."""
    return spectral_zeta(model, s)


def zeta_laurent(model: SpectralModel, s0) -> tuple[complex, complex]:
    """(residue, finite part) of Z at s0; residue 0 when s0 is regular."""
    s0 = complex(s0)
    d = _diag_data(model, ray_angle(s0, model.n))
    i = _pole_index(d, s0)
    if i is None:
        return 0j, _zeta_value(model, s0)
    lt0 = d.log_t0
    p, c = d.poles[i]
    fp = recip_gamma(s0) * _entire_part(d, model.n, s0)
    for j, (q, cq) in enumerate(d.poles):
        if j != i:
            fp += cq * cmath.exp((s0 - q) * lt0) * recip_gamma_over_linear(s0, q)
    if d.P0:
        fp -= d.P0 * cmath.exp(s0 * lt0) * recip_gamma_over_linear(s0, 0)
    fp += c * (lt0 * recip_gamma(s0) + recip_gamma_derivative(s0))
    return c * recip_gamma(s0), fp


def completed_zeta(model: SpectralModel, s) -> complex:
    """pi^{-s} Gamma(s) Z(s), from the same theta split (finite off the poles)."""
    s = complex(s)
    d = _diag_data(model, ray_angle(s, model.n))
    total = _entire_part(d, model.n, s)
    lt0 = d.log_t0
    for p, c in d.poles:
        if s == p:
            raise PoleEncountered(s, residue=c)
        total += c * cmath.exp((s - p) * lt0) / (s - p)
    if d.P0:
        if s == 0:
            raise PoleEncountered(s, residue=-d.P0)
        total -= d.P0 * cmath.exp(s * lt0) / s
    return cmath.exp(-s * math.log(math.pi)) * total


def functional_equation_residual(model: SpectralModel, s) -> float:
    """|pi^{-s} Gamma(s) Z(s) - pi^{s-n/2} Gamma(n/2-s) Z(n/2-s)| for unit radii, xi = 0."""
    if model.shift != 0.0 or any(p != 1.0 for p in model.radii):
        raise DomainError("the functional equation check needs unit radii and no shift")
    s = complex(s)
    return abs(completed_zeta(model, s) - completed_zeta(model, model.n / 2 - s))


def q_kernel_diag(model: SpectralModel, s, x=None) -> QKernelValue:
    """Diagonal value of the kernel of Laplacian^{-s}; independent of x."""
    z = spectral_zeta(model, s)
    pt = tuple(np.zeros(model.n)) if x is None else tuple(np.atleast_1d(x))
    return QKernelValue(z.s, pt, pt, z.value / model.volume)


# ---------------------------------------------------------------------------
# off the diagonal


@dataclass(frozen=True)
class _OffData:
    t0: float
    P: float
    lu_large: np.ndarray
    wg_large: np.ndarray  # weight * G, signed
    lu_small: np.ndarray
    lw_small: np.ndarray


def _factor_excess(t: np.ndarray, phi: float, p: float) -> np.ndarray:
    """f with (1/(2 pi p)) sum_k e^{-t k^2/p^2} e^{i k phi} = (1 + f)/(2 pi p)."""
    out = np.empty_like(t)
    w = 1.0 / p ** 2
    spec = t * w >= 1.0
    if np.any(spec):
        a = t[spec]
        kmax = int(math.ceil(math.sqrt(40.0 / float((a * w).min())))) + 1
        acc = np.zeros_like(a)
        for k in range(kmax, 0, -1):
            acc += 2.0 * np.exp(-a * w * k * k) * math.cos(k * phi)
        out[spec] = acc
    img = ~spec
    if np.any(img):
        a = t[img]
        tot = np.zeros_like(a)
        m = 0
        while True:
            terms = [np.exp(-((p * (phi + 2 * math.pi * m)) ** 2) / (4 * a))]
            if m:
                terms.append(np.exp(-((p * (phi - 2 * math.pi * m)) ** 2) / (4 * a)))
            for tm in terms:
                tot += tm
            if m > 1 and np.all(np.maximum.reduce(terms) < 1e-18 * np.maximum(tot, 1e-300)):
                break
            m += 1
        out[img] = 2 * math.pi * p * tot / np.sqrt(4 * math.pi * a) - 1.0
    return out


@lru_cache(maxsize=64)
def _off_data(model: SpectralModel, phi: tuple) -> _OffData:
    n = model.n
    xi = model.shift
    d = math.sqrt(sum((p * f) ** 2 for p, f in zip(model.radii, phi)))
    g2 = math.exp(2 * np.mean(np.log(model.radii)))
    t0 = min(math.pi * g2, d * d / 4)
    P = kernel_projection_density(model)

    t, w = exp_sinh_nodes(t0, DE_STEP)
    t, w = t[t < 1e6], w[t < 1e6]
    f = [_factor_excess(t, f_j, p) for f_j, p in zip(phi, model.radii)]
    acc = np.zeros_like(t)
    for fj in f:
        acc = acc + fj + acc * fj
    if xi == 0.0:
        G = acc / model.volume
    else:
        G = np.exp(-xi * t) * (1.0 + acc) / model.volume
    keep = G != 0.0

    u0 = 1.0 / t0
    u, wu = exp_sinh_nodes(u0, DE_STEP)
    lH = np.full_like(u, -0.5 * n * math.log(4 * math.pi)) - xi / u
    for f_j, p in zip(phi, model.radii):
        mmax = int(math.ceil(math.sqrt(160.0 / (p * p * u0)) / (2 * math.pi))) + 2
        m = np.arange(-mmax, mmax + 1)
        e = -((p * (f_j + 2 * math.pi * m[:, None])) ** 2) * u[None, :] / 4
        top = e.max(axis=0)
        lH += top + np.log(np.sum(np.exp(e - top), axis=0))
    keeps = lH > -745.0
    return _OffData(t0, P, np.log(t[keep]), w[keep] * G[keep], np.log(u[keeps]), np.log(wu[keeps]) + lH[keeps])


def q_kernel_offdiag(model: SpectralModel, s, x, y) -> QKernelValue:
    """Kernel of Laplacian^{-s} at x != y, entire in s.

    Gamma(s) q(s) = int_0^inf t^{s-1} (p_t(x,y) - P) dt with the spectral
    sum above t0 and the image sum (in u = 1/t) below it.
    """
    s = complex(s)
    if torus_distance(model, x, y) == 0.0:
        raise OnDiagonal("x and y coincide")
    phi = tuple(float(v) for v in angle_difference(model, x, y))
    d = _off_data(model, phi)
    big = complex(np.sum(d.wg_large * np.exp((s - 1.0) * d.lu_large)))
    small = _mellin(d.lu_small, d.lw_small, model.n / 2 - s)
    val = recip_gamma(s) * (big + small)
    if d.P:
        val -= d.P * cmath.exp(s * math.log(d.t0)) * recip_gamma_over_linear(s, 0)
    return QKernelValue(s, tuple(np.atleast_1d(x)), tuple(np.atleast_1d(y)), val)


# ---------------------------------------------------------------------------
# shift family


def zeta_shift_derivative_check(model: SpectralModel, s, xi: float, h: float, extrapolate: bool = False) -> float:
    """|(Z_{xi+h}(s) - Z_{xi-h}(s)) / 2h + s Z_xi(s+1)| for the shifted model.

    The centred difference carries an O(h^2) truncation error; with
    ``extrapolate`` the differences at h and h/2 are combined to cancel it.
    """
    if not xi > 0:
        raise DomainError("xi must be positive")
    s = complex(s)

    def diff(hh):
        plus = spectral_zeta(model.with_shift(xi + hh), s).value
        minus = spectral_zeta(model.with_shift(xi - hh), s).value
        return (plus - minus) / (2 * hh)

    d = diff(h)
    if extrapolate:
        d = (4 * diff(h / 2) - d) / 3
    if s == 0:
        rhs = 0j
    else:
        rhs = s * spectral_zeta(model.with_shift(xi), s + 1).value
    return abs(d + rhs)


@dataclass(frozen=True)
class NontrivialityReport:
    """Z_{Delta+xi}(-r j) over a xi grid.

    Where -r j sits on the pole ladder the value entry holds the finite part
    and ``magnitudes`` the residue modulus, which is what multiplies the
    t^{rj} log t term there.
    """

    n: int
    r: str
    j: int
    xi_grid: tuple
    values: tuple
    magnitudes: tuple
    poles: tuple
    min_abs: float

    @property
    def nonvanishing(self) -> bool:
        return self.min_abs > 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "j": self.j,
            "xi": list(self.xi_grid),
            "values": [[v.real, v.imag] for v in self.values],
            "magnitudes": list(self.magnitudes),
            "pole": list(self.poles),
            "min_abs": self.min_abs,
            "max_abs": max(self.magnitudes),
        }


def nontriviality_scan(model: SpectralModel, r, j: int, xi_grid) -> NontrivialityReport:
    """Z_{Delta+xi}(-r j) over a xi grid; non-vanishing somewhere is the claim."""
    r = as_power(r)
    if j < 1:
        raise DomainError("j must be >= 1")
    if r.times_is_integer(j):
        raise DomainError(f"r*j = {r}*{j} is an integer; the scan needs r j outside N")
    s = -r.value * j
    vals, mags, poles = [], [], []
    for xi in xi_grid:
        m = model.with_shift(xi)
        try:
            v = spectral_zeta(m, s).value
            vals.append(v)
            mags.append(abs(v))
            poles.append(False)
        except PoleEncountered:
            res, fp = zeta_laurent(m, s)
            vals.append(fp)
            mags.append(abs(res))
            poles.append(True)
    return NontrivialityReport(
        model.n, str(r), j, tuple(float(x) for x in xi_grid), tuple(vals), tuple(mags), tuple(poles), min(mags)
    )
