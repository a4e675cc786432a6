"""Reference values of the heat kernels p_t (of the Laplacian) and h_t (of its r-th power)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import AbscissaTooSmall, BudgetExceeded, ContourTooShort, CutoffTooLarge, DomainError
from .models import (
    LATTICE_BUDGET,
    SpectralModel,
    angle_difference,
    count_lower,
    kernel_projection_density,
    lattice_points,
    spectral_tail_bound,
    squared_norms,
)
from .power import as_power
from .specfun import log_gamma
from .theta import image_sum
from .zeta import _zeta_value

METHODS = ("eigensum", "poisson", "inverse_mellin", "subordination")


@dataclass(frozen=True)
class KernelSample:
    t: float
    x: tuple
    y: tuple
    value: float
    error_bound: float
    method: str

    def row(self) -> dict:
        return {"t": self.t, "value": self.value, "error_bound": self.error_bound, "method": self.method}


CSV_FIELDS = ("t", "value", "error_bound", "method")


def samples_to_csv(samples, path=None) -> str:
    """CSV with header t,value,error_bound,method; floats at 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for s in samples:
        w.writerow([f"{s.t:.17g}", f"{s.value:.17g}", f"{s.error_bound:.17g}", s.method])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _exponent(r) -> float:
    """Numeric exponent; r = 1 (or None) means the Laplacian itself."""
    if r is None or (isinstance(r, (int, float)) and float(r) == 1.0):
        return 1.0
    return as_power(r).value


def _points(model: SpectralModel, x, y):
    x = tuple(np.zeros(model.n)) if x is None else tuple(float(v) for v in np.atleast_1d(x))
    y = x if y is None else tuple(float(v) for v in np.atleast_1d(y))
    return x, y


# ---------------------------------------------------------------------------
# eigensum


def choose_radius(model: SpectralModel, t: float, r: float, target: float, budget: int = LATTICE_BUDGET) -> float:
    """Smallest radius (in k/p units, 15% steps) whose tail estimate is below target.

    Uses the lower lattice count, so the true bound must still be rechecked.
    """
    R = (max(1.0, math.log(1.0 / target)) / t) ** (1.0 / (2 * r))
    while spectral_tail_bound(model, R, count_lower(model, R), t, r) > target:
        R *= 1.15
        if count_lower(model, R) > budget:
            raise BudgetExceeded(f"t={t}, r={r}: the tail target {target:.2e} needs more than {budget:.2e} points")
    return R


def heat_kernel_direct(
    model: SpectralModel,
    r,
    t: float,
    x=None,
    y=None,
    tol: float = 1e-12,
    budget: int = LATTICE_BUDGET,
) -> KernelSample:
    """(1/vol) sum_k exp(-t lambda_k^r) e^{i k.(x-y)} with a rigorous truncation bound.

    The sum is math.fsum over terms sorted by ascending eigenvalue, so the
    result is correctly rounded for the given terms and independent of how
    the lattice was produced.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    rv = _exponent(r)
    x, y = _points(model, x, y)
    phi = angle_difference(model, x, y)
    vol = model.volume
    target = 0.5 * tol * vol
    R = choose_radius(model, t, rv, target, budget)
    while True:
        try:
            pts = lattice_points(model, R * R, budget)
        except CutoffTooLarge as exc:
            raise BudgetExceeded(str(exc)) from exc
        tail = spectral_tail_bound(model, R, len(pts), t, rv)
        if tail <= target:
            break
        R *= 1.15
    lam = squared_norms(model, pts) + model.shift
    order = np.argsort(lam, kind="stable")
    lam, pts = lam[order], pts[order]
    terms = np.exp(-t * lam ** rv)
    if np.any(phi != 0.0):
        terms = terms * np.cos(pts @ phi)
    total = math.fsum(terms.tolist())
    rounding = 4 * np.finfo(float).eps * float(np.sum(np.abs(terms)))
    return KernelSample(t, x, y, total / vol, (tail + rounding) / vol, "eigensum")


# ---------------------------------------------------------------------------
# Poisson (image) sum, r = 1 only


def heat_kernel_poisson(model: SpectralModel, t: float, x=None, y=None) -> KernelSample:
    """p_t(x, y) = e^{-t xi} prod_j (4 pi t)^{-1/2} sum_m exp(-(p_j (phi_j + 2 pi m))^2 / 4t)."""
    if not t > 0:
        raise DomainError("t must be positive")
    x, y = _points(model, x, y)
    phi = angle_difference(model, x, y)
    val = math.exp(-t * model.shift)
    rel = 0.0
    for f, p in zip(phi, model.radii):
        v, e = image_sum(float(f), p, t)
        val *= v
        rel += e / v if v > 0 else math.inf
    err = abs(val) * (rel + 4 * model.n * np.finfo(float).eps)
    return KernelSample(t, x, y, val, err, "poisson")


# ---------------------------------------------------------------------------
# inverse Mellin along Re s = tau


@dataclass(frozen=True)
class ContourParams:
    """Vertical line Re s = tau, |Im s| <= half_length, nodes spaced ``spacing``.

    ``tau`` and ``half_length`` left as None mean n/(2r) + 1 and adaptive
    doubling from 20.
    """

    tau: float | None = None
    half_length: float | None = None
    spacing: float = 0.25
    rule: str = "trapezoid"
    max_half_length: float = 1280.0

    @property
    def node_count(self) -> int:
        return int(round(2 * (self.half_length or 0) / self.spacing)) + 1


def _mellin_integrand(model: SpectralModel, rv: float, t: float, b: np.ndarray, tau: float) -> np.ndarray:
    """t^{-s} Gamma(s) Z(r s) / vol at s = tau + i b."""
    out = np.zeros(len(b), dtype=complex)
    lt = math.log(t)
    for i, bi in enumerate(b):
        s = complex(tau, bi)
        lg = log_gamma(s) - s * lt
        if lg.real < -740.0:
            continue
        out[i] = np.exp(lg) * _zeta_value(model, rv * s)
    return out / model.volume


def heat_kernel_inverse_mellin(
    model: SpectralModel,
    r,
    t: float,
    x=None,
    contour: ContourParams | None = None,
    tol: float = 1e-10,
) -> KernelSample:
    """h_t(x,x) = P + (1/2 pi i) int_{Re s = tau} t^{-s} Gamma(s) q_{-rs}(x,x) ds.

    By conjugate symmetry the line integral is (1/pi) int_0^inf Re(...) db,
    done with the trapezoid rule.  The error bound combines the change
    between spacing h and 2h with the endpoint magnitude.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    contour = contour or ContourParams()
    rv = _exponent(r)
    x, _ = _points(model, x, None)
    tau = contour.tau if contour.tau is not None else model.n / (2 * rv) + 1.0
    if not tau > model.n / (2 * rv):
        raise AbscissaTooSmall(f"tau={tau} must exceed n/(2r)={model.n / (2 * rv)}")
    h = contour.spacing
    U = contour.half_length or 20.0
    adaptive = contour.half_length is None
    b = np.arange(0.0, U + h / 2, h)
    f = _mellin_integrand(model, rv, t, b, tau).real
    while abs(f[-1]) >= 1e-3 * tol or abs(f[-2]) >= 1e-3 * tol:
        if not adaptive or 2 * U > contour.max_half_length:
            raise ContourTooShort(f"integrand {abs(f[-1]):.2e} at |Im s|={U} exceeds {1e-3 * tol:.2e}")
        bnew = np.arange(U + h, 2 * U + h / 2, h)
        f = np.concatenate([f, _mellin_integrand(model, rv, t, bnew, tau).real])
        b = np.concatenate([b, bnew])
        U *= 2
    w = np.full(len(b), h)
    w[0] = h / 2
    fine = math.fsum((w * f).tolist()) / math.pi
    f2 = f[::2]
    w2 = np.full(len(f2), 2 * h)
    w2[0] = h
    coarse = math.fsum((w2 * f2).tolist()) / math.pi
    err = abs(fine - coarse) + abs(f[-1]) * U / math.pi
    val = fine + kernel_projection_density(model)
    return KernelSample(t, x, x, val, err + 4 * np.finfo(float).eps * abs(val), "inverse_mellin")


def heat_kernel(model: SpectralModel, r, t: float, x=None, y=None, method: str = "eigensum", tol: float = 1e-12):
    """Dispatch to one of the reference methods by name."""
    method = method.replace("-", "_")
    if method == "eigensum":
        return heat_kernel_direct(model, r, t, x, y, tol)
    if method == "poisson":
        if _exponent(r) != 1.0:
            raise DomainError("the Poisson sum applies to r = 1 only")
        return heat_kernel_poisson(model, t, x, y)
    if method == "inverse_mellin":
        x, y = _points(model, x, y)
        if x != y:
            raise DomainError("inverse Mellin is implemented on the diagonal only")
        return heat_kernel_inverse_mellin(model, r, t, x, tol=max(tol, 1e-10))
    if method == "subordination":
        from .halfpower import subordinated_kernel

        if _exponent(r) != 0.5:
            raise DomainError("subordination applies to r = 1/2 only")
        return subordinated_kernel(model, t, x, y, tol=max(tol, 1e-12))
    raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
