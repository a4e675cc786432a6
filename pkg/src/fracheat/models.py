"""Flat tori (S^1)^n with per-factor radii and a scalar spectral shift.

Points are angle vectors theta in [0, 2pi)^n.  The eigenfunctions are
e^{i k.theta} / sqrt(vol) with eigenvalues sum_j (k_j/p_j)^2 + xi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import CutoffTooLarge, DomainError
from .specfun import upper_incomplete_gamma

LATTICE_BUDGET = 10**8
GROUP_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralModel:
    n: int
    radii: tuple
    shift: float = 0.0

    def __post_init__(self):
        radii = tuple(float(p) for p in np.atleast_1d(self.radii))
        if len(radii) == 1 and self.n > 1:
            radii = radii * self.n
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "shift", float(self.shift))
        if self.n < 1 or len(radii) != self.n:
            raise DomainError(f"need n >= 1 radii, got n={self.n}, radii={radii}")
        if any(not (p > 0 and math.isfinite(p)) for p in radii):
            raise DomainError("radii must be positive")
        if not self.shift >= 0:
            raise DomainError("shift must be >= 0")

    @classmethod
    def unit(cls, n: int, shift: float = 0.0) -> "SpectralModel":
        return cls(n, (1.0,) * n, shift)

    @property
    def volume(self) -> float:
        return math.prod(2 * math.pi * p for p in self.radii)

    @property
    def inv_sq_radii(self) -> np.ndarray:
        return 1.0 / np.asarray(self.radii) ** 2

    def with_shift(self, shift: float) -> "SpectralModel":
        return SpectralModel(self.n, self.radii, shift)

    def scaled(self, c: float) -> "SpectralModel":
        return SpectralModel(self.n, tuple(c * p for p in self.radii), self.shift)

    def to_dict(self) -> dict:
        return {"n": self.n, "radii": list(self.radii), "shift": self.shift}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralModel":
        return cls(int(d["n"]), tuple(d["radii"]), float(d.get("shift", 0.0)))

    @classmethod
    def from_json(cls, text: str) -> "SpectralModel":
        return cls.from_dict(json.loads(text))


def kernel_projection_density(model: SpectralModel) -> float:
    """Constant value of the kernel of the projection onto ker(Laplacian)."""
    return 1.0 / model.volume if model.shift == 0.0 else 0.0


@dataclass(frozen=True)
class HeatCoefficients:
    """a_j with p_t(x,x) ~ t^{-n/2} sum_j a_j t^j."""

    values: tuple

    def __getitem__(self, j):
        return self.values[j] if j < len(self.values) else 0.0

    def __len__(self):
        return len(self.values)


def heat_coefficient(model: SpectralModel, j: int) -> float:
    if j < 0:
        return 0.0
    a0 = (4 * math.pi) ** (-model.n / 2)
    if j == 0:
        return a0
    if model.shift == 0.0:
        return 0.0
    return a0 * (-model.shift) ** j / math.factorial(j)


def heat_coefficients(model: SpectralModel, J: int) -> HeatCoefficients:
    if J < 0:
        raise DomainError("J must be >= 0")
    return HeatCoefficients(tuple(heat_coefficient(model, j) for j in range(J + 1)))


def torus_distance(model: SpectralModel, theta, theta_prime) -> float:
    """Geodesic distance; the rectangular lattice lets each factor wrap separately."""
    d = np.asarray(theta, float) - np.asarray(theta_prime, float)
    d = np.atleast_1d(d)
    d = np.abs((d + math.pi) % (2 * math.pi) - math.pi)
    return float(math.sqrt(math.fsum((np.asarray(model.radii) * d) ** 2)))


def angle_difference(model: SpectralModel, x, y) -> np.ndarray:
    """x - y wrapped to [-pi, pi) per factor."""
    if x is None:
        return np.zeros(model.n)
    y = np.zeros(model.n) if y is None else y
    d = np.atleast_1d(np.asarray(x, float) - np.asarray(y, float))
    if d.shape != (model.n,):
        raise DomainError(f"points must have {model.n} coordinates")
    return (d + math.pi) % (2 * math.pi) - math.pi


# ---------------------------------------------------------------------------
# lattice enumeration


def _ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def lattice_delta(model: SpectralModel) -> float:
    """Half-diagonal of a lattice cell in the coordinates k_j / p_j."""
    return 0.5 * math.sqrt(float(np.sum(model.inv_sq_radii)))


def count_upper(model: SpectralModel, R: float) -> float:
    """Upper bound on #{k : |k/p| <= R}, by cells inside the ball of radius R + delta."""
    # the bound is attained for n = 1, so leave room for rounding
    return (1 + 1e-12) * _ball_volume(model.n) * (R + lattice_delta(model)) ** model.n * math.prod(model.radii)


def count_lower(model: SpectralModel, R: float) -> float:
    d = lattice_delta(model)
    if R <= d:
        return 1.0
    return _ball_volume(model.n) * (R - d) ** model.n * math.prod(model.radii)


def lattice_points(model: SpectralModel, R2: float, budget: int = LATTICE_BUDGET) -> np.ndarray:
    """All k in Z^n with sum (k_j/p_j)^2 <= R2, rows sorted lexicographically."""
    if R2 < 0:
        return np.zeros((0, model.n), dtype=np.int64)
    R = math.sqrt(R2)
    if count_upper(model, R) > budget:
        raise CutoffTooLarge(
            f"about {count_upper(model, R):.3g} lattice points exceed the budget {budget:.3g}"
        )
    w = model.inv_sq_radii
    pts = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1)
    slack = 1e-12 * max(R2, 1.0)
    for j in range(model.n):
        kmax = np.floor(model.radii[j] * np.sqrt(np.maximum(R2 - used, 0.0) + slack)).astype(np.int64)
        counts = 2 * kmax + 1
        rows = np.repeat(np.arange(len(pts)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        k = np.arange(len(rows)) - starts - np.repeat(kmax, counts)
        pts = np.concatenate([pts[rows], k[:, None]], axis=1)
        used = used[rows] + w[j] * k.astype(float) ** 2
        keep = used <= R2 * (1 + 1e-14)
        pts, used = pts[keep], used[keep]
    return pts


def _rational_weights(model: SpectralModel):
    """Integer weights W_j and L with 1/p_j^2 = W_j / L, or None."""
    fr = []
    for p in model.radii:
        f = Fraction(p).limit_denominator(10**4)
        if float(f) != p:
            return None
        fr.append(1 / (f * f))
    L = reduce(math.lcm, (f.denominator for f in fr), 1)
    W = [int(f * L) for f in fr]
    if max(W) * 10**9 > 2**62:
        return None
    return np.array(W, dtype=np.int64), L


def squared_norms(model: SpectralModel, pts: np.ndarray) -> np.ndarray:
    return (pts.astype(float) ** 2) @ model.inv_sq_radii


@dataclass(frozen=True)
class EigenvalueList:
    """Distinct eigenvalues with multiplicities up to a cutoff.

    ``tail_bound`` bounds sum over omitted eigenvalues of e^{-t lambda^r}
    at the stored (t, r); zero when no t was requested.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    cutoff: float
    tail_bound: float = 0.0
    t: float | None = None
    r: float = 1.0

    @property
    def entries(self):
        return list(zip(self.values.tolist(), self.multiplicities.tolist()))

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())


def group_eigenvalues(model: SpectralModel, pts: np.ndarray):
    rw = _rational_weights(model)
    if rw is not None:
        W, L = rw
        keys = (pts.astype(np.int64) ** 2) @ W
        uk, mult = np.unique(keys, return_counts=True)
        vals = uk.astype(float) / L + model.shift
        return vals, mult
    lam = np.sort(squared_norms(model, pts))
    if lam.size == 0:
        return lam, np.zeros(0, dtype=np.int64)
    gap = np.diff(lam) > GROUP_RTOL * np.maximum(lam[1:], 1.0)
    starts = np.concatenate([[0], np.nonzero(gap)[0] + 1])
    mult = np.diff(np.concatenate([starts, [lam.size]]))
    return lam[starts] + model.shift, mult


def spectral_tail_bound(model: SpectralModel, R0: float, count: float, t: float, r: float = 1.0) -> float:
    """Bound on sum_{|k/p| > R0} e^{-t (|k/p|^2 + xi)^r}.

    With N(R) <= Nup(R) = w_n (R + delta)^n prod p and f decreasing,
    Stieltjes integration by parts gives
        tail <= (Nup(R0) - count) f(R0) + int_R0^inf Nup'(R) f(R) dR,
    and f(R) <= e^{-t R^{2r}} (times e^{-t xi} for r = 1) turns the integral
    into upper incomplete Gamma functions.
    """
    n = model.n
    xi = model.shift
    f0 = math.exp(-t * (R0 * R0 + xi) ** r)
    head = max(count_upper(model, R0) - count, 0.0) * f0
    delta = lattice_delta(model)
    C = _ball_volume(n) * math.prod(model.radii) * n
    x0 = t * R0 ** (2 * r)
    total = 0.0
    for i in range(n):
        z = (i + 1) / (2 * r)
        ig = upper_incomplete_gamma(z, x0) if x0 > 0 else math.gamma(z)
        total += math.comb(n - 1, i) * delta ** (n - 1 - i) * t ** (-z) * ig / (2 * r)
    total *= C
    if r == 1.0:
        total *= math.exp(-t * xi)
    return head + total


def enumerate_eigenvalues(
    model: SpectralModel,
    cutoff: float,
    t: float | None = None,
    r: float = 1.0,
    budget: int = LATTICE_BUDGET,
) -> EigenvalueList:
    """Eigenvalues <= cutoff with multiplicities; tail bound at (t, r) if t is given."""
    if not cutoff > model.shift:
        raise DomainError("cutoff must exceed the shift")
    R2 = cutoff - model.shift
    pts = lattice_points(model, R2, budget)
    vals, mult = group_eigenvalues(model, pts)
    tail = 0.0
    if t is not None:
        tail = spectral_tail_bound(model, math.sqrt(R2), len(pts), t, r)
    return EigenvalueList(vals, mult, cutoff, tail, t, r)
