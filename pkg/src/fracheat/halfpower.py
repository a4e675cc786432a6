"""The square root of the Laplacian: subordination, incomplete-Gamma expansion and the blown-up heat space.

For r = 1/2 the heat kernel is a single T-integral of the Laplacian's heat kernel,

    h_t - P = t/(2 sqrt(pi)) int_0^inf T^{-3/2} exp(-t^2/4T) (p_T - P) dT,

and near t = 0, x = y it is naturally a function of the polar coordinates
rho = sqrt(t^2 + d^2), omega0 = t/rho.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .asym import ExpansionTemplate, Term
from .errors import DomainError, QuadratureFailure
from .fit import SampleGrid, fit_expansion
from .heat import KernelSample, _points
from .models import SpectralModel, angle_difference, heat_coefficient, torus_distance
from .power import RationalPower
from .specfun import upper_incomplete_gamma
from .theta import image_sum, product_minus_one, richardson

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# p_T minus its zero mode, for a single T


def _factor_excess(phi: float, p: float, T: float) -> float:
    """g with (1/(2 pi p)) (1 + g) the one-dimensional heat kernel at angle phi."""
    a = T / (p * p)
    if a >= 0.5:
        kmax = int(math.ceil(math.sqrt(40.0 / a))) + 1
        return math.fsum(2.0 * math.exp(-a * k * k) * math.cos(k * phi) for k in range(1, kmax + 1))
    v, _ = image_sum(phi, p, T)
    return 2 * math.pi * p * v - 1.0


def heat_minus_zero_mode(model: SpectralModel, T: float, phi) -> float:
    """p_T(x, y) - e^{-T xi}/vol at angle difference phi, without cancellation at large T.

    The zero mode of the unshifted Laplacian is removed; what is left decays
    like e^{-T (xi + min 1/p^2)}.
    """
    g = [np.array([_factor_excess(float(f), p, T)]) for f, p in zip(phi, model.radii)]
    excess = float(product_minus_one(g)[0]) / model.volume
    return math.exp(-T * model.shift) * excess if model.shift else excess


def _spectral_gap(model: SpectralModel) -> float:
    """Decay rate of p_T minus its zero-mode term."""
    return float(min(model.inv_sq_radii)) + model.shift


def subordinated_kernel(model: SpectralModel, t: float, x=None, y=None, tol: float = 1e-12) -> KernelSample:
    """h_t(x, y) for r = 1/2 from the T-integral of p_T.

    The zero mode subordinates exactly to e^{-t sqrt(xi)}/vol; the rest is
    integrated.  The integral is split at T_s = max(t^2, d^2).  Below T_s the
    substitution u = t/(2 sqrt T) turns it into
    (2/sqrt(pi)) int_{u_s}^inf e^{-u^2} (p - zero mode) du; above T_s it is
    done in log T up to where the spectral gap kills the integrand.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    x, y = _points(model, x, y)
    phi = angle_difference(model, x, y)
    d = torus_distance(model, x, y)
    zero = math.exp(-t * math.sqrt(model.shift)) / model.volume
    Ts = max(t * t, d * d)
    us = t / (2 * math.sqrt(Ts))

    def f_small(u):
        return math.exp(-u * u) * heat_minus_zero_mode(model, t * t / (4 * u * u), phi)

    def f_large(v):
        T = math.exp(v)
        return T ** -0.5 * math.exp(-t * t / (4 * T)) * heat_minus_zero_mode(model, T, phi)

    gap = _spectral_gap(model)
    v_hi = math.log(max(Ts, 1.0) + 50.0 / gap)
    pieces = []
    warned = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        # dyadic pieces resolve the bump of p_T near T ~ d^2 when t << d
        u_mid = max(us, 6.0)
        edges = [us]
        while edges[-1] * 2 < u_mid * (1 - 1e-9):
            edges.append(edges[-1] * 2)
        if u_mid > edges[-1]:
            edges.append(u_mid)
        for lo, hi in zip(edges[:-1], edges[1:]):
            a1, e1 = integrate.quad(f_small, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
            pieces.append((2 / SQRT_PI * a1, 2 / SQRT_PI * e1))
        a2, e2 = integrate.quad(f_small, u_mid, np.inf, epsabs=1e-300, epsrel=1e-13, limit=200)
        pieces.append((2 / SQRT_PI * a2, 2 / SQRT_PI * e2))
        v_lo = math.log(Ts)
        if v_hi > v_lo:
            b, eb = integrate.quad(f_large, v_lo, v_hi, epsabs=0.0, epsrel=1e-13, limit=400)
            c = t / (2 * SQRT_PI)
            pieces.append((c * b, c * eb))
        warned = [str(w.message).splitlines()[0] for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    total = math.fsum(p[0] for p in pieces)
    err = sum(p[1] for p in pieces)
    # beyond v_hi the integrand is below its endpoint value times e^{-gap (T - T_hi)}
    tail = abs(f_large(v_hi)) * (t / (2 * SQRT_PI)) / gap if v_hi > math.log(Ts) else 0.0
    value = total + zero
    err += tail + 8 * np.finfo(float).eps * (abs(total) + zero)
    # quad's roundoff warnings are tolerated when the error estimate is still within budget
    budget = max(tol, 1e-14) * max(1.0, abs(value)) * 1e3
    if err > budget:
        detail = f" ({warned[0]})" if warned else ""
        raise QuadratureFailure(f"subordination integral at t={t}: error {err:.2e} above {budget:.2e}{detail}")
    return KernelSample(t, x, y, value, err, "subordination")


# ---------------------------------------------------------------------------
# incomplete-Gamma expansion


@dataclass(frozen=True)
class ExpansionValue:
    value: float
    remainder: float
    reference: float
    terms: tuple


def incomplete_gamma_expansion(model: SpectralModel, N: int, t: float, x=None, y=None, reference: bool = True):
    """(t/(2 sqrt pi)) sum_{j<=N} a_j Gamma((n+1)/2 - j, X) X^{j-(n+1)/2}, X = (t^2 + d^2)/4.

    On the flat torus a_j(x, y) is the diagonal a_j (the parallel-transport
    factor is 1).  The remainder is measured against the subordinated kernel.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    x, y = _points(model, x, y)
    d = torus_distance(model, x, y)
    X = (t * t + d * d) / 4
    n = model.n
    terms = []
    for j in range(N + 1):
        a = heat_coefficient(model, j)
        z = (n + 1) / 2 - j
        terms.append(t / (2 * SQRT_PI) * a * upper_incomplete_gamma(z, X) * X ** (-z))
    val = math.fsum(terms)
    if not reference:
        return ExpansionValue(val, math.nan, math.nan, tuple(terms))
    ref = subordinated_kernel(model, t, x, y).value
    return ExpansionValue(val, abs(ref - val), ref, tuple(terms))


# ---------------------------------------------------------------------------
# blow-up coordinates


@dataclass(frozen=True)
class BlowupPoint:
    """(rho, omega0, omega') over a base point; omega lies on the upper unit half-sphere.

    omega' is a tangent vector in length units, so the moving point is
    base + rho omega' / p in angle coordinates.
    """

    rho: float
    omega0: float
    omega_prime: tuple
    base: tuple

    def __post_init__(self):
        op = tuple(float(v) for v in np.atleast_1d(self.omega_prime))
        object.__setattr__(self, "omega_prime", op)
        object.__setattr__(self, "base", tuple(float(v) for v in np.atleast_1d(self.base)))
        if self.rho < 0:
            raise DomainError("rho must be >= 0")
        if not 0.0 <= self.omega0 <= 1.0:
            raise DomainError("omega0 must lie in [0, 1]")
        if len(op) != len(self.base):
            raise DomainError("omega' and base point must have the same dimension")
        norm = self.omega0**2 + math.fsum(v * v for v in op)
        if abs(norm - 1.0) > 1e-14:
            raise DomainError(f"omega is off the unit sphere by {norm - 1.0:.2e}")

    @classmethod
    def from_angle(cls, rho: float, angle: float, base=(0.0,)) -> "BlowupPoint":
        """n = 1 convenience: omega = (cos angle, sin angle), angle in [-pi/2, pi/2]."""
        return cls(rho, math.cos(angle), (math.sin(angle),), base)

    @classmethod
    def normalized(cls, rho: float, omega, base) -> "BlowupPoint":
        w = np.asarray(omega, float)
        w = w / math.sqrt(math.fsum(w * w))
        return cls(rho, float(w[0]), tuple(w[1:]), base)

    def blow_down(self, radii=None) -> tuple[float, tuple, tuple]:
        """(t, x, y) = (rho omega0, base + rho omega'/p, base)."""
        p = np.ones(len(self.base)) if radii is None else np.asarray(radii, float)
        xp = np.asarray(self.base) + self.rho * np.asarray(self.omega_prime) / p
        return self.rho * self.omega0, tuple(xp.tolist()), self.base


def blowup_pullback(model: SpectralModel, pt: BlowupPoint) -> float:
    """h_t at the blow-down of pt; the lateral boundary omega0 = 0 is t = 0 off the diagonal, where h = 0."""
    if not pt.rho > 0:
        raise DomainError("blow-up evaluation needs rho > 0")
    if len(pt.base) != model.n:
        raise DomainError(f"blow-up point must have {model.n} base coordinates")
    t, x, y = pt.blow_down(model.radii)
    if t == 0.0:
        return 0.0
    return subordinated_kernel(model, t, x, y).value


# ---------------------------------------------------------------------------
# front face


def front_face_log_prediction(model: SpectralModel, j: int) -> float:
    """Coefficient of rho^{2j} log rho in rho^n h / omega0, n odd, j >= (n+1)/2."""
    n = model.n
    m = j - (n + 1) // 2
    if n % 2 == 0 or m < 0:
        return 0.0
    return 2 / SQRT_PI * 2.0 ** (n - 2 * j) * (-1) ** (m + 1) / math.factorial(m) * heat_coefficient(model, j)


def front_face_leading(model: SpectralModel) -> float:
    """rho^n h / omega0 at rho = 0: the Euclidean Poisson-kernel constant Gamma((n+1)/2)/pi^{(n+1)/2}.

    Equivalently (1/sqrt pi) 2^n Gamma((n+1)/2) a_0; for n even also 2^{n/2}(n-1)!! a_0.
    """
    return 2.0**model.n * math.gamma((model.n + 1) / 2) * heat_coefficient(model, 0) / SQRT_PI


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@dataclass(frozen=True)
class FrontFaceProfile:
    rho: np.ndarray
    values: np.ndarray
    omega: tuple
    limit: float
    limit_error: float
    predicted_limit: float
    log_coefficient: float | None = None
    predicted_log: float | None = None
    log_uncertainty: float | None = None
    verdict: str = "pass"
    notes: dict = field(default_factory=dict)

    def rows(self):
        return [(float(r), float(v)) for r, v in zip(self.rho, self.values)]


def _front_face_template(n: int) -> ExpansionTemplate:
    """Basis rho^k, k <= max(4, n + 3), plus rho^k log rho for even k >= n + 1.

    For n = 1 this is {1, rho, rho^2, rho^2 log rho, rho^3, rho^4, rho^4 log rho};
    larger n keep two orders above the rho^{n+1} log rho row so it is not the
    last column absorbing the truncation.
    """
    top = max(4, n + 3)
    terms = []
    for k in range(top + 1):
        terms.append(Term(Fraction(k), 0, "integer", k))
        if k % 2 == 0 and k >= n + 1:
            terms.append(Term(Fraction(k), 1, "log", k // 2))
    return ExpansionTemplate(n, RationalPower.fraction(1, 2), "front_face", tuple(terms), float(top))


def front_face_profile(
    model: SpectralModel,
    omega,
    rho_grid,
    base=None,
    rel_tol: float = 2e-2,
) -> FrontFaceProfile:
    """Sample rho^n h / omega0 along a ray into the front face and check it against the blow-up expansion.

    n even: the limit is extracted by Richardson extrapolation (rho_grid
    halving) and compared with 2^{n/2}(n-1)!! a_0.  n odd: a least-squares
    fit in {rho^k, rho^{2j} log rho} gives the rho^{n+1} log rho coefficient,
    compared with its predicted value.
    """
    n = model.n
    rho = np.asarray(rho_grid, float)
    if rho.ndim != 1 or len(rho) < 3 or np.any(np.diff(rho) >= 0):
        raise DomainError("rho_grid must be strictly decreasing with at least three points")
    w = np.asarray(omega, float)
    if len(w) != n + 1:
        raise DomainError(f"omega must have {n + 1} components")
    base = tuple(np.zeros(n)) if base is None else base
    pts = [BlowupPoint.normalized(r, w, base) for r in rho]
    omega0 = pts[0].omega0
    if omega0 <= 0:
        raise DomainError("front-face profile needs omega0 > 0")
    values = np.array([r**n * blowup_pullback(model, p) / omega0 for r, p in zip(rho, pts)])
    predicted = front_face_leading(model)
    notes = {}
    if n % 2 == 0:
        ratios = rho[1:] / rho[:-1]
        if not np.allclose(ratios, ratios[0], rtol=1e-10):
            raise DomainError("Richardson extrapolation needs a geometric rho_grid")
        orders = sorted({2 * k for k in range(1, n // 2 + 1)} | set(range(n + 1, n + len(rho) + 1)))
        table = richardson(values, float(ratios[0]), orders[: len(rho) - 1])
        prev = richardson(values[:-1], float(ratios[0]), orders[: len(rho) - 2])
        limit = float(table[-1])
        lerr = abs(limit - float(prev[-1]))
        notes["double_factorial_form"] = 2.0 ** (n // 2) * _double_factorial(n - 1) * heat_coefficient(model, 0)
        ok = abs(limit - predicted) <= rel_tol * abs(predicted)
        return FrontFaceProfile(rho, values, tuple(w), limit, lerr, predicted, verdict="pass" if ok else "fail", notes=notes)
    template = _front_face_template(n)
    grid = SampleGrid(rho, values, np.full(len(rho), 1e-13 * float(np.max(np.abs(values)))))
    fit = fit_expansion(grid, template)
    limit = fit.coefficient(0)
    j = (n + 1) // 2
    lc = fit.coefficient(2 * j, 1)
    pl = front_face_log_prediction(model, j)
    idx = [i for i, t in enumerate(template.terms) if t.value == 2 * j and t.log_power == 1][0]
    unc = float(fit.uncertainties[idx])
    ok_log = abs(lc - pl) <= max(rel_tol * abs(pl), 1e-6)
    ok_lim = abs(limit - predicted) <= rel_tol * abs(predicted)
    notes["condition_number"] = fit.condition_number
    return FrontFaceProfile(
        rho,
        values,
        tuple(w),
        limit,
        float(fit.uncertainties[0]),
        predicted,
        log_coefficient=lc,
        predicted_log=pl,
        log_uncertainty=unc,
        verdict="pass" if ok_log and ok_lim else "fail",
        notes=notes,
    )


def lateral_profile(model: SpectralModel, x, y, t_grid) -> np.ndarray:
    """h_t(x, y)/t along t_grid; bounded (first-order vanishing) when x != y."""
    return np.array([subordinated_kernel(model, t, x, y).value / t for t in t_grid])
