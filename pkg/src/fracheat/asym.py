"""Exponent templates and predicted coefficients for the small-time expansion of h_t.

On the diagonal, h_t(x,x) - P is the sum of residues of
t^{-s} Gamma(s) q_{-rs}(x,x) at the poles left of the line Re s = n/(2r) + 1.
Poles come from Gamma(s) (s = -j) and from q_{-rs}(x,x) = Z(rs)/vol
(rs = n/2 - m).  Where both meet, a double pole gives a t^k log t term.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import DomainError, InconsistentLaurent, OnDiagonal
from .models import SpectralModel, heat_coefficient, torus_distance
from .power import RationalPower, as_power
from .specfun import EULER_GAMMA, gamma, recip_gamma, recip_gamma_derivative
from .zeta import _zeta_value, q_kernel_offdiag, spectral_zeta

COLLISION_TOL = 1e-12


@dataclass(frozen=True)
class Term:
    """One (exponent, log_power) slot.  ``index`` is j for ladders, l for log slots."""

    exponent: Fraction | float
    log_power: int
    label: str
    index: int

    @property
    def value(self) -> float:
        return float(self.exponent)

    def exponent_str(self) -> str:
        e = self.exponent
        if isinstance(e, Fraction):
            return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
        return repr(float(e))

    def name(self) -> str:
        base = f"t^{self.exponent_str()}"
        return base + " log t" if self.log_power else base


@dataclass(frozen=True)
class ExpansionTemplate:
    n: int
    r: RationalPower
    case: str
    terms: tuple
    max_exponent: float

    def index_set(self) -> list[tuple]:
        """Sorted (exponent, log_power) pairs."""
        return sorted((t.exponent, t.log_power) for t in self.terms)

    def exponents(self) -> np.ndarray:
        return np.array([t.value for t in self.terms])

    def log_powers(self) -> np.ndarray:
        return np.array([t.log_power for t in self.terms])

    def sorted(self) -> "ExpansionTemplate":
        terms = tuple(sorted(self.terms, key=lambda t: (float(t.exponent), t.log_power)))
        return replace(self, terms=terms)

    def truncated(self, max_exponent) -> "ExpansionTemplate":
        terms = tuple(t for t in self.terms if t.value <= float(max_exponent))
        return replace(self, terms=terms, max_exponent=float(max_exponent))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": str(self.r),
            "case": self.case,
            "max_exponent": self.max_exponent,
            "terms": [
                {"exponent": t.exponent_str(), "log_power": t.log_power, "label": t.label, "index": t.index}
                for t in self.terms
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExpansionTemplate":
        r = as_power(d["r"])

        def parse(e):
            return Fraction(e) if r.is_rational else float(e)

        terms = tuple(Term(parse(t["exponent"]), int(t["log_power"]), t["label"], int(t["index"])) for t in d["terms"])
        return cls(int(d["n"]), r, d["case"], terms, float(d["max_exponent"]))


def expansion_case(n: int, r: RationalPower) -> str:
    if n % 2 == 0:
        return "even"
    if r.is_rational and r.beta % 2 == 0:
        return "odd_log"
    return "odd_plain"


def predict_exponents(n: int, r, max_exponent) -> ExpansionTemplate:
    """Index set of the diagonal expansion of h_t up to t^max_exponent."""
    r = as_power(r)
    if n < 1:
        raise DomainError("n must be >= 1")
    case = expansion_case(n, r)
    exact = r.is_rational
    rr = r.exact if exact else r.value
    top = float(max_exponent)

    def num(v):
        return Fraction(v) if exact else float(v)

    terms = []
    for j in range((n + 1) // 2):
        terms.append(Term(-num(n - 2 * j) / (2 * rr), 0, "neg_ladder", j))
    if case == "even":
        terms.append(Term(num(0), 0, "integer", 0))
    half_beta = r.beta // 2 if case == "odd_log" else None

    for j in range(1, int(math.floor(top)) + 1):
        if case == "odd_plain" and exact and j % r.beta == 0:
            continue  # A_{l beta} vanishes: rj is a non-positive integer of Z, a trivial zero
        if case == "odd_log" and j % half_beta == 0:
            continue
        terms.append(Term(num(j), 0, "integer", j))

    if case != "even":
        j = 0
        while True:
            e = num(2 * j + 1) / (2 * rr)
            if float(e) > top:
                break
            if case == "odd_log" and (2 * j + 1) % r.alpha == 0:
                j += 1
                continue
            terms.append(Term(e, 0, "fractional", j))
            j += 1

    if case == "odd_log":
        l = 1
        while l * half_beta <= top:
            e = Fraction(l * half_beta)
            terms.append(Term(e, 0, "integer", l * half_beta))
            terms.append(Term(e, 1, "log", l))
            l += 2

    if not exact:
        vals = sorted(float(t.exponent) for t in terms)
        gaps = np.diff(vals)
        if np.any(gaps < COLLISION_TOL):
            raise DomainError("two exponents coincide within 1e-12; pass r as an exact fraction")
    return ExpansionTemplate(n, r, case, tuple(terms), top).sorted()


# ---------------------------------------------------------------------------
# finite parts


@dataclass(frozen=True)
class Laurent:
    """Leading Laurent coefficients c_{-2}, c_{-1}, c_0 at s0."""

    s0: complex
    finite_part: complex
    residue: complex
    second: complex
    radius: float


def _circle_coefficients(f, s0: complex, radius: float, nodes: int):
    vals = []
    zs = []
    for k in range(nodes):
        z = radius * cmath.exp(2j * math.pi * (k + 0.5) / nodes)
        zs.append(z)
        vals.append(complex(f(s0 + z)))
    vals = np.array(vals)
    zs = np.array(zs)
    c0 = np.mean(vals)
    cm1 = np.mean(vals * zs)
    cm2 = np.mean(vals * zs * zs)
    return c0, cm1, cm2


def finite_part(f, s0, radius: float = 0.25, nodes: int = 64, tol: float = 1e-8) -> Laurent:
    """Constant Laurent coefficient of f at s0 (pole order <= 2) by circle quadrature.

    The same coefficients at half the radius must agree to ``tol`` (relative
    to max(1, |c|)); otherwise InconsistentLaurent.
    """
    s0 = complex(s0)
    a = _circle_coefficients(f, s0, radius, nodes)
    b = _circle_coefficients(f, s0, radius / 2, nodes)
    for x, y, name in zip(a, b, ("finite part", "residue", "c_-2")):
        if abs(x - y) > tol * max(1.0, abs(x)):
            raise InconsistentLaurent(f"{name} at {s0}: {x} (radius {radius}) vs {y} (radius {radius / 2})")
    return Laurent(s0, b[0], b[1], b[2], radius)


def gamma_ratio_laurent(k: int, r: RationalPower) -> tuple[float, float]:
    """(residue, finite part) of Gamma(s)/Gamma(rs) at s = -k, for rk not an integer.

    Gamma(s) = (-1)^k/k! (1/(s+k) + psi(k+1) + O(s+k)), psi(k+1) = H_k - gamma.
    """
    lead = (-1) ** k / math.factorial(k)
    psi = math.fsum(1.0 / i for i in range(1, k + 1)) - EULER_GAMMA
    g = recip_gamma(-k * r.value).real
    dg = recip_gamma_derivative(-k * r.value).real
    return lead * g, lead * (psi * g + r.value * dg)


# ---------------------------------------------------------------------------
# coefficient reports


@dataclass(frozen=True)
class CoefficientRow:
    term: Term
    predicted: float | None
    fitted: float | None = None
    abs_err: float | None = None
    rel_err: float | None = None
    verdict: str | None = None
    needs_finite_part: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "exponent": self.term.exponent_str(),
            "log_power": self.term.log_power,
            "label": self.term.label,
            "index": self.term.index,
            "predicted": self.predicted,
            "fitted": self.fitted,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "verdict": self.verdict,
            "needs_finite_part": self.needs_finite_part,
            "note": self.note,
        }


@dataclass(frozen=True)
class CoefficientReport:
    rows: tuple
    model: dict
    r: str
    point: tuple
    case: str
    metadata: dict = field(default_factory=dict)

    def row(self, exponent, log_power: int = 0) -> CoefficientRow:
        for row in self.rows:
            if abs(row.term.value - float(exponent)) < 1e-12 and row.term.log_power == log_power:
                return row
        raise KeyError((exponent, log_power))

    def predicted(self, exponent, log_power: int = 0) -> float:
        return self.row(exponent, log_power).predicted

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.rows if r.verdict is not None)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "r": self.r,
            "point": list(self.point),
            "case": self.case,
            "metadata": self.metadata,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _q_diag_real(model: SpectralModel, s: float) -> float:
    return (spectral_zeta(model, s).value / model.volume).real


def log_coefficient(model: SpectralModel, r: RationalPower, l: int) -> float:
    """Coefficient B of t^k log t, k = l beta/2.

    The double pole at s = -k of Gamma(s)/Gamma(rs) * Gamma(rs) q_{-rs}
    has leading coefficient g_{-1} H_{-1} with g_{-1} = (-1)^k/(k! Gamma(-kr))
    and H_{-1} = a_m / r; t^{-s} = t^k (1 - (s+k) log t + ...) turns it into
    -g_{-1} H_{-1} t^k log t.
    """
    k = l * r.beta // 2
    m = (model.n + l * r.alpha) // 2
    g_m1 = (-1) ** k / math.factorial(k) * recip_gamma(-k * r.value).real
    return -g_m1 * heat_coefficient(model, m) / r.value


def _h_function(model: SpectralModel, r: RationalPower):
    vol = model.volume

    def H(s):
        w = r.value * s
        return gamma(w) * _zeta_value(model, w) / vol

    return H


def log_slot_constant(model: SpectralModel, r: RationalPower, l: int) -> tuple[float, Laurent]:
    """Coefficient A of t^k (k = l beta/2) next to the log term.

    A = g_{-1} FP(Gamma(rs) q_{-rs}) + FP(Gamma(s)/Gamma(rs)) a_m / r.
    """
    k = l * r.beta // 2
    m = (model.n + l * r.alpha) // 2
    g_m1, g0 = gamma_ratio_laurent(k, r)
    radius = min(0.25, 0.2 / r.value)
    lau = finite_part(_h_function(model, r), -k, radius=radius)
    a = heat_coefficient(model, m)
    return g_m1 * lau.finite_part.real + g0 * a / r.value, lau


def predict_coefficients(model: SpectralModel, r, template: ExpansionTemplate, point=None) -> CoefficientReport:
    """Predicted coefficient for every slot of the template (the diagonal is homogeneous on a torus)."""
    r = as_power(r)
    if template.n != model.n or str(template.r) != str(r):
        raise DomainError("template was built for a different n or r")
    n = model.n
    rv = r.value
    rows = []
    for term in template.terms:
        note = ""
        fp = False
        if term.label == "neg_ladder":
            j = term.index
            pred = gamma((n - 2 * j) / (2 * rv)).real / gamma((n - 2 * j) / 2).real * heat_coefficient(model, j) / rv
        elif term.label == "integer" and term.index == 0:
            pred = heat_coefficient(model, n // 2)
        elif term.label == "integer" and template.case == "odd_log" and term.index % (r.beta // 2) == 0:
            l = term.index // (r.beta // 2)
            pred, lau = log_slot_constant(model, r, l)
            fp = True
            note = f"finite part of Gamma(rs) q_-rs at s=-{term.index}: {lau.finite_part.real:.17g}"
        elif term.label == "integer":
            j = term.index
            pred = (-1) ** j / math.factorial(j) * _q_diag_real(model, -rv * j)
        elif term.label == "fractional":
            j = term.index
            e = (2 * j + 1) / (2 * rv)
            pred = gamma(-e).real / gamma(-(2 * j + 1) / 2).real * heat_coefficient(model, (n + 2 * j + 1) // 2) / rv
        elif term.label == "log":
            pred = log_coefficient(model, r, term.index)
        else:  # pragma: no cover
            raise DomainError(f"unknown label {term.label}")
        rows.append(CoefficientRow(term, float(pred), needs_finite_part=fp, note=note))
    pt = tuple(np.zeros(n)) if point is None else tuple(np.atleast_1d(point))
    return CoefficientReport(tuple(rows), model.to_dict(), str(r), pt, template.case, {"kind": "diagonal"})


# ---------------------------------------------------------------------------
# off the diagonal


def offdiag_template(n: int, r, J: int) -> ExpansionTemplate:
    """Taylor template t^0, t^1, ..., t^J of h_t(x,y) for x != y."""
    r = as_power(r)
    num = Fraction if r.is_rational else float
    terms = tuple(Term(num(j), 0, "integer", j) for j in range(J + 1))
    return ExpansionTemplate(n, r, "offdiag", terms, float(J))


def offdiag_taylor_prediction(model: SpectralModel, r, x, y, J: int) -> CoefficientReport:
    """Coefficients (-1)^j/j! q_{rj}(x,y) of t^j, j = 0..J; exact zeros when rj is an integer."""
    r = as_power(r)
    if torus_distance(model, x, y) == 0.0:
        raise OnDiagonal("x and y coincide")
    template = offdiag_template(model.n, r, J)
    rows = []
    for term in template.terms:
        j = term.index
        if j == 0 or r.times_is_integer(j):
            pred, note = 0.0, "exact zero"
        else:
            q = q_kernel_offdiag(model, -r.value * j, x, y).value.real
            pred, note = (-1) ** j / math.factorial(j) * q, ""
        rows.append(CoefficientRow(term, float(pred), note=note))
    return CoefficientReport(
        tuple(rows),
        model.to_dict(),
        str(r),
        tuple(np.atleast_1d(x)),
        "offdiag",
        {"kind": "offdiag", "y": list(np.atleast_1d(y).tolist())},
    )


# ---------------------------------------------------------------------------
# even dimension, rational r


def even_case_identity_check(model: SpectralModel, r, l: int) -> float:
    """|q_{r l beta}(x,x) - (-1)^{l beta} (l beta)! a_{n/2 + l alpha}(x,x)|, as the identity is stated."""
    r = as_power(r)
    if model.n % 2 or not r.is_rational or l < 1:
        raise DomainError("needs n even, r rational and l >= 1")
    j = l * r.beta
    q = _q_diag_real(model, -l * r.alpha)
    a = heat_coefficient(model, model.n // 2 + l * r.alpha)
    return abs(q - (-1) ** j * math.factorial(j) * a)


def even_case_identity_residual(model: SpectralModel, r, l: int) -> float:
    """|q_{l alpha}(x,x) - (-1)^{l alpha} (l alpha)! a_{n/2 + l alpha}(x,x)|.

    This is what the residue computation gives: at s = -l beta the ratio
    Gamma(s)/Gamma(rs) tends to (-1)^{l beta - l alpha} r (l alpha)!/(l beta)!,
    not r.
    """
    r = as_power(r)
    if model.n % 2 or not r.is_rational or l < 1:
        raise DomainError("needs n even, r rational and l >= 1")
    k = l * r.alpha
    q = _q_diag_real(model, -k)
    a = heat_coefficient(model, model.n // 2 + k)
    return abs(q - (-1) ** k * math.factorial(k) * a)
