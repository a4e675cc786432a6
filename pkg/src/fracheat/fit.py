"""Weighted least-squares recovery of expansion coefficients from kernel samples."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .asym import CoefficientReport, ExpansionTemplate
from .errors import IllConditioned, InsufficientSamples, TemplateMismatch

COND_LIMIT = 1e12
DEFAULT_RATIO = 1.25


def geometric_times(t_min: float, t_max: float, ratio: float = DEFAULT_RATIO) -> np.ndarray:
    """t_max, t_max/ratio, ... down to t_min (inclusive), ascending."""
    if not 0 < t_min < t_max or ratio <= 1:
        raise ValueError("need 0 < t_min < t_max and ratio > 1")
    k = int(math.floor(math.log(t_max / t_min) / math.log(ratio) + 1e-9))
    t = t_max / ratio ** np.arange(k + 1)
    if t[-1] > t_min * (1 + 1e-12):
        t = np.append(t, t_min)
    return np.sort(t)


@dataclass(frozen=True)
class SampleGrid:
    t: np.ndarray
    value: np.ndarray
    error_bound: np.ndarray
    spacing: str = "geometric"

    def __post_init__(self):
        t = np.asarray(self.t, float)
        order = np.argsort(t, kind="stable")
        object.__setattr__(self, "t", t[order])
        object.__setattr__(self, "value", np.asarray(self.value, float)[order])
        object.__setattr__(self, "error_bound", np.asarray(self.error_bound, float)[order])
        if np.any(self.t <= 0) or np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be positive and distinct")
        if not np.all(np.isfinite(self.error_bound)):
            raise ValueError("error bounds must be finite")

    @classmethod
    def from_samples(cls, samples) -> "SampleGrid":
        samples = list(samples)
        return cls(
            np.array([s.t for s in samples]),
            np.array([s.value for s in samples]),
            np.array([s.error_bound for s in samples]),
        )

    @classmethod
    def from_function(cls, f, t, error_bound: float = 0.0) -> "SampleGrid":
        t = np.asarray(t, float)
        return cls(t, np.array([f(x) for x in t]), np.full(len(t), error_bound))

    @property
    def range(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def __len__(self):
        return len(self.t)

    def scaled(self, power: float) -> "SampleGrid":
        """Multiply values and bounds by t^power."""
        f = self.t ** power
        return SampleGrid(self.t, self.value * f, self.error_bound * f, self.spacing)

    def restricted(self, t_min: float, t_max: float) -> "SampleGrid":
        keep = (self.t >= t_min) & (self.t <= t_max)
        return SampleGrid(self.t[keep], self.value[keep], self.error_bound[keep], self.spacing)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value", "error_bound"])
        for a, b, c in zip(self.t, self.value, self.error_bound):
            w.writerow([f"{a:.17g}", f"{b:.17g}", f"{c:.17g}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "SampleGrid":
        """Read a CSV with columns t, value, error_bound (extra columns ignored)."""
        if hasattr(source, "read"):
            text = source.read()
        elif isinstance(source, str) and "\n" in source:
            text = source
        else:
            with open(source) as fh:
                text = fh.read()
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(
            np.array([float(r["t"]) for r in rows]),
            np.array([float(r["value"]) for r in rows]),
            np.array([float(r.get("error_bound") or 0.0) for r in rows]),
        )


@dataclass(frozen=True)
class FitResult:
    template: ExpansionTemplate
    coefficients: np.ndarray
    uncertainties: np.ndarray
    residual_norm: float
    condition_number: float
    n_samples: int
    t_range: tuple

    def coefficient(self, exponent, log_power: int = 0) -> float:
        for i, term in enumerate(self.template.terms):
            if abs(term.value - float(exponent)) < 1e-12 and term.log_power == log_power:
                return float(self.coefficients[i])
        raise KeyError((exponent, log_power))

    def to_dict(self) -> dict:
        return {
            "template": self.template.to_dict(),
            "coefficients": self.coefficients.tolist(),
            "uncertainties": self.uncertainties.tolist(),
            "residual_norm": self.residual_norm,
            "condition_number": self.condition_number,
            "n_samples": self.n_samples,
            "t_range": list(self.t_range),
            "term_count": len(self.template.terms),
        }


def design_matrix(t: np.ndarray, template: ExpansionTemplate) -> np.ndarray:
    lt = np.log(t)
    cols = []
    for term in template.terms:
        col = t ** term.value
        if term.log_power:
            col = col * lt ** term.log_power
        cols.append(col)
    return np.column_stack(cols)


def fit_expansion(grid: SampleGrid, template: ExpansionTemplate, floor: float | None = None) -> FitResult:
    """Least squares value(t) ~ sum_k c_k t^{e_k} log^{p_k} t, rows weighted by 1/max(error, floor).

    Columns are scaled to unit norm and the system is solved through QR.
    """
    K = len(template.terms)
    N = len(grid)
    if N < 2 * K:
        raise InsufficientSamples(f"{N} samples for {K} terms; need at least {2 * K}")
    if any(t.log_power for t in template.terms):
        lo, hi = grid.range
        if hi / lo < 10.0 * (1 - 1e-12):
            raise InsufficientSamples("log terms need a grid spanning at least one decade")
    if floor is None:
        floor = 1e-15 * float(np.max(np.abs(grid.value)))
    eff = np.maximum(grid.error_bound, floor)
    # weights are scale-free; normalising keeps zero bounds and zero data finite
    w = np.ones(N) if eff.max() == 0 else eff.min() / np.maximum(eff, eff.max() * 1e-300)
    A = design_matrix(grid.t, template) * w[:, None]
    b = grid.value * w
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > COND_LIMIT:
        raise IllConditioned(f"condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    Q, R = np.linalg.qr(As)
    c = np.linalg.solve(R, Q.T @ b)
    resid = b - As @ c
    rnorm = float(np.linalg.norm(resid))
    dof = max(N - K, 1)
    Rinv = np.linalg.inv(R)
    cov = (Rinv @ Rinv.T) * (rnorm ** 2 / dof)
    unc = np.sqrt(np.diag(cov)) / scale
    return FitResult(template, c / scale, unc, rnorm, cond, N, grid.range)


def compare(
    predicted: CoefficientReport,
    fitted: FitResult,
    rel_tol: float,
    abs_floor: float,
    check_max: float | None = None,
) -> CoefficientReport:
    """Merge predictions and fitted values; a row passes if |fit - pred| <= max(rel_tol |pred|, abs_floor).

    Rows with exponent above ``check_max`` are fitted (they absorb bias) but
    get no verdict.
    """
    pk = [(float(r.term.exponent), r.term.log_power) for r in predicted.rows]
    fk = [(float(t.exponent), t.log_power) for t in fitted.template.terms]
    if len(pk) != len(fk) or any(abs(a[0] - b[0]) > 1e-12 or a[1] != b[1] for a, b in zip(pk, fk)):
        raise TemplateMismatch("predicted and fitted templates differ")
    rows = []
    for row, c in zip(predicted.rows, fitted.coefficients):
        c = float(c)
        err = abs(c - row.predicted)
        rel = err / abs(row.predicted) if row.predicted else math.inf if err else 0.0
        ok = err <= max(rel_tol * abs(row.predicted), abs_floor)
        verdict = "pass" if ok else "fail"
        if check_max is not None and row.term.value > check_max + 1e-12:
            verdict = None
        rows.append(replace(row, fitted=c, abs_err=err, rel_err=rel, verdict=verdict))
    meta = dict(predicted.metadata)
    meta.update(
        {
            "rel_tol": rel_tol,
            "abs_floor": abs_floor,
            "check_max": check_max,
            "condition_number": fitted.condition_number,
            "residual_norm": fitted.residual_norm,
            "n_samples": fitted.n_samples,
            "t_range": list(fitted.t_range),
            "term_count": len(fitted.template.terms),
        }
    )
    return replace(predicted, rows=tuple(rows), metadata=meta)


def report_from_json(text: str) -> dict:
    return json.loads(text)
