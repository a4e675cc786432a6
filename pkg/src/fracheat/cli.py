"""Command-line entry point.

Exit codes: 0 success with all verdicts passing, 1 a verdict failed,
2 usage error, 3 a computation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import FracHeatError, PoleEncountered
from .models import LATTICE_BUDGET, SpectralModel
from .power import RationalPower

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _g(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(header, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_g(v) if isinstance(v, float) else v for v in row])


def _write_json(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))
    out.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


# ---------------------------------------------------------------------------
# argument parsing


def parse_power(text: str, allow_one: bool = False):
    """'a/b' gives an exact fraction, a decimal an irrational-flagged real; '1' the Laplacian if allowed."""
    if allow_one and text.strip() in ("1", "1/1", "1.0"):
        return None
    try:
        return RationalPower.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid --r {text!r}: {exc}") from exc


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_geom(text: str) -> np.ndarray:
    """'a:b:ratio' -> geometric grid from a to b."""
    from .fit import geometric_times

    try:
        a, b, q = (float(v) for v in text.split(":"))
        return geometric_times(a, b, q)
    except ValueError as exc:
        raise UsageError(f"expected start:stop:ratio, got {text!r}") from exc


def parse_complex(text: str) -> complex:
    vals = parse_floats(text)
    if len(vals) == 1:
        return complex(vals[0], 0.0)
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise UsageError(f"expected 're' or 're,im', got {text!r}")


@dataclass
class RunConfig:
    model: SpectralModel
    r: object = None
    r_text: str | None = None
    times: np.ndarray | None = None
    tol: float = 1e-12
    budget: int = LATTICE_BUDGET
    threads: int = 1
    extra: dict = field(default_factory=dict)


def model_from_args(args) -> SpectralModel:
    radii = parse_floats(args.radii) if args.radii else [1.0]
    if len(radii) not in (1, args.n):
        raise UsageError(f"--radii needs 1 or {args.n} values")
    try:
        return SpectralModel(args.n, tuple(radii), args.shift)
    except (ValueError, FracHeatError) as exc:
        raise UsageError(str(exc)) from exc


def threads_from_env() -> int:
    """FRACHEAT_THREADS caps worker parallelism; every computation here runs in one thread."""
    raw = os.environ.get("FRACHEAT_THREADS", "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise UsageError(f"FRACHEAT_THREADS must be a positive integer, got {raw!r}") from exc
    if k < 1:
        raise UsageError("FRACHEAT_THREADS must be >= 1")
    return k


def config_from_args(args, allow_one: bool = False) -> RunConfig:
    model = model_from_args(args)
    r_text = getattr(args, "r", None)
    r = parse_power(r_text, allow_one) if r_text is not None else None
    times = None
    if getattr(args, "t_geom", None):
        times = parse_geom(args.t_geom)
    elif getattr(args, "t", None):
        times = np.array(sorted(parse_floats(args.t)))
    return RunConfig(
        model,
        r,
        r_text,
        times,
        getattr(args, "tol", 1e-12),
        getattr(args, "budget", LATTICE_BUDGET),
        threads_from_env(),
    )


def _points(args, n):
    if getattr(args, "diag", False) or (args.x is None and args.y is None):
        x = tuple([0.0] * n) if args.x is None else tuple(parse_floats(args.x))
        return x, x
    x = tuple(parse_floats(args.x)) if args.x else tuple([0.0] * n)
    y = tuple(parse_floats(args.y)) if args.y else tuple([0.0] * n)
    if len(x) != n or len(y) != n:
        raise UsageError(f"points need {n} coordinates")
    return x, y


# ---------------------------------------------------------------------------
# subcommands


def cmd_eigensum(args, out) -> int:
    from .models import enumerate_eigenvalues

    cfg = config_from_args(args)
    ev = enumerate_eigenvalues(cfg.model, args.cutoff, t=args.tail_t, r=cfg.r.value if cfg.r else 1.0, budget=cfg.budget)
    _write_csv(("lambda", "multiplicity"), [(float(v), int(m)) for v, m in ev.entries], out)
    if args.tail_t is not None:
        print(f"# tail_bound {_g(ev.tail_bound)} at t={_g(args.tail_t)}", file=sys.stderr)
    return EXIT_OK


def _kernel(method, model, r, t, x, y, tol, contour):
    from .heat import heat_kernel, heat_kernel_inverse_mellin

    if method == "inverse_mellin":
        return heat_kernel_inverse_mellin(model, r, t, x, contour=contour, tol=max(tol, 1e-10))
    return heat_kernel(model, r, t, x, y, method=method, tol=tol)


def cmd_heat(args, out) -> int:
    from .heat import ContourParams

    cfg = config_from_args(args, allow_one=True)
    if cfg.times is None:
        raise UsageError("heat needs --t or --t-geom")
    x, y = _points(args, cfg.model.n)
    method = args.method.replace("-", "_")
    contour = ContourParams(tau=args.tau, half_length=args.half_length)
    header = ["t", "value", "error_bound", "method"]
    if args.compare:
        header += ["reference", "agreement"]
    rows = []
    for t in cfg.times:
        s = _kernel(method, cfg.model, cfg.r, float(t), x, y, cfg.tol, contour)
        row = [s.t, s.value, s.error_bound, s.method]
        if args.compare:
            ref = _kernel(args.compare.replace("-", "_"), cfg.model, cfg.r, float(t), x, y, cfg.tol, ContourParams())
            row += [ref.value, abs(s.value - ref.value)]
        rows.append(row)
    _write_csv(header, rows, out)
    return EXIT_OK


def cmd_zeta(args, out) -> int:
    from .zeta import q_kernel_offdiag, spectral_zeta

    cfg = config_from_args(args)
    s = parse_complex(args.s)
    if args.x is not None and args.y is not None:
        x, y = tuple(parse_floats(args.x)), tuple(parse_floats(args.y))
        q = q_kernel_offdiag(cfg.model, s, x, y)
        _write_json({"s": [s.real, s.imag], "x": list(x), "y": list(y), "value": [q.value.real, q.value.imag]}, out)
        return EXIT_OK
    try:
        z = spectral_zeta(cfg.model, s)
        obj = z.to_dict()
    except PoleEncountered as exc:
        res = complex(exc.residue) if exc.residue is not None else complex("nan")
        obj = {"s": [s.real, s.imag], "value": None, "is_pole": True, "residue": [res.real, res.imag]}
    _write_json(obj, out)
    return EXIT_OK


def cmd_predict(args, out) -> int:
    from .asym import offdiag_taylor_prediction, predict_coefficients, predict_exponents

    cfg = config_from_args(args)
    if cfg.r is None:
        raise UsageError("predict needs --r")
    if args.x is not None and args.y is not None:
        x, y = tuple(parse_floats(args.x)), tuple(parse_floats(args.y))
        report = offdiag_taylor_prediction(cfg.model, cfg.r, x, y, int(args.max_exponent))
        _write_json(report.to_dict(), out)
        return EXIT_OK
    template = predict_exponents(cfg.model.n, cfg.r, args.max_exponent)
    report = predict_coefficients(cfg.model, cfg.r, template)
    obj = report.to_dict()
    obj["template"] = template.to_dict()
    _write_json(obj, out)
    return EXIT_OK


def cmd_fit(args, out) -> int:
    """predict_exponents -> samples -> fit_expansion -> compare."""
    from .asym import offdiag_taylor_prediction, offdiag_template, predict_coefficients, predict_exponents
    from .fit import SampleGrid, compare, fit_expansion
    from .heat import heat_kernel_direct

    cfg = config_from_args(args)
    if cfg.r is None:
        raise UsageError("fit needs --r")
    offdiag = args.x is not None and args.y is not None
    x, y = _points(args, cfg.model.n)
    if args.samples:
        grid = SampleGrid.from_csv(args.samples)
    else:
        if cfg.times is None:
            raise UsageError("fit needs --samples or a t grid")
        grid = SampleGrid.from_samples(heat_kernel_direct(cfg.model, cfg.r, float(t), x, y, tol=cfg.tol) for t in cfg.times)
    if offdiag:
        J = int(args.max_exponent)
        template = offdiag_template(cfg.model.n, cfg.r, J)
        predicted = offdiag_taylor_prediction(cfg.model, cfg.r, x, y, J)
    else:
        template = predict_exponents(cfg.model.n, cfg.r, args.max_exponent)
        predicted = predict_coefficients(cfg.model, cfg.r, template)
    fitted = fit_expansion(grid, template)
    report = compare(predicted, fitted, args.rel_tol, args.abs_floor, args.check_max)
    obj = report.to_dict()
    obj["fit"] = fitted.to_dict()
    if args.report:
        with open(args.report, "w") as fh:
            _write_json(obj, fh)
    _write_json(obj, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args, out) -> int:
    from .verification import run_acceptance

    threads_from_env()
    results = run_acceptance(quick=args.quick, supplementary=not args.no_supplementary, fault_seed=args.fault_seed)
    for r in results:
        print(r.line(), file=out)
    literal = [r for r in results if not r.name.split()[0].endswith("*")]
    n_ok = sum(r.passed for r in literal)
    print(f"{n_ok}/{len(literal)} criteria passed", file=out)
    if args.json:
        with open(args.json, "w") as fh:
            _write_json([r.to_dict() for r in results], fh)
    return EXIT_OK if n_ok == len(literal) else EXIT_FAIL


def cmd_nonlocality(args, out) -> int:
    from .zeta import q_kernel_diag, spectral_zeta

    cfg = config_from_args(args)
    if cfg.r is None:
        raise UsageError("nonlocality needs --r")
    if cfg.r.times_is_integer(args.j):
        raise UsageError(f"r*j = {cfg.r}*{args.j} is an integer; the scaling argument does not apply")
    n = cfg.model.n
    s = -cfg.r.value * args.j
    unit = SpectralModel.unit(n)
    scaled = SpectralModel(n, (args.p,) * n)
    q1 = q_kernel_diag(unit, s).value.real
    qp = q_kernel_diag(scaled, s).value.real
    expected = args.p ** (2 * s - n)
    zn = spectral_zeta(unit, s).value.real
    ratio = qp / q1
    ok = abs(ratio - expected) <= 1e-10 * abs(expected) and zn != 0.0
    obj = {
        "n": n,
        "r": str(cfg.r),
        "j": args.j,
        "p": args.p,
        "s": s,
        "q_unit": q1,
        "q_scaled": qp,
        "ratio": ratio,
        "expected_ratio": expected,
        "zeta_n": zn,
        "zeta_nonzero": zn != 0.0,
        "verdict": "pass" if ok else "fail",
    }
    _write_json(obj, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_blowup(args, out) -> int:
    from .halfpower import BlowupPoint, blowup_pullback

    cfg = config_from_args(args)
    n = cfg.model.n
    omega = np.array(parse_floats(args.omega))
    if len(omega) != n + 1:
        raise UsageError(f"--omega needs {n + 1} components")
    rho = parse_geom(args.rho_geom)[::-1]
    base = tuple(parse_floats(args.base)) if args.base else tuple([0.0] * n)
    rows = []
    for r in rho:
        pt = BlowupPoint.normalized(float(r), omega, base)
        v = blowup_pullback(cfg.model, pt)
        scaled = r**n * v / pt.omega0 if pt.omega0 > 0 else math.nan
        rows.append((float(r), pt.omega0, v, float(scaled)))
    _write_csv(("rho", "omega0", "value", "rho^n*value/omega0"), rows, out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _model_args(p, r_default=None, r_required=False):
    p.add_argument("--n", type=int, required=True, help="torus dimension")
    p.add_argument("--radii", help="comma-separated radii (one value broadcasts)")
    p.add_argument("--shift", type=float, default=0.0, help="spectral shift xi >= 0")
    p.add_argument("--r", default=r_default, required=r_required, help="power as a/b (exact) or decimal")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracheat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigensum", help="eigenvalues and multiplicities up to a cutoff (CSV)")
    _model_args(p)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--tail-t", type=float, help="report the tail bound at this t")
    p.add_argument("--budget", type=int, default=LATTICE_BUDGET)
    p.set_defaults(func=cmd_eigensum)

    p = sub.add_parser("heat", help="kernel samples on a t grid (CSV)")
    _model_args(p, r_default="1/2")
    p.add_argument("--method", default="eigensum", choices=["eigensum", "poisson", "inverse-mellin", "subordination"])
    p.add_argument("--diag", action="store_true")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--t", help="comma-separated times")
    p.add_argument("--t-geom", help="start:stop:ratio")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--tau", type=float)
    p.add_argument("--half-length", type=float)
    p.add_argument("--compare", choices=["eigensum", "poisson", "inverse-mellin", "subordination"])
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("zeta", help="continued spectral zeta or off-diagonal kernel value (JSON)")
    _model_args(p)
    p.add_argument("--s", required=True, help="'re' or 're,im'")
    p.add_argument("--x")
    p.add_argument("--y")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("predict", help="predicted expansion template and coefficients (JSON)")
    _model_args(p, r_required=True)
    p.add_argument("--max-exponent", type=float, default=4.0)
    p.add_argument("--x")
    p.add_argument("--y")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fit", help="fit samples against the predicted template (JSON)")
    _model_args(p, r_required=True)
    p.add_argument("--max-exponent", type=float, default=4.0)
    p.add_argument("--samples", help="CSV with t,value,error_bound")
    p.add_argument("--t", help="comma-separated times")
    p.add_argument("--t-geom", default="0.01:0.3:1.25")
    p.add_argument("--diag", action="store_true")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--tol", type=float, default=1e-14)
    p.add_argument("--rel-tol", type=float, default=1e-2)
    p.add_argument("--abs-floor", type=float, default=1e-6)
    p.add_argument("--check-max", type=float, help="only judge rows with exponent <= this")
    p.add_argument("--report", help="also write the JSON report here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--fault-seed", type=int, help="perturb every oracle (negative control)")
    p.add_argument("--no-supplementary", action="store_true")
    p.add_argument("--json", help="write results as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("nonlocality", help="rescaled-torus demo of q_{rj} (JSON)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=cmd_nonlocality, radii=None, shift=0.0)

    p = sub.add_parser("blowup", help="r=1/2 kernel along a ray into the front face (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radii")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--omega", required=True, help="omega0,omega'_1,... (normalized)")
    p.add_argument("--rho-geom", default="0.01:0.4:1.25")
    p.add_argument("--base")
    p.set_defaults(func=cmd_blowup)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    out = sys.stdout
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"fracheat {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FracHeatError as exc:
        print(f"fracheat {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
