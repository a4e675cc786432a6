import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fracheat.asym import (
    ExpansionTemplate,
    even_case_identity_check,
    even_case_identity_residual,
    expansion_case,
    finite_part,
    gamma_ratio_laurent,
    log_coefficient,
    log_slot_constant,
    offdiag_taylor_prediction,
    predict_coefficients,
    predict_exponents,
)
from fracheat.errors import DomainError, InconsistentLaurent, OnDiagonal
from fracheat.fit import SampleGrid, compare, fit_expansion, geometric_times
from fracheat.halfpower import subordinated_kernel
from fracheat.heat import heat_kernel_direct
from fracheat.models import SpectralModel
from fracheat.power import RationalPower
from fracheat.specfun import gamma

EULER = 0.5772156649015329

rationals = st.fractions(min_value=Fraction(1, 7), max_value=Fraction(6, 7), max_denominator=7).map(
    lambda f: RationalPower.fraction(f.numerator, f.denominator)
)


def test_case_classification():
    half = RationalPower.parse("1/2")
    third = RationalPower.parse("1/3")
    assert expansion_case(2, third) == "even"
    assert expansion_case(1, half) == "odd_log"
    assert expansion_case(3, third) == "odd_plain"


def test_circle_half_power_template():
    tm = predict_exponents(1, "1/2", 3)
    assert tm.index_set() == [(Fraction(-1), 0), (Fraction(1), 0), (Fraction(1), 1), (Fraction(3), 0), (Fraction(3), 1)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), rationals, st.integers(1, 6))
def test_template_has_distinct_sorted_slots(n, r, top):
    tm = predict_exponents(n, r, top)
    keys = tm.index_set()
    assert len(keys) == len(set(keys))
    vals = [float(e) for e, _ in keys]
    assert vals == sorted(vals)
    assert min(vals) == pytest.approx(-n / (2 * r.value))
    assert max(vals) <= top + 1e-12
    has_log = any(lp for _, lp in keys)
    # log slots sit at t^(l beta/2), so the first needs beta/2 <= top
    assert has_log == (n % 2 == 1 and r.beta % 2 == 0 and r.beta // 2 <= top)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), rationals, st.integers(1, 6))
def test_template_json_roundtrip(n, r, top):
    tm = predict_exponents(n, r, top)
    assert ExpansionTemplate.from_dict(tm.to_dict()).index_set() == tm.index_set()


def test_irrational_power_uses_floats():
    tm = predict_exponents(3, 0.61803398875, 3)
    assert all(isinstance(e, float) for e, _ in tm.index_set())


@pytest.mark.parametrize("k", range(6))
def test_finite_part_of_gamma(k):
    lau = finite_part(gamma, -k)
    assert lau.residue == pytest.approx((-1) ** k / math.factorial(k), abs=1e-12)
    harmonic = sum(1.0 / i for i in range(1, k + 1))
    assert lau.finite_part == pytest.approx((-1) ** k / math.factorial(k) * (harmonic - EULER), abs=1e-10)


def test_finite_part_detects_radius_inconsistency():
    with pytest.raises(InconsistentLaurent):
        finite_part(gamma, -1, radius=1.5)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_gamma_ratio_laurent_against_circle(k):
    r = RationalPower.parse("1/2")
    res, fp = gamma_ratio_laurent(k, r)
    lau = finite_part(lambda s: gamma(s) / gamma(r.value * s), -k, radius=0.2)
    assert res == pytest.approx(lau.residue.real, abs=1e-10)
    assert fp == pytest.approx(lau.finite_part.real, abs=1e-9)


def test_circle_coefficients_match_coth_series():
    rep = predict_coefficients(SpectralModel.unit(1), "1/2", predict_exponents(1, "1/2", 5))
    want = {(-1, 0): 1 / math.pi, (1, 0): 1 / (12 * math.pi), (3, 0): -1 / (720 * math.pi), (5, 0): 1 / (30240 * math.pi)}
    for row in rep.rows:
        key = (int(row.term.exponent), row.term.log_power)
        assert row.predicted == pytest.approx(want.get(key, 0.0), abs=1e-12)


@pytest.mark.parametrize("xi", [0.25, 1.0, 2.0])
def test_shifted_circle_log_coefficient_sign(xi):
    # the t log t coefficient is +xi/(2 pi), set by the residue of the zeta function at -1/2
    m = SpectralModel(1, (1.0,), xi)
    assert log_coefficient(m, RationalPower.parse("1/2"), 1) == pytest.approx(xi / (2 * math.pi), rel=1e-14)


def test_shifted_circle_constant_next_to_log():
    # Bessel-K expansion of the shifted circle kernel gives this t-coefficient for xi = 1
    from scipy.special import k1

    m = SpectralModel(1, (1.0,), 1.0)
    a, _ = log_slot_constant(m, RationalPower.parse("1/2"), 1)
    tail = sum(k1(2 * math.pi * j) / (math.pi * j) for j in range(1, 20))
    want = (EULER - 0.5 - math.log(2) + 2 * tail) / (2 * math.pi)
    assert a == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize(
    "n,r,xi,t_lo,t_hi,top",
    [
        (1, "1/2", 1.0, 0.01, 0.3, 4),
        (2, "1/2", 0.0, 0.02, 0.4, 3),
        (1, "2/3", 0.5, 0.01, 0.4, 4),
        (3, "1/2", 0.0, 0.03, 0.4, 5),
    ],
)
def test_predictions_match_fitted_samples(n, r, xi, t_lo, t_hi, top):
    m = SpectralModel(n, (1.0,), xi)
    tm = predict_exponents(n, r, top)
    times = geometric_times(t_lo, t_hi, 1.08)
    if n == 3:
        # the lattice sum gets expensive at small t in three dimensions
        samples = [subordinated_kernel(m, t) for t in times]
    else:
        samples = [heat_kernel_direct(m, r, t, tol=1e-14) for t in times]
    grid = SampleGrid.from_samples(samples)
    rep = compare(predict_coefficients(m, r, tm), fit_expansion(grid, tm), 1e-3, 1e-7, check_max=1.0)
    assert rep.passed, rep.to_json()


def test_even_identity_stated_form_differs_from_residue_form():
    m = SpectralModel(2, (1.0,), 0.7)
    for r in ("1/2", "1/3"):
        assert even_case_identity_residual(m, r, 1) < 1e-12
        assert even_case_identity_check(m, r, 1) > 1e-2
    with pytest.raises(DomainError):
        even_case_identity_residual(SpectralModel.unit(1), "1/2", 1)


def test_offdiag_prediction():
    m = SpectralModel.unit(1)
    rep = offdiag_taylor_prediction(m, "1/2", (math.pi / 2,), (0.0,), 5)
    # h_t(pi/2, 0) = sinh t / (2 pi cosh t) = tanh(t) / (2 pi)
    tanh = {1: 1.0, 3: -1 / 3, 5: 2 / 15}
    for row in rep.rows:
        assert row.predicted == pytest.approx(tanh.get(row.term.index, 0.0) / (2 * math.pi), abs=1e-11)
    with pytest.raises(OnDiagonal):
        offdiag_taylor_prediction(m, "1/2", (1.0,), (1.0,), 3)
