import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat.errors import CutoffTooLarge, DomainError
from fracheat.models import (
    SpectralModel,
    count_lower,
    count_upper,
    enumerate_eigenvalues,
    heat_coefficient,
    heat_coefficients,
    kernel_projection_density,
    lattice_points,
    spectral_tail_bound,
    torus_distance,
)
from fracheat.power import RationalPower


def brute_eigenvalues(radii, shift, cutoff):
    K = int(math.ceil(max(radii) * math.sqrt(cutoff))) + 1
    grids = np.meshgrid(*[np.arange(-K, K + 1)] * len(radii), indexing="ij")
    lam = sum((g / p) ** 2 for g, p in zip(grids, radii)).ravel() + shift
    return np.sort(lam[lam <= cutoff + 1e-12])


def test_radii_broadcast_and_validation():
    m = SpectralModel(3, (2.0,))
    assert m.radii == (2.0, 2.0, 2.0)
    with pytest.raises(DomainError):
        SpectralModel(2, (1.0, -1.0))
    with pytest.raises(DomainError):
        SpectralModel(2, (1.0, 2.0, 3.0))
    with pytest.raises(DomainError):
        SpectralModel(1, (1.0,), -0.1)


def test_volume_and_projection():
    m = SpectralModel(2, (1.0, 3.0))
    assert m.volume == pytest.approx((2 * math.pi) ** 2 * 3.0, rel=1e-15)
    assert kernel_projection_density(m) == pytest.approx(1 / m.volume, rel=1e-15)
    assert kernel_projection_density(m.with_shift(0.5)) == 0.0


def test_model_json_roundtrip():
    m = SpectralModel(2, (1.1, 0.7), 0.3)
    assert SpectralModel.from_json(m.to_json()) == m


def test_heat_coefficients_closed_form():
    m = SpectralModel(3, (1.0,), 0.7)
    for j in range(5):
        want = (4 * math.pi) ** -1.5 * (-0.7) ** j / math.factorial(j)
        assert heat_coefficient(m, j) == pytest.approx(want, rel=1e-15)
    assert heat_coefficient(SpectralModel.unit(2), 1) == 0.0
    assert len(heat_coefficients(m, 4)) == 5


def test_unit_circle_eigenvalues():
    ev = enumerate_eigenvalues(SpectralModel.unit(1), 16.5)
    assert ev.entries == [(0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2), (16.0, 2)]
    assert ev.count == 9


def test_square_torus_multiplicities():
    # r_2(5) = 8, r_2(25) = 12
    ev = enumerate_eigenvalues(SpectralModel.unit(2), 25)
    d = dict(ev.entries)
    assert d[5.0] == 8 and d[25.0] == 12 and 3.0 not in d


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(0.4, 2.5), min_size=1, max_size=3),
    st.floats(0.0, 2.0),
    st.floats(1.0, 30.0),
)
def test_enumeration_matches_brute_force(radii, shift, span):
    m = SpectralModel(len(radii), tuple(radii), shift)
    cutoff = shift + span
    ev = enumerate_eigenvalues(m, cutoff)
    brute = brute_eigenvalues(radii, shift, cutoff)
    assert ev.count == len(brute)
    expanded = np.repeat(ev.values, ev.multiplicities)
    np.testing.assert_allclose(expanded, brute, rtol=1e-12, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.floats(0.3, 3.0), st.floats(1.0, 40.0))
def test_counting_bounds_bracket_lattice_count(n, p, R):
    m = SpectralModel(n, (p,))
    N = len(lattice_points(m, R * R))
    assert count_lower(m, R) <= N <= count_upper(m, R)


@settings(max_examples=20, deadline=None)
@given(st.floats(1.5, 3.0))
def test_rescaling_multiplies_eigenvalues(c):
    m = SpectralModel(2, (1.0, 1.3))
    a = enumerate_eigenvalues(m, 10.0)
    b = enumerate_eigenvalues(m.scaled(c), 10.0 / c**2)
    np.testing.assert_allclose(a.values / c**2, b.values, rtol=1e-12)
    np.testing.assert_array_equal(a.multiplicities, b.multiplicities)


@pytest.mark.parametrize("r", [1.0, 0.5, 1 / 3])
def test_tail_bound_dominates_omitted_terms(r):
    m = SpectralModel(2, (1.0, 1.7))
    t = 0.3
    small = enumerate_eigenvalues(m, 20.0, t=t, r=r)
    big = enumerate_eigenvalues(m, 2000.0)
    keep = big.values > 20.0
    omitted = float(np.sum(big.multiplicities[keep] * np.exp(-t * big.values[keep] ** r)))
    assert small.tail_bound >= omitted
    assert spectral_tail_bound(m, math.sqrt(20.0), small.count, t, r) == small.tail_bound


def test_budget_is_enforced():
    with pytest.raises(CutoffTooLarge):
        lattice_points(SpectralModel.unit(3), 1e4, budget=1000)


def test_torus_distance_wraps():
    m = SpectralModel(1, (2.0,))
    assert torus_distance(m, (0.1,), (2 * math.pi - 0.1,)) == pytest.approx(0.4, rel=1e-12)


def test_rational_power_parsing():
    r = RationalPower.parse("2/4")
    assert r.exact == Fraction(1, 2) and r.is_rational
    assert not RationalPower.parse("0.5").is_rational
    assert r.times_is_integer(2) and not r.times_is_integer(3)
    for bad in ("3/2", "1", "0", "-1/3"):
        with pytest.raises(ValueError):
            RationalPower.parse(bad)
