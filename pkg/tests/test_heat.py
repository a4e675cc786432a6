import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat.errors import DomainError
from fracheat.fit import SampleGrid
from fracheat.heat import (
    ContourParams,
    heat_kernel,
    heat_kernel_direct,
    heat_kernel_inverse_mellin,
    heat_kernel_poisson,
    samples_to_csv,
)
from fracheat.models import SpectralModel

CIRCLE = SpectralModel.unit(1)


def poisson_kernel(t, phi):
    """Closed form of sum_k e^{-t|k|} e^{ik phi} / (2 pi)."""
    # cosh t - cos phi written without cancellation at small t and phi
    denom = 2 * math.sinh(t / 2) ** 2 + 2 * math.sin(phi / 2) ** 2
    return math.sinh(t) / (2 * math.pi * denom)


@pytest.mark.parametrize("t", [0.05, 0.3, 1.0, 4.0])
@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi])
def test_half_power_circle_closed_form(t, phi):
    s = heat_kernel_direct(CIRCLE, "1/2", t, (phi,), (0.0,), tol=1e-14)
    want = poisson_kernel(t, phi)
    assert abs(s.value - want) <= max(s.error_bound, 1e-15) + 1e-13 * want


@pytest.mark.parametrize("t", [0.1, 1.0])
def test_inverse_mellin_agrees_on_diagonal(t):
    s = heat_kernel_inverse_mellin(CIRCLE, "1/2", t, (0.0,), tol=1e-10)
    assert abs(s.value - poisson_kernel(t, 0.0)) < 1e-9 * poisson_kernel(t, 0.0)
    assert s.error_bound >= abs(s.value - poisson_kernel(t, 0.0))


def test_inverse_mellin_custom_contour():
    s = heat_kernel_inverse_mellin(CIRCLE, "1/2", 0.5, (0.0,), contour=ContourParams(tau=2.5), tol=1e-10)
    assert s.value == pytest.approx(poisson_kernel(0.5, 0.0), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 3.0), st.floats(-3.0, 3.0), st.floats(0.5, 2.0))
def test_poisson_matches_eigensum_for_laplacian(t, phi, p):
    m = SpectralModel(1, (p,))
    a = heat_kernel_direct(m, None, t, (phi,), (0.0,), tol=1e-14)
    b = heat_kernel_poisson(m, t, (phi,), (0.0,))
    assert abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-14


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 2.0), st.tuples(st.floats(0, 6), st.floats(0, 6)), st.tuples(st.floats(0, 6), st.floats(0, 6)))
def test_kernel_is_symmetric(t, x, y):
    m = SpectralModel(2, (1.0, 1.3), 0.2)
    a = heat_kernel_direct(m, "2/3", t, x, y)
    b = heat_kernel_direct(m, "2/3", t, y, x)
    assert abs(a.value - b.value) <= 1e-14 * max(1.0, abs(a.value))


def test_heat_trace_product_structure():
    # on T^2 with unit radii, p_t(x,x) is the square of the circle value
    m2 = SpectralModel.unit(2)
    for t in (0.1, 1.0):
        a = heat_kernel_poisson(m2, t).value
        b = heat_kernel_poisson(CIRCLE, t).value
        assert a == pytest.approx(b * b, rel=1e-14)


def test_long_time_limit_is_projection():
    m = SpectralModel(2, (1.0, 0.8))
    s = heat_kernel_direct(m, "1/2", 80.0)
    assert s.value == pytest.approx(1 / m.volume, rel=1e-12)


def test_shifted_kernel_decays():
    m = SpectralModel(1, (1.0,), 1.0)
    vals = [heat_kernel_direct(m, "1/2", t).value for t in (1.0, 5.0, 20.0)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_dispatch_and_errors():
    assert heat_kernel(CIRCLE, "1/2", 0.5, method="subordination").method == "subordination"
    with pytest.raises(DomainError):
        heat_kernel(CIRCLE, "1/2", 0.5, method="poisson")
    with pytest.raises(DomainError):
        heat_kernel(CIRCLE, "1/3", 0.5, method="subordination")
    with pytest.raises(DomainError):
        heat_kernel(CIRCLE, "1/2", 0.5, method="bogus")


def test_csv_roundtrip_is_exact():
    samples = [heat_kernel_direct(CIRCLE, "1/2", t) for t in (0.1, 0.2, 0.4)]
    grid = SampleGrid.from_csv(samples_to_csv(samples))
    np.testing.assert_array_equal(grid.value, [s.value for s in samples])
    np.testing.assert_array_equal(grid.t, [0.1, 0.2, 0.4])
