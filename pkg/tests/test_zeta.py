import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat.errors import DomainError, PoleEncountered
from fracheat.models import SpectralModel, enumerate_eigenvalues, heat_coefficient
from fracheat.zeta import (
    completed_zeta,
    functional_equation_residual,
    nontriviality_scan,
    q_kernel_diag,
    q_kernel_offdiag,
    spectral_zeta,
    zeta_laurent,
    zeta_poles,
    zeta_shift_derivative_check,
)

mp.mp.dps = 30


def shifted_circle_zeta(s, a):
    """sum_k (k^2 + a^2)^-s by the Bessel-K (Chowla-Selberg) expansion, via mpmath."""
    s = mp.mpc(s)
    a = mp.mpf(a)
    head = mp.sqrt(mp.pi) * mp.gamma(s - 0.5) / mp.gamma(s) * a ** (1 - 2 * s)
    tail = mp.nsum(lambda m: (m / a) ** (s - 0.5) * mp.besselk(s - 0.5, 2 * mp.pi * m * a), [1, mp.inf])
    return complex(head + 4 * mp.pi**s / mp.gamma(s) * tail)


def circle_q_offdiag(s, phi):
    """(1/pi) sum_{k>=1} cos(k phi) k^{-2s} = Re Li_{2s}(e^{i phi}) / pi."""
    return float(mp.re(mp.polylog(2 * s, mp.expjpi(phi / math.pi)))) / math.pi


@pytest.mark.parametrize("s", [2.0, 0.75, 0.3 + 2j, -0.5, -1.7 + 0.4j])
def test_circle_matches_riemann_zeta(s):
    z = spectral_zeta(SpectralModel.unit(1), s).value
    want = complex(2 * mp.zeta(2 * mp.mpc(s)))
    assert abs(z - want) <= 1e-11 * max(1.0, abs(want))


@pytest.mark.parametrize("s", [1.5, 0.25 + 1j, -0.5 + 0.3j, -1.25])
@pytest.mark.parametrize("a", [0.5, 1.0, 1.7])
def test_shifted_circle_matches_bessel_expansion(s, a):
    z = spectral_zeta(SpectralModel(1, (1.0,), a * a), s).value
    want = shifted_circle_zeta(s, a)
    assert abs(z - want) <= 1e-10 * max(1.0, abs(want))


def test_square_lattice_factorisation():
    # sum over Z^2 \ 0 of |k|^{-2s} = 4 zeta(s) beta(s)
    m = SpectralModel.unit(2)
    for s in (2.0, 1.5 + 0.5j, 0.5, -0.5 + 1j):
        beta = mp.dirichlet(mp.mpc(s), [0, 1, 0, -1])
        want = complex(4 * mp.zeta(mp.mpc(s)) * beta)
        assert abs(spectral_zeta(m, s).value - want) <= 1e-11 * max(1.0, abs(want))


@settings(max_examples=25, deadline=None)
@given(st.floats(1.7, 3.0), st.floats(-5.0, 5.0), st.floats(0.6, 1.6), st.floats(0.1, 1.0))
def test_agrees_with_eigensum_in_convergent_region(sig, b, p2, xi):
    m = SpectralModel(2, (1.0, p2), xi)
    s = complex(sig, b)
    ev = enumerate_eigenvalues(m, 4e4)
    direct = complex(np.sum(ev.multiplicities * ev.values ** (-s)))
    tail = 2 * math.pi * p2 * (4e4) ** (1 - sig) / (sig - 1)
    assert abs(spectral_zeta(m, s).value - direct) <= 1.5 * tail + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.floats(0.05, 0.95), st.floats(-25.0, 25.0))
def test_functional_equation(n, frac, b):
    m = SpectralModel.unit(n)
    s = complex(frac * n / 2, b)
    scale = max(1.0, abs(completed_zeta(m, s)))
    assert functional_equation_residual(m, s) <= 1e-9 * scale


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_trivial_zeros_at_negative_integers(n, k):
    assert abs(spectral_zeta(SpectralModel.unit(n), -k).value) < 1e-10


def test_value_at_zero_is_heat_coefficient_minus_kernel():
    # Z(0) = a_{n/2} vol - dim ker
    assert spectral_zeta(SpectralModel.unit(2), 0).value == pytest.approx(-1.0, abs=1e-12)
    m = SpectralModel(2, (1.0,), 0.4)
    assert spectral_zeta(m, 0).value == pytest.approx(heat_coefficient(m, 1) * m.volume, abs=1e-12)
    assert abs(spectral_zeta(SpectralModel(3, (1.0,), 0.4), 0).value) < 1e-12


@pytest.mark.parametrize("n,xi", [(1, 0.0), (2, 0.0), (3, 0.0), (2, 0.5), (3, 1.2)])
def test_pole_residues_are_heat_coefficients(n, xi):
    m = SpectralModel(n, (1.0,), xi)
    for pole, res in zeta_poles(m):
        m_idx = round(n / 2 - pole)
        want = heat_coefficient(m, m_idx) * m.volume / math.gamma(pole)
        assert abs(res - want) < 1e-12 * max(1.0, abs(want))
        lau_res, _ = zeta_laurent(m, pole)
        assert abs(lau_res - want) < 1e-8 * max(1.0, abs(want))


def test_pole_raises_with_residue():
    with pytest.raises(PoleEncountered) as info:
        spectral_zeta(SpectralModel.unit(1), 0.5)
    assert info.value.residue == pytest.approx(1.0, abs=1e-12)


def test_diag_kernel_is_zeta_over_volume():
    m = SpectralModel(2, (1.0, 2.0), 0.3)
    z = spectral_zeta(m, 0.4 + 1j).value
    assert q_kernel_diag(m, 0.4 + 1j).value == pytest.approx(z / m.volume, rel=1e-15)


@pytest.mark.parametrize("s", [1.3, 0.75, 0.25, -0.5, -1.5])
@pytest.mark.parametrize("phi", [0.6, 2.0, math.pi])
def test_offdiag_kernel_matches_polylog(s, phi):
    q = q_kernel_offdiag(SpectralModel.unit(1), s, (phi,), (0.0,)).value
    want = circle_q_offdiag(s, phi)
    assert abs(q - want) <= 1e-10 * max(1.0, abs(want))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_offdiag_kernel_vanishes_at_negative_integers(k):
    q = q_kernel_offdiag(SpectralModel(2, (1.0, 1.5)), -k, (0.3, 1.0), (2.0, 0.1)).value
    assert abs(q) < 1e-10


def test_shift_derivative_identity():
    m = SpectralModel.unit(2)
    assert zeta_shift_derivative_check(m, 4.0, 0.5, 1e-4, extrapolate=True) < 1e-9
    # the plain centred difference carries the h^2/6 third-derivative error
    plain = zeta_shift_derivative_check(m, 4.0, 0.5, 1e-4)
    assert plain == pytest.approx(1e-8 / 6 * 120 * 0.5**-7, rel=1e-2)


def test_nontriviality_scan_reports_residue_at_poles():
    rep = nontriviality_scan(SpectralModel.unit(1), "1/2", 1, (0.5, 1.0, 2.0))
    assert all(rep.poles)
    for xi, mag in zip(rep.xi_grid, rep.magnitudes):
        # residue of Z at -1/2 is a_1 vol / Gamma(-1/2)
        want = abs(heat_coefficient(SpectralModel(1, (1.0,), xi), 1) * 2 * math.pi / math.gamma(-0.5))
        assert mag == pytest.approx(want, rel=1e-10)
    rep3 = nontriviality_scan(SpectralModel.unit(3), "1/3", 1, (0.5, 1.0))
    assert rep3.nonvanishing and not any(rep3.poles)
    with pytest.raises(DomainError):
        nontriviality_scan(SpectralModel.unit(1), "1/2", 2, (1.0,))
