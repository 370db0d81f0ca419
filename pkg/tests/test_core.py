import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helmlattice.core import DegenerateRootError, Lattice, Sheet


def test_rejects_nonpositive_imaginary_part():
    with pytest.raises(ValueError):
        Lattice(1.2 + 0j)
    with pytest.raises(ValueError):
        Lattice(1.2 - 0.1j)


def test_branch_points_reference_values(lat):
    e = lat.eta
    assert abs(e.eta11 - (0.2988 - 1.0217j)) < 1e-4
    assert abs(e.eta12 - (4.3318 - 0.1267j)) < 1e-4
    assert abs(e.eta21 - (0.2637 + 0.9017j)) < 1e-4
    assert abs(e.eta22 - (0.2307 + 0.0067j)) < 1e-4
    for eta in e.as_tuple():
        # at a branch point the two roots in y coincide at y = +-1
        y = lat.roots(eta)[0]
        assert abs(abs(y) - 1) < 1e-6


def test_branch_normalizations(lat):
    assert abs(lat.F2(0.0) * lat.F3(0.0) - 1) < 1e-14
    for tau in (1e-5, 1e-5j):
        assert abs(tau * lat.F2(1 / tau) - 1) < 1e-4
        assert abs(tau * lat.F3(1 / tau) - 1) < 1e-4


def test_upsilon_matches_small_root_on_unit_circle(lat):
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    xi = lat.xi(z)
    assert np.max(np.abs(xi)) < 1
    assert np.max(np.abs(z * (xi - 1 / xi) - lat.upsilon_analytic(z))) < 1e-12


def test_y_from_upsilon(lat):
    x = 0.3 + 0.5j
    for sheet in Sheet:
        y = lat.y_on(x, sheet)
        assert abs(lat.y_from_upsilon(x, x * (y - 1 / y)) - y) < 1e-12


def test_degenerate_roots_raise(lat):
    with pytest.raises(DegenerateRootError):
        lat.xi(lat.eta.eta22)


def test_incident_wave_reference(lat):
    w = lat.incident_wave(math.pi / 5)
    assert abs(w.x_in - (0.4774 + 0.8209j)) < 1e-4
    assert abs(w.y_in - (0.7590 + 0.6136j)) < 1e-4
    assert abs(lat.dispersion(w.x_in, w.y_in)) < 1e-12


def test_saddle_points_are_real_waves(lat):
    for p in lat.saddle_points(3, -2):
        a, b = p.x - 1 / p.x, p.y - 1 / p.y
        assert abs((b / a).imag) < 1e-8
        assert abs((b / a).real - (-2 / 3)) < 1e-6 or abs((b / a).real + 2 / 3) < 1e-6


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 3.5), st.floats(0.01, 0.5),
       st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_roots_solve_dispersion(kr, ki, xr, xi_):
    lat = Lattice(complex(kr, ki))
    x = complex(xr, xi_)
    if abs(x) < 1e-3:
        return
    small, large = lat.roots(x)
    assert abs(small * large - 1) < 1e-9
    for y in (small, large):
        assert abs(lat.dispersion(x, y)) < 1e-8 * (1 + abs(x) + 1 / abs(x) + abs(y) + 1 / abs(y))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.02, 0.4), st.floats(0, 2 * math.pi))
def test_plane_waves_solve_stencil(kr, ki, theta):
    lat = Lattice(complex(kr, ki))
    x = np.exp(1j * theta)
    y = lat.xi(x)
    f = lambda m, n: lat.plane_wave(m, n, x, y)
    for m, n in ((0, 0), (3, -2), (-4, 5)):
        assert abs(lat.stencil(f, m, n)) < 1e-9 * max(1.0, abs(f(m, n)))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.02, 0.4))
def test_branch_points_separated_by_unit_circle(kr, ki):
    lat = Lattice(complex(kr, ki))
    e = lat.eta
    assert abs(e.eta21) < 1 and abs(e.eta22) < 1
    assert abs(e.eta11) > 1 and abs(e.eta12) > 1
    assert abs(e.eta11 * e.eta21 - 1) < 1e-10
    assert abs(e.eta12 * e.eta22 - 1) < 1e-10
