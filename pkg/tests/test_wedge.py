import math

import numpy as np
import pytest

from helmlattice import oracle
from helmlattice.wedge import (NPOS, POLE_SIGNS, TWO_PI_I, WedgeSolution, WedgeTransformant,
                               cover_sector, describing_contours, physical_turn, wedge_table)

N = 6


@pytest.fixture(scope="module")
def table(lat, phi, wedge_solution):
    return wedge_table(lat, phi, N, solution=wedge_solution)


def test_pole_residues(wedge_solution):
    res = np.array(wedge_solution.T.pole_residues())
    assert np.max(np.abs(res - np.array(POLE_SIGNS) / TWO_PI_I)) < 1e-8


def test_periodicity(wedge_solution):
    T = wedge_solution.T
    w1, w3 = T.periods
    rng = np.random.default_rng(7)
    ts = [a * w1 + b * w3 for a, b in rng.uniform(0, 1, size=(6, 2))]
    assert T.periodicity_defect(ts) < 1e-9


def test_pole_points_are_incident_images(wedge_solution):
    lat = wedge_solution.lat
    for x, y in wedge_solution.T.pole_points():
        assert abs(lat.dispersion(x, y)) < 1e-12


def test_arms_vanish(table):
    assert table.meta["max_boundary_residual"] < 1e-7


def test_stencil(table):
    assert table.meta["max_stencil_residual"] < 1e-7


def test_matches_oracle(lat, phi, table, wedge_solution):
    inc = wedge_solution.T.incident
    o = oracle.solve_scattering(lat.K, 60, inc.x_in, inc.y_in, "wedge", window=N)
    tol = max(1e-6, o.meta["truncation_estimate"])
    assert max(abs(o[k] - table[k]) for k in table.nodes()) < tol


def test_interior_is_zero(table):
    assert all(table[(m, n)] == 0 for m in range(1, N + 1) for n in range(1, N + 1))


@pytest.mark.parametrize("node", [(-2, 1), (-1, -2), (2, -1), (-3, 0), (0, -2)])
def test_odd_reflection_across_arms(wedge_solution, node):
    m, n = node
    u = wedge_solution.field(m, n)
    if m < 0 and n > 0:
        # across the arm along n: the mirror node lies in the scatterer quadrant
        assert abs(wedge_solution.field_on_cover(-m, n, 0) + u) < 1e-12
    if m > 0 and n < 0:
        # across the arm along m, one turn up
        assert abs(wedge_solution.field_on_cover(m, -n, 1) + u) < 1e-12
    assert abs(u) > 0.1


def test_contour_overlap(wedge_solution):
    for (m, n) in [(-2, 1), (-1, -3), (3, -2)]:
        a, b = describing_contours(m, n, physical_turn(m, n))
        assert abs(wedge_solution.field(m, n, contour=a) - wedge_solution.field(m, n, contour=b)) < 1e-12


def test_series_route_matches_quadrature(wedge_solution):
    for (m, n) in [(-1, -1), (-2, 1), (0, -1)]:
        assert abs(wedge_solution.field_numeric(m, n) - wedge_solution.field(m, n)) < 1e-10


def test_sector_bookkeeping():
    assert cover_sector(1, 0) == NPOS
    assert cover_sector(1, 0, 1) == 4
    assert physical_turn(1, 0) == 1
    assert physical_turn(0, 1) == 0
    with pytest.raises(ValueError):
        physical_turn(1, 1)
    with pytest.raises(ValueError):
        cover_sector(0, 0)


def test_angle_range(lat):
    with pytest.raises(ValueError):
        WedgeTransformant(lat, -0.1)


def test_flipped_branch_fails_checks(lat, phi, elliptic_data):
    sol = WedgeSolution(lat, phi, elliptic=elliptic_data, flip_branch=True)
    res = np.array(sol.T.pole_residues())
    assert np.max(np.abs(res - np.array(POLE_SIGNS) / TWO_PI_I)) > 1e-3
    t = wedge_table(lat, phi, 3, solution=sol)
    assert t.meta["max_boundary_residual"] > 1e-3 or t.meta["max_stencil_residual"] > 1e-3
