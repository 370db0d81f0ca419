import math

import numpy as np
import pytest

from helmlattice.halfline import (BranchError, HalflineTransformant, TWO_PI_I,
                                  describing_contours, halfline_table, near_origin_values,
                                  sector_of, wiener_hopf_field)


@pytest.fixture(scope="module")
def residue_table(lat, phi):
    return halfline_table(lat, phi, 8, "residue")


def test_boundary_and_stencil(residue_table):
    assert residue_table.meta["max_boundary_residual"] < 1e-9
    assert residue_table.meta["max_stencil_residual"] < 1e-9


def test_boundary_values_explicit(halfline_T):
    for m in range(1, 11):
        assert abs(halfline_T.residue_field(m, 0)) < 1e-9


def test_matches_wiener_hopf(lat, phi, residue_table):
    w = halfline_table(lat, phi, 8, "wh")
    assert residue_table.max_abs_diff(w) < 1e-8


def test_sommerfeld_quadrature_matches_residues(halfline_T):
    for (m, n) in [(-2, 1), (1, -1), (-1, -2), (0, 2)]:
        assert abs(halfline_T.sommerfeld_numeric(m, n) - halfline_T.residue_field(m, n)) < 1e-10


def test_pole_residues(halfline_T):
    res = np.array(list(halfline_T.pole_residues().values()))
    assert np.max(np.abs(res - np.array([-1, 0, 0, 1]) / TWO_PI_I)) < 1e-8


def test_near_edge_closed_forms(halfline_T):
    for node, val in near_origin_values(halfline_T).items():
        assert abs(halfline_T.residue_field(*node) - val) < 1e-10


def test_contour_overlap(halfline_T):
    for (m, n) in [(2, 1), (-3, 2), (2, -1), (-1, -3)]:
        a, b = describing_contours(m, n)
        va = halfline_T.residue_field(m, n, contour=a)
        vb = halfline_T.residue_field(m, n, contour=b)
        assert abs(va - vb) < 1e-12


def test_second_sheet_is_odd_reflection(halfline_T):
    for (m, n) in [(2, 1), (-3, 2), (-1, -3)]:
        assert abs(halfline_T.residue_field(m, n, sheet=2) + halfline_T.residue_field(m, -n)) < 1e-12


def test_wrong_contour_rejected(halfline_T):
    with pytest.raises(ValueError):
        halfline_T.residue_field(2, 1, contour=4)


def test_sector_labels():
    assert sector_of(1, 0) == 8
    assert sector_of(-1, 0) == 2
    assert sector_of(1, 1, sheet=2) != sector_of(1, 1)


def test_field_decays_like_incident_wave(lat, phi):
    # far below the half-line the total field is dominated by incident + reflected
    T = HalflineTransformant(lat, phi)
    assert abs(T.residue_field(-30, 2)) < 10


def test_flip_branch_breaks_residues(lat, phi):
    T = HalflineTransformant(lat, phi, flip_branch=True, check=False)
    res = np.array(list(T.pole_residues().values()))
    assert np.max(np.abs(res - np.array([-1, 0, 0, 1]) / TWO_PI_I)) > 1e-3


def test_angle_range(lat):
    with pytest.raises(ValueError):
        HalflineTransformant(lat, math.pi / 2)


def test_wh_scattered_part(lat, phi):
    inc = lat.incident_wave(phi)
    tot = wiener_hopf_field(lat, phi, 3, -2)
    sc = wiener_hopf_field(lat, phi, 3, -2, scattered=True)
    assert abs(tot - sc - inc.x_in**3 * inc.y_in**-2) < 1e-14


def test_incident_must_be_on_labelled_sheet():
    assert issubclass(BranchError, ValueError)
