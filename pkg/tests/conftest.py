import math

import pytest

from helmlattice.core import Lattice

K_REF = 1.2 + 0.05j
PHI_REF = math.pi / 5


@pytest.fixture(scope="session")
def K():
    return K_REF


@pytest.fixture(scope="session")
def phi():
    return PHI_REF


@pytest.fixture(scope="session")
def lat():
    return Lattice(K_REF)


@pytest.fixture(scope="session")
def halfline_T(lat):
    from helmlattice.halfline import HalflineTransformant
    return HalflineTransformant(lat, PHI_REF)


@pytest.fixture(scope="session")
def elliptic_data(lat):
    from helmlattice.elliptic import EllipticData
    return EllipticData.build(lat, PHI_REF)


@pytest.fixture(scope="session")
def wedge_solution(lat, elliptic_data):
    from helmlattice.wedge import WedgeSolution
    return WedgeSolution(lat, PHI_REF, elliptic=elliptic_data)
