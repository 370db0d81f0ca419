"""Discrete Helmholtz problems on the square lattice: Green's function,
Dirichlet half-line and Dirichlet right angle."""

from .core import Lattice, Sheet, SurfacePoint, BranchPointSet, IncidentWave
from .series import PowerSeries

__version__ = "0.1.0"
