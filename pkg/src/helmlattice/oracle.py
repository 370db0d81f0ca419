"""Brute-force reference solutions on a finite box.

The five-point equations are assembled on ``|m|, |n| <= R`` with zero Dirichlet
data outside and solved directly.  Nothing here uses the dispersion surface:
the incident wave is passed in as a pair ``(x_in, y_in)`` of numbers.
"""

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .table import FieldTable

log = logging.getLogger(__name__)


def no_scatterer(m, n):
    return np.zeros(np.broadcast(m, n).shape, dtype=bool)


def halfline_nodes(m, n):
    return (n == 0) & (m >= 0)


def right_angle_nodes(m, n):
    return ((n == 0) & (m >= 0)) | ((m == 0) & (n >= 0))


def quadrant_nodes(m, n):
    return (m >= 0) & (n >= 0)


SCATTERERS = {"none": no_scatterer, "halfline": halfline_nodes, "wedge": quadrant_nodes}


class LatticeProblem:
    """Finite-box discretization of the lattice Helmholtz equation.

    Parameters
    ----------
    K : complex
        Wavenumber parameter, ``Im K > 0``.
    R : int
        Box radius.
    scatterer : str or callable
        ``'none'``, ``'halfline'``, ``'wedge'`` or a vectorized predicate on
        index arrays.
    """

    def __init__(self, K, R, scatterer="none"):
        K = complex(K)
        if not K.imag > 0:
            raise ValueError("Im K must be positive")
        if R < 2:
            raise ValueError("R must be >= 2")
        self.K, self.R = K, int(R)
        self.kappa = K * K - 4
        self.scatterer = SCATTERERS[scatterer] if isinstance(scatterer, str) else scatterer
        idx = np.arange(-R, R + 1)
        self.m, self.n = np.meshgrid(idx, idx, indexing="ij")
        self.fixed = self.scatterer(self.m, self.n).ravel()

    @property
    def size(self):
        return 2 * self.R + 1

    def _matrix(self):
        # rows for fixed nodes become identity rows
        L = self.size
        N = L * L
        main = np.full(N, self.kappa, dtype=complex)
        ind = np.arange(N).reshape(L, L)
        rows, cols = [], []
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a = ind[max(di, 0): L + min(di, 0), max(dj, 0): L + min(dj, 0)]
            b = ind[max(-di, 0): L + min(-di, 0), max(-dj, 0): L + min(-dj, 0)]
            rows.append(a.ravel())
            cols.append(b.ravel())
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        keep = ~self.fixed[rows]
        A = sp.coo_matrix((np.ones(keep.sum(), dtype=complex), (rows[keep], cols[keep])), shape=(N, N))
        main[self.fixed] = 1.0
        return (A + sp.diags(main)).tocsc()

    def solve(self, rhs):
        A = self._matrix()
        u = spla.spsolve(A, rhs)
        rel = np.linalg.norm(A @ u - rhs) / max(np.linalg.norm(rhs), 1e-300)
        if not np.all(np.isfinite(u)) or rel > 1e-10:
            raise ArithmeticError(f"sparse solve failed (relative residual {rel:.3g})")
        return u.reshape(self.size, self.size), rel

    def truncation_estimate(self, U):
        """Max ``|u|`` on the second outermost ring of the box."""
        r = self.R - 1
        ring = (np.maximum(np.abs(self.m), np.abs(self.n)) == r)
        return float(np.max(np.abs(U[ring])))

    def to_table(self, U, meta, window=None):
        vals = {}
        for i in range(self.size):
            for j in range(self.size):
                m, n = int(self.m[i, j]), int(self.n[i, j])
                if window is None or (abs(m) <= window and abs(n) <= window):
                    vals[(m, n)] = complex(U[i, j])
        return FieldTable(vals, meta)


def solve_green(K, R, window=None):
    """Point-source solution (right-hand side ``delta(m) delta(n)``)."""
    prob = LatticeProblem(K, R, "none")
    rhs = ((prob.m == 0) & (prob.n == 0)).astype(complex).ravel()
    U, rel = prob.solve(rhs)
    meta = {"method": "oracle", "K": prob.K, "R": R, "solver_residual": rel,
            "truncation_estimate": prob.truncation_estimate(U)}
    return prob.to_table(U, meta, window)


def solve_scattering(K, R, x_in, y_in, scatterer="halfline", window=None):
    """Total field ``u_in + u_sc`` for an incident plane wave ``x_in**m y_in**n``.

    ``u_sc`` satisfies the homogeneous stencil at free nodes, equals
    ``-u_in`` on the scatterer and vanishes outside the box.
    """
    prob = LatticeProblem(K, R, scatterer)
    u_in = (complex(x_in) ** prob.m.astype(float)) * (complex(y_in) ** prob.n.astype(float))
    rhs = np.where(prob.fixed, -u_in.ravel(), 0.0).astype(complex)
    Usc, rel = prob.solve(rhs)
    U = u_in + Usc
    U[prob.fixed.reshape(U.shape)] = 0.0
    meta = {"method": "oracle", "K": prob.K, "R": R, "scatterer": scatterer if isinstance(scatterer, str) else "custom",
            "x_in": complex(x_in), "y_in": complex(y_in), "solver_residual": rel,
            "truncation_estimate": prob.truncation_estimate(Usc)}
    return prob.to_table(U, meta, window)
