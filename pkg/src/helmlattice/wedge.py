"""Diffraction by the Dirichlet right angle ``m >= 0, n >= 0``.

The field is continued to the three-sheet branched lattice (angle ``phi`` in
``[0, 6 pi)``), where it is a Sommerfeld integral over the three-fold cover
of the dispersion torus.  On that cover the uniformizing variable ``t`` has
periods ``(omega1, 3 omega2)`` and the transformant is a combination of four
shifted Weierstrass zeta functions.

The twelve infinity points of the cover sit at cover angles ``pi/4 + i pi/2``
and at ``t_i = omega1/2 + omega2/8 + i omega2/4``; their kinds cycle through
``J1, J4, J3, J2``.  As for the half-line, the contour describing a node of
angle ``phi`` in ``((j-1) pi/2, (j+1) pi/2)`` encloses positions ``j .. j+3``
(mod 12), and the integral is ``2 pi i`` times the sum of the residues there.

Residues are Taylor coefficients: the transformant times ``dt/ds`` is
sampled on a small circle in the local chart ``s`` (``x`` or ``1/x``) and
transformed, once per infinity point, with enough digits for the highest
pole order requested.  Each node then needs only a product of short series.
"""

import logging
import math

import mpmath as mp
import numpy as np

from .core import Lattice
from .elliptic import EllipticData, WeierstrassZeta, lattice_distance
from .halfline import (TWO_PI_I, _AT_ZERO, _TYPE_SIGN, annotate, chart_germ,
                       pole_order, surface_constants)
from .series import PowerSeries
from .table import FieldTable

log = logging.getLogger(__name__)

NPOS = 12
POLE_SIGNS = (-1, 1, -1, 1)


def _lattice(K):
    return K if isinstance(K, Lattice) else Lattice(K)


class WedgeTransformant:
    """``A(t) = (2 pi i)**-1 [-E(t - P1) + E(t - P2) - E(t - P3) + E(t - P4)]``.

    ``E`` is the zeta function of the lattice ``(omega1, 3 omega2)`` and the
    poles are ``P1 = t0 + omega2``, ``P2 = 2 omega2 - t0``,
    ``P3 = t0 + 5 omega2 / 2``, ``P4 = omega2 / 2 - t0``; they carry the
    incident wave and its three mirror images.  The quasi-periods of ``E``
    cancel between the two pairs of opposite sign.

    Parameters
    ----------
    K : complex or Lattice
    phi_in : float
        Incidence angle in ``(0, pi/2)``.
    elliptic : EllipticData, optional
        Reused if given.
    flip_branch : bool
        Swap the signs of the two image poles (a deliberately wrong
        transformant, for negative tests).
    """

    def __init__(self, K, phi_in, elliptic=None, dps=20, flip_branch=False):
        lat = _lattice(K)
        if not 0 < phi_in < math.pi / 2:
            raise ValueError(f"phi_in must lie in (0, pi/2), got {phi_in}")
        self.lat = lat
        self.phi_in = float(phi_in)
        self.incident = lat.incident_wave(phi_in, lo=0.0, hi=math.pi / 2)
        ell = elliptic if elliptic is not None else EllipticData.build(lat, phi_in)
        self.elliptic = ell
        w1, w2, t0 = ell.omega1, ell.omega2, ell.t0
        self.periods = (w1, 3 * w2)
        self.pole_ts = (t0 + w2, 2 * w2 - t0, t0 + 5 * w2 / 2, w2 / 2 - t0)
        self.signs = POLE_SIGNS if not flip_branch else (-1, -1, 1, 1)
        self.zeta = WeierstrassZeta(w1, 3 * w2, dps)

    def _check_t(self, t, tol=1e-8):
        for p in self.pole_ts:
            if lattice_distance(complex(t) - p, *self.periods) < tol:
                raise ZeroDivisionError("t is on a pole orbit of the transformant")

    def __call__(self, t):
        self._check_t(t)
        return complex(sum(s * self.zeta.mp_eval(t - p) for s, p in zip(self.signs, self.pole_ts))
                       / TWO_PI_I)

    def mp_eval(self, t, dps):
        """Value at an ``mpc`` argument with ``dps`` working digits."""
        if dps > self.zeta.dps:
            self.zeta = WeierstrassZeta(*self.periods, dps)
        with mp.workdps(dps):
            tot = 0
            for s, p in zip(self.signs, self.pole_ts):
                tot += s * self.zeta.mp_eval(t - mp.mpc(p))
            return tot / (2j * mp.pi)

    def pole_residues(self, radius=None, M=64):
        """Residues of ``A dt`` at the four poles by small-circle quadrature."""
        if radius is None:
            radius = 0.1 * min(abs(self.periods[0]), abs(self.periods[1]) / 3)
        z = radius * np.exp(2j * np.pi * np.arange(M) / M)
        return [complex(np.mean([self(p + dz) * dz for dz in z])) for p in self.pole_ts]

    def periodicity_defect(self, ts):
        """Largest ``|A(t + w) - A(t)|`` over the sample points and both periods."""
        worst = 0.0
        for t in ts:
            a = self(t)
            for w in self.periods:
                worst = max(worst, abs(self(t + w) - a))
        return worst

    def pole_points(self):
        """``(x, y)`` of the four poles as images of the incident wave."""
        x, y = self.incident.x_in, self.incident.y_in
        return [(x, y), (x, 1 / y), (1 / x, 1 / y), (1 / x, y)]


# -- sectors on the three-sheet lattice -------------------------------------------
def _quadrant(m, n):
    # q = floor(2 phi / pi), phi in [0, 2 pi), boundary angles to the lower one
    if n == 0:
        return 0 if m > 0 else 2
    if m == 0:
        return 1 if n > 0 else 3
    if n > 0:
        return 0 if m > 0 else 1
    return 2 if m < 0 else 3


def cover_sector(m, n, turn=0):
    """Sector ``j`` (1..12) of node ``(m, n)`` at angle ``phi + 2 pi turn``."""
    if (m, n) == (0, 0):
        raise ValueError("the origin lies on every contour")
    if turn not in (0, 1, 2):
        raise ValueError("turn must be 0, 1 or 2")
    q = _quadrant(m, n) + 4 * turn
    return NPOS if q == 0 else q


def physical_turn(m, n):
    """Turn of the physical copy: ``phi`` in ``[pi/2, 2 pi]``; the arm ``n = 0`` is ``phi = 2 pi``."""
    if m >= 0 and n >= 0 and (m, n) != (0, 0) and m * n != 0:
        raise ValueError(f"{(m, n)} is inside the scatterer")
    return 1 if (n == 0 and m > 0) else 0


def describing_contours(m, n, turn=0):
    j = cover_sector(m, n, turn)
    return (j,) if (m == 0 or n == 0) else (j, j % NPOS + 1)


def in_scatterer(m, n):
    return m >= 0 and n >= 0


class WedgeSolution:
    """Total field of the right-angle problem by residues at the infinity points.

    Parameters
    ----------
    K, phi_in : as for :class:`WedgeTransformant`
    frac : float
        Radius of the sampling circles as a fraction of the distance from the
        infinity point to the nearest singularity in its chart.
    guard : int
        Extra Taylor orders kept beyond the pole order.
    """

    def __init__(self, K, phi_in, frac=0.4, guard=2, elliptic=None, flip_branch=False):
        self.lat = _lattice(K)
        self.T = WedgeTransformant(self.lat, phi_in, elliptic, flip_branch=flip_branch)
        ell = self.T.elliptic
        self.t_base = ell.t_base
        self.kinds = ell.kinds
        self.frac = frac
        self.guard = guard
        self._coef = {}        # position -> (order, dps, wfun, G)
        etas = np.array(self.lat.eta.as_tuple())
        x_in = self.T.incident.x_in
        self.rho = float(min(np.min(np.abs(etas)), np.min(1 / np.abs(etas)),
                             abs(x_in), 1 / abs(x_in)))

    def digits_for(self, order):
        growth = order * (math.log10(1 / self.rho) + math.log10(1 / self.frac))
        return int(25 + math.ceil(growth))

    def _expand(self, i, order):
        """Taylor data of the form at infinity point ``i`` up to ``order``."""
        have = self._coef.get(i)
        if have is not None and have[0] >= order:
            return have
        kind = self.kinds[i]
        dps = self.digits_for(order)
        r = self.frac * self.rho
        # aliasing error is (r / rho)**M relative to the coefficients, which
        # only has to beat the digits that survive the final cancellation
        need = 20 + order * math.log10(1 / self.rho)
        M = int(order + 8 + math.ceil(need / math.log10(1 / self.frac)))
        M = 1 << max(5, (M - 1).bit_length())
        n_series = int(math.ceil((dps + 5) / math.log10(1 / self.frac))) + 8
        with mp.workdps(dps):
            c = surface_constants(self.lat, dps)
            wfun, psi = chart_germ(kind, _TYPE_SIGN[kind], n_series, c)
            h = psi.integ()
            t_i = mp.mpc(self.t_base[i])
            rr = mp.mpf(r)
            vals = []
            roots = [mp.expjpi(mp.mpf(2 * l) / M) for l in range(M)]
            for u in roots:
                s = rr * u
                vals.append(self.T.mp_eval(t_i + _horner(h, s), dps) * _horner(psi, s))
            coefs = []
            for j in range(order + self.guard + 1):
                acc = mp.mpc(0)
                for l in range(M):
                    acc += vals[l] * roots[(-j * l) % M]
                coefs.append(acc / M / rr**j)
            G = PowerSeries(np.array(coefs, dtype=object))
            wfun, _ = chart_germ(kind, _TYPE_SIGN[kind], order + self.guard, c)
        data = (order, dps, wfun, G)
        self._coef[i] = data
        return data

    def prepare(self, order):
        for i in range(NPOS):
            self._expand(i, order)

    def residue(self, i, m, n, exact=False):
        """Residue of ``w_{m,n} A Psi`` at infinity point ``i`` (0..11).

        ``exact`` returns the ``mpc`` value so that sums over points cancel
        before rounding.
        """
        kind = self.kinds[i]
        k = pole_order(kind, m, n)
        if k == 0:
            return 0j
        order, dps, wfun, G = self._expand(i, k)
        with mp.workdps(dps):
            S, e = wfun(m, n)
            N = k + self.guard
            prod = S.truncate(N) * G.truncate(N)
            return +prod[-1 - e] if exact else complex(prod[-1 - e])

    def enclosed_points(self, m, n, turn=0, contour=None):
        j = cover_sector(m, n, turn) if contour is None else contour
        if j not in describing_contours(m, n, turn):
            raise ValueError(f"contour {j} does not describe node {(m, n)} at turn {turn}")
        return [(j + i) % NPOS for i in range(4)]

    def field_on_cover(self, m, n, turn=0, contour=None):
        """``u~`` at node ``(m, n)`` with angle ``phi + 2 pi turn`` on the branched lattice."""
        if (m, n) == (0, 0):
            return 0j
        idx = self.enclosed_points(m, n, turn, contour)
        with mp.workdps(self.digits_for(abs(m) + abs(n) + 2)):
            tot = mp.fsum(self.residue(i, m, n, exact=True) for i in idx)
        return complex(tot) * TWO_PI_I

    def field(self, m, n, contour=None):
        """Physical total field; zero inside the scatterer, computed on its arms."""
        if (m, n) == (0, 0) or (m > 0 and n > 0):
            return 0j
        return self.field_on_cover(m, n, physical_turn(m, n), contour)

    def field_numeric(self, m, n, turn=None, M=None):
        """Same integral by direct small-circle quadrature in double precision.

        Only meaningful for small pole orders; used to cross-check the
        series route.
        """
        turn = physical_turn(m, n) if turn is None else turn
        r = self.frac * self.rho
        c = surface_constants(self.lat)
        total = 0j
        for i in self.enclosed_points(m, n, turn):
            kind = self.kinds[i]
            k = pole_order(kind, m, n)
            if k == 0:
                continue
            npts = M or 64
            s = r * np.exp(2j * np.pi * np.arange(npts) / npts)
            wfun, psi = chart_germ(kind, _TYPE_SIGN[kind], 60, c)
            h = psi.integ()
            S, e = wfun(m, n)
            A = np.array([self.T(self.t_base[i] + h(sv)) for sv in s])
            total += np.mean(s ** (e + 1) * S(s) * A * psi(s))
        return complex(TWO_PI_I * total)


def _horner(series, s):
    acc = 0
    for a in series.c[::-1]:
        acc = acc * s + a
    return acc


def wedge_table(K, phi_in, N, frac=0.4, flip_branch=False, solution=None):
    """Total field on ``|m|, |n| <= N`` as a :class:`FieldTable`.

    Nodes inside the scatterer are zero; the two arms hold the computed
    values, so ``meta['max_boundary_residual']`` is a genuine check.
    """
    sol = solution or WedgeSolution(K, phi_in, frac=frac, flip_branch=flip_branch)
    kmax = 2 * N
    sol.prepare(kmax)
    vals = {}
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            vals[(m, n)] = sol.field(m, n)
    ell = sol.T.elliptic
    table = FieldTable(vals, {"method": "elliptic", "K": sol.lat.K, "phi_in": phi_in, "N": N,
                              "x_in": sol.T.incident.x_in, "y_in": sol.T.incident.y_in,
                              "omega1": ell.omega1, "omega2": ell.omega2, "t0": ell.t0,
                              "frac": frac})
    annotate(table, sol.lat.kappa, lambda m, n: in_scatterer(m, n))
    # the arms carry computed values; interior nodes are set to zero
    arms = [abs(v) for (m, n), v in vals.items() if (m == 0) != (n == 0) and m >= 0 and n >= 0]
    table.meta["max_boundary_residual"] = max(arms, default=0.0)
    return table
