"""Diffraction of a lattice plane wave by the Dirichlet half-line ``n = 0, m >= 0``.

Two independent solutions are provided.

``wiener_hopf_field``
    The scattered field as a unit-circle integral with the factorized
    symbol; cheap and robust, used as the reference.

``residue_field`` / ``sommerfeld_numeric``
    The Sommerfeld integral on the two-sheet cover of the dispersion surface.
    The transformant is algebraic, so the integral over each sector contour
    reduces to residues at the infinity points of the cover.

Points of the cover are labelled by ``x`` and two signs ``(s2, s3)``; on such
a point ``f2 = s2 * F2(x)``, ``f3 = s3 * F3(x)`` and ``x (y - 1/y) = f2 * f3``
(``F2``, ``F3`` are the reference branches of :class:`~helmlattice.core.Lattice`).
The eight infinity points sit at cover angles ``pi/4 + i pi/2`` and the sector
contour for ``(j - 1) pi/2 < phi < (j + 1) pi/2`` encloses positions
``j .. j + 3`` (mod 8).
"""

import logging
import math

import mpmath as mp
import numpy as np

from .core import Lattice
from .series import PowerSeries
from .table import FieldTable

log = logging.getLogger(__name__)

TWO_PI_I = 2j * np.pi
SERIES_CAP = 64
DOUBLE_MAX_ORDER = 6


def extra_digits(lat, order):
    """Working digits for a pole of the given order (see ``infinity_residue``)."""
    growth = -math.log10(abs(lat.eta.eta22)) * order
    return int(20 + math.ceil(growth))

# infinity point types in cover-angle order; the number is the sign of
# x (y - 1/y) / x**2 at x = inf, or of x (y - 1/y) at x = 0
_TYPES = ("J1", "J4", "J3", "J2")
_TYPE_SIGN = {"J1": 1, "J4": 1, "J3": -1, "J2": -1}
_AT_ZERO = {"J1": True, "J2": True, "J3": False, "J4": False}


class BranchError(ValueError):
    pass


def _lattice(K):
    return K if isinstance(K, Lattice) else Lattice(K)


def basis_f(lat, j, x, branch=(1, 1), s1=None):
    """Symmetric basis functions of the two-sheet cover.

    ``f0 = 1``, ``f2 = s2 F2``, ``f3 = s3 F3`` and ``f1 = f2 f3`` (the root of
    the quartic).  ``branch`` is the sign pair ``(s2, s3)``; an explicit
    ``s1`` must agree with ``s2 * s3``.
    """
    s2, s3 = branch
    if s1 is not None and s1 != s2 * s3:
        raise BranchError("sign of f1 must equal the product of the signs of f2 and f3")
    if j == 0:
        return np.ones_like(np.asarray(x, dtype=complex))[()]
    if j == 1:
        return s2 * s3 * lat.F2(x) * lat.F3(x)
    if j == 2:
        return s2 * lat.F2(x)
    if j == 3:
        return s3 * lat.F3(x)
    raise ValueError("j must be 0, 1, 2 or 3")


def sector_of(m, n, sheet=1):
    """Sector index ``j`` (1..8) of node ``(m, n)`` on sheet 1 or 2.

    Boundary angles ``phi = k pi/2`` go to the lower sector ``j = k``.
    """
    if (m, n) == (0, 0):
        raise ValueError("the origin lies on every contour")
    # quadrant index q = floor(2 phi / pi) for phi in [0, 2pi), exactly
    if n == 0:
        q = 0 if m > 0 else 2
    elif m == 0:
        q = 1 if n > 0 else 3
    elif n > 0:
        q = 0 if m > 0 else 1
    else:
        q = 2 if m < 0 else 3
    if sheet == 2:
        q += 4
    elif sheet != 1:
        raise ValueError("sheet must be 1 or 2")
    return 8 if q == 0 else q


def describing_contours(m, n, sheet=1):
    """All ``j`` whose open range ``((j-1) pi/2, (j+1) pi/2)`` contains the node."""
    j = sector_of(m, n, sheet)
    on_axis = m == 0 or n == 0
    return (j,) if on_axis else (j, j % 8 + 1)


def pole_order(kind, m, n):
    """Order of the pole of ``x**m y**n`` at an infinity point (0 if none)."""
    e = {"J1": -(m + n), "J2": n - m, "J3": m + n, "J4": m - n}[kind]
    return max(e, 0)


def _near(roots, ref):
    return min(roots, key=lambda r: abs(complex(r) - ref))


def _quad_roots(b):
    d = mp.sqrt(b * b - 4)
    return [(-b + d) / 2, (-b - d) / 2]


def surface_constants(lat, dps=None):
    """Branch points, ``F2(0)`` and ``kappa`` in double or with ``dps`` digits."""
    if dps is None:
        return dict(e1=lat.eta.eta21, e2=lat.eta.eta22, f20=lat._f2_at_0, kappa=lat.kappa)
    with mp.workdps(dps):
        K2 = mp.mpc(lat.K) ** 2
        e1 = _near(_quad_roots(K2 - 2), lat.eta.eta21)
        e2 = _near(_quad_roots(K2 - 6), lat.eta.eta22)
        f20 = -e1 * mp.sqrt(e2 / e1)
        if abs(complex(f20) - lat._f2_at_0) > abs(complex(f20) + lat._f2_at_0):
            f20 = -f20
        return dict(e1=e1, e2=e2, f20=f20, kappa=K2 - 4)


def _powers(base):
    # integer powers of a unit series, memoized and built one step at a time
    memo = {0: PowerSeries.constant(base[0] * 0 + 1, base.order)}
    inv = []

    def pw(k):
        if k not in memo:
            step = k // abs(k)
            if step < 0 and not inv:
                inv.append(base.reciprocal())
            prev = pw(k - step)
            memo[k] = prev * (base if step > 0 else inv[0])
        return memo[k]

    return pw


def chart_germ(kind, sign, order, c, with_f2=False):
    """Expansions at an infinity point of the surface in its chart ``s``.

    ``s = x`` at ``J1, J2`` and ``s = 1/x`` at ``J3, J4``; ``sign`` is the
    value of ``x (y - 1/y)`` at ``x = 0`` (resp. of ``x (y - 1/y) / x**2``
    at ``x = inf``).  Returns ``(wfun, psi)`` with ``Psi = psi(s) ds`` and
    ``x**m y**n = s**e * S`` for ``(S, e) = wfun(m, n)``.  With ``with_f2``
    the regular factor of ``F2`` in that chart is appended.
    """
    e1, e2, f20 = c["e1"], c["e2"], c["f20"]
    exact = not isinstance(e1, complex)
    N = order
    zero = mp.mpc(0) if exact else 0j
    s = PowerSeries.variable(N, zero)
    one = PowerSeries.constant(zero + 1, N)
    if _AT_ZERO[kind]:
        F2 = ((s - e1) * (s - e2)).sqrt(f20)
        F3 = ((one - e1 * s) * (one - e2 * s)).sqrt(zero + 1) / f20
        ups = sign * F2 * F3
        xs = -(c["kappa"] * s + s * s + 1)       # x (y + 1/y)
        base = (xs + ups) / 2 if kind == "J2" else (xs - ups) / 2   # x y or x / y
        psi = ups.reciprocal()
        pw = _powers(base)
        if kind == "J2":
            wfun = lambda m, n: (pw(n), m - n)
        else:
            wfun = lambda m, n: (pw(-n), m + n)
    else:
        F2 = ((one - e1 * s) * (one - e2 * s)).sqrt(zero + 1)
        F3 = ((s - e1) * (s - e2)).sqrt(f20) / f20
        U = sign * F2 * F3                           # x (y - 1/y) / x**2
        ts = -(c["kappa"] * s + s * s + 1)            # (y + 1/y) / x
        base = (ts + U) / 2 if kind == "J3" else (ts - U) / 2   # y / x or 1 / (x y)
        psi = -U.reciprocal()                         # Psi = -ds / U
        pw = _powers(base)
        if kind == "J3":
            wfun = lambda m, n: (pw(n), -m - n)
        else:
            wfun = lambda m, n: (pw(-n), n - m)
    if with_f2:
        return wfun, psi, F2
    return wfun, psi


class HalflineTransformant:
    """Sommerfeld transformant of the half-line problem.

    ``A(p) = -(g1 + g3 f2(p)) / (4 pi i (x - x_in))`` with ``g1 = f1(p1)``,
    ``g3 = f3(p1)`` and ``p1`` the incident-wave point.  ``p1`` is put on the
    label ``s3 = +1``; its ``s2`` follows from ``x_in (y_in - 1/y_in)``.

    Parameters
    ----------
    K : complex or Lattice
    phi_in : float
        Incidence angle in ``(-pi/2, pi/2)``.
    flip_branch : bool
        Deliberately use the wrong sign of ``g3``.  For negative tests only.
    """

    def __init__(self, K, phi_in, flip_branch=False, check=True):
        lat = _lattice(K)
        if not abs(phi_in) < math.pi / 2:
            raise ValueError(f"phi_in must satisfy |phi_in| < pi/2, got {phi_in}")
        self.lat = lat
        self.incident = lat.incident_wave(phi_in)
        x_in, y_in = self.incident.x_in, self.incident.y_in
        self.x_in = x_in
        self.g1 = complex(x_in * (y_in - 1 / y_in))
        self.g3 = complex(lat.F3(x_in))
        ratio = self.g1 / complex(lat.F2(x_in) * self.g3)
        if abs(abs(ratio) - 1) > 1e-8 or abs(ratio.imag) > 1e-8:
            raise BranchError("incident point does not lie on a labelled sheet")
        self.s2_p1 = 1 if ratio.real > 0 else -1
        self.s3_p1 = 1
        if self.s2_p1 * self.s3_p1 != 1:
            raise BranchError("incident point is not on the sheet joined to J1")
        if flip_branch:
            self.g3 = -self.g3
        self.flipped = flip_branch
        # labels of the eight infinity points, in cover-angle order
        a, b = -self.s2_p1, -self.s3_p1
        s3 = [b, b, -b, -b, -b, -b, b, b]
        self.infinity_points = []
        for i in range(8):
            kind = _TYPES[i % 4]
            self.infinity_points.append((kind, _TYPE_SIGN[kind] * s3[i], s3[i]))
        assert all(p[1] == (a if i < 4 else -a) for i, p in enumerate(self.infinity_points))
        self.pole_points = {
            "p1": (self.s2_p1, self.s3_p1),
            "p2": (-self.s2_p1, -self.s3_p1),
            "p3": (-self.s2_p1, self.s3_p1),
            "p4": (self.s2_p1, -self.s3_p1),
        }
        if check and not flip_branch:
            res = self.pole_residues()
            want = np.array([-1, 0, 0, 1]) / TWO_PI_I
            if np.max(np.abs(np.array(list(res.values())) - want)) > 1e-8:
                raise BranchError("residue prescription violated at construction")

    # -- values on the cover -------------------------------------------------
    def upsilon(self, x, s2, s3):
        return s2 * s3 * self.lat.F2(x) * self.lat.F3(x)

    def y(self, x, s2, s3):
        return self.lat.y_from_upsilon(x, self.upsilon(x, s2, s3))

    def A(self, x, s2, warn_tol=1e-8):
        x = np.asarray(x, dtype=complex)
        if np.any(np.abs(x - self.x_in) < warn_tol):
            log.warning("evaluating the transformant within %g of its pole", warn_tol)
        out = -(self.g1 + self.g3 * s2 * self.lat.F2(x)) / (2 * TWO_PI_I * (x - self.x_in))
        return out[()] if out.ndim == 0 else out

    def form(self, m, n, x, s2, s3):
        """Density of ``w_{m,n} A Psi`` in the ``x`` chart."""
        ups = self.upsilon(x, s2, s3)
        y = self.lat.y_from_upsilon(x, ups)
        return x**m * y**n * self.A(x, s2) / ups

    def pole_residues(self, radius=None, M=64):
        """Residues of ``A Psi`` at ``p1 .. p4`` by small-circle quadrature."""
        if radius is None:
            etas = np.array(self.lat.eta.as_tuple())
            radius = 0.3 * min(np.min(np.abs(etas - self.x_in)), abs(self.x_in))
        z = self.x_in + radius * np.exp(2j * np.pi * np.arange(M) / M)
        dz = z - self.x_in
        out = {}
        for name, (s2, s3) in self.pole_points.items():
            f = self.A(z, s2) / self.upsilon(z, s2, s3)
            out[name] = complex(np.mean(f * dz))
        return out

    # -- residues at the infinity points --------------------------------------
    def _constants(self, dps=None):
        """Scalars entering the local expansions, in double or with ``dps`` digits.

        The extended set is recomputed from ``K`` and ``x_in`` alone so that
        it is consistent to the working precision; each square root is put on
        the branch of its double-precision counterpart.
        """
        c = surface_constants(self.lat, dps)
        if dps is None:
            c.update(g1=self.g1, g3=self.g3, x_in=self.x_in)
            return c
        with mp.workdps(dps):
            x = mp.mpc(self.x_in)
            y = _near(_quad_roots(c["kappa"] + x + 1 / x), self.incident.y_in)
            g1 = x * (y - 1 / y)
            e1, e2 = c["e1"], c["e2"]
            g3 = (1 - e1 * x) * mp.sqrt((1 - e2 * x) / (1 - e1 * x)) / c["f20"]
            if abs(complex(g3) - self.g3) > abs(complex(g3) + self.g3):
                g3 = -g3
            c.update(g1=g1, g3=g3, x_in=x)
            return c

    def _germ(self, kind, s2, s3, order, c):
        """Local data at an infinity point in its chart ``s`` (``x`` or ``1/x``).

        Returns ``(wfun, G)``: the form is ``s**e * S * G ds`` where
        ``(S, e) = wfun(m, n)`` carries the plane wave.
        """
        wfun, psi, F2 = chart_germ(kind, s2 * s3, order, c, with_f2=True)
        x_in = c["x_in"]
        N = order
        s = PowerSeries.variable(N, psi[0] * 0)
        if _AT_ZERO[kind]:
            A = (c["g1"] + c["g3"] * s2 * F2) * PowerSeries.geometric(1 / x_in, N) \
                / (x_in * 2 * TWO_PI_I)
        else:
            # F2 here is x F2(1/x) / x, the regular factor in the chart 1/x
            A = -(c["g1"] * s + c["g3"] * s2 * F2) * PowerSeries.geometric(x_in, N) / (2 * TWO_PI_I)
        return wfun, A * psi

    def infinity_residue(self, index, m, n, precision="auto", guard=2, exact=False):
        """Residue of ``w_{m,n} A Psi`` at infinity point ``index`` (0..7).

        Coefficient extraction in the ``x`` chart loses roughly a factor
        ``1/|eta22|`` per order, so with ``precision='auto'`` poles of order
        above ``DOUBLE_MAX_ORDER`` are expanded with extra digits.  ``'double'``
        forces plain complex arithmetic and an integer asks for at least that
        many digits.  With ``exact`` the extended result is
        returned as an ``mpc`` so that sums over several points can cancel
        before rounding.
        """
        kind, s2, s3 = self.infinity_points[index]
        k = pole_order(kind, m, n)
        if k == 0:
            return 0j
        if k > SERIES_CAP:
            raise OverflowError(f"pole order {k} exceeds the series cap {SERIES_CAP}")
        dps = None
        if isinstance(precision, int) and not isinstance(precision, bool):
            dps = max(precision, extra_digits(self.lat, k))
        elif precision == "auto" and k > DOUBLE_MAX_ORDER:
            dps = extra_digits(self.lat, k)
        elif precision not in ("auto", "double"):
            raise ValueError(f"unknown precision {precision!r}")
        if dps is None:
            wfun, G = self._cached_germ(index, k + guard, None)
            S, e = wfun(m, n)
            return complex((S.truncate(k + guard) * G.truncate(k + guard))[-1 - e])
        wfun, G = self._cached_germ(index, k + guard, dps)
        # the memoized powers must all be built at the expansion's own precision
        with mp.workdps(self._germs[(index, False)][1]):
            S, e = wfun(m, n)
            val = (S.truncate(k + guard) * G.truncate(k + guard))[-1 - e]
            return +val if exact else complex(val)

    def _cached_germ(self, index, order, dps):
        # one expansion per point, grown on demand; more digits or terms than
        # asked for do no harm
        cache = self.__dict__.setdefault("_germs", {})
        key = (index, dps is None)
        have = cache.get(key)
        if have is None or have[0] < order or (dps is not None and have[1] < dps):
            if have is not None:
                order = max(order, have[0])
                if dps is not None:
                    dps = max(dps, have[1])
            kind, s2, s3 = self.infinity_points[index]
            if dps is None:
                wfun, G = self._germ(kind, s2, s3, order, self._constants())
            else:
                with mp.workdps(dps):
                    wfun, G = self._germ(kind, s2, s3, order, self._constants(dps))
            have = (order, dps, wfun, G)
            cache[key] = have
        return have[2], have[3]

    def enclosed_points(self, m, n, sheet=1, contour=None):
        j = sector_of(m, n, sheet) if contour is None else contour
        if j not in describing_contours(m, n, sheet):
            raise ValueError(f"contour {j} does not describe node {(m, n)} on sheet {sheet}")
        return [(j + i) % 8 for i in range(4)]

    def residue_field(self, m, n, sheet=1, precision="auto", contour=None):
        """Total field at ``(m, n)`` on sheet 1 (physical) or 2 of the branched lattice.

        ``contour`` picks one of :func:`describing_contours` instead of the
        default lower sector.
        """
        if (m, n) == (0, 0):
            return 0j
        idx = self.enclosed_points(m, n, sheet, contour)
        kmax = max(pole_order(self.infinity_points[i][0], m, n) for i in idx)
        if precision == "auto" and kmax > DOUBLE_MAX_ORDER:
            # residues of low order may cancel against large high-order ones
            precision = extra_digits(self.lat, kmax)
        with mp.workdps(extra_digits(self.lat, kmax)):
            tot = mp.fsum(self.infinity_residue(i, m, n, precision, exact=True) for i in idx)
            return complex(tot) * TWO_PI_I

    def sommerfeld_numeric(self, m, n, sheet=1, frac=0.7, M=None, contour=None):
        """Same integral as :meth:`residue_field` by small-circle quadrature.

        Circles of radius ``frac`` times the distance to the nearest branch
        point or pole, in the chart ``x`` (at 0) or ``1/x`` (at infinity).
        Rounding grows like ``radius**-order``, so the check is meaningful for
        moderate ``|m| + |n|`` only.
        """
        if (m, n) == (0, 0):
            return 0j
        etas = np.array(self.lat.eta.as_tuple())
        total = 0j
        for i in self.enclosed_points(m, n, sheet, contour):
            kind, s2, s3 = self.infinity_points[i]
            if pole_order(kind, m, n) == 0:
                continue
            at0 = _AT_ZERO[kind]
            sing = np.concatenate([etas, [self.x_in]])
            if not at0:
                sing = 1 / sing
            r = frac * np.min(np.abs(sing))
            if not r > 0 or frac >= 1:
                raise ValueError("small circle collides with a singularity")
            k = pole_order(kind, m, n) + 4
            npts = M or max(64, int(8 * k / max(1e-3, -math.log(frac))) + 32)
            s = r * np.exp(2j * np.pi * np.arange(npts) / npts)
            if at0:
                f = self.form(m, n, s, s2, s3) * s
            else:
                # dx = -ds / s**2 and the circle is traversed positively in s
                f = -self.form(m, n, 1 / s, s2, s3) / s
            total += np.mean(f)
        return complex(TWO_PI_I * total)


def wiener_hopf_field(K, phi_in, m, n, M_grid=2048, scattered=False):
    """Total field (or only the scattered part) from the factorized integral.

    ``u_sc(m, n) = -(1/2 pi i) oint z**m Xi(z)**|n| F3(x_in) / (F3(z) (z - x_in)) dz``
    over the unit circle; ``F3`` is the factor of the symbol analytic inside
    the disc.
    """
    lat = _lattice(K)
    inc = lat.incident_wave(phi_in)
    z = np.exp(2j * np.pi * np.arange(M_grid) / M_grid)
    xi = lat.xi(z)
    if np.min(np.abs(xi - 1 / xi)) < 1e-6:
        log.warning("Wiener-Hopf integrand is near a branch cut")
    kern = lat.F3(inc.x_in) / (lat.F3(z) * (z - inc.x_in))
    usc = -complex(np.mean(z ** (m + 1) * xi ** abs(n) * kern))
    if scattered:
        return usc
    return inc.x_in**m * inc.y_in**n + usc


def near_origin_values(T):
    """Closed forms of the total field next to the edge, from first-order residues.

    With ``c = f3(p1) f2(0)``, ``S1 = eta11 + eta12``, ``S2 = eta21 + eta22``::

        u(-1, 0)  = c / x_in
        u(-2, 0)  = c (2 + S2 x_in) / (2 x_in**2)
        u(-1, 1)  = (2 g1 - 2 c + S1 c x_in) / (4 x_in**2)
        u(-1, -1) = -(2 g1 + 2 c - S1 c x_in) / (4 x_in**2)
    """
    eta = T.lat.eta
    x, g1 = T.x_in, T.g1
    c = T.g3 * T.lat._f2_at_0
    S1, S2 = eta.eta11 + eta.eta12, eta.eta21 + eta.eta22
    return {
        (-1, 0): c / x,
        (-2, 0): c * (2 + S2 * x) / (2 * x * x),
        (-1, 1): (2 * g1 - 2 * c + S1 * c * x) / (4 * x * x),
        (-1, -1): -(2 * g1 + 2 * c - S1 * c * x) / (4 * x * x),
    }


METHODS = ("residue", "wh", "sommerfeld")


def halfline_table(K, phi_in, N, method="residue", M_grid=2048, flip_branch=False):
    """Total field on ``|m|, |n| <= N`` (physical sheet) as a :class:`FieldTable`."""
    lat = _lattice(K)
    T = HalflineTransformant(lat, phi_in, flip_branch=flip_branch, check=not flip_branch)
    vals = {}
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            if method == "residue":
                vals[(m, n)] = T.residue_field(m, n)
            elif method == "wh":
                vals[(m, n)] = wiener_hopf_field(lat, phi_in, m, n, M_grid)
            elif method == "sommerfeld":
                vals[(m, n)] = T.sommerfeld_numeric(m, n)
            else:
                raise ValueError(f"unknown method {method!r}")
    table = FieldTable(vals, {"method": method, "K": lat.K, "phi_in": phi_in, "N": N,
                              "x_in": T.x_in, "y_in": T.incident.y_in})
    if method == "wh":
        table.meta["M_grid"] = M_grid
    annotate(table, lat.kappa, on_halfline)
    return table


def on_halfline(m, n):
    return n == 0 and m >= 0


def annotate(table, kappa, on_scatterer):
    """Store the maximum stencil and boundary residuals in ``table.meta``."""
    res = table.stencil_residuals(kappa, skip=on_scatterer)
    table.meta["max_stencil_residual"] = max((abs(v) for v in res.values()), default=0.0)
    bnd = [abs(v) for (m, n), v in table.values.items() if on_scatterer(m, n)]
    table.meta["max_boundary_residual"] = max(bnd, default=0.0)
    return table
