"""Dispersion surface of the discrete Helmholtz operator on the square lattice.

Plane waves ``x**m * y**n`` solve the homogeneous five-point equation

    u(m+1,n) + u(m-1,n) + u(m,n+1) + u(m,n-1) + (K**2 - 4) u(m,n) = 0

exactly when ``x + 1/x + y + 1/y - 4 + K**2 = 0``.  The set of such pairs is a
torus; this module carries the bookkeeping for it: the two roots in ``y`` over
a given ``x``, the four branch points, the 1-form ``dx / (x (y - 1/y))`` and
the line of real (propagating) waves.

Two square roots with short cuts are used as reference branches throughout::

    F2(x) = sqrt((x - eta21)(x - eta22))   cut on the segment eta21--eta22
    F3(x) = sqrt((x - eta11)(x - eta12))   cut on the image of that segment
                                           under x -> 1/x

Both behave like ``x`` at infinity.  ``eta21, eta22`` lie inside the unit
circle and ``eta11, eta12`` outside, so ``F2*F3`` is analytic on an annulus
around ``|x| = 1`` and equals ``x (y - 1/y)`` there for the small root ``y``.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np

TOL_DISP = 1e-10


class Sheet(enum.Enum):
    """Which root ``y`` of the dispersion equation is meant over a given ``x``."""

    INNER = "inner"   # smaller modulus root, Xi(x)
    OUTER = "outer"   # larger modulus root, 1/Xi(x)


class DegenerateRootError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SurfacePoint:
    x: complex
    y: complex
    sheet: Sheet


@dataclass(frozen=True)
class BranchPointSet:
    eta11: complex
    eta12: complex
    eta21: complex
    eta22: complex

    def as_tuple(self):
        return (self.eta11, self.eta12, self.eta21, self.eta22)

    def quartic(self, x):
        x = np.asarray(x, dtype=complex)
        return (x - self.eta11) * (x - self.eta12) * (x - self.eta21) * (x - self.eta22)


@dataclass(frozen=True)
class IncidentWave:
    phi_in: float
    x_in: complex
    y_in: complex


def _quadratic_pair(b):
    """Roots of ``y**2 + b*y + 1 = 0`` as (small, large) by modulus.

    The large root comes from the cancellation-free formula, the small one is
    its reciprocal.
    """
    s = np.sqrt(b * b - 4.0 + 0j)
    s = np.where((np.conj(b) * s).real < 0, -s, s)
    large = (-b - s) / 2.0
    return 1.0 / large, large


def _branch_pair(d):
    small, large = _quadratic_pair(d)
    return large, small


class Lattice:
    """Square lattice with complex wavenumber parameter ``K`` (``Im K > 0``).

    Most methods accept scalars or numpy arrays.
    """

    def __init__(self, K, collision_tol=1e-8):
        K = complex(K)
        if not K.imag > 0:
            raise ValueError(f"Im K must be positive (limiting absorption), got K={K}")
        self.K = K
        self.K2 = K * K
        self.kappa = self.K2 - 4.0

        e11, e21 = _branch_pair(self.K2 - 2.0)
        e12, e22 = _branch_pair(self.K2 - 6.0)
        self.eta = BranchPointSet(complex(e11), complex(e12), complex(e21), complex(e22))
        etas = self.eta.as_tuple()
        for i in range(4):
            for j in range(i + 1, 4):
                if abs(etas[i] - etas[j]) < collision_tol:
                    raise ValueError(f"branch points collide for K={K}")
        if not (abs(e21) < 1 and abs(e22) < 1 and abs(e11) > 1 and abs(e12) > 1):
            raise ValueError(f"branch points not separated by the unit circle for K={K}")

        self._f2_at_0 = complex(self.F2(0.0))
        # sign relating F2*F3 to x (y - 1/y) for the small root on |x| = 1
        ups = 1.0 * (self.xi(1.0) - 1.0 / self.xi(1.0))
        self.s0 = 1 if (ups / (self.F2(1.0) * self.F3(1.0))).real > 0 else -1

    def __repr__(self):
        return f"Lattice(K={self.K!r})"

    # -- dispersion relation -------------------------------------------------
    def dispersion(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        if np.any(x == 0) or np.any(y == 0):
            raise ZeroDivisionError("dispersion function undefined at x = 0 or y = 0")
        return x + 1 / x + y + 1 / y - 4.0 + self.K2

    def roots(self, x):
        """Both roots ``y`` over ``x``: (small modulus, large modulus)."""
        x = np.asarray(x, dtype=complex)
        if np.any(x == 0):
            raise ZeroDivisionError("x = 0 is an infinity point of the surface")
        return _quadratic_pair(self.kappa + x + 1 / x)

    def xi(self, x, tol=1e-12):
        """The root with ``|y| < 1`` on the unit circle; smaller modulus elsewhere."""
        small, large = self.roots(x)
        if np.any(np.abs(small) >= np.abs(large) * (1 - tol)):
            raise DegenerateRootError("roots of equal modulus: x is on a branch cut edge")
        return small[()] if np.ndim(small) == 0 else small

    def y_on(self, x, sheet):
        small, large = self.roots(x)
        out = small if Sheet(sheet) is Sheet.INNER else large
        return out[()] if np.ndim(out) == 0 else out

    def point(self, x, sheet=Sheet.INNER):
        return SurfacePoint(complex(x), complex(self.y_on(x, sheet)), Sheet(sheet))

    # -- branch points and reference square roots --------------------------
    def branch_points(self):
        return self.eta

    def F2(self, x):
        x = np.asarray(x, dtype=complex)
        e1, e2 = self.eta.eta21, self.eta.eta22
        out = (x - e1) * np.sqrt((x - e2) / (x - e1))
        return out[()] if out.ndim == 0 else out

    def F3(self, x):
        """``x F2(1/x) / F2(0)``; squares to ``(x - eta11)(x - eta12)``."""
        x = np.asarray(x, dtype=complex)
        e1, e2 = self.eta.eta21, self.eta.eta22
        out = (1 - e1 * x) * np.sqrt((1 - e2 * x) / (1 - e1 * x)) / self._f2_at_0
        return out[()] if out.ndim == 0 else out

    def upsilon(self, x, sheet=Sheet.INNER):
        """``x (y - 1/y)`` for the root of the given sheet."""
        y = self.y_on(x, sheet)
        return np.asarray(x) * (y - 1 / y)

    def upsilon_analytic(self, x, sign=1):
        """``sign * s0 * F2 * F3``: analytic continuation of the inner-sheet
        ``x (y - 1/y)`` off the unit circle (cuts on the two short arcs)."""
        return sign * self.s0 * self.F2(x) * self.F3(x)

    def y_from_upsilon(self, x, ups):
        """Recover ``y`` from ``x`` and ``x (y - 1/y)``."""
        x = np.asarray(x, dtype=complex)
        s = -(self.kappa + x + 1 / x)
        return (s + ups / x) / 2.0

    # -- plane waves and the 1-form --------------------------------------------
    def plane_wave(self, m, n, x, y, log=False):
        """``x**m y**n``; with ``log=True`` the complex logarithm instead."""
        if log:
            return m * np.log(x + 0j) + n * np.log(y + 0j)
        return np.asarray(x, dtype=complex) ** m * np.asarray(y, dtype=complex) ** n

    def psi_density(self, x, y, tol=1e-14):
        """Density ``1/(x (y - 1/y))`` of the form Psi in the ``x`` chart."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        d = y - 1 / y
        if np.any(np.abs(d) < tol):
            raise ZeroDivisionError("Psi density is singular at a branch point in the x chart")
        return 1 / (x * d)

    def stencil(self, f, m, n):
        """Homogeneous five-point operator applied to ``f(m, n)``."""
        return f(m + 1, n) + f(m - 1, n) + f(m, n + 1) + f(m, n - 1) + self.kappa * f(m, n)

    # -- real waves ------------------------------------------------------------
    def _real_wave_candidates(self, phi, K2):
        kap = 4.0 - K2
        c, s = math.cos(phi), math.sin(phi)
        poly = [c * c - s * s, -2 * kap * c * c, (kap * kap - 4) * c * c + 4 * s * s]
        out = []
        for c1 in np.roots(poly):
            c2 = kap - c1
            for x in np.roots([1.0, -c1, 1.0]):
                a = x - 1 / x
                b = np.sqrt(c2 * c2 - 4 + 0j)
                if abs(b * c - a * s) > abs(-b * c - a * s):
                    b = -b
                out.append((complex(x), complex((c2 + b) / 2)))
        return out

    def real_wave_point(self, phi, steps=8):
        """Point of the real-wave line propagating along angle ``phi``.

        At ``Im K = 0`` the line is the set of unimodular ``(x, y)`` whose
        phase vector points along ``phi``; the branch is followed to the actual
        ``K`` by continuation in ``Im K``.
        """
        phi = float(phi)
        direction = np.array([math.cos(phi), math.sin(phi)])
        Kr = self.K.real
        cands = self._real_wave_candidates(phi, Kr * Kr + 0j)

        def score(p):
            x, y = p
            off = abs(abs(x) - 1) + abs(abs(y) - 1)
            return np.dot([np.angle(x), np.angle(y)], direction) - 10 * off

        cur = max(cands, key=score)
        for j in range(1, steps + 1):
            Kj = complex(Kr, self.K.imag * j / steps)
            cands = self._real_wave_candidates(phi, Kj * Kj)
            cur = min(cands, key=lambda p: abs(p[0] - cur[0]) + abs(p[1] - cur[1]))
        x, y = self._polish_real_wave(phi, *cur)
        a, b = x - 1 / x, y - 1 / y
        if abs((a * np.conj(b)).imag) > 1e-8 * abs(a) * abs(b) + 1e-13:
            raise ArithmeticError("continuation left the real-wave branch")
        return IncidentWave(phi, x, y)

    def _polish_real_wave(self, phi, x, y, iters=4):
        # Newton on (dispersion, cos(phi) (y - 1/y) - sin(phi) (x - 1/x))
        c, s = math.cos(phi), math.sin(phi)
        for _ in range(iters):
            f1 = x + 1 / x + y + 1 / y + self.kappa
            f2 = c * (y - 1 / y) - s * (x - 1 / x)
            j11, j12 = 1 - 1 / x**2, 1 - 1 / y**2
            j21, j22 = -s * (1 + 1 / x**2), c * (1 + 1 / y**2)
            det = j11 * j22 - j12 * j21
            if det == 0:
                break
            x, y = x - (j22 * f1 - j12 * f2) / det, y - (-j21 * f1 + j11 * f2) / det
        return complex(x), complex(y)

    def incident_wave(self, phi_in, lo=-math.pi / 2, hi=math.pi / 2):
        if not lo < phi_in < hi:
            raise ValueError(f"phi_in must lie in ({lo:.6g}, {hi:.6g}), got {phi_in}")
        w = self.real_wave_point(phi_in)
        if not abs(w.x_in) < 1:
            raise ArithmeticError("incident wave has |x_in| >= 1")
        return w

    def sheet_of(self, x, y):
        small, large = self.roots(x)
        return Sheet.INNER if abs(y - small) <= abs(y - large) else Sheet.OUTER

    def saddle_points(self, m, n):
        """The two real-wave points where ``(y - 1/y)/(x - 1/x) = n/m``."""
        if m == 0 and n == 0:
            raise ValueError("no saddle points for the origin")
        phi = math.atan2(n, m)
        pts = []
        for ang in (phi, phi + math.pi):
            w = self.real_wave_point(ang)
            pts.append(SurfacePoint(w.x_in, w.y_in, self.sheet_of(w.x_in, w.y_in)))
        return tuple(pts)
