"""Elliptic integrals and functions on the dispersion torus.

The form ``Psi = dx / (x (y - 1/y))`` is holomorphic and nowhere zero on the
torus, so ``t(p) = int_{B1}^p Psi`` uniformizes it.  This module computes the
two periods of ``t``, values of ``t`` along tracked paths, and the zeta-type
function with principal part ``1/t`` at every lattice point.

``x (y - 1/y)`` squares to the quartic ``Q(x) = (x**2 + (kappa - 2) x + 1)
(x**2 + (kappa + 2) x + 1)`` whose roots are the four branch points, so the
periods are complete elliptic integrals and can be cross-checked with the
arithmetic-geometric mean.

``B1`` is the branch point ``x = eta21, y = 1``.  The real-wave line is the
loop ``phi -> real_wave_point(phi)``; it leaves ``B1`` at ``phi = 0`` and
passes through ``B3`` (``x = eta11``) at ``phi = pi``.
"""

from dataclasses import dataclass, field
import logging
import math

import mpmath as mp
import numpy as np

from .core import Lattice

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class CycleError(ArithmeticError):
    """The two computed periods do not span a lattice."""


class PathError(ArithmeticError):
    """Root tracking along an integration path became ambiguous."""


def _lattice(K):
    return K if isinstance(K, Lattice) else Lattice(K)


# -- periods ---------------------------------------------------------------------
def omega1_circle(K, M=1024, reverse=False):
    """``int Psi`` over the unit circle on the sheet of ``Xi``.

    Counter-clockwise unless ``reverse``.  Returns ``(value, error_estimate)``
    with the estimate from the rule on ``M/2`` points.
    """
    lat = _lattice(K)
    vals = []
    for N in (M, M // 2):
        z = np.exp(2j * np.pi * np.arange(N) / N)
        xi = lat.xi(z)
        vals.append(2j * np.pi * np.mean(1 / (xi - 1 / xi)))
    sign = -1 if reverse else 1
    return sign * complex(vals[0]), float(abs(vals[0] - vals[1]))


def real_wave_velocity(phi, x, y):
    """``dt/dphi`` along the real-wave line at the point ``(x, y)`` of angle ``phi``.

    The line is cut out by the dispersion relation together with
    ``cos(phi) (y - 1/y) = sin(phi) (x - 1/x)``; the tangent follows by
    implicit differentiation.  ``Psi`` is evaluated in whichever of its two
    equivalent forms has the larger denominator, so ``B1`` and ``B3`` are
    regular points.
    """
    c, s = math.cos(phi), math.sin(phi)
    J = np.array([[1 - 1 / x**2, 1 - 1 / y**2],
                  [-s * (1 + 1 / x**2), c * (1 + 1 / y**2)]])
    dx, dy = np.linalg.solve(J, np.array([0, s * (y - 1 / y) + c * (x - 1 / x)]))
    a, b = x * (y - 1 / y), y * (x - 1 / x)
    return dx / a if abs(a) >= abs(b) else -dy / b


def omega2_real_wave(K, M=128):
    """``int Psi`` once around the real-wave loop in the direction of increasing ``phi``.

    Periodic trapezoid rule in ``phi``.  Returns ``(value, error_estimate)``.
    """
    lat = _lattice(K)
    vel = np.empty(M, dtype=complex)
    for k in range(M):
        phi = 2 * math.pi * k / M
        w = lat.real_wave_point(phi)
        vel[k] = real_wave_velocity(phi, w.x_in, w.y_in)
    full = 2 * math.pi * np.mean(vel)
    half = 2 * math.pi * np.mean(vel[::2])
    return complex(full), float(abs(full - half))


def agm(a, b, tol=4e-16, maxiter=100):
    """Arithmetic-geometric mean with the optimal choice of square root at each step."""
    a, b = complex(a), complex(b)
    prev = None
    for _ in range(maxiter):
        if abs(a - b) <= tol * abs(a) or (a, b) == prev:
            return a
        prev = (a, b)
        g = np.sqrt(a * b)
        if abs(a + b - 2 * g) > abs(a + b + 2 * g):
            g = -g
        a, b = (a + b) / 2, g
    raise ArithmeticError("AGM did not converge")


def agm_periods(K):
    """Candidate complete integrals ``2 pi / AGM`` of the quartic, per pairing of its roots.

    For the pair ``(p, q)`` of roots joined by a cycle and the remaining pair
    ``(r, s)`` the two candidates are ``2 pi / AGM(sqrt((p-r)(q-s)), +-sqrt((p-s)(q-r)))``.
    The loop integral of ``Psi`` equals one of them up to a factor ``+-i``
    fixed by the branch of ``x (y - 1/y)``.
    """
    lat = _lattice(K)
    e = lat.eta

    def cands(p, q, r, s):
        a = np.sqrt((p - r) * (q - s))
        b = np.sqrt((p - s) * (q - r))
        return [2 * math.pi / agm(a, b), 2 * math.pi / agm(a, -b)]

    return {"sigma": cands(e.eta21, e.eta22, e.eta11, e.eta12),
            "kappa": cands(e.eta22, e.eta12, e.eta21, e.eta11)}


def agm_match(value, candidates):
    """Distance from ``value`` to the nearest of ``+-i * c`` over the candidates."""
    return min(abs(value - u * c) for c in candidates for u in (1j, -1j))


def periods(K, M1=1024, M2=128, check_tol=1e-3):
    """The periods ``(omega1, omega2)`` of ``t``.

    ``omega1`` is the unit-circle integral, ``omega2`` the real-wave loop
    (homologous to the loop through the infinity points).
    """
    w1, _ = omega1_circle(K, M1)
    w2, _ = omega2_real_wave(K, M2)
    ratio = w2 / w1
    if abs(ratio.imag) < check_tol:
        raise CycleError(f"periods are (nearly) rationally dependent: omega2/omega1 = {ratio}")
    return w1, w2


# -- t along paths ---------------------------------------------------------------
def t_real_wave(K, phi, pieces=8):
    """``t`` at the real-wave point of angle ``phi``, integrating from ``B1`` (``phi = 0``)."""
    lat = _lattice(K)
    if phi == 0:
        return 0j
    edges = np.linspace(0.0, phi, pieces + 1)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        for xg, wg in zip(_GL_X, _GL_W):
            p = a + (xg + 1) * (b - a) / 2
            w = lat.real_wave_point(p)
            total += wg * real_wave_velocity(p, w.x_in, w.y_in) * (b - a) / 2
    return complex(total)


def _refine(lat, xs, rel_step):
    etas = np.array(lat.eta.as_tuple())
    out = [xs[0]]
    for a, b in zip(xs[:-1], xs[1:]):
        n = 1
        while True:
            pts = a + (b - a) * np.linspace(0, 1, n + 1)
            mids = (pts[:-1] + pts[1:]) / 2
            dist = np.min(np.abs(mids[:, None] - etas[None, :]), axis=1)
            if np.all(np.abs(b - a) / n <= rel_step * dist):
                break
            n *= 2
            if n > 1 << 16:
                raise PathError("path passes through a branch point")
        out.extend(pts[1:])
    return np.array(out)


def t_path(K, xs, ups0, rel_step=0.25):
    """Increment of ``t`` along the polyline ``xs`` in the ``x`` chart.

    ``ups0`` is ``x (y - 1/y)`` at ``xs[0]``; it is continued by taking at
    each quadrature node whichever of ``+-s0 F2 F3`` is nearest to the
    previous value.  Each piece is shorter than ``rel_step`` times its
    distance to the nearest branch point.  Returns ``(dt, ups_end)``.
    """
    lat = _lattice(K)
    xs = _refine(lat, np.asarray(xs, dtype=complex), rel_step)
    if np.any(xs == 0):
        raise PathError("x = 0 is not in the x chart; integrate in 1/x there")
    ups = complex(ups0)
    total = 0j
    for a, b in zip(xs[:-1], xs[1:]):
        nodes = a + (_GL_X + 1) * (b - a) / 2
        for x, wg in zip(nodes, _GL_W):
            u = complex(lat.s0 * lat.F2(x) * lat.F3(x))
            if abs(u - ups) > abs(u + ups):
                u = -u
            if abs(abs(u - ups) - abs(u + ups)) < 1e-3 * abs(u):
                raise PathError("nearest-root matching is ambiguous; refine the path")
            ups = u
            total += wg / u * (b - a) / 2
    u = complex(lat.s0 * lat.F2(xs[-1]) * lat.F3(xs[-1]))
    return total, (u if abs(u - ups) <= abs(u + ups) else -u)


def reduce_mod(t, w1, w2):
    """Real coordinates ``(a1, a2)`` of ``t = a1 w1 + a2 w2``."""
    A = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
    return np.linalg.solve(A, [t.real, t.imag])


def lattice_distance(t, w1, w2):
    """Distance from ``t`` to the nearest point of the lattice ``Z w1 + Z w2``."""
    a1, a2 = reduce_mod(t, w1, w2)
    best = math.inf
    for d1 in (0, 1):
        for d2 in (0, 1):
            k, l = math.floor(a1) + d1, math.floor(a2) + d2
            best = min(best, abs(t - k * w1 - l * w2))
    return best


# -- zeta-type function -------------------------------------------------------------
def zeta_E(t, w1, w2, N_trunc=200):
    """Direct lattice sum over ``|k|, |l| <= N_trunc`` of the zeta-type series.

    ``E(t) = 1/t + sum' [1/(t - w) + 1/w + t/w**2]``, ``w = k w1 + l w2``.
    The square truncation is symmetric under ``w -> -w``, so the ``t**2/w**3``
    part of the tail cancels and the error is ``O(|t|**3 / N_trunc**2)``.
    Returns ``(value, tail_bound)``.
    """
    t = complex(t)
    dist = lattice_distance(t, w1, w2)
    if dist < 1e-8:
        raise ZeroDivisionError("t is within 1e-8 of a lattice point")
    k = np.arange(-N_trunc, N_trunc + 1)
    W = k[:, None] * w1 + k[None, :] * w2
    W[N_trunc, N_trunc] = 1.0   # placeholder for the excluded term
    terms = 1 / (t - W) + 1 / W + t / W**2
    terms[N_trunc, N_trunc] = 0.0
    # sum small terms first
    order = np.argsort(-np.abs(W), axis=None)
    val = 1 / t + np.sum(terms.ravel()[order])
    area = abs((np.conj(w1) * w2).imag)
    R = N_trunc * area / max(abs(w1), abs(w2))
    tail = abs(t) ** 3 * math.pi / (area * R * R) if R > 2 * abs(t) else math.inf
    return complex(val), float(tail)


class WeierstrassZeta:
    """Weierstrass zeta function of the lattice ``Z w1 + Z w2`` via theta functions.

    The basis is first reduced so that ``|q|`` is small, ``t`` is reduced into
    the fundamental cell and the quasi-periods are added back.  Evaluation
    uses ``mpmath`` at ``dps`` digits; :meth:`__call__` returns a Python
    complex, :meth:`mp_eval` an ``mpc``.
    """

    def __init__(self, w1, w2, dps=20):
        self.w1_in, self.w2_in = complex(w1), complex(w2)
        self.dps = dps
        a, b = self.w1_in, self.w2_in
        if (b / a).imag < 0:
            b = -b
        # Gauss reduction of the basis
        for _ in range(100):
            if abs(b) < abs(a):
                a, b = b, -a
            mu = round((b / a).real)
            if mu == 0:
                break
            b = b - mu * a
        if (b / a).imag < 0:
            b = -b
        self.a, self.b = a, b
        self._setup(dps)

    def _setup(self, dps):
        with mp.workdps(dps + 10):
            a, b = mp.mpc(self.a), mp.mpc(self.b)
            tau = b / a
            q = mp.exp(1j * mp.pi * tau)
            d1 = mp.jtheta(1, 0, q, 1)
            d3 = mp.jtheta(1, 0, q, 3)
            om = a / 2
            eta1 = -mp.pi**2 * d3 / (12 * om * d1)
            # Legendre relation: eta1 om' - eta2 om = i pi / 2
            eta2 = (eta1 * (b / 2) - 1j * mp.pi / 2) / om
            self._c = dict(a=a, b=b, q=q, eta1=eta1, eta2=eta2, om=om)

    def quasi_periods(self, w):
        """``zeta(t + w) - zeta(t)`` for a lattice vector ``w`` (as a complex)."""
        k, l = (round(v) for v in reduce_mod(complex(w), self.a, self.b))
        c = self._c
        return complex(2 * k * c["eta1"] + 2 * l * c["eta2"])

    def mp_eval(self, t, reduce=True):
        """``zeta(t)`` as an ``mpc``.

        With ``reduce=False`` the theta quotient is evaluated at ``t`` itself,
        so quasi-periodicity becomes a property of the theta series rather
        than of the bookkeeping (slow for ``t`` far from the cell).
        """
        c = self._c
        with mp.workdps(self.dps + 10):
            t = mp.mpc(t)
            k, l = 0, 0
            if reduce:
                a1, a2 = reduce_mod(complex(t), self.a, self.b)
                k, l = round(a1), round(a2)
            tr = t - k * c["a"] - l * c["b"]
            if abs(tr) < mp.mpf(10) ** (-self.dps + 2) * abs(c["a"]):
                raise ZeroDivisionError("t is on the period lattice")
            v = mp.pi * tr / c["a"]
            z = (c["eta1"] * tr / c["om"] + mp.pi / c["a"] * mp.jtheta(1, v, c["q"], 1)
                 / mp.jtheta(1, v, c["q"]))
            z += 2 * k * c["eta1"] + 2 * l * c["eta2"]
        return +z

    def __call__(self, t):
        return complex(self.mp_eval(t))

    def legendre_defect(self):
        """Mismatch between the quasi-period ``eta2`` from the Legendre relation
        and ``zeta(b/2)`` evaluated directly from the theta quotient."""
        c = self._c
        with mp.workdps(self.dps + 10):
            v = mp.pi * c["b"] / (2 * c["a"])
            direct = (c["eta1"] * (c["b"] / 2) / c["om"]
                      + mp.pi / c["a"] * mp.jtheta(1, v, c["q"], 1) / mp.jtheta(1, v, c["q"]))
            return float(abs(direct - c["eta2"]))


# -- the data the wedge transformant needs ---------------------------------------------
@dataclass
class EllipticData:
    """Periods and reference values of ``t`` for a given ``K``.

    ``t_base[i]`` is ``t`` at the ``i``-th infinity point of the three-fold
    cover (``i = 0..11``), whose kinds cycle through ``J1, J4, J3, J2``;
    ``path_check`` records, per kind, the value reached by explicit path
    integration and its distance (modulo the period lattice) from
    ``t_base``.
    """

    K: complex
    omega1: complex
    omega2: complex
    t0: complex
    phi_in: float
    t_base: list = field(default_factory=list)
    kinds: list = field(default_factory=list)
    path_check: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    @classmethod
    def build(cls, K, phi_in, M1=1024, M2=128, check=True, tol=1e-9):
        lat = _lattice(K)
        w1, e1 = omega1_circle(lat, M1)
        w2, e2 = omega2_real_wave(lat, M2)
        if abs((w2 / w1).imag) < 1e-3:
            raise CycleError("periods are (nearly) rationally dependent")
        t0 = t_real_wave(lat, phi_in)
        kinds = [("J1", "J4", "J3", "J2")[i % 4] for i in range(12)]
        t_base = [w1 / 2 + w2 / 8 + i * w2 / 4 for i in range(12)]
        data = cls(lat.K, w1, w2, t0, float(phi_in), t_base, kinds,
                   errors={"omega1": e1, "omega2": e2})
        if check:
            data.path_check = infinity_point_paths(lat)
            for kind, t in data.path_check.items():
                want = t_base[kinds.index(kind)]
                d = lattice_distance(t - want, w1, w2)
                data.path_check[kind] = (t, d)
                if d > tol:
                    raise PathError(f"t at {kind} is off the expected lattice coset by {d:.3g}")
        return data


def infinity_point_paths(K, far=1e3):
    """``t`` at the four infinity points of the torus by explicit paths.

    Each path runs along the real-wave line from ``B1`` to the point of angle
    ``phi`` and then straight to ``x = 0`` or radially out to ``x = inf`` (the
    last stretch in the chart ``1/x``).  Angles are tried until every kind has
    been reached.  Returns ``{kind: t}``.
    """
    lat = _lattice(K)
    found = {}
    for phi in np.pi / 4 * np.arange(1, 8, 2):
        w = lat.real_wave_point(phi)
        t1 = t_real_wave(lat, phi)
        ups1 = w.x_in * (w.y_in - 1 / w.y_in)
        # to x = 0: stop short, then the holomorphic chart x near 0
        r0 = 0.05 * abs(lat.eta.eta22)
        xs = np.array([w.x_in, r0 * w.x_in / abs(w.x_in)])
        dt, ups = t_path(lat, xs, ups1)
        kind = "J1" if ups.real > 0 else "J2"
        found.setdefault(kind, t1 + dt + _tail_to_zero(lat, xs[-1], ups))
        # to x = inf
        X = far * w.x_in / abs(w.x_in)
        xs = w.x_in * np.geomspace(1.0, far / abs(w.x_in), 80)
        dt, ups = t_path(lat, xs, ups1)
        U = ups / X**2
        kind = "J4" if U.real > 0 else "J3"
        found.setdefault(kind, t1 + dt + _tail_to_inf(lat, X, ups))
        if len(found) == 4:
            break
    return found


def _tail_to_zero(lat, x1, ups1):
    # int_{x1}^{0} dx / ups, ups continued along the ray
    nodes = x1 * (_GL_X + 1) / 2
    u = lat.s0 * lat.F2(nodes) * lat.F3(nodes)
    u = np.where(np.abs(u - ups1) > np.abs(u + ups1), -u, u)
    return complex(-np.sum(_GL_W / u) * x1 / 2)


def _tail_to_inf(lat, X, ups1):
    # int_{X}^{inf} dx / ups = int_{1/X}^{0} -dtau / (tau**2 ups(1/tau))
    tau1 = 1 / X
    nodes = tau1 * (_GL_X + 1) / 2
    x = 1 / nodes
    U = lat.s0 * lat.F2(x) * lat.F3(x) * nodes**2
    U1 = ups1 * tau1**2
    U = np.where(np.abs(U - U1) > np.abs(U + U1), -U, U)
    # from tau1 to 0 of -dtau/U
    return complex(np.sum(_GL_W / U) * tau1 / 2)
