"""Green's function of the discrete Helmholtz operator on the full plane.

Solves ``stencil(u) + (K**2 - 4) u = delta(m) delta(n)`` with the decaying
solution selected by ``Im K > 0``.  Three routes are provided:

* ``green_double``: periodic trapezoid rule on the Fourier double integral;
* ``green_single``: one of four unit-circle contour integrals, picked by the
  quadrant of ``(m, n)``;
* ``green_recursive``: two quadratures, then recurrences for everything else.
"""

import logging
import numpy as np

from .core import Lattice
from .table import FieldTable

log = logging.getLogger(__name__)

DEFAULT_GRID = 256


class ConvergenceWarning(UserWarning):
    pass


def _lattice(K):
    return K if isinstance(K, Lattice) else Lattice(K)


def _double_grid(lat, M):
    xi = 2 * np.pi * np.arange(M) / M
    D = 2 * np.cos(xi)[:, None] + 2 * np.cos(xi)[None, :] - 4 + lat.K2
    # u[m, n] = mean over the grid of exp(i(m xi1 + n xi2)) / D  (indices mod M)
    return np.fft.ifft2(1.0 / D)


def green_double_table(K, N_max, M_grid=DEFAULT_GRID):
    """All ``u(m, n)`` with ``|m| + |n| <= N_max`` from one inverse FFT."""
    lat = _lattice(K)
    if M_grid < 16 or M_grid % 2:
        raise ValueError("M_grid must be even and >= 16")
    if 2 * N_max >= M_grid:
        raise ValueError("window too large for the grid")
    U = _double_grid(lat, M_grid)
    Uh = _double_grid(lat, M_grid // 2)
    vals, err = {}, 0.0
    for m in range(-N_max, N_max + 1):
        for n in range(-(N_max - abs(m)), N_max - abs(m) + 1):
            vals[(m, n)] = complex(U[m % M_grid, n % M_grid])
            if 2 * max(abs(m), abs(n)) < M_grid // 2:
                err = max(err, abs(U[m % M_grid, n % M_grid] - Uh[m % (M_grid // 2), n % (M_grid // 2)]))
    meta = {"method": "double", "K": lat.K, "M_grid": M_grid, "N_max": N_max,
            "error_estimate": err}
    return FieldTable(vals, meta)


def green_double(K, m, n, M_grid=DEFAULT_GRID):
    """``u(m, n)`` by the ``M_grid x M_grid`` trapezoid rule.

    Returns ``(value, error_estimate)``; the estimate compares against the
    rule on the half grid.
    """
    lat = _lattice(K)
    if M_grid < 16 or M_grid % 2:
        raise ValueError("M_grid must be even and >= 16")
    vals = []
    for M in (M_grid, M_grid // 2):
        xi = 2 * np.pi * np.arange(M) / M
        D = 2 * np.cos(xi)[:, None] + 2 * np.cos(xi)[None, :] - 4 + lat.K2
        ph = np.exp(1j * m * xi)[:, None] * np.exp(1j * n * xi)[None, :]
        vals.append(np.mean(ph / D))
    return complex(vals[0]), float(abs(vals[0] - vals[1]))


def green_single(K, m, n, M_grid=DEFAULT_GRID, near_cut=1e-6):
    """``u(m, n)`` from a single unit-circle contour integral.

    The representation is chosen by the dominant index: the ``y`` (resp.
    ``x``) residue route when ``|n| >= |m|`` (resp. ``|m| > |n|``), using the
    decaying root for the sign of that index.  Returns the value only.
    """
    lat = _lattice(K)
    if abs(n) >= abs(m):
        rep = "n>=0" if n >= 0 else "n<=0"
    else:
        rep = "m>=0" if m >= 0 else "m<=0"
    xi = lat.xi(np.exp(2j * np.pi * np.arange(M_grid) / M_grid))
    if np.min(np.abs(xi - 1 / xi)) < near_cut:
        log.warning("integrand of the single-integral representation is near a branch cut")
    return green_single_rep(lat, m, n, rep, M_grid)


def green_single_rep(K, m, n, rep, M_grid=DEFAULT_GRID):
    """Evaluate a named single-integral representation.

    ``rep`` is one of ``'n>=0'``, ``'n<=0'``, ``'m>=0'``, ``'m<=0'``; the
    caller is responsible for the index condition that makes it valid.
    """
    lat = _lattice(K)
    theta = 2 * np.pi * np.arange(M_grid) / M_grid
    z = np.exp(1j * theta)
    xi = lat.xi(z)
    # x dz/(i z) contour written as a mean over theta
    if rep == "n>=0":
        return complex(np.mean(z**m * xi**n / (xi - 1 / xi)))
    if rep == "n<=0":
        y = 1 / xi
        return complex(-np.mean(z**m * y**n / (y - 1 / y)))
    if rep == "m>=0":
        return complex(np.mean(z**n * xi**m / (xi - 1 / xi)))
    if rep == "m<=0":
        x = 1 / xi
        return complex(-np.mean(z**n * x**m / (x - 1 / x)))
    raise ValueError(f"unknown representation {rep!r}")


def recursion_constants(K):
    """Coefficients ``a0..a3`` of ``z(x)**2 = x^4 + a3 x^3 + a2 x^2 + a1 x + a0``."""
    lat = _lattice(K)
    k4 = lat.K2 - 4
    return 1.0 + 0j, 2 * k4, k4 * k4 - 2, 2 * k4


def axis_recursion(K, u00, u20, m_max):
    """``u(m, 0)`` for ``0 <= m <= m_max`` from the two seeds ``u(0,0)``, ``u(2,0)``."""
    lat = _lattice(K)
    a0, a1, a2, a3 = recursion_constants(lat)
    u = np.zeros(max(m_max, 3) + 1, dtype=complex)
    u[0] = u00
    u[2] = u20
    u[1] = (1 - lat.kappa * u00) / 4
    u[3] = -(1.5 * a3 * u[2] + a2 * u[1] + 0.5 * a1 * u[0]) / 2
    for m in range(1, m_max - 2):
        u[m + 3] = -((m + 1.5) * a3 * u[m + 2] + (m + 1) * a2 * u[m + 1]
                     + (m + 0.5) * a1 * u[m] + m * a0 * u[m - 1]) / (m + 2)
    return u[: m_max + 1]


def _converged_seeds(lat, M_grid, tol=1e-15, max_grid=1 << 14):
    M = M_grid
    prev = np.array([green_single(lat, 0, 0, M), green_single(lat, 2, 0, M)])
    while M < max_grid:
        M *= 2
        cur = np.array([green_single(lat, 0, 0, M), green_single(lat, 2, 0, M)])
        if np.max(np.abs(cur - prev)) <= tol * max(1.0, np.max(np.abs(cur))):
            return tuple(cur), M
        prev = cur
    log.warning("seed quadrature not converged at %d points", M)
    return tuple(prev), M


def green_recursive(K, N_max, M_grid=DEFAULT_GRID, tol_rec=1e-7, spot_checks=3, seed=0):
    """Table of ``u(m, n)``, ``|m| + |n| <= N_max``, from two quadratures.

    ``u(0,0)`` and ``u(2,0)`` come from :func:`green_single`; the axis is
    filled by the five-term recurrence and the interior diagonal by diagonal
    with the field equation itself.  Three recursed values are compared with
    quadrature; the first one off by more than ``tol_rec`` is reported in
    ``meta['unstable_at']``.
    """
    lat = _lattice(K)
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    # the recursion amplifies seed errors roughly like |eta12|**m, so the two
    # seeds are refined to the rounding floor rather than taken at M_grid
    (u00, u20), seed_grid = _converged_seeds(lat, M_grid)
    axis = axis_recursion(lat, u00, u20, N_max + 1)

    q = {}  # first quadrant, m, n >= 0

    def g(m, n):
        return q[(abs(m), abs(n))]

    for m in range(N_max + 2):
        q[(m, 0)] = axis[m]
    # diagonal M + 1 from the field equation centred on diagonal M
    for M in range(N_max):
        for k in range(M + 1):
            cm, cn = M - k, k
            delta = 1.0 if (cm, cn) == (0, 0) else 0.0
            if cn == 0:
                # u(cm, -1) = u(cm, 1): both unknowns are the same value
                q[(cm, 1)] = (delta - g(cm + 1, 0) - g(cm - 1, 0) - lat.kappa * g(cm, 0)) / 2
            else:
                q[(cm, cn + 1)] = (delta - g(cm + 1, cn) - g(cm - 1, cn) - g(cm, cn - 1)
                                   - lat.kappa * g(cm, cn))
    vals = {}
    for m in range(-N_max, N_max + 1):
        for n in range(-(N_max - abs(m)), N_max - abs(m) + 1):
            vals[(m, n)] = complex(g(m, n))

    rng = np.random.default_rng(seed)
    interior = [k for k in vals if k[0] >= 0 and k[1] >= 0 and sum(k) >= 3]
    picks = [interior[i] for i in rng.choice(len(interior), size=min(spot_checks, len(interior)), replace=False)]
    unstable = None
    worst = 0.0
    for (m, n) in sorted(picks, key=lambda k: sum(k)):
        dev = abs(vals[(m, n)] - green_single(lat, m, n, seed_grid))
        worst = max(worst, dev)
        if dev > tol_rec and unstable is None:
            unstable = [m, n]
            log.warning("recursion deviates from quadrature at (%d, %d) by %.3g", m, n, dev)
    meta = {"method": "recursive", "K": lat.K, "M_grid": M_grid, "seed_grid": seed_grid,
            "N_max": N_max,
            "spot_checks": [list(p) for p in picks], "spot_check_max_dev": worst,
            "unstable_at": unstable}
    return FieldTable(vals, meta)


def green_single_table(K, N_max, M_grid=DEFAULT_GRID):
    lat = _lattice(K)
    vals = {}
    for m in range(-N_max, N_max + 1):
        for n in range(-(N_max - abs(m)), N_max - abs(m) + 1):
            vals[(m, n)] = green_single(lat, m, n, M_grid)
    return FieldTable(vals, {"method": "single", "K": lat.K, "M_grid": M_grid, "N_max": N_max})


def green_rhs(m, n):
    return 1.0 if (m, n) == (0, 0) else 0.0
