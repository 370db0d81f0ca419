"""Truncated complex power series.

A :class:`PowerSeries` holds the Taylor coefficients ``c[0] .. c[N]`` of a
function about some expansion point in some local variable ``s``::

    f(s) = c[0] + c[1]*s + ... + c[N]*s**N + O(s**(N+1))

Coefficients beyond ``N`` are unknown, not zero, so every binary operation
returns a series truncated at the smaller of the two orders.  This is the
engine behind the high-order residues of the Sommerfeld integrals: a pole of
order ``k`` only needs ``k`` coefficients, and they are produced exactly (up
to rounding) by the recurrences below instead of by numerical differentiation.
"""

import numbers

import numpy as np


def _is_obj(v):
    return hasattr(v, "_mpc_") or hasattr(v, "_mpf_")


def _is_scalar(v):
    return isinstance(v, (numbers.Number, np.number)) or _is_obj(v)


class PowerSeries:
    """Truncated Taylor series with complex coefficients.

    Parameters
    ----------
    coeffs : array_like
        Coefficients ``c[0] .. c[N]``.
    order : int, optional
        Truncation order.  Missing coefficients are zero padded, surplus ones
        dropped.  Defaults to ``len(coeffs) - 1``.

    Coefficients are complex doubles unless ``coeffs`` is an object array
    (e.g. of ``mpmath.mpc``), in which case the element type is kept and all
    arithmetic is carried out in it.
    """

    __array_priority__ = 100

    def __init__(self, coeffs, order=None):
        c = np.atleast_1d(np.asarray(coeffs))
        dtype = object if c.dtype == object else complex
        c = c.astype(dtype)
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros(order + 1, dtype=dtype)
        k = min(len(c), order + 1)
        out[:k] = c[:k]
        self.c = out
        self.c.flags.writeable = False

    @property
    def order(self):
        return len(self.c) - 1

    @property
    def is_exact_type(self):
        return self.c.dtype == object

    @classmethod
    def constant(cls, value, order):
        return cls(np.array([value], dtype=object if _is_obj(value) else complex), order)

    @classmethod
    def variable(cls, order, point=0.0):
        """The series of ``point + s``."""
        return cls(np.array([point, 1], dtype=object if _is_obj(point) else complex), order)

    @classmethod
    def geometric(cls, ratio, order):
        """The series of ``1 / (1 - ratio*s)``."""
        if _is_obj(ratio):
            c = np.empty(order + 1, dtype=object)
            c[0] = ratio * 0 + 1
            for k in range(1, order + 1):
                c[k] = c[k - 1] * ratio
            return cls(c, order)
        return cls(ratio ** np.arange(order + 1), order)

    def __repr__(self):
        return f"PowerSeries({np.array2string(self.c, precision=6)})"

    def __len__(self):
        return len(self.c)

    def __getitem__(self, k):
        return self.c[k]

    def __call__(self, s):
        return np.polyval(self.c[::-1], s)

    def _coerce(self, other):
        if isinstance(other, PowerSeries):
            n = min(self.order, other.order)
            return self.c[: n + 1], other.c[: n + 1]
        if _is_scalar(other):
            c = self.c.astype(object) if _is_obj(other) else self.c
            o = np.zeros_like(c)
            o[0] = other
            return c, o
        return NotImplemented, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return PowerSeries(a + b)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.c)

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return PowerSeries(a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return PowerSeries((self.c.astype(object) if _is_obj(other) else self.c) * other)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        n = len(a)
        return PowerSeries(np.convolve(a, b)[:n])

    __rmul__ = __mul__

    def reciprocal(self):
        """``1/f``; requires ``c[0] != 0``."""
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        n = len(a)
        r = np.zeros(n, dtype=a.dtype)
        r[0] = 1 / a[0]
        for k in range(1, n):
            r[k] = -np.dot(a[1 : k + 1], r[k - 1 :: -1][:k]) * r[0]
        return PowerSeries(r)

    def __truediv__(self, other):
        if _is_scalar(other):
            return PowerSeries((self.c.astype(object) if _is_obj(other) else self.c) / other)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._coerce(other)
        if b[0] == 0:
            raise ZeroDivisionError("division by a series with zero constant term")
        # long division: q_k = (a_k - sum_{j<k} q_j b_{k-j}) / b_0
        n = len(a)
        q = np.zeros(n, dtype=np.result_type(a, b))
        for k in range(n):
            q[k] = (a[k] - np.dot(q[:k], b[k:0:-1])) / b[0]
        return PowerSeries(q)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if not isinstance(p, numbers.Integral):
            raise TypeError("only integer powers are supported")
        if p < 0:
            return self.reciprocal() ** (-p)
        result = PowerSeries(np.ones(1, dtype=self.c.dtype), self.order)
        base = self
        while p:
            if p & 1:
                result = result * base
            base = base * base
            p >>= 1
        return result

    def sqrt(self, root0=None):
        """Square root with constant term ``root0``.

        ``root0`` selects the branch; it must square to ``c[0]`` and defaults
        to the principal root.
        """
        a = self.c
        if a[0] == 0:
            raise ValueError("sqrt of a series with zero constant term")
        if root0 is None:
            root0 = a[0] ** 0.5 if a.dtype == object else np.sqrt(a[0])
        elif abs(root0 * root0 - a[0]) > 1e-8 * abs(a[0]):
            raise ValueError("root0 is not a square root of the constant term")
        n = len(a)
        r = np.zeros(n, dtype=a.dtype)
        r[0] = root0
        for k in range(1, n):
            r[k] = (a[k] - np.dot(r[1:k], r[k - 1 : 0 : -1])) / (2 * r[0])
        return PowerSeries(r)

    def deriv(self):
        k = np.arange(1, len(self.c))
        if len(k) == 0:
            return PowerSeries([0.0])
        return PowerSeries(self.c[1:] * k)

    def integ(self):
        """Antiderivative vanishing at ``s = 0``; order grows by one."""
        k = np.arange(1, len(self.c) + 1)
        return PowerSeries(np.concatenate([np.zeros(1, dtype=self.c.dtype), self.c / k]))

    def truncate(self, order):
        return PowerSeries(self.c, min(order, self.order))
