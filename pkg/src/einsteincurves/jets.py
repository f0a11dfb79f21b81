"""Truncated Taylor-jet arithmetic.

A jet of order n at a point stores the Taylor coefficients a_k = f^(k)/k!
for k = 0..n.  Coefficients may be scalars or numpy arrays (a curve jet has
coefficient shape (5,)), and products broadcast the trailing dimensions.
This is the workhorse behind exact differentiation of curve evaluators:
normalisation, strain densities, reparametrisation and frame formulas are
all evaluated in jet arithmetic so no finite differencing is needed when
the underlying evaluator is exact.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Jet",
    "variable",
    "constant",
    "from_derivatives",
    "jet_dot",
    "compose",
    "invert_series",
]


class Jet:
    """Taylor polynomial of fixed truncation order.

    coeffs[k] is f^(k)(t0)/k!.  Scalar jets have coeffs shape (n+1,);
    vector jets have shape (n+1, d).
    """

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int = 1):
        """k-th derivative value at the base point."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return self.c[k] * math.factorial(k)

    def derivatives(self):
        """Array of f^(k) for k = 0..order."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)])
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.c[: order + 1])

    def deriv_jet(self, k: int = 1) -> "Jet":
        """Jet of the k-th derivative (order drops by k)."""
        c = self.c
        for _ in range(k):
            n = c.shape[0] - 1
            mult = np.arange(1, n + 1, dtype=float)
            c = c[1:] * mult.reshape((-1,) + (1,) * (c.ndim - 1))
        return Jet(c)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other, order):
        if isinstance(other, Jet):
            return other
        c = np.zeros((order + 1,) + np.shape(other))
        c[0] = other
        return Jet(c)

    def __add__(self, other):
        other = self._coerce(other, self.order)
        n = min(self.order, other.order)
        return Jet(self.c[: n + 1] + other.c[: n + 1])

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other, self.order))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        n = min(self.order, other.order)
        a, b = self.c, other.c
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        out = np.zeros((n + 1,) + shape)
        for k in range(n + 1):
            for i in range(k + 1):
                out[k] = out[k] + a[i] * b[k - i]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p: int):
        if not isinstance(p, int) or p < 0:
            raise ValueError("only nonnegative integer powers")
        out = constant(1.0, self.order)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base
            p >>= 1
        return out.truncate(self.order)

    # -- analytic functions (scalar jets only) ------------------------------

    def reciprocal(self) -> "Jet":
        a = self.c
        n = self.order
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, n + 1):
            acc = sum(a[i] * out[k - i] for i in range(1, k + 1))
            out[k] = -out[0] * acc
        return Jet(out)

    def sqrt(self) -> "Jet":
        a = self.c
        n = self.order
        out = np.zeros_like(a)
        out[0] = np.sqrt(a[0])
        for k in range(1, n + 1):
            acc = sum(out[i] * out[k - i] for i in range(1, k))
            out[k] = (a[k] - acc) / (2.0 * out[0])
        return Jet(out)

    def exp(self) -> "Jet":
        a, n = self.c, self.order
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for k in range(1, n + 1):
            out[k] = sum(i * a[i] * out[k - i] for i in range(1, k + 1)) / k
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        a, n = self.c, self.order
        s = np.zeros_like(a)
        c = np.zeros_like(a)
        s[0], c[0] = np.sin(a[0]), np.cos(a[0])
        for k in range(1, n + 1):
            s[k] = sum(i * a[i] * c[k - i] for i in range(1, k + 1)) / k
            c[k] = -sum(i * a[i] * s[k - i] for i in range(1, k + 1)) / k
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self.sincos()[0]

    def cos(self) -> "Jet":
        return self.sincos()[1]

    def sinhcosh(self) -> tuple["Jet", "Jet"]:
        e = self.exp()
        em = (-self).exp()
        return Jet((e.c - em.c) / 2.0), Jet((e.c + em.c) / 2.0)

    # -- vector helpers ------------------------------------------------------

    def component(self, i: int) -> "Jet":
        return Jet(self.c[:, i])

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value!r})"


def variable(t0: float, order: int) -> Jet:
    """The identity jet t ↦ t at t0."""
    c = np.zeros(order + 1)
    c[0] = t0
    if order >= 1:
        c[1] = 1.0
    return Jet(c)


def constant(value, order: int) -> Jet:
    c = np.zeros((order + 1,) + np.shape(value))
    c[0] = value
    return Jet(c)


def from_derivatives(derivs) -> Jet:
    """Build a jet from an array of derivative values f^(k), k = 0..n."""
    derivs = np.asarray(derivs, dtype=float)
    fact = np.array([math.factorial(k) for k in range(derivs.shape[0])])
    return Jet(derivs / fact.reshape((-1,) + (1,) * (derivs.ndim - 1)))


def jet_dot(u: Jet, v: Jet, gram: np.ndarray) -> Jet:
    """Scalar jet of the bilinear form <u, v> = u^T G v of two vector jets."""
    n = min(u.order, v.order)
    a, b = u.c, v.c
    out = np.zeros(n + 1)
    for k in range(n + 1):
        out[k] = sum(a[i] @ gram @ b[k - i] for i in range(k + 1))
    return Jet(out)


def compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of f∘g where `outer` is the jet of f at g(t0) and `inner` the jet
    of g at t0.  Requires inner.value == base point of outer."""
    n = min(outer.order, inner.order)
    dg = Jet(inner.c[: n + 1].copy())
    dg.c[0] = 0.0  # powers of (g - g(t0))
    shape = outer.c.shape[1:]
    out = constant(np.zeros(shape) if shape else 0.0, n)
    # Horner scheme on the truncated polynomial
    for k in range(n, -1, -1):
        out = out * dg
        out = out + outer.c[k]
    return out


def invert_series(u: Jet, t0: float = 0.0) -> Jet:
    """Invert a scalar jet u(t) taken at t0 with u'(t0) != 0.

    Returns the jet of the inverse function t(u) at u0 = u(t0); its value
    coefficient is t0.
    """
    n = u.order
    if abs(u.c[1]) < 1e-300:
        raise ZeroDivisionError("series has vanishing linear term")
    t = np.zeros(n + 1)
    t[1] = 1.0 / u.c[1]
    du = Jet(u.c.copy())
    du.c[0] = 0.0
    for k in range(2, n + 1):
        # residual of u(t0 + t(s)) - (u0 + s) at order k determines t[k]
        comp = compose(du, Jet(np.concatenate([[0.0], t[1:]])))
        t[k] = -comp.c[k] / u.c[1]
    t[0] = t0
    return Jet(t)
