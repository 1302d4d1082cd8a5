"""Scalar dual numbers: one forward pass yields f(x) and <grad f(x), u>.

A dual number is a pair (value, tangent) obeying eps^2 = 0 arithmetic:
(a, a') * (b, b') = (a*b, a*b' + a'*b). Seeding the tangents of the inputs
with a direction u makes the output tangent the exact directional
derivative <grad f(x), u>, computed in a single evaluation of f.

Supported primitives: +, -, *, /, power, exp, log, sin, cos, sqrt, plus
the vector helpers `affine_map` and `half_sqnorm` for least-squares style
objectives. Higher-order derivatives and reverse mode are out of scope.
"""

from __future__ import annotations

import math

import numpy as np


class Dual:
    """A (value, tangent) pair.

    Treated as immutable: nothing in this package writes to a dual after
    construction, so instances are safe to share across threads.
    """

    __slots__ = ("value", "tangent")

    def __init__(self, value, tangent=0.0):
        self.value = value
        self.tangent = tangent

    def __repr__(self):
        return f"Dual({self.value!r}, {self.tangent!r})"

    # plain numbers lift to duals with tangent exactly 0 (constant rule)
    @staticmethod
    def _coerce(x):
        if isinstance(x, Dual):
            return x
        return Dual(float(x), 0.0)

    def __add__(self, other):
        o = Dual._coerce(other)
        return Dual(self.value + o.value, self.tangent + o.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        o = Dual._coerce(other)
        return Dual(self.value - o.value, self.tangent - o.tangent)

    def __rsub__(self, other):
        o = Dual._coerce(other)
        return Dual(o.value - self.value, o.tangent - self.tangent)

    def __mul__(self, other):
        o = Dual._coerce(other)
        return Dual(self.value * o.value,
                    self.value * o.tangent + self.tangent * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Dual._coerce(other)
        if o.value == 0.0:
            raise ZeroDivisionError("dual division by zero value")
        inv = 1.0 / o.value
        return Dual(self.value * inv,
                    (self.tangent * o.value - self.value * o.tangent) * inv * inv)

    def __rtruediv__(self, other):
        return Dual._coerce(other).__truediv__(self)

    def __neg__(self):
        return Dual(-self.value, -self.tangent)

    def __pow__(self, p):
        if isinstance(p, Dual):
            raise TypeError("only real exponents are supported")
        p = float(p)
        val = self.value ** p
        if p == 0.0:
            return Dual(val, 0.0)
        # d/dx x^p = p x^(p-1); float pow raises on domain violations
        return Dual(val, p * (self.value ** (p - 1.0)) * self.tangent)


def exp(x):
    if isinstance(x, Dual):
        v = math.exp(x.value)
        return Dual(v, v * x.tangent)
    return math.exp(x)


def log(x):
    v = x.value if isinstance(x, Dual) else x
    if v <= 0.0:
        raise ValueError(f"log domain error: argument must be > 0, got {v}")
    if isinstance(x, Dual):
        return Dual(math.log(v), x.tangent / v)
    return math.log(v)


def sin(x):
    if isinstance(x, Dual):
        return Dual(math.sin(x.value), math.cos(x.value) * x.tangent)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(math.cos(x.value), -math.sin(x.value) * x.tangent)
    return math.cos(x)


def sqrt(x):
    v = x.value if isinstance(x, Dual) else x
    if v < 0.0:
        raise ValueError(f"sqrt domain error: argument must be >= 0, got {v}")
    if isinstance(x, Dual):
        s = math.sqrt(v)
        if s == 0.0:
            raise ZeroDivisionError("sqrt tangent undefined at 0")
        return Dual(s, 0.5 / s * x.tangent)
    return math.sqrt(v)


def dual_values(xs):
    """Values of a dual vector as a float array."""
    return np.fromiter((d.value for d in xs), dtype=float, count=len(xs))


def dual_tangents(xs):
    return np.fromiter((d.tangent for d in xs), dtype=float, count=len(xs))


def affine_map(A, xs, shift=None):
    """A @ xs + shift over a dual vector; the tangent rule is A @ tangents."""
    vals = A @ dual_values(xs)
    tans = A @ dual_tangents(xs)
    if shift is not None:
        vals = vals + shift
    return [Dual(v, t) for v, t in zip(vals, tans)]


def half_sqnorm(xs):
    """0.5 * sum(x_i^2) of a dual vector; tangent is sum(x_i * x_i')."""
    vals = dual_values(xs)
    tans = dual_tangents(xs)
    return Dual(0.5 * float(vals @ vals), float(vals @ tans))


class ScalarFunction:
    """Scalar objective on R^dim evaluated over dual vectors.

    Wraps a callable taking a sequence of `Dual` scalars and returning one
    `Dual`. A plain-number return is treated as a constant (zero tangent).
    Evaluation must be deterministic and side-effect free; instances are
    then reentrant and thread-safe.
    """

    def __init__(self, fn, dim):
        self.fn = fn
        self.dim = int(dim)

    def __call__(self, xs):
        return self.fn(xs)

    def value(self, x):
        """f(x) at a plain float vector."""
        out = self.fn([Dual(float(v), 0.0) for v in x])
        return out.value if isinstance(out, Dual) else float(out)

    def gradient(self, x):
        """Full gradient; subclasses with closed forms override this."""
        return gradient_exact(self, x)


def directional_derivative(f, x, u):
    """Evaluate f at x with input tangents u.

    Returns (f(x), <grad f(x), u>). The derivative is exact for functions
    composed of the supported primitives. Raises ValueError on dimension
    mismatch and propagates primitive domain errors.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (f.dim,) or u.shape != (f.dim,):
        raise ValueError(
            f"dimension mismatch: expected vectors of length {f.dim}, "
            f"got x{x.shape} and u{u.shape}")
    out = f([Dual(xv, uv) for xv, uv in zip(x.tolist(), u.tolist())])
    if isinstance(out, Dual):
        return float(out.value), float(out.tangent)
    return float(out), 0.0


def gradient_exact(f, x):
    """Gradient by dim forward passes, one per basis direction (test oracle)."""
    x = np.asarray(x, dtype=float)
    g = np.empty(f.dim)
    u = np.zeros(f.dim)
    for j in range(f.dim):
        u[j] = 1.0
        g[j] = directional_derivative(f, x, u)[1]
        u[j] = 0.0
    return g
