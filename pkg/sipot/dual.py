"""Forward-mode value/derivative pairs.

``Dual`` carries a primal and a tangent that may be Python scalars or numpy
arrays, real or complex, so the polynomial recurrences in ``sipot.specfun`` run
unchanged on a whole grid and return exact first derivatives alongside values.
"""

from __future__ import annotations

from typing import Union

import numpy as np

Scalar = Union[int, float, complex, np.ndarray]


class Dual:
    __slots__ = ("val", "der")
    # numpy must hand mixed expressions back to the reflected operators here
    __array_ufunc__ = None

    def __init__(self, val: Scalar, der: Scalar = 0.0):
        self.val = val
        self.der = der

    @classmethod
    def variable(cls, x: Scalar) -> "Dual":
        return cls(x, np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0)

    @staticmethod
    def _coerce(other: Union["Dual", Scalar]) -> "Dual":
        return other if isinstance(other, Dual) else Dual(other, 0.0)

    def __add__(self, other):
        o = Dual._coerce(other)
        return Dual(self.val + o.val, self.der + o.der)

    __radd__ = __add__

    def __sub__(self, other):
        o = Dual._coerce(other)
        return Dual(self.val - o.val, self.der - o.der)

    def __rsub__(self, other):
        return Dual._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = Dual._coerce(other)
        return Dual(self.val * o.val, self.der * o.val + self.val * o.der)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Dual._coerce(other)
        inv = 1.0 / o.val
        return Dual(self.val * inv, (self.der * o.val - self.val * o.der) * inv * inv)

    def __rtruediv__(self, other):
        return Dual._coerce(other).__truediv__(self)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pow__(self, power: float):
        if isinstance(power, Dual):
            raise TypeError("only constant exponents are supported")
        if power == 0:
            return Dual(1.0 + 0.0 * self.val, 0.0 * self.der)
        if isinstance(power, int) and power > 0:
            out = self
            for _ in range(power - 1):
                out = out * self
            return out
        return Dual(self.val**power, power * self.val ** (power - 1) * self.der)

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.der!r})"


def _chain(x, f, df):
    if isinstance(x, Dual):
        return Dual(f(x.val), df(x.val) * x.der)
    return f(x)


def sinh(x):
    return _chain(x, np.sinh, np.cosh)


def cosh(x):
    return _chain(x, np.cosh, np.sinh)


def tanh(x):
    return _chain(x, np.tanh, lambda v: 1.0 / np.cosh(v) ** 2)


def sin(x):
    return _chain(x, np.sin, np.cos)


def cos(x):
    return _chain(x, np.cos, lambda v: -np.sin(v))


def tan(x):
    return _chain(x, np.tan, lambda v: 1.0 / np.cos(v) ** 2)


def exp(x):
    return _chain(x, np.exp, np.exp)


def sqrt(x):
    return _chain(x, np.sqrt, lambda v: 0.5 / np.sqrt(v))


def value(x):
    return x.val if isinstance(x, Dual) else x


def derivative(x):
    return x.der if isinstance(x, Dual) else 0.0 * x
