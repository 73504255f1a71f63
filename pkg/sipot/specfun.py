"""Special functions used by the eigenfunctions and the rational extensions.

Polynomials are evaluated by their three-term recurrences. Arguments may be
real or complex scalars, numpy arrays, or ``sipot.dual.Dual`` values (the
recurrence then carries the exact derivative along). The finite-sum
definitions are kept as ``*_series`` and serve as independent oracles.
"""

from __future__ import annotations

import cmath
import math

from sipot.errors import IndexRangeError, PoleError

MAX_DEGREE = 64

# Lanczos approximation, g = 7, nine terms
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_degree(k: int) -> None:
    if k < 0 or k > MAX_DEGREE or int(k) != k:
        raise IndexRangeError(f"polynomial degree must be an integer in [0, {MAX_DEGREE}], got {k}")


def _one_like(z):
    return 1.0 + 0.0 * z


def _binom(x: complex, j: int) -> complex:
    """Generalized binomial coefficient C(x, j) for complex x."""
    out = 1.0 + 0.0j
    for i in range(j):
        out *= (x - i) / (i + 1)
    return out


def jacobi_p(k: int, a: complex, b: complex, z):
    _check_degree(k)
    p0 = _one_like(z)
    if k == 0:
        return p0
    p1 = (a - b) / 2 + (a + b + 2) * z / 2
    for n in range(2, k + 1):
        c = 2 * n + a + b
        lead = 2 * n * (n + a + b) * (c - 2)
        if abs(lead) < 1e-300:
            # the recurrence degenerates for these parameters
            return jacobi_series(k, a, b, z)
        p0, p1 = p1, ((c - 1) * (c * (c - 2) * z + a * a - b * b) * p1 - 2 * (n + a - 1) * (n + b - 1) * c * p0) / lead
    return p1


def jacobi_series(k: int, a: complex, b: complex, z):
    _check_degree(k)
    lo = (z - 1) / 2
    hi = (z + 1) / 2
    total = 0.0 * z
    for s in range(k + 1):
        total = total + _binom(k + a, k - s) * _binom(k + b, s) * (lo**s) * (hi ** (k - s))
    return total


def laguerre_l(k: int, a: complex, z):
    _check_degree(k)
    p0 = _one_like(z)
    if k == 0:
        return p0
    p1 = 1 + a - z
    for n in range(1, k):
        p0, p1 = p1, ((2 * n + 1 + a - z) * p1 - (n + a) * p0) / (n + 1)
    return p1


def laguerre_series(k: int, a: complex, z):
    _check_degree(k)
    total = 0.0 * z
    for j in range(k + 1):
        total = total + (-1) ** j * _binom(k + a, k - j) * (z**j) / math.factorial(j)
    return total


def hermite_h(k: int, z):
    _check_degree(k)
    p0 = _one_like(z)
    if k == 0:
        return p0
    p1 = 2 * z
    for n in range(1, k):
        p0, p1 = p1, 2 * z * p1 - 2 * n * p0
    return p1


def hermite_series(k: int, z):
    _check_degree(k)
    total = 0.0 * z
    for j in range(k // 2 + 1):
        coeff = (-1) ** j * math.factorial(k) / (math.factorial(j) * math.factorial(k - 2 * j))
        total = total + coeff * ((2 * z) ** (k - 2 * j))
    return total


def _terminating_order(upper: float) -> int | None:
    if float(upper).is_integer() and upper <= 0:
        return int(-upper)
    return None


def hyp1f1_terminating(ell: int, upper: float, lower: float, z):
    """1F1(upper; lower; z) summed exactly for ``upper`` equal to ``-ell`` or ``1 - ell``.

    ``ell`` is the extension degree; anything else in ``upper`` is a ValueError.
    """
    _check_degree(ell)
    if ell < 1 or upper not in (-ell, 1 - ell):
        raise ValueError(f"1F1 upper parameter {upper} is neither -ell nor 1 - ell for ell = {ell}")
    order = _terminating_order(upper)
    _check_degree(order)
    term = _one_like(z)
    total = term
    for j in range(order):
        if lower + j == 0:
            raise PoleError(f"1F1 lower parameter {lower} hits a pole at term {j}")
        term = term * ((upper + j) / ((lower + j) * (j + 1))) * z
        total = total + term
    return total


def hyp2f1_terminating(upper_a: float, upper_b: float, lower: float, z):
    """2F1(upper_a, upper_b; lower; z) where one upper parameter is a non-positive integer."""
    orders = [o for o in (_terminating_order(upper_a), _terminating_order(upper_b)) if o is not None]
    if not orders:
        raise ValueError(f"2F1 does not terminate for upper parameters {upper_a}, {upper_b}")
    order = min(orders)
    _check_degree(order)
    term = _one_like(z)
    total = term
    for j in range(order):
        if lower + j == 0:
            raise PoleError(f"2F1 lower parameter {lower} hits a pole at term {j}")
        term = term * ((upper_a + j) * (upper_b + j) / ((lower + j) * (j + 1))) * z
        total = total + term
    return total


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer()


def _lanczos_log(z: complex) -> complex:
    z = z - 1.0
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma_abs(z: complex) -> float:
    """ln|Γ(z)|, with the reflection formula on Re z < 1/2."""
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log(z).real
    return math.log(math.pi) - math.log(abs(cmath.sin(math.pi * z))) - log_gamma_abs(1.0 - z)


def log_gamma(x: float) -> float:
    if x <= 0.0:
        raise PoleError(f"log_gamma requires a positive argument, got {x:.17g}")
    return log_gamma_abs(x)


def gamma_abs_complex(z: complex) -> float:
    return math.exp(log_gamma_abs(z))
