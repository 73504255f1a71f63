"""Energies, normalization recursions and normalized eigenfunctions."""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from sipot.errors import ConvergenceError, InadmissibleStateError, IndexRangeError, PoleError
from sipot.families import FamilyId, FamilyParams, family
from sipot.specfun import MAX_DEGREE, hermite_h, jacobi_p, laguerre_l, log_gamma, log_gamma_abs

logger = logging.getLogger(__name__)

IMAG_TOL = 1e-9
LN2 = math.log(2.0)
LN_PI = math.log(math.pi)

NORM_KIND: dict[FamilyId, str | None] = {
    FamilyId.SCARF2: "a",
    FamilyId.POSCHL_TELLER: "b",
    FamilyId.MORSE: "a",
    FamilyId.MORSE_MIRROR: "a",
    FamilyId.RADIAL_OSC: "c",
    FamilyId.HARM_OSC: None,
    FamilyId.SCARF1: "d",
    FamilyId.SCARF1_COT: "d",
    FamilyId.ROSEN_MORSE2: "e",
    FamilyId.ECKART: "e",
    FamilyId.COULOMB: "p",
    FamilyId.ROSEN_MORSE1: "u",
    FamilyId.ROSEN_MORSE1_COT: "u",
}
KINDS = ("a", "b", "b_printed", "c", "d", "e", "p", "u")


def _raw_energy(fp: FamilyParams, k: int) -> float:
    e, r = fp.eps, fp.rho
    match fp.id:
        case FamilyId.SCARF2 | FamilyId.MORSE | FamilyId.MORSE_MIRROR:
            return (2 * e - k) * k
        case FamilyId.POSCHL_TELLER:
            return -k * (k - 2 * e)
        case FamilyId.RADIAL_OSC:
            return 4 * r * k
        case FamilyId.HARM_OSC:
            return 2 * fp.beta * k
        case FamilyId.SCARF1 | FamilyId.SCARF1_COT:
            return (k - 2 * e) * k
    if k == 0:
        return 0.0
    s = k - e
    if s == 0:
        raise PoleError(f"E_{k} has a pole at eps={e:.17g}")
    match fp.id:
        case FamilyId.ROSEN_MORSE2 | FamilyId.ECKART:
            return k * (k - 2 * e) * (r**2 / (s**2 * e**2) - 1)
        case FamilyId.COULOMB:
            return k * (k - 2 * e) * r**2 / (s**2 * e**2)
    return k * (k - 2 * e) * (r**2 / (s**2 * e**2) + 1)


def _gamma_args(fp: FamilyParams, k: int) -> tuple[float, ...]:
    """Real Gamma arguments appearing in the normalization of the k-th state."""
    e, r = fp.eps, fp.rho
    s = e - k
    match fp.id:
        case FamilyId.ROSEN_MORSE2:
            return (2 * s, s + r / s, s - r / s)
        case FamilyId.ECKART:
            return (1 - (s - r / s), 1 - 2 * s, s + r / s)
        case FamilyId.COULOMB:
            return (-2 * s, -(s**2) / r if r else -1.0)
    return ()


def admissible_range(fp: FamilyParams) -> range:
    """Indices of normalizable states, capped at the polynomial degree limit."""
    cap = MAX_DEGREE + 1
    match fp.id:
        case FamilyId.SCARF2 | FamilyId.POSCHL_TELLER | FamilyId.MORSE | FamilyId.MORSE_MIRROR:
            return range(0, max(0, min(cap, math.ceil(fp.eps))))
        case FamilyId.COULOMB:
            # the normalization radicand is positive only on the rho < 0 branch
            return range(0, cap if fp.rho < 0 and fp.eps < 0 else 0)
        case FamilyId.ROSEN_MORSE2 | FamilyId.ECKART:
            previous = None
            for k in range(cap):
                s = fp.eps - k
                if s == 0 or any(a <= 0 for a in _gamma_args(fp, k)):
                    return range(0, k)
                energy = _raw_energy(fp, k)
                if previous is not None and energy <= previous:
                    return range(0, k)
                previous = energy
            return range(0, cap)
    return range(0, cap)


def _check_index(fp: FamilyParams, k: int) -> None:
    if k < 0 or int(k) != k:
        raise IndexRangeError(f"state index must be a non-negative integer, got {k}")
    allowed = admissible_range(fp)
    if k not in allowed:
        raise InadmissibleStateError(
            f"{fp.id.value}: k={k} is outside the admissible range [0, {len(allowed)}) "
            f"(eps={fp.eps:.17g}, rho={fp.rho:.17g})"
        )


def eigenenergy(fp: FamilyParams, k: int) -> float:
    """E_k of the family; E_0 = 0 is defined for every valid family."""
    if k == 0:
        return 0.0
    _check_index(fp, k)
    return float(_raw_energy(fp, k))


def spectrum(fp: FamilyParams, kmax: int | None = None) -> list[float]:
    allowed = admissible_range(fp)
    top = len(allowed) if kmax is None else min(len(allowed), kmax + 1)
    return [eigenenergy(fp, k) for k in range(top)]


def _radicand(value: float, kind: str, k: int, eps: float) -> float:
    if not value > 0:
        raise InadmissibleStateError(f"{kind}-recursion radicand {value:.17g} <= 0 at k={k}, eps={eps:.17g}")
    return math.sqrt(value)


def _step(kind: str, k: int, e: float, r: float) -> float:
    if kind in ("a", "b", "b_printed"):
        return 1.0 / _radicand((2 * e - k) * k, kind, k, e)
    if kind == "c":
        return 1.0 / _radicand(4 * r * k, kind, k, e)
    if kind == "d":
        return 1.0 / _radicand(k * (k - 2 * e), kind, k, e)
    if e == 0 or k == e:
        raise InadmissibleStateError(f"{kind}-recursion divides by zero at k={k}, eps={e:.17g}")
    if kind == "p":
        if r == 0:
            raise InadmissibleStateError(f"p-recursion divides by zero at k={k}, rho=0")
        return (2 * e - k) / e * _radicand((k - e) ** 2 * e**2 / (k * (k - 2 * e) * r**2), kind, k, e)
    if kind == "e":
        energy = k * (2 * e - k) - r**2 / (k - e) ** 2 + r**2 / e**2
    else:
        energy = k * (k - 2 * e) - r**2 / (k - e) ** 2 + r**2 / e**2
    return (2 * e - k) / (e * _radicand(energy, kind, k, e))


def norm_coefficient(kind: str, k: int, fp: FamilyParams) -> float:
    """Unroll the normalization recursion; eps moves by -1 per step (+1 for ``b_printed``)."""
    if kind not in KINDS:
        raise ValueError(f"unknown normalization kind '{kind}', expected one of {KINDS}")
    if k < 0 or int(k) != k:
        raise IndexRangeError(f"state index must be a non-negative integer, got {k}")
    direction = 1 if kind == "b_printed" else -1
    value = 1.0
    for j in range(k):
        value *= _step(kind, k - j, fp.eps + direction * j, fp.rho)
    logger.debug("%s_%d(eps=%.17g, rho=%.17g) = %.17g", kind, k, fp.eps, fp.rho, value)
    return value


def _relative_imag(z: np.ndarray) -> float:
    finite = np.isfinite(z)
    if not finite.any():
        return 0.0
    scale = float(np.max(np.abs(z[finite])))
    return float(np.max(np.abs(np.imag(z[finite])))) / max(scale, np.finfo(float).tiny)


def _scarf2(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = (
        (e - 0.5) * LN2
        + log_gamma_abs(complex(0.5 + e - k, -r))
        - 0.5 * LN_PI
        - 0.5 * log_gamma(2 * (e - k))
        + math.lgamma(k + 1)
    )
    ax = np.abs(x)
    log_cosh = ax + np.log1p(np.exp(-2 * ax)) - LN2
    body = np.exp(log_c - r * np.arctan(np.sinh(x)) - e * log_cosh)
    poly = (1j) ** k * jacobi_p(k, -0.5 - e + 1j * r, -0.5 - e - 1j * r, -1j * np.sinh(x))
    return norm * body * poly


def _poschl_teller(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = 0.5 * (log_gamma(0.5 - k + e + r) - log_gamma(2 * (e - k)) - log_gamma(0.5 + k - e + r)) + math.lgamma(k + 1)
    # (cosh x - 1) = 2 sinh^2(x/2), (cosh x + 1) = 2 cosh^2(x/2); the powers of 2 cancel 2^eps
    body = np.exp(log_c + (r - e) * np.log(np.sinh(x / 2)) - (e + r) * np.log(np.cosh(x / 2)))
    return norm * body * jacobi_p(k, -0.5 - e - r, -0.5 - e + r, -np.cosh(x))


def _morse(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = (e - k) * math.log(2 * r) + math.lgamma(k + 1) - 0.5 * log_gamma(2 * (e - k))
    body = np.exp(log_c + (k - e) * x - r * np.exp(-x))
    return (-1) ** k * norm * body * laguerre_l(k, 2 * e - 2 * k, 2 * r * np.exp(-x))


def _morse_mirror(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = (e - k) * math.log(2 * abs(r)) + math.lgamma(k + 1) - 0.5 * log_gamma(2 * (e - k))
    body = np.exp(log_c + (e - k) * x + r * np.exp(x))
    return (-1) ** k * norm * body * laguerre_l(k, 2 * e - 2 * k, -2 * r * np.exp(x))


def _radial_osc(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = 0.5 * (LN2 + (0.5 + k - e) * math.log(r) - log_gamma(0.5 + k - e)) + math.lgamma(k + 1) + k * LN2
    body = np.exp(log_c - r * x**2 / 2 - e * np.log(x))
    return (-1) ** k * norm * body * laguerre_l(k, -0.5 - e, r * x**2)


def _harm_osc(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    b = fp.beta
    y = x + fp.rho / b
    log_c = 0.25 * (math.log(b) - LN_PI) - 0.5 * (math.lgamma(k + 1) + k * LN2)
    return np.exp(log_c - b / 2 * y**2) * hermite_h(k, math.sqrt(b) * y)


def _scarf1_like(fp: FamilyParams, k: int, t: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    log_c = (
        e * LN2
        + math.lgamma(k + 1)
        + 0.5 * (log_gamma(1 + 2 * k - 2 * e) - log_gamma(0.5 + k - e - r) - log_gamma(0.5 + k - e + r))
    )
    body = np.exp(log_c - (e + r) / 2 * np.log1p(-t) - (e - r) / 2 * np.log1p(t))
    return norm * body * jacobi_p(k, -0.5 - e - r, -0.5 - e + r, t)


def _rosen_morse2(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    s = e - k
    a, b = s + r / s, s - r / s
    log_c = (0.5 + k - e) * LN2 + math.lgamma(k + 1) + 0.5 * (log_gamma(2 * s) - log_gamma(a) - log_gamma(b))
    log_minus = LN2 - np.logaddexp(0.0, 2 * x)
    log_plus = LN2 - np.logaddexp(0.0, -2 * x)
    body = np.exp(log_c + a / 2 * log_minus + b / 2 * log_plus)
    return norm * body * jacobi_p(k, a, b, np.tanh(x))


def _eckart(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    s = e - k
    a, b = s + r / s, s - r / s
    log_c = (0.5 + k - e) * LN2 + math.lgamma(k + 1) + 0.5 * (log_gamma(1 - b) - log_gamma(1 - 2 * s) - log_gamma(a))
    log_minus = LN2 - np.log(np.expm1(2 * x))
    log_plus = LN2 - np.log(-np.expm1(-2 * x))
    body = np.exp(log_c + a / 2 * log_minus + b / 2 * log_plus)
    return norm * body * jacobi_p(k, a, b, 1.0 / np.tanh(x))


def _coulomb(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    s = e - k
    c = r / s
    log_c = math.lgamma(k + 1) + math.log(abs(norm)) - 0.5 * (math.log(-(s**2) / r) + 2 * s * math.log(c) + log_gamma(-2 * s))
    sign = (-1) ** k * math.copysign(1.0, norm)
    body = np.exp(log_c - e * np.log(2 * x) - c * x)
    return sign * body * laguerre_l(k, -1 - 2 * e, 2 * c * x)


def _rosen_morse1_like(fp: FamilyParams, k: int, log_trig: np.ndarray, phase: np.ndarray, z, norm: float) -> np.ndarray:
    e, r = fp.eps, fp.rho
    s = e - k
    q = r / s
    log_c = math.lgamma(k + 1) + log_gamma_abs(complex(1 - s, -q)) - 0.5 * (LN_PI + log_gamma(1 - 2 * s))
    body = np.exp(log_c - s * log_trig - q * phase)
    poly = (-1j) ** k * jacobi_p(k, s + 1j * q, s - 1j * q, z)
    return norm * body * poly


def _evaluate(fp: FamilyParams, k: int, x: np.ndarray, norm: float) -> np.ndarray:
    match fp.id:
        case FamilyId.SCARF2:
            return _scarf2(fp, k, x, norm)
        case FamilyId.POSCHL_TELLER:
            return _poschl_teller(fp, k, x, norm)
        case FamilyId.MORSE:
            return _morse(fp, k, x, norm)
        case FamilyId.MORSE_MIRROR:
            return _morse_mirror(fp, k, x, norm)
        case FamilyId.RADIAL_OSC:
            return _radial_osc(fp, k, x, norm)
        case FamilyId.HARM_OSC:
            return _harm_osc(fp, k, x, norm)
        case FamilyId.SCARF1:
            return _scarf1_like(fp, k, np.sin(x), norm)
        case FamilyId.SCARF1_COT:
            return _scarf1_like(fp, k, np.cos(x), norm)
        case FamilyId.ROSEN_MORSE2:
            return _rosen_morse2(fp, k, x, norm)
        case FamilyId.ECKART:
            return _eckart(fp, k, x, norm)
        case FamilyId.COULOMB:
            return _coulomb(fp, k, x, norm)
        case FamilyId.ROSEN_MORSE1:
            return _rosen_morse1_like(fp, k, np.log(2 * np.cos(x)), x, -1j * np.tan(x), norm)
        case FamilyId.ROSEN_MORSE1_COT:
            return _rosen_morse1_like(fp, k, np.log(2 * np.sin(x)), x - math.pi / 2, 1j / np.tan(x), norm)
    raise AssertionError(fp.id)


class EigenState(BaseModel):
    """A bound state; calling it evaluates the normalized wavefunction."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: FamilyParams
    k: int
    energy: float
    norm: float

    def raw(self, x) -> np.ndarray:
        """Closed form before the real part is taken (complex for Scarf II and the Rosen-Morse I types)."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        family(self.family.id).domain.check(xs)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            return np.asarray(_evaluate(self.family, self.k, xs, self.norm))

    def imaginary_residue(self, x) -> float:
        """max |Im zeta| / max |zeta| over the finite samples."""
        return _relative_imag(np.asarray(self.raw(x), dtype=complex))

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        z = self.raw(xs)
        if np.iscomplexobj(z):
            residue = _relative_imag(z)
            if residue > IMAG_TOL:
                raise ConvergenceError(
                    f"{self.family.id.value} state k={self.k}: imaginary residue {residue:.3g} exceeds {IMAG_TOL:g}"
                )
            z = np.real(z)
        # far tails: an underflowed envelope times a large polynomial
        values = np.where(np.isfinite(z), z, 0.0).astype(float)
        return values.reshape(xs.shape) if xs.ndim else float(values[0])


def wavefunction(fp: FamilyParams, k: int) -> EigenState:
    _check_index(fp, k)
    kind = NORM_KIND[fp.id]
    norm = 1.0 if kind is None else norm_coefficient(kind, k, fp)
    logger.debug("%s state k=%d: norm=%.17g", fp.id.value, k, norm)
    return EigenState(family=fp, k=k, energy=eigenenergy(fp, k), norm=norm)
