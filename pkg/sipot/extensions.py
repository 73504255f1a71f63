"""Rational extensions W = W0 + W1+ - W1- of the base superpotentials.

The gauge function added to W1+ and W1- is fixed to zero, so the
compatibility condition on W1+- must vanish identically. Every case is
evaluated in complex arithmetic on ``Dual`` grids so W and W' come out of
the same pass; the residual helpers compare moduli.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sipot import dual
from sipot.dual import Dual
from sipot.errors import ConfigError, IndexRangeError, PoleError
from sipot.families import ConstructionData, Domain, FamilyId, fold
from sipot.specfun import hyp1f1_terminating, hyp2f1_terminating, jacobi_p, laguerre_l
from sipot.verify import GridReport, grid_report

logger = logging.getLogger(__name__)

MAX_ELL = 8
COND1_TOL = 1e-8
COND2_TOL = 1e-10
EXT_SI_TOL = 1e-7
IMAG_TOL = 1e-9
POLE_RATIO = 1e-9
COLLAPSE_TOL = 1e-14


class ExtensionSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case_id: int = Field(ge=1, le=11)
    eps: float
    rho: float = 0.0
    ell: int | None = None
    imaginary_rho: bool = False
    provenance: ConstructionData | None = None
    poles: tuple[float, ...] = ()

    @property
    def rho_value(self) -> complex | float:
        return 1j * self.rho if self.imaginary_rho else self.rho

    @property
    def ext_id(self) -> str:
        return f"ext-{self.case_id}"

    def shifted(self, t: int = 1) -> "ExtensionSpec":
        return self.model_copy(update={"eps": self.eps - t, "poles": ()})


Parts = tuple[Dual, Dual, Dual, list]


def _coth(X):
    return dual.cosh(X) / dual.sinh(X)


def _csch(X):
    return 1.0 / dual.sinh(X)


def _collapsed(w0: Dual, coeff: complex, X: Dual) -> Parts | None:
    """A vanishing prefactor switches the extension off: W1+- = 0 and no denominators."""
    if abs(coeff) > COLLAPSE_TOL:
        return None
    zero = 0.0 * X
    return w0, zero, zero, []


def _case1(e, r, ell, X) -> Parts:
    w0 = e * _coth(X) - r * _csch(X)
    dp = 2 * e + 1 - 2 * r * dual.cosh(X)
    dm = 2 * e - 1 - 2 * r * dual.cosh(X)
    return w0, -2 * r * dual.sinh(X) / dp, -2 * r * dual.sinh(X) / dm, [dp, dm]


def _case2(e, r, ell, X) -> Parts:
    w0 = e * _coth(X) - r * _csch(X)
    if (off := _collapsed(w0, ell - 2 * r - 1, X)) is not None:
        return off
    c = (ell - 2 * r - 1) / 2 * dual.sinh(X)
    z = dual.cosh(X)
    dp = jacobi_p(ell, -0.5 + e - r, -1.5 - e - r, z)
    dm = jacobi_p(ell, -1.5 + e - r, -0.5 - e - r, z)
    wp = c * jacobi_p(ell - 1, 0.5 + e - r, -0.5 - e - r, z) / dp
    wm = c * jacobi_p(ell - 1, -0.5 + e - r, 0.5 - e - r, z) / dm
    return w0, wp, wm, [dp, dm]


def _case3(e, r, ell, X) -> Parts:
    Y = 2 * X
    w0 = 2 * (ell + e) * _coth(Y) + 2 * r * _csch(Y)
    if (off := _collapsed(w0, 2 * r - ell + 1, X)) is not None:
        return off
    c = -(2 * r - ell + 1) * dual.sinh(Y)
    z = dual.cosh(Y)
    dp = jacobi_p(ell, -1.5 - ell - e - r, -0.5 + ell + e - r, z)
    dm = jacobi_p(ell, -0.5 - ell - e - r, -1.5 + ell + e - r, z)
    wp = c * jacobi_p(ell - 1, -0.5 - ell - e - r, 0.5 + ell + e - r, z) / dp
    wm = c * jacobi_p(ell - 1, 0.5 - ell - e - r, -0.5 + ell + e - r, z) / dm
    return w0, wp, wm, [dp, dm]


def _case4(e, r, ell, X) -> Parts:
    w0 = e / X + r * X
    dp = 2 * e + 1 - 2 * r * X * X
    dm = 2 * e - 1 - 2 * r * X * X
    return w0, -4 * r * X / dp, -4 * r * X / dm, [dp, dm]


def _case5(e, r, ell, X) -> Parts:
    w0 = e / X + r * X
    z = -r * X * X
    dp = laguerre_l(ell, -1.5 - e, z)
    dm = laguerre_l(ell, -0.5 - e, z)
    wp = 2 * r * X * laguerre_l(ell - 1, -0.5 - e, z) / dp
    wm = 2 * r * X * laguerre_l(ell - 1, 0.5 - e, z) / dm
    return w0, wp, wm, [dp, dm]


def _case6(e, r, ell, X) -> Parts:
    w0 = (e + ell) / X - X
    z = -1.0 * X * X
    dp = laguerre_l(ell, -0.5 + ell + e, z)
    dm = laguerre_l(ell, -1.5 + ell + e, z)
    wp = 2 * X * laguerre_l(ell - 1, 0.5 + ell + e, z) / dp
    wm = 2 * X * laguerre_l(ell - 1, -0.5 + ell + e, z) / dm
    return w0, wp, wm, [dp, dm]


def _case7(e, r, ell, X) -> Parts:
    w0 = (e + ell) / X - X
    z = -1.0 * X * X
    dp = (0.5 + ell + e) * hyp1f1_terminating(ell, -ell, 0.5 + ell + e, z)
    dm = (-0.5 + ell + e) * hyp1f1_terminating(ell, -ell, -0.5 + ell + e, z)
    wp = 2 * ell * X * hyp1f1_terminating(ell, 1 - ell, 1.5 + ell + e, z) / dp
    wm = 2 * ell * X * hyp1f1_terminating(ell, 1 - ell, 0.5 + ell + e, z) / dm
    return w0, wp, wm, [dp, dm]


def _case8(e, r, ell, X) -> Parts:
    w0 = -e * dual.tan(X) - r / dual.cos(X)
    dp = 2 * e + 1 + 2 * r * dual.sin(X)
    dm = 2 * e - 1 + 2 * r * dual.sin(X)
    return w0, 2 * r * dual.cos(X) / dp, 2 * r * dual.cos(X) / dm, [dp, dm]


def _case9(e, r, ell, X) -> Parts:
    Y = 2 * X
    w0 = 2 * (e + ell) * dual.cos(Y) / dual.sin(Y) - 2 * r / dual.sin(Y)
    if (off := _collapsed(w0, 2 * r + ell - 1, X)) is not None:
        return off
    c = -(2 * r + ell - 1) * dual.sin(Y)
    z = dual.cos(Y)
    dp = jacobi_p(ell, -1.5 - ell - e + r, -0.5 + ell + e + r, z)
    dm = jacobi_p(ell, -0.5 - ell - e + r, -1.5 + ell + e + r, z)
    wp = c * jacobi_p(ell - 1, -0.5 - ell - e + r, 0.5 + ell + e + r, z) / dp
    wm = c * jacobi_p(ell - 1, 0.5 - ell - e + r, -0.5 + ell + e + r, z) / dm
    return w0, wp, wm, [dp, dm]


def _case10(e, r, ell, X) -> Parts:
    Y = 2 * X
    w0 = 2 * e * dual.cos(Y) / dual.sin(Y) + 2 * r / dual.sin(Y)
    if (off := _collapsed(w0, ell * (2 * r + ell - 1), X)) is not None:
        return off
    c = -ell * (2 * r + ell - 1) * dual.sin(Y)
    z = dual.sin(X) * dual.sin(X)
    # Gamma(a)/Gamma(a + 1) = 1/a
    dp = (0.5 + e + r) * hyp2f1_terminating(-ell, -1 + ell + 2 * r, 0.5 + e + r, z)
    dm = (-0.5 + e + r) * hyp2f1_terminating(-ell, -1 + ell + 2 * r, -0.5 + e + r, z)
    wp = c * hyp2f1_terminating(1 - ell, ell + 2 * r, 1.5 + e + r, z) / dp
    wm = c * hyp2f1_terminating(1 - ell, ell + 2 * r, 0.5 + e + r, z) / dm
    return w0, wp, wm, [dp, dm]


def _case11(e, r, ell, X) -> Parts:
    w0 = e * dual.tanh(X) + 1j * r / dual.cosh(X)
    if (off := _collapsed(w0, ell - 2 * r - 1, X)) is not None:
        return off
    c = 0.5j * (ell - 2 * r - 1) * dual.cosh(X)
    z = 1j * dual.sinh(X)
    dp = jacobi_p(ell, -r + e - 0.5, -r - e - 1.5, z)
    dm = jacobi_p(ell, -r + e - 1.5, -r - e - 0.5, z)
    wp = c * jacobi_p(ell - 1, -r + e + 0.5, -r - e - 0.5, z) / dp
    wm = c * jacobi_p(ell - 1, -r + e - 0.5, -r - e + 0.5, z) / dm
    return w0, wp, wm, [dp, dm]


@dataclass(frozen=True)
class ExtensionCase:
    case_id: int
    label: str
    base: FamilyId
    uses_ell: bool
    domain: Domain
    parts: Callable[..., Parts]
    remainder: Callable[[float, complex, int], complex]


_HALF = Domain(lo=0.0, hi=math.inf, window=(0.0, 8.0))
_RADIAL = Domain(lo=0.0, hi=math.inf, window=(0.0, 6.0))
_QUARTER = Domain(lo=0.0, hi=math.pi / 2, window=(0.0, math.pi / 2))

CASES: dict[int, ExtensionCase] = {
    c.case_id: c
    for c in (
        ExtensionCase(1, "Poschl-Teller type, rational W1+-", FamilyId.POSCHL_TELLER, False, _HALF, _case1, lambda e, r, ell: 2 * e + 1),
        ExtensionCase(2, "Poschl-Teller type, Jacobi ratios of degree ell", FamilyId.POSCHL_TELLER, True, _HALF, _case2, lambda e, r, ell: 2 * e + 1),
        ExtensionCase(3, "Poschl-Teller type on 2x, Jacobi ratios", FamilyId.POSCHL_TELLER, True, _HALF, _case3, lambda e, r, ell: 4 * (2 * (ell + e) + 1)),
        ExtensionCase(4, "radial oscillator type, rational W1+-", FamilyId.RADIAL_OSC, False, _RADIAL, _case4, lambda e, r, ell: 4 * r),
        ExtensionCase(5, "radial oscillator type, Laguerre ratios", FamilyId.RADIAL_OSC, True, _RADIAL, _case5, lambda e, r, ell: 4 * r),
        ExtensionCase(6, "radial oscillator type (rho = -1), Laguerre ratios", FamilyId.RADIAL_OSC, True, _RADIAL, _case6, lambda e, r, ell: -4.0),
        ExtensionCase(7, "radial oscillator type (rho = -1), 1F1 ratios", FamilyId.RADIAL_OSC, True, _RADIAL, _case7, lambda e, r, ell: -4.0),
        ExtensionCase(8, "Scarf I type, rational W1+-", FamilyId.SCARF1, False, Domain(lo=-math.pi / 2, hi=math.pi / 2, window=(-math.pi / 2, math.pi / 2)), _case8, lambda e, r, ell: -2 * e - 1),
        ExtensionCase(9, "trigonometric Scarf type on 2x, Jacobi ratios", FamilyId.SCARF1, True, _QUARTER, _case9, lambda e, r, ell: -4 * (2 * (e + ell) + 1)),
        ExtensionCase(10, "trigonometric Scarf type on 2x, 2F1 ratios", FamilyId.SCARF1, True, _QUARTER, _case10, lambda e, r, ell: -4 * (2 * e + 1)),
        ExtensionCase(11, "Scarf II type with i rho, complex Jacobi ratios", FamilyId.SCARF2, True, Domain(lo=-math.inf, hi=math.inf, window=(-8.0, 8.0)), _case11, lambda e, r, ell: 2 * e + 1),
    )
}


def case(case_id: int | str) -> ExtensionCase:
    if isinstance(case_id, str):
        case_id = int(case_id.removeprefix("ext-"))
    if case_id not in CASES:
        raise ConfigError(f"unknown extension 'ext-{case_id}', expected ext-1 ... ext-11")
    return CASES[case_id]


def evaluate(spec: ExtensionSpec, x) -> Parts:
    """W0, W1+, W1- as value/derivative pairs and the denominators of W1+-."""
    cs = case(spec.case_id)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    cs.domain.check(xs)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w0, wp, wm, dens = cs.parts(spec.eps, spec.rho_value, spec.ell or 0, Dual.variable(xs))
    return w0, wp, wm, dens


def _complex(d: Dual) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(d.val, dtype=complex), np.asarray(d.der, dtype=complex)


def _den_values(dens: list) -> list[np.ndarray]:
    return [np.asarray(dual.value(d), dtype=complex) for d in dens]


def find_poles(spec: ExtensionSpec, grid) -> list[float]:
    """Approximate real zeros of the W1+- denominators on the grid (sign changes or vanishing modulus)."""
    xs = np.asarray(grid, dtype=float)
    _, _, _, dens = evaluate(spec, xs)
    roots: list[float] = []
    for den in _den_values(dens):
        den = np.broadcast_to(den, xs.shape)
        scale = float(np.max(np.abs(den[np.isfinite(den)]))) if np.isfinite(den).any() else 0.0
        if np.max(np.abs(den.imag)) <= 1e-12 * max(scale, 1.0):
            re = den.real
            flips = np.nonzero(np.signbit(re[1:]) != np.signbit(re[:-1]))[0]
            for i in flips:
                roots.append(float(xs[i] - re[i] * (xs[i + 1] - xs[i]) / (re[i + 1] - re[i])))
            roots.extend(float(v) for v in xs[np.abs(re) <= POLE_RATIO * scale])
        else:
            roots.extend(float(v) for v in xs[np.abs(den) <= POLE_RATIO * scale])
    return sorted(set(roots))


def default_grid(spec: ExtensionSpec, n: int = 501) -> np.ndarray:
    return case(spec.case_id).domain.grid(n)


def _check_ell(cs: ExtensionCase, ell: int | None) -> int | None:
    if not cs.uses_ell:
        return None
    if ell is None or not 1 <= ell <= MAX_ELL:
        raise IndexRangeError(f"ext-{cs.case_id} needs a degree 1 <= ell <= {MAX_ELL}, got {ell}")
    return int(ell)


def _check_imaginary(cs: ExtensionCase, ell: int | None, imaginary_rho: bool) -> None:
    if not imaginary_rho:
        return
    if cs.case_id != 11:
        raise ConfigError("imaginary_rho applies to ext-11 only")
    # higher degrees leave a complex W1+ - W1- on this slice
    if ell != 1:
        raise IndexRangeError(f"ext-11 with imaginary rho is real only for ell = 1, got {ell}")


def _with_poles(spec: ExtensionSpec, strict: bool) -> ExtensionSpec:
    grid = default_grid(spec, 2001)
    poles = sorted(set(find_poles(spec, grid) + find_poles(spec.shifted(1), grid)))
    if poles:
        shown = ", ".join(f"{p:.6g}" for p in poles[:5])
        if strict:
            raise PoleError(f"{spec.ext_id}: W1+- denominator vanishes near x = {shown}", location=poles[0])
        logger.warning("%s: W1+- denominator vanishes near x = %s; those points are excluded from checks", spec.ext_id, shown)
    return spec.model_copy(update={"poles": tuple(poles)})


def build_extension(
    case_id: int | str,
    data: ConstructionData,
    ell: int | None = None,
    imaginary_rho: bool = False,
    strict: bool = False,
) -> ExtensionSpec:
    """Fold (eps, rho) exactly as the base family does and scan the domain for denominator zeros."""
    cs = case(case_id)
    _check_imaginary(cs, ell, imaginary_rho)
    base = fold(cs.base, data)
    spec = ExtensionSpec(
        case_id=cs.case_id,
        eps=base.eps,
        rho=base.rho,
        ell=_check_ell(cs, ell),
        imaginary_rho=imaginary_rho,
        provenance=data,
    )
    logger.info("built %s: eps=%.17g rho=%.17g ell=%s", spec.ext_id, spec.eps, spec.rho, spec.ell)
    return _with_poles(spec, strict)


def direct_extension(
    case_id: int | str,
    eps: float,
    rho: float = 0.0,
    ell: int | None = None,
    imaginary_rho: bool = False,
    strict: bool = False,
) -> ExtensionSpec:
    cs = case(case_id)
    _check_imaginary(cs, ell, imaginary_rho)
    spec = ExtensionSpec(case_id=cs.case_id, eps=eps, rho=rho, ell=_check_ell(cs, ell), imaginary_rho=imaginary_rho)
    return _with_poles(spec, strict)


def extended_superpotential(spec: ExtensionSpec, x) -> tuple[np.ndarray, np.ndarray]:
    w0, wp, wm, _ = evaluate(spec, x)
    w = w0 + wp - wm
    return _complex(w)


def extended_potentials(spec: ExtensionSpec, x) -> tuple[np.ndarray, np.ndarray]:
    w, dw = extended_superpotential(spec, x)
    return w * w - dw, w * w + dw


def remainder(spec: ExtensionSpec) -> complex:
    return case(spec.case_id).remainder(spec.eps, spec.rho_value, spec.ell or 0)


def _near_pole(spec: ExtensionSpec, xs: np.ndarray) -> np.ndarray:
    mask = np.zeros(xs.shape, dtype=bool)
    for s in (spec, spec.shifted(1)):
        _, _, _, dens = evaluate(s, xs)
        for den in _den_values(dens):
            den = np.abs(np.broadcast_to(den, xs.shape))
            finite = den[np.isfinite(den)]
            scale = float(np.max(finite)) if finite.size else 0.0
            mask |= ~np.isfinite(den) | (den <= POLE_RATIO * scale)
    return mask


def _grid(spec: ExtensionSpec, grid) -> np.ndarray:
    return default_grid(spec) if grid is None else np.asarray(grid, dtype=float)


def check_cond2(spec: ExtensionSpec, grid=None, tol: float = COND2_TOL) -> GridReport:
    """|W1-(x; eps) - W1+(x; eps - 1)| / (1 + |W1+(x; eps - 1)|)."""
    xs = _grid(spec, grid)
    _, _, wm, _ = evaluate(spec, xs)
    _, wp_down, _, _ = evaluate(spec.shifted(1), xs)
    minus, _ = _complex(wm)
    plus_down, _ = _complex(wp_down)
    residual = np.abs(minus - plus_down) / (1.0 + np.abs(plus_down))
    return grid_report(residual, xs, tol, excluded=_near_pole(spec, xs))


def cond1_expression(spec: ExtensionSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """L = W1+^2 + W1+' + W1-^2 + W1-' + 2 W0 W1+ - 2 W0 W1- - 2 W1+ W1-, and 1 + |W0|^2 to measure it against."""
    w0, wp, wm, _ = evaluate(spec, x)
    a, _ = _complex(w0)
    p, dp = _complex(wp)
    m, dm = _complex(wm)
    value = p * p + dp + m * m + dm + 2 * a * p - 2 * a * m - 2 * p * m
    scale = 1.0 + np.abs(a) ** 2
    return value, scale


def check_cond1(spec: ExtensionSpec, grid=None, tol: float = COND1_TOL) -> GridReport:
    """|L(x; eps)| and |L(x; eps) - L(x; eps - 1)|, both relative to 1 + W0(x)^2."""
    xs = _grid(spec, grid)
    here, scale = cond1_expression(spec, xs)
    down, scale_down = cond1_expression(spec.shifted(1), xs)
    residual = np.maximum(np.abs(here) / scale, np.abs(here - down) / np.maximum(scale, scale_down))
    return grid_report(residual, xs, tol, excluded=_near_pole(spec, xs))


def extended_si_check(spec: ExtensionSpec, grid=None, tol: float = EXT_SI_TOL) -> GridReport:
    """V~_W(x; eps) = V_W(x; eps - 1) + R(eps - 1), R from the base superpotential."""
    xs = _grid(spec, grid)
    down = spec.shifted(1)
    _, v_tilde = extended_potentials(spec, xs)
    v_down, _ = extended_potentials(down, xs)
    residual = np.abs(v_tilde - v_down - remainder(down)) / (1.0 + np.abs(v_down))
    return grid_report(residual, xs, tol, excluded=_near_pole(spec, xs))


def imaginary_residue(spec: ExtensionSpec, grid=None, tol: float = IMAG_TOL) -> GridReport:
    """|Im(W1+ - W1-)| relative to max |W1+ - W1-|; zero exactly when the deformation is real."""
    xs = _grid(spec, grid)
    _, wp, wm, _ = evaluate(spec, xs)
    diff = _complex(wp)[0] - _complex(wm)[0]
    finite = np.isfinite(diff)
    scale = float(np.max(np.abs(diff[finite]))) if finite.any() else 0.0
    residual = np.abs(diff.imag) / max(scale, np.finfo(float).tiny)
    return grid_report(residual, xs, tol, excluded=_near_pole(spec, xs))


def pt_symmetry_residue(spec: ExtensionSpec, grid=None, tol: float = IMAG_TOL) -> GridReport:
    """|conj W(-x) + W(x)| / (1 + |W(x)|) for ext-11 with real rho.

    There W1+ - W1- is complex for ell >= 2, but W stays PT-symmetric at every
    degree, so V(-x) is the complex conjugate of V(x).
    """
    if spec.case_id != 11 or spec.imaginary_rho:
        raise ConfigError("the PT-symmetry check applies to ext-11 with real rho")
    xs = _grid(spec, grid)
    w, _ = extended_superpotential(spec, xs)
    w_mirror, _ = extended_superpotential(spec, -xs)
    residual = np.abs(np.conj(w_mirror) + w) / (1.0 + np.abs(w))
    return grid_report(residual, xs, tol, excluded=_near_pole(spec, xs) | _near_pole(spec, -xs))
