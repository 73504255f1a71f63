"""The thirteen superpotential families and their effective parameters.

A family is built from translated parameters m1..mn and couplings
(I_j, beta_j, d_j). Every family's superpotential has the form
k = sum_j I_j v_j(x) + M G(x) (or rho/eps + eps G(x) for the generalized
families), with G' + G^2 = alpha and v_j' + v_j G = beta_j. Folding the sums
gives the two effective parameters (eps, rho), or (beta, rho) for the
harmonic oscillator, that every evaluator below works with.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sipot.errors import ConfigError, DomainError, RangeViolationError, UnverifiedInvariantError
from sipot.invariants import InvariantExpr, ParamVector, eval_invariant

logger = logging.getLogger(__name__)


class FamilyId(StrEnum):
    SCARF2 = "scarf2"
    POSCHL_TELLER = "poschl-teller"
    MORSE = "morse"
    MORSE_MIRROR = "morse-mirror"
    RADIAL_OSC = "radial-osc"
    HARM_OSC = "harm-osc"
    SCARF1 = "scarf1"
    SCARF1_COT = "scarf1-cot"
    ROSEN_MORSE2 = "rosen-morse2"
    ECKART = "eckart"
    COULOMB = "coulomb"
    ROSEN_MORSE1 = "rosen-morse1"
    ROSEN_MORSE1_COT = "rosen-morse1-cot"


BASE_FAMILIES = tuple(FamilyId)[:8]
GENERALIZED_FAMILIES = tuple(FamilyId)[8:]


class Coupling(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    invariant: InvariantExpr
    beta: float = 0.0
    d: float = 0.0


class ConstructionData(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: ParamVector
    couplings: tuple[Coupling, ...] = Field(min_length=1)
    rho_invariant: InvariantExpr | None = None

    def translate(self, t: int) -> "ConstructionData":
        return self.model_copy(update={"p": self.p.translate(t)})


class FamilyParams(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: FamilyId
    eps: float = 0.0
    rho: float = 0.0
    beta: float = 0.0
    alpha: float
    provenance: ConstructionData | None = None


class Domain(BaseModel):
    """Open interval (lo, hi); ``window`` bounds grids on infinite ends."""

    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    window: tuple[float, float]

    @property
    def delta(self) -> float:
        width = self.hi - self.lo
        return 1e-3 * (width if math.isfinite(width) else 1.0)

    def grid(self, n: int, lo: float | None = None, hi: float | None = None) -> np.ndarray:
        """``n`` points that stay delta away from finite (singular) endpoints."""
        a = self.lo + self.delta if math.isfinite(self.lo) else self.window[0]
        b = self.hi - self.delta if math.isfinite(self.hi) else self.window[1]
        if lo is not None:
            a = max(a, lo)
        if hi is not None:
            b = min(b, hi)
        return np.linspace(a, b, n)

    def check(self, x) -> None:
        xs = np.asarray(x, dtype=float)
        if np.any(xs <= self.lo) or np.any(xs >= self.hi):
            bad = xs[(xs <= self.lo) | (xs >= self.hi)].ravel()[0]
            raise DomainError(f"x={bad:.17g} lies outside ({self.lo:g}, {self.hi:g})")


Pair = tuple[np.ndarray, np.ndarray]


def _sech(x):
    return 1.0 / np.cosh(x)


def _csch(x):
    return 1.0 / np.sinh(x)


def _coth(x):
    return np.cosh(x) / np.sinh(x)


def _sec(x):
    return 1.0 / np.cos(x)


def _csc(x):
    return 1.0 / np.sin(x)


def _cot(x):
    return np.cos(x) / np.sin(x)


@dataclass(frozen=True)
class Family:
    id: FamilyId
    label: str
    alpha: float
    fold: str
    domain: Domain
    k: Callable[[FamilyParams, np.ndarray], Pair]
    g: Callable[[np.ndarray], Pair]
    v: Callable[[float, float, np.ndarray], Pair] | None
    displayed: Callable[[FamilyParams, np.ndarray], Pair]
    remainder: Callable[[FamilyParams], float]
    ranges: tuple[tuple[str, Callable[[FamilyParams], bool]], ...]


_LINE = Domain(lo=-math.inf, hi=math.inf, window=(-10.0, 10.0))
_HALF_LINE = Domain(lo=0.0, hi=math.inf, window=(0.0, 12.0))
_SYM = Domain(lo=-math.pi / 2, hi=math.pi / 2, window=(-math.pi / 2, math.pi / 2))
_ARC = Domain(lo=0.0, hi=math.pi, window=(0.0, math.pi))


def _r_plus(fp: FamilyParams) -> float:
    return 2 * fp.eps + 1


def _r_minus(fp: FamilyParams) -> float:
    return -2 * fp.eps - 1


def _r_shift(fp: FamilyParams) -> float:
    e, r = fp.eps, fp.rho
    return -(2 * e + 1) * r**2 / (e**2 * (e + 1) ** 2)


_EPS_POS = ("eps > 0", lambda fp: fp.eps > 0)
_EPS_HALF = ("eps < 1/2", lambda fp: fp.eps < 0.5)
_EPS_NONZERO = ("eps != 0", lambda fp: fp.eps != 0)
_SCARF1_RHO = ("(2 eps - 1)/2 < rho < (1 - 2 eps)/2", lambda fp: (2 * fp.eps - 1) / 2 < fp.rho < (1 - 2 * fp.eps) / 2)

FAMILIES: dict[FamilyId, Family] = {
    f.id: f
    for f in (
        Family(
            id=FamilyId.SCARF2,
            label="Scarf II type, k = eps tanh x + rho sech x",
            alpha=1.0,
            fold="plus",
            domain=_LINE,
            k=lambda fp, x: (
                fp.eps * np.tanh(x) + fp.rho * _sech(x),
                fp.eps * _sech(x) ** 2 - fp.rho * _sech(x) * np.tanh(x),
            ),
            g=lambda x: (np.tanh(x), _sech(x) ** 2),
            v=lambda b, d, x: (b * np.tanh(x) + d * _sech(x), b * _sech(x) ** 2 - d * _sech(x) * np.tanh(x)),
            displayed=lambda fp, x: (
                fp.eps**2 * np.tanh(x) ** 2
                + fp.rho * (2 * fp.eps + 1) * np.tanh(x) * _sech(x)
                + (fp.rho**2 - fp.eps) * _sech(x) ** 2,
                fp.eps**2 * np.tanh(x) ** 2
                + fp.rho * (2 * fp.eps - 1) * np.tanh(x) * _sech(x)
                + (fp.rho**2 + fp.eps) * _sech(x) ** 2,
            ),
            remainder=_r_plus,
            ranges=(_EPS_POS,),
        ),
        Family(
            id=FamilyId.POSCHL_TELLER,
            label="Poschl-Teller type, k = eps coth x - rho csch x",
            alpha=1.0,
            fold="plus",
            domain=_HALF_LINE,
            k=lambda fp, x: (
                fp.eps * _coth(x) - fp.rho * _csch(x),
                -fp.eps * _csch(x) ** 2 + fp.rho * _csch(x) * _coth(x),
            ),
            g=lambda x: (_coth(x), -_csch(x) ** 2),
            v=lambda b, d, x: (b * _coth(x) - d * _csch(x), -b * _csch(x) ** 2 + d * _csch(x) * _coth(x)),
            displayed=lambda fp, x: (
                fp.eps**2 * _coth(x) ** 2
                - fp.rho * (2 * fp.eps + 1) * _coth(x) * _csch(x)
                + (fp.rho**2 + fp.eps) * _csch(x) ** 2,
                fp.eps**2 * _coth(x) ** 2
                - fp.rho * (2 * fp.eps - 1) * _coth(x) * _csch(x)
                + (fp.rho**2 - fp.eps) * _csch(x) ** 2,
            ),
            remainder=_r_plus,
            ranges=(("eps - rho < 1/2", lambda fp: fp.eps - fp.rho < 0.5), _EPS_POS),
        ),
        Family(
            id=FamilyId.MORSE,
            label="Morse type, k = eps - rho exp(-x)",
            alpha=1.0,
            fold="plus",
            domain=Domain(lo=-math.inf, hi=math.inf, window=(-5.0, 25.0)),
            k=lambda fp, x: (fp.eps - fp.rho * np.exp(-x), fp.rho * np.exp(-x)),
            g=lambda x: (np.ones_like(x), np.zeros_like(x)),
            v=lambda b, d, x: (b - d * np.exp(-x), d * np.exp(-x)),
            displayed=lambda fp, x: (
                fp.rho**2 * np.exp(-2 * x) - fp.rho * (2 * fp.eps + 1) * np.exp(-x) + fp.eps**2,
                fp.rho**2 * np.exp(-2 * x) - fp.rho * (2 * fp.eps - 1) * np.exp(-x) + fp.eps**2,
            ),
            remainder=_r_plus,
            ranges=(_EPS_POS, ("rho > 0", lambda fp: fp.rho > 0)),
        ),
        Family(
            id=FamilyId.MORSE_MIRROR,
            label="mirrored Morse type, k = -eps - rho exp(x)",
            alpha=1.0,
            fold="plus",
            domain=Domain(lo=-math.inf, hi=math.inf, window=(-25.0, 5.0)),
            k=lambda fp, x: (-fp.eps - fp.rho * np.exp(x), -fp.rho * np.exp(x)),
            g=lambda x: (-np.ones_like(x), np.zeros_like(x)),
            v=lambda b, d, x: (-b - d * np.exp(x), -d * np.exp(x)),
            displayed=lambda fp, x: (
                fp.rho**2 * np.exp(2 * x) + fp.rho * (2 * fp.eps + 1) * np.exp(x) + fp.eps**2,
                fp.rho**2 * np.exp(2 * x) + fp.rho * (2 * fp.eps - 1) * np.exp(x) + fp.eps**2,
            ),
            remainder=_r_plus,
            ranges=(_EPS_POS, ("rho < 0", lambda fp: fp.rho < 0)),
        ),
        Family(
            id=FamilyId.RADIAL_OSC,
            label="radial oscillator type, k = eps/x + rho x",
            alpha=0.0,
            fold="radial",
            domain=Domain(lo=0.0, hi=math.inf, window=(0.0, 8.0)),
            k=lambda fp, x: (fp.eps / x + fp.rho * x, -fp.eps / x**2 + fp.rho),
            g=lambda x: (1.0 / x, -1.0 / x**2),
            v=lambda b, d, x: (b / 2 * x + d / x, b / 2 - d / x**2),
            displayed=lambda fp, x: (
                fp.rho**2 * x**2 + fp.rho * (2 * fp.eps - 1) + fp.eps * (fp.eps + 1) / x**2,
                fp.rho**2 * x**2 + fp.rho * (2 * fp.eps + 1) + fp.eps * (fp.eps - 1) / x**2,
            ),
            remainder=lambda fp: 4 * fp.rho,
            ranges=(_EPS_HALF, ("rho > 0", lambda fp: fp.rho > 0)),
        ),
        Family(
            id=FamilyId.HARM_OSC,
            label="harmonic oscillator type, k = beta x + rho",
            alpha=0.0,
            fold="osc",
            domain=Domain(lo=-math.inf, hi=math.inf, window=(-8.0, 8.0)),
            k=lambda fp, x: (fp.beta * x + fp.rho, fp.beta * np.ones_like(x)),
            g=lambda x: (np.zeros_like(x), np.zeros_like(x)),
            v=lambda b, d, x: (b * x + d, b * np.ones_like(x)),
            displayed=lambda fp, x: (
                fp.rho**2 + 2 * fp.rho * fp.beta * x + fp.beta * (fp.beta * x**2 - 1),
                fp.rho**2 + 2 * fp.rho * fp.beta * x + fp.beta * (fp.beta * x**2 + 1),
            ),
            remainder=lambda fp: 2 * fp.beta,
            ranges=(("beta > 0", lambda fp: fp.beta > 0),),
        ),
        Family(
            id=FamilyId.SCARF1,
            label="Scarf I type, k = -eps tan x - rho sec x",
            alpha=-1.0,
            fold="minus",
            domain=_SYM,
            k=lambda fp, x: (
                -fp.eps * np.tan(x) - fp.rho * _sec(x),
                -fp.eps * _sec(x) ** 2 - fp.rho * _sec(x) * np.tan(x),
            ),
            g=lambda x: (-np.tan(x), -_sec(x) ** 2),
            v=lambda b, d, x: (b * np.tan(x) - d * _sec(x), b * _sec(x) ** 2 - d * _sec(x) * np.tan(x)),
            displayed=lambda fp, x: (
                fp.eps**2 * np.tan(x) ** 2
                + fp.rho * (2 * fp.eps + 1) * np.tan(x) * _sec(x)
                + (fp.rho**2 + fp.eps) * _sec(x) ** 2,
                fp.eps**2 * np.tan(x) ** 2
                + fp.rho * (2 * fp.eps - 1) * np.tan(x) * _sec(x)
                + (fp.rho**2 - fp.eps) * _sec(x) ** 2,
            ),
            remainder=_r_minus,
            ranges=(_EPS_HALF, _SCARF1_RHO),
        ),
        Family(
            id=FamilyId.SCARF1_COT,
            label="trigonometric Scarf type, k = eps cot x + rho csc x",
            alpha=-1.0,
            fold="minus",
            domain=_ARC,
            k=lambda fp, x: (
                fp.eps * _cot(x) + fp.rho * _csc(x),
                -fp.eps * _csc(x) ** 2 - fp.rho * _csc(x) * _cot(x),
            ),
            g=lambda x: (_cot(x), -_csc(x) ** 2),
            v=lambda b, d, x: (-b * _cot(x) + d * _csc(x), b * _csc(x) ** 2 - d * _csc(x) * _cot(x)),
            displayed=lambda fp, x: (
                fp.eps**2 * _cot(x) ** 2
                + fp.rho * (2 * fp.eps + 1) * _cot(x) * _csc(x)
                + (fp.rho**2 + fp.eps) * _csc(x) ** 2,
                fp.eps**2 * _cot(x) ** 2
                + fp.rho * (2 * fp.eps - 1) * _cot(x) * _csc(x)
                + (fp.rho**2 - fp.eps) * _csc(x) ** 2,
            ),
            remainder=_r_minus,
            ranges=(_EPS_HALF, _SCARF1_RHO),
        ),
        Family(
            id=FamilyId.ROSEN_MORSE2,
            label="Rosen-Morse II type, k = eps tanh x + rho/eps",
            alpha=1.0,
            fold="general",
            domain=_LINE,
            k=lambda fp, x: (fp.eps * np.tanh(x) + fp.rho / fp.eps, fp.eps * _sech(x) ** 2),
            g=lambda x: (np.tanh(x), _sech(x) ** 2),
            v=None,
            displayed=lambda fp, x: (
                fp.eps**2 * np.tanh(x) ** 2 + 2 * fp.rho * np.tanh(x) - fp.eps * _sech(x) ** 2 + fp.rho**2 / fp.eps**2,
                fp.eps**2 * np.tanh(x) ** 2 + 2 * fp.rho * np.tanh(x) + fp.eps * _sech(x) ** 2 + fp.rho**2 / fp.eps**2,
            ),
            remainder=lambda fp: 1 + 2 * fp.eps + _r_shift(fp),
            ranges=(
                _EPS_NONZERO,
                ("eps > rho/eps", lambda fp: fp.eps > fp.rho / fp.eps),
                ("eps + rho/eps > 0", lambda fp: fp.eps + fp.rho / fp.eps > 0),
            ),
        ),
        Family(
            id=FamilyId.ECKART,
            label="Eckart type, k = eps coth x + rho/eps",
            alpha=1.0,
            fold="general",
            domain=_HALF_LINE,
            k=lambda fp, x: (fp.eps * _coth(x) + fp.rho / fp.eps, -fp.eps * _csch(x) ** 2),
            g=lambda x: (_coth(x), -_csch(x) ** 2),
            v=None,
            displayed=lambda fp, x: (
                fp.eps**2 * _coth(x) ** 2 + 2 * fp.rho * _coth(x) + fp.eps * _csch(x) ** 2 + fp.rho**2 / fp.eps**2,
                fp.eps**2 * _coth(x) ** 2 + 2 * fp.rho * _coth(x) - fp.eps * _csch(x) ** 2 + fp.rho**2 / fp.eps**2,
            ),
            remainder=lambda fp: 1 + 2 * fp.eps + _r_shift(fp),
            ranges=(
                _EPS_NONZERO,
                _EPS_HALF,
                ("eps + rho/eps > 0", lambda fp: fp.eps + fp.rho / fp.eps > 0),
            ),
        ),
        Family(
            id=FamilyId.COULOMB,
            label="Coulomb type, k = eps/x + rho/eps",
            alpha=0.0,
            fold="general",
            domain=Domain(lo=0.0, hi=math.inf, window=(0.0, 40.0)),
            k=lambda fp, x: (fp.eps / x + fp.rho / fp.eps, -fp.eps / x**2),
            g=lambda x: (1.0 / x, -1.0 / x**2),
            v=None,
            displayed=lambda fp, x: (
                2 * fp.rho / x + fp.eps * (fp.eps + 1) / x**2 + fp.rho**2 / fp.eps**2,
                2 * fp.rho / x + fp.eps * (fp.eps - 1) / x**2 + fp.rho**2 / fp.eps**2,
            ),
            remainder=_r_shift,
            ranges=(_EPS_NONZERO, _EPS_HALF, ("rho/eps > 0", lambda fp: fp.rho / fp.eps > 0)),
        ),
        Family(
            id=FamilyId.ROSEN_MORSE1,
            label="Rosen-Morse I type, k = -eps tan x + rho/eps",
            alpha=-1.0,
            fold="general",
            domain=_SYM,
            k=lambda fp, x: (-fp.eps * np.tan(x) + fp.rho / fp.eps, -fp.eps * _sec(x) ** 2),
            g=lambda x: (-np.tan(x), -_sec(x) ** 2),
            v=None,
            displayed=lambda fp, x: (
                fp.eps**2 * np.tan(x) ** 2 - 2 * fp.rho * np.tan(x) + fp.eps * _sec(x) ** 2 + fp.rho**2 / fp.eps**2,
                fp.eps**2 * np.tan(x) ** 2 - 2 * fp.rho * np.tan(x) - fp.eps * _sec(x) ** 2 + fp.rho**2 / fp.eps**2,
            ),
            remainder=lambda fp: -1 - 2 * fp.eps + _r_shift(fp),
            ranges=(_EPS_NONZERO, _EPS_HALF),
        ),
        Family(
            id=FamilyId.ROSEN_MORSE1_COT,
            label="trigonometric Rosen-Morse type, k = eps cot x + rho/eps",
            alpha=-1.0,
            fold="general",
            domain=_ARC,
            k=lambda fp, x: (fp.eps * _cot(x) + fp.rho / fp.eps, -fp.eps * _csc(x) ** 2),
            g=lambda x: (_cot(x), -_csc(x) ** 2),
            v=None,
            displayed=lambda fp, x: (
                fp.eps**2 * _cot(x) ** 2 + 2 * fp.rho * _cot(x) + fp.eps * _csc(x) ** 2 + fp.rho**2 / fp.eps**2,
                fp.eps**2 * _cot(x) ** 2 + 2 * fp.rho * _cot(x) - fp.eps * _csc(x) ** 2 + fp.rho**2 / fp.eps**2,
            ),
            remainder=lambda fp: -1 - 2 * fp.eps + _r_shift(fp),
            ranges=(_EPS_NONZERO, _EPS_HALF),
        ),
    )
}


def family(fid: FamilyId | str) -> Family:
    return FAMILIES[FamilyId(fid)]


def validate(fp: FamilyParams) -> FamilyParams:
    fam = family(fp.id)
    for inequality, holds in fam.ranges:
        try:
            ok = holds(fp)
        except ZeroDivisionError:
            ok = False
        if not ok:
            values = {"beta": fp.beta, "rho": fp.rho} if fp.id is FamilyId.HARM_OSC else {"eps": fp.eps, "rho": fp.rho}
            raise RangeViolationError(fp.id.value, inequality, values)
    return fp


def direct(fid: FamilyId | str, eps: float = 0.0, rho: float = 0.0, beta: float = 0.0) -> FamilyParams:
    """Family from effective parameters given outright (no construction data)."""
    fam = family(fid)
    return validate(FamilyParams(id=fam.id, eps=eps, rho=rho, beta=beta, alpha=fam.alpha))


def _sums(data: ConstructionData) -> tuple[float, float]:
    beta_sum = 0.0
    d_sum = 0.0
    for c in data.couplings:
        if not c.invariant.verified:
            raise UnverifiedInvariantError(f"invariant '{c.invariant.source}' has not passed the invariance check")
        value = eval_invariant(c.invariant, data.p)
        beta_sum += c.beta * value
        d_sum += c.d * value
    return beta_sum, d_sum


def fold(fid: FamilyId | str, data: ConstructionData) -> FamilyParams:
    """Effective parameters of the family, before range validation."""
    fam = family(fid)
    beta_sum, d_sum = _sums(data)
    M = data.p.M
    eps = rho = beta = 0.0
    if fam.fold == "plus":
        eps, rho = M + beta_sum, d_sum
    elif fam.fold == "minus":
        eps, rho = M - beta_sum, d_sum
    elif fam.fold == "radial":
        eps, rho = M + d_sum, 0.5 * beta_sum
    elif fam.fold == "osc":
        beta, rho = beta_sum, d_sum
    else:
        if data.rho_invariant is None:
            raise ConfigError(f"{fam.id.value} needs a rho invariant")
        if not data.rho_invariant.verified:
            raise UnverifiedInvariantError(f"invariant '{data.rho_invariant.source}' has not passed the invariance check")
        eps, rho = M + d_sum, eval_invariant(data.rho_invariant, data.p)
    logger.debug("%s: M=%.17g eps=%.17g rho=%.17g beta=%.17g", fam.id.value, M, eps, rho, beta)
    return FamilyParams(id=fam.id, eps=eps, rho=rho, beta=beta, alpha=fam.alpha, provenance=data)


def build_family(fid: FamilyId | str, data: ConstructionData) -> FamilyParams:
    return validate(fold(fid, data))


def translate_family(fp: FamilyParams, t: int = 1) -> FamilyParams:
    if fp.provenance is not None:
        return build_family(fp.id, fp.provenance.translate(t))
    if fp.id is FamilyId.HARM_OSC:
        return fp
    return validate(fp.model_copy(update={"eps": fp.eps - t}))


def superpotential(fp: FamilyParams, x) -> Pair:
    fam = family(fp.id)
    fam.domain.check(x)
    return fam.k(fp, np.asarray(x, dtype=float))


def partner_potentials(fp: FamilyParams, x) -> Pair:
    k, dk = superpotential(fp, x)
    return k * k - dk, k * k + dk


def expanded_partner_potentials(fp: FamilyParams, x) -> Pair:
    """Each family's expanded V and V-tilde, evaluated without going through k."""
    fam = family(fp.id)
    fam.domain.check(x)
    return fam.displayed(fp, np.asarray(x, dtype=float))


def remainder(fp: FamilyParams) -> float:
    return float(family(fp.id).remainder(fp))


def construction_remainder(data: ConstructionData, fid: FamilyId | str) -> float:
    """(2M + 1) alpha + 2 sum_j beta_j I_j."""
    beta_sum, _ = _sums(data)
    return (2 * data.p.M + 1) * family(fid).alpha + 2 * beta_sum


def g_function(fid: FamilyId | str, x) -> Pair:
    return family(fid).g(np.asarray(x, dtype=float))


def v_function(fid: FamilyId | str, beta: float, d: float, x) -> Pair:
    fam = family(fid)
    if fam.v is None:
        raise ConfigError(f"{fam.id.value} has no v_j functions")
    return fam.v(beta, d, np.asarray(x, dtype=float))


def generic_superpotential(fid: FamilyId | str, data: ConstructionData, x) -> Pair:
    """k = sum_j I_j v_j + M G straight from G and the v_j, before folding into (eps, rho)."""
    fam = family(fid)
    xs = np.asarray(x, dtype=float)
    G, dG = g_function(fam.id, xs)
    k = data.p.M * G
    dk = data.p.M * dG
    for c in data.couplings:
        value = eval_invariant(c.invariant, data.p)
        v, dv = v_function(fam.id, c.beta, c.d, xs)
        k = k + value * v
        dk = dk + value * dv
    return k, dk


def expanded_potentials(fid: FamilyId | str, data: ConstructionData, x) -> Pair:
    """V and V-tilde in the expanded form M(M +- 1)G^2 + (2M +- 1) I_j v_j G + (I_j v_j)^2 -+ (M alpha + beta_j I_j)."""
    fam = family(fid)
    xs = np.asarray(x, dtype=float)
    G, _ = g_function(fam.id, xs)
    S = np.zeros_like(xs)
    B = 0.0
    for c in data.couplings:
        value = eval_invariant(c.invariant, data.p)
        S = S + value * v_function(fam.id, c.beta, c.d, xs)[0]
        B += c.beta * value
    M = data.p.M
    V = M * (M + 1) * G**2 + (2 * M + 1) * S * G + S**2 - M * fam.alpha - B
    Vt = M * (M - 1) * G**2 + (2 * M - 1) * S * G + S**2 + M * fam.alpha + B
    return V, Vt


CLASSIC = ("PT1", "PT2")


def classic_reconstruction(which: str, m1: float, m2: float, x) -> Pair:
    """M G + I_1 v_1 with G, v_1 on the doubled argument, against the two-parameter closed form.

    PT2: G = 2 coth 2x, v_1 = 2 csch 2x vs m1 tanh x + m2 coth x on (0, inf);
    PT1: G = 2 cot 2x, v_1 = 2 csc 2x vs -m1 tan x + m2 cot x on (0, pi/2).
    """
    xs = np.asarray(x, dtype=float)
    M = 0.5 * (m1 + m2)
    invariant = 0.5 * (m2 - m1)
    if which == "PT2":
        Domain(lo=0.0, hi=math.inf, window=(0.0, 10.0)).check(xs)
        lhs = M * 2 * _coth(2 * xs) + invariant * 2 * _csch(2 * xs)
        rhs = m1 * np.tanh(xs) + m2 * _coth(xs)
    elif which == "PT1":
        Domain(lo=0.0, hi=math.pi / 2, window=(0.0, math.pi / 2)).check(xs)
        lhs = M * 2 * _cot(2 * xs) + invariant * 2 * _csc(2 * xs)
        rhs = -m1 * np.tan(xs) + m2 * _cot(xs)
    else:
        raise ConfigError(f"unknown classic superpotential '{which}', expected one of {CLASSIC}")
    return lhs, rhs
