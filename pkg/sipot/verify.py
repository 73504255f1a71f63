"""Numerical oracles: grid residuals, quadrature and a finite-difference eigensolver.

Nothing here trusts the closed forms it checks. Residuals are reported as
``GridReport``s; points where the residual is not finite are excluded and
counted rather than silently dropped.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sipot.errors import ConvergenceError, DomainError, InadmissibleStateError
from sipot.families import Domain, FamilyParams, family, partner_potentials, remainder, superpotential, translate_family
from sipot.spectra import admissible_range, eigenenergy, wavefunction

logger = logging.getLogger(__name__)

SI_TOL = 1e-9
LADDER_TOL = 1e-5
NORM_TOL = 1e-6
SCHRODINGER_TOL = 1e-5
FD_STEP = 1e-4
TAIL_CUTOFF = 1e-16
TRUNCATION_CUTOFF = 1e-12
MAX_DEPTH = 40

_NODES = {n: leggauss(n) for n in (10, 20)}


class GridReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_residual: float = Field(ge=0.0)
    mean_residual: float = Field(ge=0.0)
    argmax_x: float
    points_used: int = Field(ge=0)
    points_excluded: int = Field(ge=0)
    tol: float | None = None
    sign: int | None = None

    @property
    def passed(self) -> bool:
        return self.tol is None or self.max_residual <= self.tol


class OracleSpec(BaseModel):
    """Dirichlet box [a, b] sampled with n points (endpoints included)."""

    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    n: int = Field(default=3000, ge=500)

    @model_validator(mode="after")
    def _ordered(self) -> "OracleSpec":
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"oracle box must be finite with a < b, got [{self.a}, {self.b}]")
        return self

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)


def grid_report(residual, x, tol: float | None = None, excluded=None, sign: int | None = None) -> GridReport:
    residual = np.abs(np.asarray(residual, dtype=float))
    xs = np.asarray(x, dtype=float)
    keep = np.isfinite(residual)
    if excluded is not None:
        keep &= ~np.asarray(excluded, dtype=bool)
    dropped = int(residual.size - np.count_nonzero(keep))
    if dropped:
        logger.warning("excluded %d of %d grid points", dropped, residual.size)
    if not keep.any():
        raise DomainError("every grid point was excluded")
    used = residual[keep]
    i = int(np.argmax(used))
    report = GridReport(
        max_residual=float(used[i]),
        mean_residual=float(used.mean()),
        argmax_x=float(xs[keep][i]),
        points_used=int(used.size),
        points_excluded=dropped,
        tol=tol,
        sign=sign,
    )
    logger.debug("grid report: max=%.3e mean=%.3e at x=%.6g", report.max_residual, report.mean_residual, report.argmax_x)
    return report


def default_grid(fp: FamilyParams, n: int = 2001) -> np.ndarray:
    return family(fp.id).domain.grid(n)


def si_residual(fp: FamilyParams, grid=None, tol: float = SI_TOL) -> GridReport:
    """|V~(x; fp) - V(x; fp down) - R(fp down)| / (1 + |V(x; fp down)|)."""
    x = default_grid(fp) if grid is None else np.asarray(grid, dtype=float)
    down = translate_family(fp, 1)
    _, v_tilde = partner_potentials(fp, x)
    v_down, _ = partner_potentials(down, x)
    residual = np.abs(v_tilde - v_down - remainder(down)) / (1.0 + np.abs(v_down))
    return grid_report(residual, x, tol)


def si_residual_up(fp: FamilyParams, grid=None, tol: float = SI_TOL) -> GridReport:
    """The same identity one step up: V~(fp up) - V(fp) - R(fp)."""
    x = default_grid(fp) if grid is None else np.asarray(grid, dtype=float)
    up = translate_family(fp, -1)
    _, v_tilde = partner_potentials(up, x)
    v, _ = partner_potentials(fp, x)
    residual = np.abs(v_tilde - v - remainder(fp)) / (1.0 + np.abs(v))
    return grid_report(residual, x, tol)


def _sturm_count(diag: np.ndarray, off2: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each shift (LDL^T inertia)."""
    tiny = np.finfo(float).tiny
    d = diag[0] - shifts
    count = (d < 0).astype(int)
    for i in range(1, diag.size):
        d = np.where(d == 0.0, tiny, d)
        d = diag[i] - shifts - off2[i - 1] / d
        count += d < 0
    return count


def tridiagonal_eigenvalues(diag, off, count: int, rel_tol: float = 1e-13, max_iter: int = 200) -> list[float]:
    """Lowest ``count`` eigenvalues of a symmetric tridiagonal matrix by Sturm bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    count = min(count, diag.size)
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo = np.full(count, float(np.min(diag - radius)))
    hi = np.full(count, float(np.max(diag + radius)))
    target = np.arange(count)
    off2 = off * off
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = _sturm_count(diag, off2, mid)
        # eigenvalue number j lies below mid iff more than j eigenvalues do
        left = below > target
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        if np.all(hi - lo <= rel_tol * np.maximum(1.0, np.abs(mid))):
            return [float(v) for v in 0.5 * (lo + hi)]
    raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")


def _truncation(fp: FamilyParams) -> tuple[float, float]:
    """Box for infinite ends: ground state below 1e-12 of its peak, never inside the family window."""
    fam = family(fp.id)
    dom = fam.domain
    a = dom.lo + dom.delta if math.isfinite(dom.lo) else dom.window[0]
    b = dom.hi - dom.delta if math.isfinite(dom.hi) else dom.window[1]
    if math.isfinite(dom.lo) and math.isfinite(dom.hi) or not len(admissible_range(fp)):
        return a, b
    ground = wavefunction(fp, 0)
    peak = float(np.max(np.abs(ground(np.linspace(a, b, 801)))))
    step = 0.25 * (dom.window[1] - dom.window[0])
    for _ in range(200):
        if math.isfinite(dom.lo) or abs(ground(a)) < TRUNCATION_CUTOFF * peak:
            break
        a -= step
    for _ in range(200):
        if math.isfinite(dom.hi) or abs(ground(b)) < TRUNCATION_CUTOFF * peak:
            break
        b += step
    return a, b


def oracle_for(fp: FamilyParams, n: int = 3000) -> OracleSpec:
    a, b = _truncation(fp)
    return OracleSpec(a=a, b=b, n=n)


def fd_spectrum(potential: FamilyParams | Callable[[np.ndarray], np.ndarray], oracle: OracleSpec, count: int = 3) -> list[float]:
    """Lowest eigenvalues of -d^2/dx^2 + V on the oracle box with Dirichlet ends."""
    x = np.linspace(oracle.a, oracle.b, oracle.n)[1:-1]
    if isinstance(potential, FamilyParams):
        values = partner_potentials(potential, x)[0]
    else:
        values = np.real(np.asarray(potential(x)))
    if not np.all(np.isfinite(values)):
        bad = x[~np.isfinite(values)][0]
        raise DomainError(f"potential is not finite at x={bad:.17g}")
    h2 = oracle.h**2
    diag = 2.0 / h2 + values
    off = np.full(x.size - 1, -1.0 / h2)
    eigenvalues = tridiagonal_eigenvalues(diag, off, count)
    logger.info("fd spectrum on [%g, %g] with N=%d: %s", oracle.a, oracle.b, oracle.n, eigenvalues)
    return eigenvalues


def _gauss(f, a: float, b: float, n: int) -> float:
    nodes, weights = _NODES[n]
    half = 0.5 * (b - a)
    return float(half * np.dot(weights, f(half * nodes + 0.5 * (a + b))))


def _extend_tail(f, anchor: float, step: float, peak: float) -> float:
    x = anchor
    for _ in range(200):
        if np.max(np.abs(f(np.linspace(x, x + step, 33)))) < TAIL_CUTOFF * peak:
            return x
        x += step
    raise ConvergenceError(f"integrand tail does not fall below {TAIL_CUTOFF:g} of its peak")


def quadrature(f: Callable[[np.ndarray], np.ndarray], domain: Domain | tuple[float, float], tol: float = 1e-10, panels: int = 32) -> float:
    """Adaptive composite Gauss-Legendre (10 against 20 nodes per panel)."""
    if isinstance(domain, Domain):
        lo, hi, window = domain.lo, domain.hi, domain.window
    else:
        lo, hi = domain
        left = lo if math.isfinite(lo) else (hi - 16.0 if math.isfinite(hi) else -8.0)
        window = (left, hi if math.isfinite(hi) else left + 16.0)
    a = lo if math.isfinite(lo) else window[0]
    b = hi if math.isfinite(hi) else window[1]
    if not (math.isfinite(lo) and math.isfinite(hi)):
        sample = np.linspace(a, b, 401)[1:-1]
        peak = float(np.max(np.abs(f(sample))))
        width = b - a
        if not math.isfinite(lo):
            a = -_extend_tail(lambda t: f(-t), -a, 0.25 * width, peak)
        if not math.isfinite(hi):
            b = _extend_tail(f, b, 0.25 * width, peak)
    edges = np.linspace(a, b, panels + 1)
    # panels at an integrable endpoint singularity stop halving their share here
    floor = tol * 2.0**-10 / panels
    stack = [(float(l), float(r), tol / panels, 0) for l, r in zip(edges[:-1], edges[1:])]
    total = 0.0
    while stack:
        l, r, local, depth = stack.pop()
        coarse = _gauss(f, l, r, 10)
        fine = _gauss(f, l, r, 20)
        if abs(fine - coarse) <= max(local, 1e-15 * abs(fine)):
            total += fine
            continue
        if depth >= MAX_DEPTH:
            raise ConvergenceError(f"quadrature did not converge on [{l:.6g}, {r:.6g}] after depth {MAX_DEPTH}")
        m = 0.5 * (l + r)
        stack.append((l, m, max(local / 2, floor), depth + 1))
        stack.append((m, r, max(local / 2, floor), depth + 1))
    return total


def _interior(fp: FamilyParams, n: int) -> np.ndarray:
    """Grid kept clear of singular endpoints so 5-point stencils stay accurate."""
    dom = family(fp.id).domain
    a, b = _truncation(fp)
    if math.isfinite(dom.lo):
        a = dom.lo + max(dom.delta, 0.05 * min(1.0, dom.hi - dom.lo))
    if math.isfinite(dom.hi):
        b = dom.hi - max(dom.delta, 0.05 * min(1.0, dom.hi - dom.lo))
    return np.linspace(a, b, n)


def _d1(f, x: np.ndarray, h: float) -> np.ndarray:
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _d2(f, x: np.ndarray, h: float) -> np.ndarray:
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)


def derivative_check(fp: FamilyParams, grid=None, h: float = FD_STEP, tol: float = 1e-7) -> GridReport:
    """Closed-form k' against 5-point central differences."""
    x = _interior(fp, 401) if grid is None else np.asarray(grid, dtype=float)
    _, dk = superpotential(fp, x)
    fd = _d1(lambda t: superpotential(fp, t)[0], x, h)
    return grid_report(np.abs(dk - fd) / np.maximum(1.0, np.abs(dk)), x, tol)


def ladder_check(fp: FamilyParams, k: int, grid=None, h: float = FD_STEP, tol: float = LADDER_TOL) -> GridReport:
    """A+ zeta_{k-1}(fp down) against sqrt(E_k) zeta_k(fp), up to a global sign."""
    if k < 1:
        raise InadmissibleStateError("the ladder check needs k >= 1")
    upper = wavefunction(fp, k)
    lower = wavefunction(translate_family(fp, 1), k - 1)
    x = _interior(fp, 401) if grid is None else np.asarray(grid, dtype=float)
    kx, _ = superpotential(fp, x)
    raised = -_d1(lower, x, h) + kx * lower(x)
    target = math.sqrt(upper.energy) * upper(x)
    scale = max(float(np.max(np.abs(target))), np.finfo(float).tiny)
    plus = np.abs(raised - target) / scale
    minus = np.abs(raised + target) / scale
    sign = 1 if np.max(plus) <= np.max(minus) else -1
    logger.info("%s ladder k=%d matched with sign %+d", fp.id.value, k, sign)
    return grid_report(plus if sign > 0 else minus, x, tol, sign=sign)


class GramReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    indices: list[int]
    matrix: list[list[float]]
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def orthonormality(fp: FamilyParams, count: int = 4, tol: float = NORM_TOL) -> GramReport:
    indices = list(admissible_range(fp))[:count]
    if not indices:
        raise InadmissibleStateError(f"{fp.id.value} has no admissible states at eps={fp.eps:.17g}, rho={fp.rho:.17g}")
    states = [wavefunction(fp, k) for k in indices]
    domain = family(fp.id).domain
    gram = np.eye(len(states))
    for i, si in enumerate(states):
        for j in range(i, len(states)):
            sj = states[j]
            value = quadrature(lambda x: si(x) * sj(x), domain, tol=1e-10)
            gram[i, j] = gram[j, i] = value
    deviation = float(np.max(np.abs(gram - np.eye(len(states)))))
    logger.info("%s gram matrix over k=%s: max deviation %.3e", fp.id.value, indices, deviation)
    return GramReport(indices=indices, matrix=gram.tolist(), max_deviation=deviation, tol=tol)


def schrodinger_residual(fp: FamilyParams, k: int, grid=None, h: float = 1e-3, tol: float = SCHRODINGER_TOL) -> GridReport:
    """max |-zeta'' + (V - E_k) zeta| / max |zeta| with a 5-point second difference."""
    state = wavefunction(fp, k)
    x = _interior(fp, 801) if grid is None else np.asarray(grid, dtype=float)
    values = state(x)
    v, _ = partner_potentials(fp, x)
    residual = np.abs(-_d2(state, x, h) + (v - eigenenergy(fp, k)) * values)
    return grid_report(residual / max(float(np.max(np.abs(values))), np.finfo(float).tiny), x, tol)


def node_count(fp: FamilyParams, k: int, n: int = 4001) -> int:
    state = wavefunction(fp, k)
    x = _interior(fp, n)
    values = state(x)
    significant = values[np.abs(values) > 1e-10 * np.max(np.abs(values))]
    return int(np.count_nonzero(np.signbit(significant[1:]) != np.signbit(significant[:-1])))


def norm_of(fp: FamilyParams, k: int) -> float:
    state = wavefunction(fp, k)
    return quadrature(lambda x: state(x) ** 2, family(fp.id).domain)


def spectrum_gaps(fp: FamilyParams, count: int = 3, n: int = 3000) -> list[float]:
    """FD eigenvalue gaps E_k - E_0 for the first ``count`` states."""
    eigenvalues = fd_spectrum(fp, oracle_for(fp, n), count)
    return [e - eigenvalues[0] for e in eigenvalues]
