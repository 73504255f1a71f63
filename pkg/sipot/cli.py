"""Command-line front end.

A job is one JSON document (``--config``) validated into ``JobConfig``; the
inline flags and ``--preset`` fill or override its fields. Exit codes: 0 pass,
1 tolerance failure, 2 validation or config error, 3 numerical failure.
"""

from __future__ import annotations

import functools
import json
import logging
import math
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
import typer
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from rich.console import Console
from rich.table import Table

from sipot import extensions, invariants, verify
from sipot.errors import EXIT_OK, EXIT_TOLERANCE, ConfigError, SipotError
from sipot.extensions import ExtensionSpec, build_extension, direct_extension
from sipot.families import (
    FAMILIES,
    ConstructionData,
    Coupling,
    FamilyId,
    FamilyParams,
    build_family,
    classic_reconstruction,
    direct,
    family,
    partner_potentials,
)
from sipot.invariants import PERIODIC_ONE_PARAM, PT_CLASSIC, THREE_PARAM, InvariantExpr, ParamVector, verified
from sipot.log import configure_logging
from sipot.report import dumps, to_csv
from sipot.spectra import admissible_range, eigenenergy, wavefunction

logger = logging.getLogger(__name__)

app = typer.Typer(help="Shape-invariant superpotentials: spectra, eigenfunctions and identity checks.", no_args_is_help=True)
families_app = typer.Typer(help="The family and extension catalogue.", no_args_is_help=True)
oracle_app = typer.Typer(help="Finite-difference cross-checks of the closed forms.", no_args_is_help=True)
app.add_typer(families_app, name="families")
app.add_typer(oracle_app, name="oracle")

console = Console()
err_console = Console(stderr=True)

DEFAULT_KMAX = 5
DEFAULT_SEED = 20240617
INVARIANCE_TRIALS = 64
# a job overrides any of these through its "tolerances" block or --tol
DEFAULT_TOLERANCES: dict[str, float] = {
    "invariance": invariants.DEFAULT_TOL,
    "si": verify.SI_TOL,
    "ladder": verify.LADDER_TOL,
    "norm": verify.NORM_TOL,
    "cond1": extensions.COND1_TOL,
    "cond2": extensions.COND2_TOL,
    "ext_si": extensions.EXT_SI_TOL,
    "oracle": 5e-3,
    "classic": 1e-12,
}


class Check(StrEnum):
    SI = "si"
    COND1 = "cond1"
    COND2 = "cond2"
    EXT_SI = "ext-si"
    LADDER = "ladder"
    ORTHONORMAL = "orthonormal"
    CLASSIC = "classic"


class CouplingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    invariant: str = "1"
    beta: float = 0.0
    d: float = 0.0


class GridConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float
    b: float
    n: int = Field(default=2001, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridConfig":
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridConfig":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"--grid expects a,b,N, got '{text}'")
        try:
            return cls(a=float(parts[0]), b=float(parts[1]), n=int(parts[2]))
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"--grid '{text}': {exc}") from exc

    def points(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)


class JobConfig(BaseModel):
    """One job: what to build, where to sample it, how to report."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: FamilyId | None = None
    extension: str | None = Field(default=None, pattern=r"^ext-(?:[1-9]|1[01])$")
    classic: Literal["PT1", "PT2"] | None = None
    m: tuple[float, ...] = ()
    couplings: tuple[CouplingConfig, ...] = ()
    rho_invariant: str | None = None
    eps: float | None = None
    rho: float | None = None
    beta: float | None = None
    ell: int | None = None
    imaginary_rho: bool = False
    k: int = Field(default=0, ge=0)
    kmax: int | None = Field(default=None, ge=0)
    grid: GridConfig | None = None
    oracle: verify.OracleSpec | None = None
    output: Literal["table", "json", "csv"] = "table"
    tolerances: dict[str, float] = Field(default_factory=dict)
    seed: int = DEFAULT_SEED
    invariance_trials: int = Field(default=INVARIANCE_TRIALS, ge=1)

    @model_validator(mode="after")
    def _target(self) -> "JobConfig":
        chosen = [t for t in (self.family, self.extension, self.classic) if t is not None]
        if len(chosen) != 1:
            raise ValueError("exactly one of family, extension or classic is required")
        if self.classic is not None:
            if len(self.m) != 2:
                raise ValueError("classic reconstructions take m = (m1, m2)")
        elif not self.m and self.eps is None and self.beta is None:
            raise ValueError("give the parameter vector m or the effective parameters eps/rho/beta")
        return self

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value: dict[str, float]) -> dict[str, float]:
        unknown = sorted(set(value) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise ValueError(f"unknown tolerance names {unknown}, expected some of {sorted(DEFAULT_TOLERANCES)}")
        return value

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])


PRESETS: dict[str, dict[str, Any]] = {
    "scarf1-one-param": {
        "family": "scarf1",
        "m": [0.2],
        "couplings": [{"invariant": PERIODIC_ONE_PARAM, "beta": 0.05, "d": 0.1}],
    },
    "scarf1-three-param": {
        "family": "scarf1",
        "m": [0.1, 0.2, 0.3],
        "couplings": [{"invariant": THREE_PARAM, "beta": 0.05, "d": 0.1}],
    },
    "pt2-classic": {"classic": "PT2", "m": [1.5, 2.5]},
    "pt1-classic": {"classic": "PT1", "m": [1.0, 1.0]},
}


def load_job(config: Path | None, preset: str | None = None, **overrides: Any) -> JobConfig:
    """Preset, then the JSON document, then the non-empty inline flags."""
    raw: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}', expected one of {sorted(PRESETS)}")
        raw.update(PRESETS[preset])
    if config is not None:
        try:
            document = json.loads(config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read job config {config}: {exc}") from exc
        if not isinstance(document, dict):
            raise ConfigError(f"job config {config} must hold a JSON object")
        raw.update(document)
    raw.update({k: v for k, v in overrides.items() if v is not None and v != () and v != []})
    try:
        return JobConfig.model_validate(raw)
    except ValidationError as exc:
        details = "; ".join(f"{'.'.join(str(p) for p in e['loc']) or 'job'}: {e['msg']}" for e in exc.errors())
        raise ConfigError(f"invalid job config: {details}") from exc


def _invariant(source: str, n: int, cfg: JobConfig) -> InvariantExpr:
    return verified(source, n, trials=cfg.invariance_trials, tol=cfg.tol("invariance"), seed=cfg.seed)


def construction(cfg: JobConfig) -> ConstructionData | None:
    """Verify every invariant the job names, before anything is evaluated."""
    if not cfg.m:
        return None
    p = ParamVector.of(*cfg.m)
    couplings = tuple(
        Coupling(invariant=_invariant(c.invariant, p.n, cfg), beta=c.beta, d=c.d) for c in cfg.couplings or (CouplingConfig(),)
    )
    rho_invariant = _invariant(cfg.rho_invariant, p.n, cfg) if cfg.rho_invariant else None
    return ConstructionData(p=p, couplings=couplings, rho_invariant=rho_invariant)


def build_target(cfg: JobConfig) -> FamilyParams | ExtensionSpec:
    data = construction(cfg)
    if cfg.family is not None:
        if data is not None:
            return build_family(cfg.family, data)
        return direct(cfg.family, eps=cfg.eps or 0.0, rho=cfg.rho or 0.0, beta=cfg.beta or 0.0)
    if cfg.extension is None:
        raise ConfigError("this command needs a family or an extension")
    if data is not None:
        return build_extension(cfg.extension, data, ell=cfg.ell, imaginary_rho=cfg.imaginary_rho)
    return direct_extension(cfg.extension, eps=cfg.eps or 0.0, rho=cfg.rho or 0.0, ell=cfg.ell, imaginary_rho=cfg.imaginary_rho)


def require_family(cfg: JobConfig) -> FamilyParams:
    target = build_target(cfg)
    if not isinstance(target, FamilyParams):
        raise ConfigError(f"{cfg.extension} is an extension; this command needs a base or generalized family")
    return target


def require_extension(cfg: JobConfig) -> ExtensionSpec:
    if cfg.extension is None:
        raise ConfigError("this check applies to extensions only (pass --extension ext-N)")
    target = build_target(cfg)
    assert isinstance(target, ExtensionSpec)
    return target


def _describe(target: FamilyParams | ExtensionSpec) -> dict[str, Any]:
    if isinstance(target, FamilyParams):
        return {"family": target.id.value, "eps": target.eps, "rho": target.rho, "beta": target.beta}
    return {
        "extension": target.ext_id,
        "eps": target.eps,
        "rho": target.rho,
        "ell": target.ell,
        "imaginary_rho": target.imaginary_rho,
        "poles": list(target.poles),
    }


def guarded(func):
    """Map SipotError onto its exit code with a one-line message on stderr."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SipotError as exc:
            logger.error("%s: %s", type(exc).__name__, exc)
            err_console.print(f"[red]error:[/red] {exc}", highlight=False, markup=True)
            raise typer.Exit(exc.exit_code) from exc

    return wrapper


# --- shared options ----------------------------------------------------------

ConfigOpt = Annotated[Path | None, typer.Option("--config", help="JSON job document.")]
PresetOpt = Annotated[str | None, typer.Option("--preset", help="Worked example: " + ", ".join(PRESETS))]
FamilyOpt = Annotated[FamilyId | None, typer.Option("--family", help="Family id.")]
ExtensionOpt = Annotated[str | None, typer.Option("--extension", help="Extension id ext-1 ... ext-11.")]
MOpt = Annotated[list[float] | None, typer.Option("--m", help="Parameter m_i (repeat for m1, m2, ...).")]
InvariantOpt = Annotated[str | None, typer.Option("--invariant", help="Coupling invariant I_1 (default 1).")]
BetaOpt = Annotated[float | None, typer.Option("--beta", help="Coupling beta_1 (or HarmOsc beta with no --m).")]
DOpt = Annotated[float | None, typer.Option("--d", help="Coupling d_1.")]
RhoInvOpt = Annotated[str | None, typer.Option("--rho-invariant", help="Invariant giving rho for generalized families.")]
EpsOpt = Annotated[float | None, typer.Option("--eps", help="Effective eps given directly.")]
RhoOpt = Annotated[float | None, typer.Option("--rho", help="Effective rho given directly.")]
EllOpt = Annotated[int | None, typer.Option("--ell", help="Extension degree 1..8.")]
ImagOpt = Annotated[bool, typer.Option("--imaginary-rho", help="ext-11 only: rho -> i rho.")]
GridOpt = Annotated[str | None, typer.Option("--grid", help="Evaluation grid a,b,N.")]
TolOpt = Annotated[float | None, typer.Option("--tol", help="Override the check tolerance.")]
KmaxOpt = Annotated[int | None, typer.Option("--kmax", help="Highest state index.")]
JsonOpt = Annotated[bool, typer.Option("--json", help="Emit JSON.")]
CsvOpt = Annotated[bool, typer.Option("--csv", help="Emit CSV.")]


def _job(config, preset, fam, ext, m, invariant, beta, d, rho_invariant, eps, rho, ell, imaginary_rho, grid, **extra) -> JobConfig:
    overrides: dict[str, Any] = dict(extra)
    if fam is not None:
        overrides["family"] = fam.value
    overrides["extension"] = ext
    overrides["m"] = tuple(m) if m else None
    if m and (invariant is not None or beta is not None or d is not None):
        overrides["couplings"] = [{"invariant": invariant or "1", "beta": beta or 0.0, "d": d or 0.0}]
    elif not m:
        overrides["beta"] = beta
    overrides["rho_invariant"] = rho_invariant
    overrides["eps"] = eps
    overrides["rho"] = rho
    overrides["ell"] = ell
    overrides["imaginary_rho"] = imaginary_rho or None
    if grid is not None:
        overrides["grid"] = GridConfig.parse(grid).model_dump()
    return load_job(config, preset, **overrides)


def _output(cfg: JobConfig, as_json: bool, as_csv: bool) -> str:
    if as_json:
        return "json"
    if as_csv:
        return "csv"
    return cfg.output


@app.callback()
def main(
    log_level: Annotated[str | None, typer.Option("--log-level", help="Override SIPOT_LOG_LEVEL.")] = None,
) -> None:
    configure_logging(level=log_level)


@families_app.command("list")
@guarded
def list_families(
    with_extensions: Annotated[bool, typer.Option("--extensions", help="Include the 11 rational extensions.")] = False,
    as_json: JsonOpt = False,
) -> None:
    """The 13 families, optionally followed by the extensions."""
    rows: list[dict[str, Any]] = []
    for n, fam in enumerate(FAMILIES.values(), start=1):
        rows.append({"id": fam.id.value, "case": f"case{n}", "label": fam.label, "domain": [fam.domain.lo, fam.domain.hi]})
    if with_extensions:
        for c in extensions.CASES.values():
            rows.append({"id": f"ext-{c.case_id}", "case": f"ext{c.case_id}", "label": c.label, "domain": [c.domain.lo, c.domain.hi]})
    if as_json:
        typer.echo(dumps(rows))
        return
    table = Table(title="superpotential families")
    for column in ("id", "case", "label", "domain"):
        table.add_column(column)
    for row in rows:
        lo, hi = row["domain"]
        table.add_row(row["id"], row["case"], row["label"], f"({lo:.6g}, {hi:.6g})")
    console.print(table)


@app.command("spectrum")
@guarded
def spectrum_cmd(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    fam: FamilyOpt = None,
    m: MOpt = None,
    invariant: InvariantOpt = None,
    beta: BetaOpt = None,
    d: DOpt = None,
    rho_invariant: RhoInvOpt = None,
    eps: EpsOpt = None,
    rho: RhoOpt = None,
    kmax: KmaxOpt = None,
    oracle: Annotated[bool, typer.Option("--oracle", help="Add finite-difference gaps and deviations.")] = False,
    tol: TolOpt = None,
    as_json: JsonOpt = False,
    as_csv: CsvOpt = False,
) -> None:
    """Energies E_k for the admissible k <= kmax."""
    cfg = _job(config, preset, fam, None, m, invariant, beta, d, rho_invariant, eps, rho, None, False, None, kmax=kmax)
    fp = require_family(cfg)
    top = DEFAULT_KMAX if cfg.kmax is None else cfg.kmax
    ks = [k for k in admissible_range(fp) if k <= top]
    columns: dict[str, list[float]] = {"k": ks, "energy": [eigenenergy(fp, k) for k in ks]}
    exit_code = EXIT_OK
    if oracle and ks:
        spec = cfg.oracle or verify.oracle_for(fp)
        fd = verify.fd_spectrum(fp, spec, len(ks))
        columns["fd_gap"] = [e - fd[0] for e in fd]
        columns["deviation"] = [abs(g - e) for g, e in zip(columns["fd_gap"], columns["energy"])]
        limit = tol if tol is not None else cfg.tol("oracle")
        if max(columns["deviation"]) > limit:
            exit_code = EXIT_TOLERANCE
    logger.info("spectrum of %s: %d states", fp.id.value, len(ks))
    _emit_table(cfg, as_json, as_csv, _describe(fp), columns, title=f"{fp.id.value} spectrum")
    raise typer.Exit(exit_code)


def _emit_table(cfg: JobConfig, as_json: bool, as_csv: bool, header: dict[str, Any], columns: dict[str, list], title: str) -> None:
    fmt = _output(cfg, as_json, as_csv)
    if fmt == "json":
        rows = [dict(zip(columns, values)) for values in zip(*columns.values())]
        typer.echo(dumps({**header, "rows": rows}))
    elif fmt == "csv":
        typer.echo(to_csv(columns, header), nl=False)
    else:
        table = Table(title=title)
        for name in columns:
            table.add_column(name, justify="right")
        for values in zip(*columns.values()):
            table.add_row(*(str(v) if isinstance(v, int) else f"{v:.12g}" for v in values))
        console.print(table)


@app.command("wavefunction")
@guarded
def wavefunction_cmd(
    k: Annotated[int, typer.Option("--k", help="State index.")] = 0,
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    fam: FamilyOpt = None,
    m: MOpt = None,
    invariant: InvariantOpt = None,
    beta: BetaOpt = None,
    d: DOpt = None,
    rho_invariant: RhoInvOpt = None,
    eps: EpsOpt = None,
    rho: RhoOpt = None,
    grid: GridOpt = None,
    as_json: JsonOpt = False,
) -> None:
    """Sample zeta_k and V on a grid (CSV unless --json), with norm and imaginary-residue diagnostics."""
    cfg = _job(config, preset, fam, None, m, invariant, beta, d, rho_invariant, eps, rho, None, False, grid, k=k or None)
    fp = require_family(cfg)
    state = wavefunction(fp, cfg.k)
    x = cfg.grid.points() if cfg.grid is not None else family(fp.id).domain.grid(201)
    v, _ = partner_potentials(fp, x)
    header = {
        **_describe(fp),
        "k": cfg.k,
        "energy": state.energy,
        "norm": verify.norm_of(fp, cfg.k),
        "imag_residue": state.imaginary_residue(x),
    }
    columns = {"x": x.tolist(), "zeta": state(x).tolist(), "V": v.tolist()}
    if as_json or cfg.output == "json":
        typer.echo(dumps({**header, "x": columns["x"], "zeta": columns["zeta"], "V": columns["V"]}))
    else:
        typer.echo(to_csv(columns, header), nl=False)


@app.command("verify")
@guarded
def verify_cmd(
    which: Annotated[Check, typer.Argument(help="Identity to check.")],
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    fam: FamilyOpt = None,
    ext: ExtensionOpt = None,
    m: MOpt = None,
    invariant: InvariantOpt = None,
    beta: BetaOpt = None,
    d: DOpt = None,
    rho_invariant: RhoInvOpt = None,
    eps: EpsOpt = None,
    rho: RhoOpt = None,
    ell: EllOpt = None,
    imaginary_rho: ImagOpt = False,
    k: Annotated[int | None, typer.Option("--k", help="State index for the ladder check.")] = None,
    kmax: KmaxOpt = None,
    grid: GridOpt = None,
    tol: TolOpt = None,
    as_json: JsonOpt = False,
) -> None:
    """Run one identity check; exit 0 iff it holds within tolerance."""
    cfg = _job(config, preset, fam, ext, m, invariant, beta, d, rho_invariant, eps, rho, ell, imaginary_rho, grid, k=k, kmax=kmax)
    x = cfg.grid.points() if cfg.grid is not None else None
    subject: dict[str, Any]
    match which:
        case Check.SI:
            fp = require_family(cfg)
            subject = _describe(fp)
            report = verify.si_residual(fp, x, tol=_tol(tol, cfg, "si"))
        case Check.LADDER:
            fp = require_family(cfg)
            subject = _describe(fp)
            report = verify.ladder_check(fp, max(cfg.k, 1), x, tol=_tol(tol, cfg, "ladder"))
        case Check.ORTHONORMAL:
            fp = require_family(cfg)
            subject = _describe(fp)
            count = 4 if cfg.kmax is None else cfg.kmax + 1
            report = verify.orthonormality(fp, count, tol=_tol(tol, cfg, "norm"))
        case Check.COND1:
            spec = require_extension(cfg)
            subject = _describe(spec)
            report = extensions.check_cond1(spec, x, tol=_tol(tol, cfg, "cond1"))
        case Check.COND2:
            spec = require_extension(cfg)
            subject = _describe(spec)
            report = extensions.check_cond2(spec, x, tol=_tol(tol, cfg, "cond2"))
        case Check.EXT_SI:
            spec = require_extension(cfg)
            subject = _describe(spec)
            report = extensions.extended_si_check(spec, x, tol=_tol(tol, cfg, "ext_si"))
        case Check.CLASSIC:
            if cfg.classic is None:
                raise ConfigError("the classic check needs classic PT1 or PT2 (see --preset pt2-classic)")
            subject = {"classic": cfg.classic, "m": list(cfg.m)}
            report = _classic_report(cfg, x, _tol(tol, cfg, "classic"))
    logger.info("verify %s: passed=%s", which.value, report.passed)
    if as_json:
        typer.echo(dumps({"check": which.value, **subject, "passed": report.passed, "report": report}))
    else:
        residual = report.max_deviation if isinstance(report, verify.GramReport) else report.max_residual
        verdict = "[green]pass[/green]" if report.passed else "[red]FAIL[/red]"
        console.print(f"{which.value}: {verdict} max residual {residual:.3e} (tol {report.tol:.1e})")
    raise typer.Exit(EXIT_OK if report.passed else EXIT_TOLERANCE)


def _tol(flag: float | None, cfg: JobConfig, name: str) -> float:
    return flag if flag is not None else cfg.tol(name)


def _classic_report(cfg: JobConfig, x: np.ndarray | None, tol: float) -> verify.GridReport:
    m1, m2 = cfg.m
    if x is None:
        x = np.linspace(1e-3, 10.0, 1001) if cfg.classic == "PT2" else np.linspace(1e-3, math.pi / 2 - 1e-3, 1001)
    lhs, rhs = classic_reconstruction(cfg.classic, m1, m2, x)
    return verify.grid_report(np.abs(lhs - rhs) / (1.0 + np.abs(rhs)), x, tol)


@oracle_app.command("compare")
@guarded
def oracle_compare(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    fam: FamilyOpt = None,
    m: MOpt = None,
    invariant: InvariantOpt = None,
    beta: BetaOpt = None,
    d: DOpt = None,
    rho_invariant: RhoInvOpt = None,
    eps: EpsOpt = None,
    rho: RhoOpt = None,
    kmax: KmaxOpt = None,
    n: Annotated[int, typer.Option("--n", help="Finite-difference grid points.")] = 3000,
    tol: TolOpt = None,
    as_json: JsonOpt = False,
    as_csv: CsvOpt = False,
) -> None:
    """Closed-form E_k against a Dirichlet finite-difference spectrum of V."""
    cfg = _job(config, preset, fam, None, m, invariant, beta, d, rho_invariant, eps, rho, None, False, None, kmax=kmax)
    fp = require_family(cfg)
    top = 2 if cfg.kmax is None else cfg.kmax
    ks = [k for k in admissible_range(fp) if k <= top]
    if not ks:
        raise ConfigError(f"{fp.id.value} has no admissible states at eps={fp.eps:.17g}, rho={fp.rho:.17g}")
    spec = cfg.oracle or verify.oracle_for(fp, n)
    fd = verify.fd_spectrum(fp, spec, len(ks))
    energies = [eigenenergy(fp, k) for k in ks]
    columns = {"k": ks, "energy": energies, "fd": fd, "deviation": [abs(a - b) for a, b in zip(fd, energies)]}
    limit = _tol(tol, cfg, "oracle")
    header = {**_describe(fp), "box": [spec.a, spec.b], "n": spec.n, "tol": limit}
    _emit_table(cfg, as_json, as_csv, header, columns, title=f"{fp.id.value}: closed form vs finite differences")
    raise typer.Exit(EXIT_OK if max(columns["deviation"]) <= limit else EXIT_TOLERANCE)


if __name__ == "__main__":
    app()
