"""Property suites over random parameter draws, one per published claim."""

import math

import numpy as np
import pytest

from sipot.extensions import CASES, check_cond1, check_cond2, direct_extension, extended_si_check
from sipot.families import (
    BASE_FAMILIES,
    ConstructionData,
    Coupling,
    FamilyId,
    build_family,
    classic_reconstruction,
    construction_remainder,
    direct,
    family,
    fold,
    remainder,
)
from sipot.invariants import (
    CONSTANTS,
    FUNCTIONS,
    PERIODIC_ONE_PARAM,
    THREE_PARAM,
    BinOp,
    Call,
    Neg,
    Num,
    ParamVector,
    Var,
    check_invariance,
    eval_invariant,
    parse_invariant,
    pretty,
    verified,
)
from sipot.spectra import admissible_range, eigenenergy, spectrum, wavefunction
from sipot.verify import (
    ladder_check,
    node_count,
    norm_of,
    orthonormality,
    schrodinger_residual,
    si_residual,
    spectrum_gaps,
)

DRAWS = 16


def _scarf1_rho(rng, eps):
    half = (1 - 2 * eps) / 2
    return rng.uniform(-0.9 * half, 0.9 * half)


def _eckart(rng):
    eps = rng.uniform(-4.0, -1.0)
    return eps, -((eps - 1) ** 2) - rng.uniform(0.5, 10.0)


# draws valid at eps and at eps - 1
DRAW = {
    FamilyId.SCARF2: lambda rng: dict(eps=rng.uniform(1.5, 5.0), rho=rng.uniform(-2.0, 2.0)),
    FamilyId.POSCHL_TELLER: lambda rng: (lambda e: dict(eps=e, rho=e - 0.4 + rng.uniform(0.0, 2.0)))(rng.uniform(1.5, 4.0)),
    FamilyId.MORSE: lambda rng: dict(eps=rng.uniform(1.5, 5.0), rho=rng.uniform(0.2, 3.0)),
    FamilyId.MORSE_MIRROR: lambda rng: dict(eps=rng.uniform(1.5, 5.0), rho=-rng.uniform(0.2, 3.0)),
    FamilyId.RADIAL_OSC: lambda rng: dict(eps=rng.uniform(-3.0, 0.4), rho=rng.uniform(0.2, 3.0)),
    FamilyId.HARM_OSC: lambda rng: dict(beta=rng.uniform(0.3, 3.0), rho=rng.uniform(-1.0, 1.0)),
    FamilyId.SCARF1: lambda rng: (lambda e: dict(eps=e, rho=_scarf1_rho(rng, e)))(rng.uniform(-3.0, 0.3)),
    FamilyId.SCARF1_COT: lambda rng: (lambda e: dict(eps=e, rho=_scarf1_rho(rng, e)))(rng.uniform(-3.0, 0.3)),
    FamilyId.ROSEN_MORSE2: lambda rng: dict(eps=rng.uniform(2.5, 5.0), rho=rng.uniform(-1.0, 1.0)),
    FamilyId.ECKART: lambda rng: dict(zip(("eps", "rho"), _eckart(rng))),
    FamilyId.COULOMB: lambda rng: dict(eps=rng.uniform(-3.0, -0.5), rho=rng.uniform(-3.0, -0.2)),
    FamilyId.ROSEN_MORSE1: lambda rng: dict(eps=rng.uniform(-3.0, -0.3), rho=rng.uniform(-2.0, 2.0)),
    FamilyId.ROSEN_MORSE1_COT: lambda rng: dict(eps=rng.uniform(-3.0, -0.3), rho=rng.uniform(-2.0, 2.0)),
}


@pytest.mark.parametrize("fid", list(FamilyId))
def test_shape_invariance_over_random_draws(fid):
    rng = np.random.default_rng(100 + list(FamilyId).index(fid))
    for _ in range(DRAWS):
        fp = direct(fid, **DRAW[fid](rng))
        report = si_residual(fp)
        assert report.passed, (fp, report)


@pytest.mark.parametrize("fid", BASE_FAMILIES)
def test_remainder_matches_construction(fid):
    rng = np.random.default_rng(200 + list(FamilyId).index(fid))
    invariant = verified("cos(2*pi*m1) + 2", 1)
    for _ in range(DRAWS):
        target = DRAW[fid](rng)
        m1 = rng.uniform(-1.0, 1.0)
        value = eval_invariant(invariant, ParamVector.of(m1))
        match fid:
            case FamilyId.RADIAL_OSC:
                beta, d = 2 * target["rho"] / value, (target["eps"] - m1) / value
            case FamilyId.HARM_OSC:
                beta, d = target["beta"] / value, target["rho"] / value
            case FamilyId.SCARF1 | FamilyId.SCARF1_COT:
                beta, d = (m1 - target["eps"]) / value, target["rho"] / value
            case _:
                beta, d = (target["eps"] - m1) / value, target["rho"] / value
        data = ConstructionData(p=ParamVector.of(m1), couplings=(Coupling(invariant=invariant, beta=beta, d=d),))
        fp = build_family(fid, data)
        assert remainder(fp) == pytest.approx(construction_remainder(data, fid), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize(
    "fp",
    [
        direct("harm-osc", beta=1.0),
        direct("morse", eps=2.5, rho=1.0),
        direct("scarf2", eps=3.2, rho=0.4),
        # eps = -1/2 puts -1/(4x^2) at the origin, which a Dirichlet box cannot resolve
        direct("radial-osc", eps=-1.5, rho=1.0),
    ],
    ids=["harm-osc", "morse", "scarf2", "radial-osc"],
)
def test_oracle_spectrum_agreement(fp):
    gaps = spectrum_gaps(fp, count=3, n=3000)
    np.testing.assert_allclose(gaps, spectrum(fp, kmax=2), atol=5e-3)


@pytest.mark.parametrize("fid", list(FamilyId))
def test_eigenfunction_suite(fid, safe_family):
    fp = safe_family(fid)
    ks = list(admissible_range(fp))[:4]
    gram = orthonormality(fp, count=4, tol=1e-6)
    assert gram.passed, gram.matrix
    for k in ks:
        assert norm_of(fp, k) == pytest.approx(1.0, abs=1e-6)
        assert schrodinger_residual(fp, k).passed
        assert node_count(fp, k) == k
        assert wavefunction(fp, k).imaginary_residue(family(fid).domain.grid(401)) <= 1e-9


@pytest.mark.parametrize("fid", list(FamilyId))
def test_ladder_recursions(fid, safe_family):
    fp = safe_family(fid)
    for k in (1, 2):
        if k not in admissible_range(fp):
            continue
        report = ladder_check(fp, k)
        assert report.passed, (k, report)


# boxes where the W1+- denominators stay positive (or off the real axis) at eps and eps - 1 for ell = 1;
# higher degrees may place zeros on the grid, which the checks exclude
EXT_DRAW = {
    1: ((2.0, 4.0), (-1.5, -0.2)),
    2: ((1.5, 3.0), (-1.5, -0.2)),
    3: ((-4.0, -2.5), (-1.5, -0.2)),
    4: ((2.0, 4.0), (-1.5, -0.2)),
    5: ((-4.0, -1.5), (0.2, 1.5)),
    6: ((0.5, 3.0), (0.0, 0.0)),
    7: ((0.5, 3.0), (0.0, 0.0)),
    8: ((2.0, 4.0), (-0.4, 0.4)),
    9: ((-5.0, -3.0), (0.2, 1.0)),
    10: ((2.5, 4.0), (0.2, 0.8)),
    11: ((2.0, 3.0), (-1.0, 1.0)),
}


@pytest.mark.parametrize("case_id", sorted(CASES))
def test_extension_suite(case_id):
    rng = np.random.default_rng(300 + case_id)
    (e_lo, e_hi), (r_lo, r_hi) = EXT_DRAW[case_id]
    for _ in range(DRAWS):
        ell = int(rng.integers(1, 4)) if CASES[case_id].uses_ell else None
        spec = direct_extension(case_id, eps=rng.uniform(e_lo, e_hi), rho=rng.uniform(r_lo, r_hi), ell=ell)
        if ell in (None, 1):
            assert not spec.poles
        assert check_cond2(spec).passed
        assert check_cond1(spec).passed
        assert extended_si_check(spec).passed


@pytest.mark.parametrize("case_id", [c for c in sorted(CASES) if CASES[c].uses_ell])
def test_cond2_at_higher_degree(case_id):
    (e_lo, e_hi), (r_lo, r_hi) = EXT_DRAW[case_id]
    for ell in range(2, 5):
        spec = direct_extension(case_id, eps=(e_lo + e_hi) / 2, rho=(r_lo + r_hi) / 2, ell=ell)
        assert check_cond2(spec).passed


@pytest.mark.parametrize("which", ["PT1", "PT2"])
def test_classic_reconstruction(which):
    rng = np.random.default_rng(400)
    x = np.linspace(1e-3, 10.0, 1001) if which == "PT2" else np.linspace(1e-3, math.pi / 2 - 1e-3, 1001)
    for _ in range(8):
        m1, m2 = rng.uniform(-3.0, 3.0, size=2)
        lhs, rhs = classic_reconstruction(which, m1, m2, x)
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs))) <= 1e-12


def test_value_matched_invariant_leaves_the_spectrum_unchanged():
    p = ParamVector.of(1.5, 2.5)

    def table(source):
        data = ConstructionData(p=p, couplings=(Coupling(invariant=verified(source, 2), beta=0.0, d=1.0),))
        return spectrum(build_family("scarf2", data), kmax=3)

    assert table("(m2 - m1)/2") == table("exp(m2 - m1) - e + 0.5")


def test_worked_scarf1_examples():
    one = ConstructionData(
        p=ParamVector.of(0.2), couplings=(Coupling(invariant=verified(PERIODIC_ONE_PARAM, 1), beta=0.05, d=0.1),)
    )
    fp = build_family("scarf1", one)
    assert eigenenergy(fp, 1) == pytest.approx(0.821353, abs=1e-6)
    invariant = verified(PERIODIC_ONE_PARAM, 1)
    for k in range(4):
        eps = 0.2 - 0.05 * eval_invariant(invariant, ParamVector.of(0.2))
        assert eigenenergy(fp, k) == pytest.approx((k - 2 * eps) * k, abs=1e-12)

    rng = np.random.default_rng(500)
    m = ParamVector.of(*rng.uniform(-0.5, 0.5, size=3))
    three = ConstructionData(p=m, couplings=(Coupling(invariant=verified(THREE_PARAM, 3), beta=0.05, d=0.1),))
    fp = fold("scarf1", three)
    eps = m.M - 0.05 * eval_invariant(parse_invariant(THREE_PARAM), m)
    assert fp.eps == pytest.approx(eps, abs=1e-12)
    for k in range(4):
        assert (k - 2 * fp.eps) * k == pytest.approx((k - 2 * eps) * k, abs=1e-12)


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        choice = rng.integers(0, 3)
        if choice == 0:
            return Num(float(round(rng.uniform(0.0, 10.0), 3)))
        if choice == 1:
            return Var(f"m{int(rng.integers(1, 4))}")
        return Var(str(rng.choice(["M", *CONSTANTS])))
    kind = rng.integers(0, 3)
    if kind == 0:
        return Neg(_random_tree(rng, depth - 1))
    if kind == 1:
        return Call(str(rng.choice(FUNCTIONS)), _random_tree(rng, depth - 1))
    return BinOp(str(rng.choice(list("+-*/^"))), _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_parser_round_trip_on_random_trees():
    rng = np.random.default_rng(600)
    for _ in range(50):
        tree = _random_tree(rng, 4)
        assert parse_invariant(pretty(tree)).ast == tree


@pytest.mark.parametrize(
    ("source", "n"),
    [
        ("sin(2*pi*m1)", 1),
        ("cos(2*pi*m1)^2 + sin(pi*m1)^2", 1),
        ("m2 - m1", 2),
        ("exp(m3 - m2) * (m1 - m3)", 3),
        ("sqrt((m1 - m2)^2 + 1)", 2),
    ],
)
def test_invariance_checker_verifies_translation_invariants(source, n):
    assert check_invariance(parse_invariant(source), n, trials=64, seed=9).verified


def test_invariance_checker_rejects_a_plain_parameter():
    report = check_invariance(parse_invariant("m1"), 1, trials=64, seed=9)
    assert not getattr(report, "verified", False)
    assert report.delta == pytest.approx(report.shift)
