import math

import numpy as np
import pytest

from sipot.errors import ConfigError, DomainError, RangeViolationError, UnverifiedInvariantError
from sipot.families import (
    BASE_FAMILIES,
    FAMILIES,
    GENERALIZED_FAMILIES,
    ConstructionData,
    Coupling,
    FamilyId,
    build_family,
    classic_reconstruction,
    construction_remainder,
    direct,
    expanded_partner_potentials,
    expanded_potentials,
    family,
    fold,
    g_function,
    generic_superpotential,
    partner_potentials,
    remainder,
    superpotential,
    translate_family,
    v_function,
)
from sipot.invariants import PERIODIC_ONE_PARAM, THREE_PARAM, ParamVector, eval_invariant, parse_invariant, verified

def one_param(source: str, m: tuple[float, ...], beta: float = 0.0, d: float = 0.0, rho_source: str | None = None):
    n = len(m)
    return ConstructionData(
        p=ParamVector.of(*m),
        couplings=(Coupling(invariant=verified(source, n), beta=beta, d=d),),
        rho_invariant=verified(rho_source, n) if rho_source else None,
    )


def test_thirteen_stable_ids():
    assert [f.value for f in FamilyId] == [
        "scarf2",
        "poschl-teller",
        "morse",
        "morse-mirror",
        "radial-osc",
        "harm-osc",
        "scarf1",
        "scarf1-cot",
        "rosen-morse2",
        "eckart",
        "coulomb",
        "rosen-morse1",
        "rosen-morse1-cot",
    ]
    assert len(BASE_FAMILIES) == 8
    assert len(GENERALIZED_FAMILIES) == 5
    assert set(FAMILIES) == set(FamilyId)


def test_scarf1_one_parameter_example():
    fp = build_family("scarf1", one_param(PERIODIC_ONE_PARAM, (0.2,), beta=0.05, d=0.1))
    assert fp.eps == pytest.approx(0.089324, abs=1e-6)
    assert fp.rho == pytest.approx(0.221352, abs=1e-6)
    assert fp.alpha == -1.0


def test_scarf1_three_parameter_example():
    data = one_param(THREE_PARAM, (0.1, 0.2, 0.3), beta=0.05, d=0.1)
    fp = build_family("scarf1", data)
    value = eval_invariant(data.couplings[0].invariant, data.p)
    assert data.p.M == pytest.approx(0.2)
    assert fp.eps == pytest.approx(0.2 - 0.05 * value, abs=1e-15)
    assert fp.rho == pytest.approx(0.1 * value, abs=1e-15)


@pytest.mark.parametrize("fid", [FamilyId.SCARF2, FamilyId.POSCHL_TELLER, FamilyId.MORSE])
def test_vanishing_couplings_give_eps_equal_mean(fid):
    data = one_param("1", (2.0, 3.0))
    fp = fold(fid, data)
    assert fp.eps == 2.5
    assert fp.rho == 0.0


def test_couplings_are_summed():
    p = ParamVector.of(0.5, 1.5)
    data = ConstructionData(
        p=p,
        couplings=(
            Coupling(invariant=verified("m2 - m1", 2), beta=0.5, d=0.25),
            Coupling(invariant=verified("2", 2), beta=-0.1, d=1.0),
        ),
    )
    fp = fold("scarf2", data)
    assert fp.eps == pytest.approx(1.0 + 0.5 - 0.2)
    assert fp.rho == pytest.approx(0.25 + 2.0)
    radial = fold("radial-osc", data)
    assert radial.eps == pytest.approx(1.0 + 0.25 + 2.0)
    assert radial.rho == pytest.approx(0.5 * (0.5 - 0.2))


def test_unverified_invariant_is_rejected():
    data = ConstructionData(p=ParamVector.of(1.0), couplings=(Coupling(invariant=parse_invariant("1"), d=1.0),))
    with pytest.raises(UnverifiedInvariantError):
        build_family("scarf2", data)


def test_generalized_family_needs_rho_invariant():
    with pytest.raises(ConfigError):
        build_family("rosen-morse2", one_param("1", (3.0,)))
    fp = build_family("rosen-morse2", one_param("1", (3.0,), rho_source="1"))
    assert (fp.eps, fp.rho) == (3.0, 1.0)


def test_superpotential_examples():
    k, dk = superpotential(direct("scarf2", eps=2.0), 1.0)
    assert k == pytest.approx(2 * math.tanh(1.0))
    assert dk == pytest.approx(2 / math.cosh(1.0) ** 2)
    k, dk = superpotential(direct("harm-osc", beta=1.0), 0.7)
    assert (float(k), float(dk)) == pytest.approx((0.7, 1.0))
    k, _ = superpotential(direct("eckart", eps=0.3, rho=0.06), 1.0)
    assert k == pytest.approx(0.593911, abs=1e-6)


@pytest.mark.parametrize(("eps", "rho"), [(-2.0, 5.0), (-3.0, -6.0), (0.6, 0.5)])
def test_eckart_ranges(eps, rho):
    with pytest.raises(RangeViolationError) as info:
        direct("eckart", eps=eps, rho=rho)
    assert "requires" in str(info.value)


def test_range_violation_names_the_inequality():
    with pytest.raises(RangeViolationError) as info:
        direct("morse", eps=1.0, rho=-1.0)
    assert info.value.inequality == "rho > 0"
    assert info.value.family == "morse"


def test_partner_potential_examples():
    v, vt = partner_potentials(direct("harm-osc", beta=1.0), 0.5)
    assert (float(v), float(vt)) == pytest.approx((-0.75, 1.25))
    v, _ = partner_potentials(direct("morse", eps=2.5, rho=1.0), 0.0)
    assert v == pytest.approx(1.25)
    v, _ = partner_potentials(direct("scarf2", eps=1.0), 0.0)
    assert v == pytest.approx(-1.0)


@pytest.mark.parametrize("fid", list(FamilyId))
def test_expanded_forms_agree(fid, safe_family):
    fp = safe_family(fid)
    x = family(fid).domain.grid(401)
    v, vt = partner_potentials(fp, x)
    ev, evt = expanded_partner_potentials(fp, x)
    # 1/x^2-type terms cancel near singular endpoints
    atol = 1e-13 * (1.0 + np.max(np.abs(v)) + np.max(np.abs(vt)))
    np.testing.assert_allclose(ev, v, rtol=1e-10, atol=atol)
    np.testing.assert_allclose(evt, vt, rtol=1e-10, atol=atol)


@pytest.mark.parametrize("fid", list(FamilyId))
def test_derivative_matches_finite_differences(fid, safe_family):
    fp = safe_family(fid)
    x = family(fid).domain.grid(201)[5:-5]
    h = 1e-4
    k = lambda t: superpotential(fp, t)[0]  # noqa: E731
    fd = (-k(x + 2 * h) + 8 * k(x + h) - 8 * k(x - h) + k(x - 2 * h)) / (12 * h)
    _, dk = superpotential(fp, x)
    assert np.max(np.abs(dk - fd) / np.maximum(1.0, np.abs(dk))) <= 1e-7


def test_remainder_examples():
    assert remainder(direct("scarf2", eps=2.0)) == 5.0
    assert remainder(direct("radial-osc", eps=-1.0, rho=0.5)) == 2.0
    assert remainder(direct("rosen-morse2", eps=3.0, rho=1.0)) == pytest.approx(6.951389, abs=1e-6)


@pytest.mark.parametrize("fid", BASE_FAMILIES)
def test_construction_remainder_matches_family_remainder(fid):
    data = one_param("m1 - m1 + 0.5", (1.3,), beta=0.4, d=0.2)
    fp = fold(fid, data)
    assert remainder(fp) == pytest.approx(construction_remainder(data, fid), abs=1e-12)


@pytest.mark.parametrize("fid", list(FamilyId))
def test_g_equation(fid):
    x = family(fid).domain.grid(301)
    G, dG = g_function(fid, x)
    np.testing.assert_allclose(dG + G**2, family(fid).alpha, atol=1e-10 * max(1.0, float(np.max(G**2))))


@pytest.mark.parametrize("fid", BASE_FAMILIES)
def test_v_equation(fid):
    x = family(fid).domain.grid(301)
    G, _ = g_function(fid, x)
    v, dv = v_function(fid, 0.7, -0.3, x)
    scale = max(1.0, float(np.max(np.abs(v * G))))
    np.testing.assert_allclose(dv + v * G, 0.7, atol=1e-10 * scale)


def test_v_function_absent_for_generalized_families():
    with pytest.raises(ConfigError):
        v_function("coulomb", 1.0, 1.0, 1.0)


@pytest.mark.parametrize("fid", BASE_FAMILIES)
def test_generic_construction_folds_into_family(fid):
    data = one_param("sin(2*pi*m1)^2 + 1", (0.3,), beta=0.2, d=-0.15)
    fp = fold(fid, data)
    x = family(fid).domain.grid(101)
    k, dk = generic_superpotential(fid, data, x)
    k_ref, dk_ref = superpotential(fp, x)
    np.testing.assert_allclose(k, k_ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(dk, dk_ref, rtol=1e-12, atol=1e-12)
    V, Vt = expanded_potentials(fid, data, x)
    v_ref, vt_ref = partner_potentials(fp, x)
    np.testing.assert_allclose(V, v_ref, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(Vt, vt_ref, rtol=1e-10, atol=1e-10)


def test_translate_family():
    fp = build_family("scarf2", one_param("1", (3.2,), d=0.4))
    down = translate_family(fp, 1)
    assert down.eps == pytest.approx(2.2)
    assert down.rho == pytest.approx(0.4)
    osc = direct("harm-osc", beta=1.3, rho=0.2)
    assert translate_family(osc, 2) == osc


def test_translate_family_reevaluates_invariants():
    fp = build_family("scarf1", one_param(PERIODIC_ONE_PARAM, (0.2,), beta=0.05, d=0.1))
    down = translate_family(fp, 1)
    assert down.eps == pytest.approx(fp.eps - 1, abs=1e-12)
    assert down.rho == pytest.approx(fp.rho, abs=1e-12)
    assert down.provenance.p.m == pytest.approx((-0.8,))


def test_translation_out_of_range_is_rejected():
    fp = build_family("scarf2", one_param("1", (0.4,)))
    with pytest.raises(RangeViolationError):
        translate_family(fp, 1)


def test_swapping_invariant_with_equal_value_keeps_parameters():
    p = (1.5, 2.5)
    classic = build_family("scarf2", one_param("(m2 - m1)/2", p, d=1.0))
    swapped = build_family("scarf2", one_param("exp(m2 - m1) - e + 0.5", p, d=1.0))
    assert swapped.eps == pytest.approx(classic.eps, abs=1e-15)
    assert swapped.rho == pytest.approx(classic.rho, abs=1e-14)


def test_domain_is_enforced(safe_family):
    with pytest.raises(DomainError):
        superpotential(safe_family("poschl-teller"), -0.5)
    with pytest.raises(DomainError):
        superpotential(safe_family("scarf1"), math.pi / 2)


def test_classic_reconstruction_examples():
    lhs, rhs = classic_reconstruction("PT2", 1.5, 2.5, 1.0)
    assert lhs == pytest.approx(4.424979, abs=1e-6)
    assert rhs == pytest.approx(lhs, abs=1e-12)
    lhs, rhs = classic_reconstruction("PT1", 1.0, 1.0, math.pi / 4)
    assert lhs == pytest.approx(0.0, abs=1e-12)
    assert rhs == pytest.approx(0.0, abs=1e-12)


def test_classic_reconstruction_random_draws():
    rng = np.random.default_rng(5)
    x2 = np.linspace(0.05, 5.0, 1001)
    x1 = np.linspace(0.05, math.pi / 2 - 0.05, 1001)
    for _ in range(8):
        m1, m2 = rng.uniform(-3, 3, size=2)
        for which, x in (("PT2", x2), ("PT1", x1)):
            lhs, rhs = classic_reconstruction(which, m1, m2, x)
            assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) <= 1e-12


def test_classic_equal_parameters_collapse():
    x = np.linspace(0.1, 3.0, 50)
    lhs, _ = classic_reconstruction("PT2", 0.8, 0.8, x)
    np.testing.assert_allclose(lhs, 0.8 * (np.tanh(x) + 1 / np.tanh(x)), rtol=1e-12)
    with pytest.raises(ConfigError):
        classic_reconstruction("PT3", 1.0, 1.0, x)
