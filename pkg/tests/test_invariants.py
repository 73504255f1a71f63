import math

import pytest
from pydantic import ValidationError

from sipot.errors import (
    DomainError,
    ExpressionSyntaxError,
    IndexRangeError,
    UnknownFunctionError,
    UnknownIdentifierError,
    UnverifiedInvariantError,
)
from sipot.invariants import (
    PERIODIC_ONE_PARAM,
    PT1_SWAP,
    PT2_SWAP,
    PT_CLASSIC,
    THREE_PARAM,
    BinOp,
    InvariantExpr,
    Neg,
    Num,
    ParamVector,
    ViolationReport,
    check_invariance,
    eval_invariant,
    parse_invariant,
    pretty,
    referenced_indices,
    translate,
    verified,
)


def test_param_vector_mean_and_translation():
    p = ParamVector.of(1.0, 2.0, 3.0)
    assert p.n == 3
    assert p.M == 2.0
    assert translate(translate(p, 1), 2) == translate(p, 3)
    assert translate(p, 2).m == (-1.0, 0.0, 1.0)
    assert translate(p, 2).n == 3


def test_param_vector_rejects_empty_and_non_finite():
    with pytest.raises(ValidationError):
        ParamVector(origin=())
    with pytest.raises(ValidationError):
        ParamVector.of(1.0, math.nan)


def test_constant_expression():
    expr = parse_invariant("1")
    assert expr.ast == Num(1.0)
    assert eval_invariant(expr, ParamVector.of(-3.7)) == 1.0
    assert expr.max_index == 0


def test_precedence_and_right_associative_power():
    assert parse_invariant("2^3^2").ast == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert parse_invariant("-2^2").ast == Neg(BinOp("^", Num(2.0), Num(2.0)))
    assert eval_invariant(parse_invariant("-2^2"), ParamVector.of(0.0)) == -4.0
    assert eval_invariant(parse_invariant("1 + 2*3^2"), ParamVector.of(0.0)) == 19.0


@pytest.mark.parametrize(
    "source",
    [PERIODIC_ONE_PARAM, THREE_PARAM, PT_CLASSIC, PT2_SWAP, PT1_SWAP, "2^-1", "-(m1 - m2)^2 / 3.5e-2", "abs(m3)*e - pi"],
)
def test_pretty_round_trip(source):
    tree = parse_invariant(source).ast
    assert parse_invariant(pretty(tree)).ast == tree


def test_referenced_indices():
    assert referenced_indices(parse_invariant(PERIODIC_ONE_PARAM).ast) == {1}
    assert referenced_indices(parse_invariant(THREE_PARAM).ast) == {1, 2, 3}
    assert parse_invariant(THREE_PARAM).max_index == 3


@pytest.mark.parametrize(
    ("source", "m", "expected"),
    [
        (PERIODIC_ONE_PARAM, (0.2,), 2.213525),
        ("M", (1.0, 2.0, 3.0), 2.0),
        ("(m2-m1)/2", (1.5, 2.5), 0.5),
    ],
)
def test_eval_invariant(source, m, expected):
    assert eval_invariant(parse_invariant(source), ParamVector.of(*m)) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("source", ["ln(m1)", "sqrt(m1)", "1/(m1 - m1)", "m1^0.5"])
def test_domain_errors(source):
    with pytest.raises(DomainError):
        eval_invariant(parse_invariant(source), ParamVector.of(-1.0))


def test_index_beyond_n():
    with pytest.raises(IndexRangeError):
        eval_invariant(parse_invariant("m3 - m1"), ParamVector.of(0.0, 1.0))


def test_syntax_errors_carry_offsets():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_invariant("m1 +")
    assert info.value.offset == 4
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_invariant("m1 $ 2")
    assert info.value.offset == 3
    with pytest.raises(ExpressionSyntaxError):
        parse_invariant("   ")
    with pytest.raises(ExpressionSyntaxError):
        parse_invariant("(m1 - m2")


def test_literals_stay_finite_and_printable():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_invariant("m1 + 1e999")
    assert info.value.offset == 5
    with pytest.raises(ValueError):
        Num(math.inf)
    with pytest.raises(ValueError):
        Num(math.nan)
    tree = parse_invariant("1e308 * m1").ast
    assert parse_invariant(pretty(tree)).ast == tree


def test_unknown_names():
    with pytest.raises(UnknownFunctionError) as info:
        parse_invariant("foo(m1)")
    assert info.value.name == "foo"
    assert info.value.offset == 0
    with pytest.raises(UnknownIdentifierError) as info:
        parse_invariant("m1 + q")
    assert info.value.offset == 5
    with pytest.raises(UnknownIdentifierError):
        parse_invariant("m10")


@pytest.mark.parametrize(
    ("source", "n"),
    [(PERIODIC_ONE_PARAM, 1), (PT_CLASSIC, 2), (PT2_SWAP, 2), (PT1_SWAP, 2), (THREE_PARAM, 3), ("sin(m1 - m3)*cosh(m2 - m1)", 3)],
)
def test_invariants_verify(source, n):
    result = check_invariance(parse_invariant(source), n, trials=64, tol=1e-9, seed=7)
    assert isinstance(result, InvariantExpr)
    assert result.verified


def test_non_invariant_reports_first_violation():
    result = check_invariance(parse_invariant("m1"), 1, trials=16, seed=3)
    assert isinstance(result, ViolationReport)
    assert result.shift in (1, 2, 3)
    assert result.delta == pytest.approx(result.shift, abs=1e-12)
    assert len(result.m) == 1


def test_persistent_domain_error_is_reported():
    result = check_invariance(parse_invariant("ln(m1 - m1)"), 1, trials=16)
    assert isinstance(result, ViolationReport)
    assert result.reason.startswith("domain error")
    assert math.isnan(result.delta)


def test_check_invariance_preconditions():
    with pytest.raises(ValueError):
        check_invariance(parse_invariant("1"), 1, trials=8)
    with pytest.raises(IndexRangeError):
        check_invariance(parse_invariant("m2 - m1"), 1)


def test_verified_raises_on_violation():
    assert verified(PT_CLASSIC, 2).verified
    with pytest.raises(UnverifiedInvariantError):
        verified("m1 + m2", 2)


def test_parsed_expression_is_unverified():
    assert not parse_invariant(PT_CLASSIC).verified
