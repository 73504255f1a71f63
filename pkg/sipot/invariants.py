"""Translated parameters m1..mn and the invariant expressions I_j(m1..mn).

Expressions are written in a small ASCII language:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := primary ('^' unary)?
    primary:= number | name | func '(' expr ')' | '(' expr ')'

so ``^`` binds tighter than unary minus, which binds tighter than ``*``/``/``,
and ``^`` is right-associative.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from sipot.errors import (
    DomainError,
    ExpressionSyntaxError,
    IndexRangeError,
    UnknownFunctionError,
    UnknownIdentifierError,
    UnverifiedInvariantError,
)

logger = logging.getLogger(__name__)

MAX_INDEX = 9
SHIFTS = (1, 2, 3)
SAMPLE_BOX = (-5.0, 5.0)
DEFAULT_TOL = 1e-9
MIN_TRIALS = 16
DOMAIN_RETRIES = 10

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ParamVector(BaseModel):
    """Parameters m1..mn.

    Entries are stored as an origin plus an accumulated integer shift, so that
    translating by t1 and then t2 is identical to translating by t1 + t2.
    """

    model_config = ConfigDict(frozen=True)

    origin: tuple[float, ...] = Field(min_length=1)
    shift: int = 0

    @field_validator("origin")
    @classmethod
    def _finite(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("all parameters must be finite")
        return v

    @classmethod
    def of(cls, *m: float) -> "ParamVector":
        return cls(origin=tuple(float(x) for x in m))

    @property
    def m(self) -> tuple[float, ...]:
        return tuple(x - self.shift for x in self.origin)

    @property
    def n(self) -> int:
        return len(self.origin)

    @property
    def M(self) -> float:
        return sum(self.m) / self.n

    def translate(self, t: int) -> "ParamVector":
        return ParamVector(origin=self.origin, shift=self.shift + int(t))


def translate(p: ParamVector, t: int) -> ParamVector:
    """m_i -> m_i - t for every i."""
    return p.translate(t)


# --- expression tree -------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"numeric literal must be finite, got {self.value}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class InvariantExpr:
    source: str
    ast: Node
    verified: bool = False

    @property
    def max_index(self) -> int:
        return max(referenced_indices(self.ast), default=0)

    def __call__(self, p: ParamVector) -> float:
        return eval_invariant(self, p)


class ViolationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    expr: str
    m: list[float]
    shift: int
    delta: float
    reason: str = "not translation-invariant"


# --- tokenizer / parser ----------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        match = _TOKEN.match(source, pos)
        if match is None or match.end() == pos:
            offset = len(source[:pos].encode()) + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {source[pos:].lstrip()[:1]!r}", offset)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Tok(kind, match.group(kind), len(source[:start].encode())))
        pos = match.end()
    tokens.append(_Tok("end", "", len(source.encode())))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.tokens[self.i]

    def _advance(self) -> _Tok:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind not in ("op",):
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected '{text}', found '{found}'", self.tok.offset)
        self._advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected '{self.tok.text}'", self.tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self._advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self._advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"numeric literal '{tok.text}' overflows", tok.offset)
            self._advance()
            return Num(value)
        if tok.kind == "name":
            self._advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunctionError(tok.text, tok.offset)
                self._advance()
                arg = self.expr()
                self._expect(")")
                return Call(tok.text, arg)
            if not _known_identifier(tok.text):
                raise UnknownIdentifierError(tok.text, tok.offset)
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"expected a number, name or '(', found '{found}'", tok.offset)


def _known_identifier(name: str) -> bool:
    if name in CONSTANTS or name == "M":
        return True
    return re.fullmatch(rf"m[1-{MAX_INDEX}]", name) is not None


def parse_invariant(source: str) -> InvariantExpr:
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    if not source.isascii():
        bad = next(i for i, ch in enumerate(source) if not ch.isascii())
        raise ExpressionSyntaxError("non-ASCII character", len(source[:bad].encode()))
    return InvariantExpr(source=source, ast=_Parser(source).parse())


def pretty(node: Node | InvariantExpr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, InvariantExpr):
        node = node.ast
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{pretty(node.operand)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    return f"{node.func}({pretty(node.arg)})"


def referenced_indices(node: Node) -> set[int]:
    if isinstance(node, Var):
        return {int(node.name[1:])} if node.name.startswith("m") else set()
    if isinstance(node, Neg):
        return referenced_indices(node.operand)
    if isinstance(node, BinOp):
        return referenced_indices(node.left) | referenced_indices(node.right)
    if isinstance(node, Call):
        return referenced_indices(node.arg)
    return set()


# --- evaluation ------------------------------------------------------------


def _apply(func: str, x: float) -> float:
    if func == "ln":
        if x <= 0.0:
            raise DomainError(f"ln of non-positive value {x:.17g}")
        return math.log(x)
    if func == "sqrt":
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x:.17g}")
        return math.sqrt(x)
    if func == "abs":
        return abs(x)
    if func == "tan" and math.cos(x) == 0.0:
        raise DomainError(f"tan pole at {x:.17g}")
    return getattr(math, func)(x)


def _eval(node: Node, m: tuple[float, ...], mean: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name == "M":
            return mean
        if node.name in CONSTANTS:
            return CONSTANTS[node.name]
        return m[int(node.name[1:]) - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, m, mean)
    if isinstance(node, Call):
        return _apply(node.func, _eval(node.arg, m, mean))
    a = _eval(node.left, m, mean)
    b = _eval(node.right, m, mean)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b
    if a < 0.0 and not float(b).is_integer():
        raise DomainError(f"non-integer power {b:.17g} of negative base {a:.17g}")
    if a == 0.0 and b < 0.0:
        raise DomainError("division by zero in power")
    return a**b


def eval_invariant(expr: InvariantExpr, p: ParamVector) -> float:
    if expr.max_index > p.n:
        raise IndexRangeError(f"'{expr.source}' references m{expr.max_index} but only {p.n} parameters are given")
    try:
        value = _eval(expr.ast, p.m, p.M)
    except OverflowError as exc:
        raise DomainError(f"overflow evaluating '{expr.source}'") from exc
    if not math.isfinite(value):
        raise DomainError(f"'{expr.source}' is not finite at m={list(p.m)}")
    return float(value)


def check_invariance(
    expr: InvariantExpr,
    n: int,
    trials: int = 64,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> InvariantExpr | ViolationReport:
    """Sample translations m -> m - t, t in {1, 2, 3}, and compare I before and after.

    Returns the expression marked verified, or the first violating sample.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be at least {MIN_TRIALS}, got {trials}")
    if expr.max_index > n:
        raise IndexRangeError(f"'{expr.source}' references m{expr.max_index} but n={n}")
    rng = np.random.default_rng(seed)
    lo, hi = SAMPLE_BOX

    def draw() -> tuple[ParamVector, int, float, float]:
        p = ParamVector(origin=tuple(rng.uniform(lo, hi, size=n).tolist()))
        t = int(rng.choice(SHIFTS))
        return p, t, eval_invariant(expr, p), eval_invariant(expr, p.translate(t))

    for _ in range(trials):
        try:
            for attempt in Retrying(
                stop=stop_after_attempt(DOMAIN_RETRIES),
                retry=retry_if_exception_type(DomainError),
                reraise=False,
            ):
                with attempt:
                    p, t, before, after = draw()
        except RetryError as exc:
            logger.warning("'%s': domain error on %d consecutive samples", expr.source, DOMAIN_RETRIES)
            return ViolationReport(
                expr=expr.source,
                m=[],
                shift=0,
                delta=math.nan,
                reason=f"domain error: {exc.last_attempt.exception()}",
            )
        delta = abs(after - before)
        if delta > tol * (1.0 + abs(before)):
            logger.info("'%s' is not invariant: m=%s t=%d delta=%.3g", expr.source, list(p.m), t, delta)
            return ViolationReport(expr=expr.source, m=list(p.m), shift=t, delta=delta)
    logger.debug("'%s' verified over %d samples", expr.source, trials)
    return InvariantExpr(source=expr.source, ast=expr.ast, verified=True)


def verified(source: str, n: int, trials: int = 64, tol: float = DEFAULT_TOL, seed: int = 0) -> InvariantExpr:
    """Parse and verify in one go, raising on a violation."""
    result = check_invariance(parse_invariant(source), n, trials=trials, tol=tol, seed=seed)
    if isinstance(result, ViolationReport):
        raise UnverifiedInvariantError(
            f"'{source}' failed the invariance check: m={result.m} shift={result.shift} "
            f"delta={result.delta:.3g} ({result.reason})"
        )
    return result


PERIODIC_ONE_PARAM = "sin(2*pi*m1)^2 + cos(2*pi*m1) + 1"
THREE_PARAM = "sin(2*pi*M) + sin(M - m1)^2 + sin(M - m2)^2 + cos(M - m3)^2"
PT_CLASSIC = "(m2 - m1)/2"
PT2_SWAP = "exp(m2 - m1) + 1"
PT1_SWAP = "ln((m2 - m1)^2 + 1)"
