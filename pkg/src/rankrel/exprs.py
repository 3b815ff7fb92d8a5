"""Small arithmetic/comparison expression language over exact rationals.

Used both for restriction conditions (attribute references, e.g.
``bdrm <= 6 ? 0.1*(4+bdrm) : 1``) and for analytic score maps (single
variable ``x``, e.g. ``x <= 0.5 ? sqrt(x)/sqrt(2) : 2*(x-0.5)^2 + 0.5``).

Arithmetic stays exact (``Fraction``) until an irrational function such as
``sqrt`` forces a float; callers quantize float results onto a fixed decimal
grid.  Comparisons yield 0/1.  Names are case-insensitive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import EvalError, ParseError

Number = Union[Fraction, float]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|==|!=|->|[-+*/^()<>=?:,\[\]]))"
)

_FUNCTIONS = ("min", "max", "sqrt", "abs")


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'name' | 'op' | 'end'
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stray = text[pos:].lstrip()
            if not stray:
                break
            raise ParseError(f"unexpected character {stray[0]!r}", column=pos)
        for kind in ("num", "name", "op"):
            if match.group(kind) is not None:
                tokens.append(Token(kind, match.group(kind), match.start(kind)))
                break
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Ref:
    name: str  # lowercased


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Ternary:
    test: "Expr"
    then: "Expr"
    otherwise: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


Expr = Union[Num, Ref, Unary, Binary, Compare, Ternary, Call]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def next(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text:
            raise ParseError(f"expected {text!r}, found {token.text or 'end'!r}", column=token.pos)
        return token

    def parse(self) -> Expr:
        expr = self.ternary()
        tail = self.peek()
        if tail.kind != "end":
            raise ParseError(f"trailing input {tail.text!r}", column=tail.pos)
        return expr

    def ternary(self) -> Expr:
        test = self.comparison()
        if self.peek().text == "?":
            self.next()
            then = self.ternary()
            self.expect(":")
            otherwise = self.ternary()
            return Ternary(test, then, otherwise)
        return test

    def comparison(self) -> Expr:
        left = self.additive()
        op = self.peek().text
        if op in ("<=", "<", ">=", ">", "=", "==", "!="):
            self.next()
            right = self.additive()
            return Compare("==" if op == "=" else op, left, right)
        return left

    def additive(self) -> Expr:
        expr = self.multiplicative()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            expr = Binary(op, expr, self.multiplicative())
        return expr

    def multiplicative(self) -> Expr:
        expr = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.next().text
            expr = Binary(op, expr, self.unary())
        return expr

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.next()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text == "^":
            self.next()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.next()
        if token.kind == "num":
            return Num(Fraction(token.text))
        if token.kind == "name":
            name = token.text.lower()
            if self.peek().text == "(":
                if name not in _FUNCTIONS:
                    raise ParseError(f"unknown function {token.text!r}", column=token.pos)
                self.next()
                args = [self.ternary()]
                while self.peek().text == ",":
                    self.next()
                    args.append(self.ternary())
                self.expect(")")
                return Call(name, tuple(args))
            return Ref(name)
        if token.text == "(":
            inner = self.ternary()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {token.text or 'end'!r}", column=token.pos)


def parse_expr(text: str) -> Expr:
    return _Parser(tokenize(text)).parse()


def free_names(expr: Expr) -> frozenset[str]:
    """Names referenced by the expression, lowercased."""
    if isinstance(expr, Ref):
        return frozenset((expr.name,))
    if isinstance(expr, Unary):
        return free_names(expr.operand)
    if isinstance(expr, (Binary, Compare)):
        return free_names(expr.left) | free_names(expr.right)
    if isinstance(expr, Ternary):
        return free_names(expr.test) | free_names(expr.then) | free_names(expr.otherwise)
    if isinstance(expr, Call):
        names: frozenset[str] = frozenset()
        for arg in expr.args:
            names |= free_names(arg)
        return names
    return frozenset()


def evaluate(expr: Expr, env: Mapping[str, object]) -> Number:
    """Evaluate under an environment of lowercased names -> values.

    Returns an exact ``Fraction`` unless ``sqrt`` forced a float somewhere in
    the computation.  String-valued names may only appear in (in)equality
    comparisons.
    """
    result = _eval(expr, env)
    if isinstance(result, str):
        raise EvalError("expression evaluates to a string, not a number")
    return result


def _eval(expr, env):
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Ref):
        try:
            value = env[expr.name]
        except KeyError:
            raise EvalError(f"unknown name {expr.name!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, Fraction, float, str)):
            raise EvalError(f"unsupported value {value!r} for {expr.name!r}")
        return Fraction(value) if isinstance(value, int) else value
    if isinstance(expr, Unary):
        return -_numeric(_eval(expr.operand, env))
    if isinstance(expr, Binary):
        left = _numeric(_eval(expr.left, env))
        right = _numeric(_eval(expr.right, env))
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            if right == 0:
                raise EvalError("division by zero")
            return left / right
        if expr.op == "^":
            if isinstance(right, Fraction) and right.denominator == 1:
                return left ** right.numerator
            return float(left) ** float(right)
        raise EvalError(f"unknown operator {expr.op!r}")
    if isinstance(expr, Compare):
        left = _eval(expr.left, env)
        right = _eval(expr.right, env)
        if isinstance(left, str) or isinstance(right, str):
            if expr.op not in ("==", "!="):
                raise EvalError("strings only support = and != comparisons")
            outcome = (left == right) if expr.op == "==" else (left != right)
        else:
            ops = {
                "<=": left <= right,
                "<": left < right,
                ">=": left >= right,
                ">": left > right,
                "==": left == right,
                "!=": left != right,
            }
            outcome = ops[expr.op]
        return Fraction(1 if outcome else 0)
    if isinstance(expr, Ternary):
        test = _eval(expr.test, env)
        branch = expr.then if (not isinstance(test, str) and test != 0) else expr.otherwise
        return _eval(branch, env)
    if isinstance(expr, Call):
        args = [_eval(arg, env) for arg in expr.args]
        if expr.func in ("min", "max"):
            numbers = [_numeric(a) for a in args]
            return (min if expr.func == "min" else max)(numbers)
        if expr.func == "abs":
            (arg,) = _one(expr, args)
            return abs(_numeric(arg))
        if expr.func == "sqrt":
            (arg,) = _one(expr, args)
            value = float(_numeric(arg))
            if value < 0:
                raise EvalError("sqrt of a negative value")
            return math.sqrt(value)
        raise EvalError(f"unknown function {expr.func!r}")
    raise EvalError(f"unknown expression node {expr!r}")


def _numeric(value) -> Number:
    if isinstance(value, str):
        raise EvalError(f"string value {value!r} used in arithmetic")
    return value


def _one(expr: Call, args: list):
    if len(args) != 1:
        raise EvalError(f"{expr.func} takes one argument")
    return args


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Num):
        frac = expr.value
        return str(frac) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Unary):
        return f"-{format_expr(expr.operand)}"
    if isinstance(expr, Binary):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    if isinstance(expr, Compare):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    if isinstance(expr, Ternary):
        return (
            f"({format_expr(expr.test)} ? {format_expr(expr.then)}"
            f" : {format_expr(expr.otherwise)})"
        )
    if isinstance(expr, Call):
        return f"{expr.func}({', '.join(format_expr(a) for a in expr.args)})"
    return repr(expr)
