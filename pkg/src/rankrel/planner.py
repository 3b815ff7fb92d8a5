"""Query expressions: AST, text syntax, scheme inference, and rewrite laws.

Queries are trees over base-table references and the relational operations.
The rewrite functions implement the semantics-preserving plan laws (pushing
restrictions into joins, commuting restrictions with projections, splitting
projections over unions, collapsing projection cascades, and folding a
projection of a join into a semijoin).  Side conditions are checked
syntactically on the attributes a condition mentions, the conservative safe
approximation; an inapplicable rule leaves the tree alone and records a note
instead of raising.

Text syntax (case-insensitive names)::

    project(restrict(join(houses, offers), 0.1*(4+bdrm)), [id, bdrm, price])
    rename(houses, [id -> house_id])
    divide(people, likes, topics)
"""

from __future__ import annotations

from dataclasses import dataclass
import typing
from typing import Mapping, Optional

from . import algebra, exprs
from .conditions import Condition, ExprCondition
from .errors import ParseError, SchemeError, UnknownNameError
from .table import RankedTable, Scheme


# --- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class Join:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Restrict:
    child: "QueryExpr"
    condition: typing.Union[Condition, str]  # inline condition or a catalog name


@dataclass(frozen=True)
class Project:
    child: "QueryExpr"
    attrs: tuple[str, ...]


@dataclass(frozen=True)
class Union:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Difference:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Divide:
    dividend: "QueryExpr"
    mediator: "QueryExpr"
    divisor: "QueryExpr"


@dataclass(frozen=True)
class Residuum:
    bound: "QueryExpr"
    antecedent: "QueryExpr"
    consequent: "QueryExpr"


@dataclass(frozen=True)
class Semijoin:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Rename:
    child: "QueryExpr"
    mapping: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ProductJoin:
    left: "QueryExpr"
    right: "QueryExpr"


QueryExpr = typing.Union[
    Base, Join, Restrict, Project, Union, Difference, Divide, Residuum,
    Semijoin, Rename, ProductJoin,
]


def children(expr: QueryExpr) -> tuple[QueryExpr, ...]:
    if isinstance(expr, (Join, Union, Difference, Semijoin, ProductJoin)):
        return (expr.left, expr.right)
    if isinstance(expr, (Restrict, Project, Rename)):
        return (expr.child,)
    if isinstance(expr, Divide):
        return (expr.dividend, expr.mediator, expr.divisor)
    if isinstance(expr, Residuum):
        return (expr.bound, expr.antecedent, expr.consequent)
    return ()


def format_expr(expr: QueryExpr, indent: int = 0) -> str:
    """Multi-line tree rendering used by the plan subcommand."""
    pad = "  " * indent
    if isinstance(expr, Base):
        return f"{pad}{expr.name}"
    if isinstance(expr, Restrict):
        cond = expr.condition if isinstance(expr.condition, str) else repr(expr.condition)
        return f"{pad}restrict[{cond}]\n{format_expr(expr.child, indent + 1)}"
    if isinstance(expr, Project):
        return f"{pad}project[{', '.join(expr.attrs)}]\n{format_expr(expr.child, indent + 1)}"
    if isinstance(expr, Rename):
        pairs = ", ".join(f"{old}->{new}" for old, new in expr.mapping)
        return f"{pad}rename[{pairs}]\n{format_expr(expr.child, indent + 1)}"
    label = type(expr).__name__.rstrip("_").lower()
    parts = "\n".join(format_expr(c, indent + 1) for c in children(expr))
    return f"{pad}{label}\n{parts}"


def resolve_condition(spec: typing.Union[Condition, str], conditions: Mapping[str, Condition]):
    if isinstance(spec, str):
        try:
            return conditions[spec]
        except KeyError:
            raise UnknownNameError(f"unknown condition {spec!r}") from None
    return spec


def _condition_attrs(spec: typing.Union[Condition, str],
                     conditions: Optional[Mapping[str, Condition]] = None):
    """Attributes a restriction depends on, or None when not statically known."""
    if isinstance(spec, str):
        if conditions is None or spec not in conditions:
            return None
        spec = conditions[spec]
    return spec.free_attrs()


# --- scheme inference --------------------------------------------------------


def infer_scheme(expr: QueryExpr, catalog) -> Scheme:
    """Result scheme of an expression against a catalog; errors carry paths."""
    return _infer(expr, catalog.tables, catalog.conditions, "query")


def infer_scheme_over(expr: QueryExpr, tables: Mapping[str, RankedTable],
                      conditions: Optional[Mapping[str, Condition]] = None) -> Scheme:
    return _infer(expr, tables, conditions or {}, "query")


def _infer(expr, tables, conditions, path: str) -> Scheme:
    if isinstance(expr, Base):
        table = tables.get(expr.name)
        if table is None:
            raise UnknownNameError(f"unknown table {expr.name!r} at {path}")
        return table.scheme
    if isinstance(expr, (Join, ProductJoin)):
        left = _infer(expr.left, tables, conditions, path + ".left")
        right = _infer(expr.right, tables, conditions, path + ".right")
        return left.union(right)
    if isinstance(expr, Semijoin):
        left = _infer(expr.left, tables, conditions, path + ".left")
        _infer(expr.right, tables, conditions, path + ".right")
        return left
    if isinstance(expr, Restrict):
        scheme = _infer(expr.child, tables, conditions, path + ".child")
        deps = _condition_attrs(expr.condition, conditions)
        if deps is not None and not deps <= scheme.name_set:
            missing = sorted(deps - scheme.name_set)
            raise SchemeError(f"condition needs {missing} absent at {path}")
        return scheme
    if isinstance(expr, Project):
        scheme = _infer(expr.child, tables, conditions, path + ".child")
        try:
            return scheme.project(expr.attrs)
        except SchemeError as exc:
            raise SchemeError(f"{exc} at {path}") from None
    if isinstance(expr, (Union, Difference)):
        left = _infer(expr.left, tables, conditions, path + ".left")
        right = _infer(expr.right, tables, conditions, path + ".right")
        if left != right:
            raise SchemeError(f"operands of {type(expr).__name__.lower()} differ at {path}")
        return left
    if isinstance(expr, Divide):
        dividend = _infer(expr.dividend, tables, conditions, path + ".dividend")
        mediator = _infer(expr.mediator, tables, conditions, path + ".mediator")
        divisor = _infer(expr.divisor, tables, conditions, path + ".divisor")
        if dividend.name_set & divisor.name_set:
            raise SchemeError(f"dividend and divisor schemes overlap at {path}")
        if mediator != dividend.union(divisor):
            raise SchemeError(f"mediator scheme must unite dividend and divisor at {path}")
        return dividend
    if isinstance(expr, Residuum):
        schemes = [
            _infer(sub, tables, conditions, f"{path}.{part}")
            for sub, part in zip(children(expr), ("bound", "antecedent", "consequent"))
        ]
        if schemes[0] != schemes[1] or schemes[1] != schemes[2]:
            raise SchemeError(f"residuum operands need one shared scheme at {path}")
        return schemes[0]
    if isinstance(expr, Rename):
        scheme = _infer(expr.child, tables, conditions, path + ".child")
        try:
            return scheme.rename(dict(expr.mapping))
        except SchemeError as exc:
            raise SchemeError(f"{exc} at {path}") from None
    raise SchemeError(f"unknown expression node {expr!r} at {path}")


# --- evaluation ---------------------------------------------------------------


def evaluate(expr: QueryExpr, catalog) -> RankedTable:
    return evaluate_over(expr, catalog.tables, catalog.conditions)


def evaluate_over(expr: QueryExpr, tables: Mapping[str, RankedTable],
                  conditions: Optional[Mapping[str, Condition]] = None) -> RankedTable:
    conditions = conditions or {}

    def run(node) -> RankedTable:
        if isinstance(node, Base):
            table = tables.get(node.name)
            if table is None:
                raise UnknownNameError(f"unknown table {node.name!r}")
            return table
        if isinstance(node, Join):
            return algebra.natural_join(run(node.left), run(node.right))
        if isinstance(node, Restrict):
            return algebra.restrict(run(node.child), resolve_condition(node.condition, conditions))
        if isinstance(node, Project):
            return algebra.project(run(node.child), node.attrs)
        if isinstance(node, Union):
            return algebra.union_tables(run(node.left), run(node.right))
        if isinstance(node, Difference):
            return algebra.difference(run(node.left), run(node.right))
        if isinstance(node, Divide):
            return algebra.divide(run(node.dividend), run(node.mediator), run(node.divisor))
        if isinstance(node, Residuum):
            return algebra.residuum_tables(run(node.bound), run(node.antecedent),
                                           run(node.consequent))
        if isinstance(node, Semijoin):
            return algebra.semijoin(run(node.left), run(node.right))
        if isinstance(node, Rename):
            return algebra.rename(run(node.child), dict(node.mapping))
        if isinstance(node, ProductJoin):
            return algebra.product_join(run(node.left), run(node.right))
        raise SchemeError(f"unknown expression node {node!r}")

    return run(expr)


# --- rewrite laws -------------------------------------------------------------


@dataclass(frozen=True)
class RewriteOutcome:
    expr: QueryExpr
    applied: int
    notes: tuple[str, ...] = ()


def _rewrite_everywhere(expr, rule) -> tuple[QueryExpr, int, tuple[str, ...]]:
    """One bottom-up pass applying ``rule`` at every node it matches."""
    applied = 0
    notes: list[str] = []

    def walk(node):
        nonlocal applied
        rebuilt = _rebuild(node, tuple(walk(c) for c in children(node)))
        replacement, note = rule(rebuilt)
        if replacement is not None:
            applied += 1
            return replacement
        if note:
            notes.append(note)
        return rebuilt

    return walk(expr), applied, tuple(notes)


def _rebuild(node, kids):
    if isinstance(node, Base):
        return node
    if isinstance(node, Join):
        return Join(*kids)
    if isinstance(node, Restrict):
        return Restrict(kids[0], node.condition)
    if isinstance(node, Project):
        return Project(kids[0], node.attrs)
    if isinstance(node, Union):
        return Union(*kids)
    if isinstance(node, Difference):
        return Difference(*kids)
    if isinstance(node, Divide):
        return Divide(*kids)
    if isinstance(node, Residuum):
        return Residuum(*kids)
    if isinstance(node, Semijoin):
        return Semijoin(*kids)
    if isinstance(node, Rename):
        return Rename(kids[0], node.mapping)
    if isinstance(node, ProductJoin):
        return ProductJoin(*kids)
    raise SchemeError(f"unknown expression node {node!r}")


def rewrite_push_restriction(expr: QueryExpr, catalog) -> RewriteOutcome:
    """restrict(join(A, B), theta) -> join(restrict(A, theta), B) when theta
    only mentions attributes of one side."""

    def rule(node):
        if not (isinstance(node, Restrict) and isinstance(node.child, Join)):
            return None, None
        deps = _condition_attrs(node.condition, catalog.conditions)
        if deps is None:
            return None, "restriction not pushed: condition dependencies unknown"
        left = infer_scheme(node.child.left, catalog)
        right = infer_scheme(node.child.right, catalog)
        if deps <= left.name_set:
            return Join(Restrict(node.child.left, node.condition), node.child.right), None
        if deps <= right.name_set:
            return Join(node.child.left, Restrict(node.child.right, node.condition)), None
        return None, "restriction not pushed: condition spans both join sides"

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


def rewrite_commute_project_restrict(expr: QueryExpr, catalog) -> RewriteOutcome:
    """project(restrict(A, theta), S) -> restrict(project(A, S), theta) when
    theta ignores the projected-away attributes."""

    def rule(node):
        if not (isinstance(node, Project) and isinstance(node.child, Restrict)):
            return None, None
        deps = _condition_attrs(node.child.condition, catalog.conditions)
        if deps is None:
            return None, "projection not commuted: condition dependencies unknown"
        kept = {a.lower() for a in node.attrs}
        if deps <= kept:
            return Restrict(Project(node.child.child, node.attrs), node.child.condition), None
        return None, "projection not commuted: condition uses dropped attributes"

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


def rewrite_project_over_union(expr: QueryExpr, catalog) -> RewriteOutcome:
    """project(union(A, B), S) -> union(project(A, S), project(B, S))."""

    def rule(node):
        if isinstance(node, Project) and isinstance(node.child, Union):
            return Union(Project(node.child.left, node.attrs),
                          Project(node.child.right, node.attrs)), None
        return None, None

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


def rewrite_project_cascade(expr: QueryExpr, catalog) -> RewriteOutcome:
    """project(project(A, R), S) -> project(A, S); S is a subset of R by typing."""

    def rule(node):
        if isinstance(node, Project) and isinstance(node.child, Project):
            outer = {a.lower() for a in node.attrs}
            inner = {a.lower() for a in node.child.attrs}
            if outer <= inner:
                return Project(node.child.child, node.attrs), None
            return None, "projection cascade kept: outer attributes not nested in inner"
        return None, None

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


def rewrite_semijoin(expr: QueryExpr, catalog) -> RewriteOutcome:
    """project(join(A, B), scheme-of-A) -> semijoin(A, B)."""

    def rule(node):
        if not (isinstance(node, Project) and isinstance(node.child, Join)):
            return None, None
        left = infer_scheme(node.child.left, catalog)
        if {a.lower() for a in node.attrs} == left.name_set:
            return Semijoin(node.child.left, node.child.right), None
        return None, "semijoin not folded: projection keeps non-left attributes"

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


REWRITE_RULES = (
    ("push-restriction", rewrite_push_restriction),
    ("commute-project-restrict", rewrite_commute_project_restrict),
    ("project-over-union", rewrite_project_over_union),
    ("project-cascade", rewrite_project_cascade),
    ("fold-semijoin", rewrite_semijoin),
)


# --- join-chain normalization --------------------------------------------------


@dataclass(frozen=True)
class NormalizeResult:
    expr: QueryExpr
    blocked: tuple[str, ...]  # non-monotone subtrees left in place
    notes: tuple[str, ...] = ()


def normalize_to_join_chain(expr: QueryExpr, catalog) -> NormalizeResult:
    """Push restrictions and merge projections until a join chain emerges.

    Deterministic bottom-up passes iterated to a fixpoint, restriction
    pushdown running before the projection rules.  Operators outside the
    monotone fragment (union, difference, division, residuum, the product
    join) are left in place and reported in ``blocked``; their own subtrees
    are still normalized.
    """
    blocked: list[str] = []
    notes: list[str] = []

    def scan(node, path):
        if isinstance(node, (Union, Difference, Divide, Residuum, ProductJoin)):
            blocked.append(f"{type(node).__name__.rstrip('_').lower()} at {path}")
        for i, child in enumerate(children(node)):
            scan(child, f"{path}.{i}")

    scan(expr, "query")

    current = expr
    for _ in range(64):  # fixpoint; the tree strictly shrinks or reorders
        changed = 0
        for _, rule in (
            ("push-restriction", rewrite_push_restriction),
            ("restrict-into-project", _rewrite_restrict_into_project),
            ("project-cascade", rewrite_project_cascade),
        ):
            outcome = rule(current, catalog)
            current = outcome.expr
            changed += outcome.applied
            notes.extend(outcome.notes)
        if not changed:
            break
    return NormalizeResult(current, tuple(blocked), tuple(dict.fromkeys(notes)))


def _rewrite_restrict_into_project(expr: QueryExpr, catalog) -> RewriteOutcome:
    """restrict(project(A, S), theta) -> project(restrict(A, theta), S).

    The leaf-direction reading of the commutation law: valid because the
    condition can only mention attributes surviving the projection.
    """

    def rule(node):
        if not (isinstance(node, Restrict) and isinstance(node.child, Project)):
            return None, None
        deps = _condition_attrs(node.condition, catalog.conditions)
        if deps is None:
            return None, "restriction kept above projection: dependencies unknown"
        kept = {a.lower() for a in node.child.attrs}
        if deps <= kept:
            return Project(Restrict(node.child.child, node.condition), node.child.attrs), None
        return None, None

    new, applied, notes = _rewrite_everywhere(expr, rule)
    return RewriteOutcome(new, applied, notes)


def join_chain_leaves(expr: QueryExpr) -> list[QueryExpr]:
    """Split the top-level join spine into its leaf expressions."""
    if isinstance(expr, Join):
        return join_chain_leaves(expr.left) + join_chain_leaves(expr.right)
    return [expr]


# --- parser -------------------------------------------------------------------

_OPERATORS = {
    "join": 2, "restrict": 2, "project": 2, "union": 2, "difference": 2,
    "divide": 3, "residuum": 3, "semijoin": 2, "rename": 2, "product": 2,
}


def parse_query(text: str) -> QueryExpr:
    """Parse query text into an expression tree; errors carry positions."""
    tokens = exprs.tokenize(text)
    parser = _QueryParser(tokens, text)
    expr = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"trailing input {tail.text!r}", column=tail.pos)
    return expr


class _QueryParser:
    def __init__(self, tokens, text: str):
        self.tokens = tokens
        self.text = text
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str):
        token = self.advance()
        if token.text != text:
            raise ParseError(f"expected {text!r}, found {token.text or 'end'!r}",
                             column=token.pos)
        return token

    def parse_expr(self) -> QueryExpr:
        token = self.advance()
        if token.kind != "name":
            raise ParseError(f"expected a table name or operation, found "
                             f"{token.text or 'end'!r}", column=token.pos)
        name = token.text.lower()
        if self.peek().text != "(":
            return Base(name)
        if name not in _OPERATORS:
            raise ParseError(f"unknown operation {name!r}", column=token.pos)
        self.expect("(")
        node = self._operation(name, token.pos)
        self.expect(")")
        return node

    def _operation(self, name: str, pos: int) -> QueryExpr:
        if name == "join":
            left = self.parse_expr(); self.expect(",")
            return Join(left, self.parse_expr())
        if name == "product":
            left = self.parse_expr(); self.expect(",")
            return ProductJoin(left, self.parse_expr())
        if name == "union":
            left = self.parse_expr(); self.expect(",")
            return Union(left, self.parse_expr())
        if name == "difference":
            left = self.parse_expr(); self.expect(",")
            return Difference(left, self.parse_expr())
        if name == "semijoin":
            left = self.parse_expr(); self.expect(",")
            return Semijoin(left, self.parse_expr())
        if name == "divide":
            dividend = self.parse_expr(); self.expect(",")
            mediator = self.parse_expr(); self.expect(",")
            return Divide(dividend, mediator, self.parse_expr())
        if name == "residuum":
            bound = self.parse_expr(); self.expect(",")
            antecedent = self.parse_expr(); self.expect(",")
            return Residuum(bound, antecedent, self.parse_expr())
        if name == "restrict":
            child = self.parse_expr()
            self.expect(",")
            return Restrict(child, self._condition())
        if name == "project":
            child = self.parse_expr()
            self.expect(",")
            return Project(child, self._name_list())
        if name == "rename":
            child = self.parse_expr()
            self.expect(",")
            return Rename(child, self._rename_list())
        raise ParseError(f"unknown operation {name!r}", column=pos)

    def _condition(self):
        # A lone identifier names a catalog condition; anything else is an
        # inline expression over attribute values.
        start = self.index
        token = self.advance()
        if token.kind == "name" and self.peek().text in (",", ")"):
            return token.text.lower()
        self.index = start
        depth = 0
        pieces = []
        while True:
            nxt = self.peek()
            if nxt.kind == "end" or (depth == 0 and nxt.text in (",", ")")):
                break
            if nxt.text == "(":
                depth += 1
            elif nxt.text == ")":
                depth -= 1
            pieces.append(self.advance().text)
        if not pieces:
            raise ParseError("missing restriction condition", column=self.peek().pos)
        return ExprCondition(exprs.parse_expr(" ".join(pieces)))

    def _name_list(self) -> tuple[str, ...]:
        self.expect("[")
        names = []
        if self.peek().text != "]":
            while True:
                token = self.advance()
                if token.kind != "name":
                    raise ParseError("expected an attribute name", column=token.pos)
                names.append(token.text.lower())
                if self.peek().text == ",":
                    self.advance()
                    continue
                break
        self.expect("]")
        return tuple(names)

    def _rename_list(self) -> tuple[tuple[str, str], ...]:
        self.expect("[")
        pairs = []
        while True:
            old = self.advance()
            if old.kind != "name":
                raise ParseError("expected an attribute name", column=old.pos)
            self.expect("->")
            new = self.advance()
            if new.kind != "name":
                raise ParseError("expected an attribute name", column=new.pos)
            pairs.append((old.text.lower(), new.text.lower()))
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("]")
        return tuple(pairs)
