"""Many-valued first-order evaluation over finite structures, and the two
translations between formulas and relational expressions.

Formulas are built from falsum, atoms, conjunction, implication, and the two
quantifiers; disjunction, negation, and biconditional are expanded into that
core at construction time.  A structure interprets every relation symbol as
a finite score assignment over vectors of a finite universe, so quantifier
infima and suprema always exist and every formula with free variables
denotes a ranked table (free variables double as attribute names; types are
deliberately ignored, values travel as strings).

Formula syntax accepted by :func:`parse_formula`::

    forall x. (r(x, y) -> s(y))
    exists x. (p(x) & ~q(x, x)) | false
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .chain import RATIONAL, Score, ScoreChain, max_score, meet, min_score, residuum
from .errors import EvalError, ParseError, SchemeError, UnsupportedOperationError
from .maps import OrderMap
from .table import STR, RankedTable, Row, Scheme


# --- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Falsum:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(self.args)})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return f"forall {self.var}. {self.body}"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return f"exists {self.var}. {self.body}"


Formula = Union[Falsum, Atom, And, Implies, ForAll, Exists]


def Not(phi: Formula) -> Formula:
    return Implies(phi, Falsum())


def Iff(phi: Formula, psi: Formula) -> Formula:
    return And(Implies(phi, psi), Implies(psi, phi))


def Or(phi: Formula, psi: Formula) -> Formula:
    # ((phi -> psi) -> psi) & ((psi -> phi) -> phi): evaluates to the
    # supremum on any chain.
    return And(Implies(Implies(phi, psi), psi), Implies(Implies(psi, phi), phi))


def free_vars(phi: Formula) -> tuple[str, ...]:
    """Free variables in order of first appearance."""
    seen: list[str] = []

    def walk(node: Formula, bound: frozenset[str]) -> None:
        if isinstance(node, Atom):
            for var in node.args:
                if var not in bound and var not in seen:
                    seen.append(var)
        elif isinstance(node, (And, Implies)):
            walk(node.left, bound)
            walk(node.right, bound)
        elif isinstance(node, (ForAll, Exists)):
            walk(node.body, bound | {node.var})

    walk(phi, frozenset())
    return tuple(seen)


# --- structures -------------------------------------------------------------


@dataclass(frozen=True)
class Structure:
    """A finite interpretation: universe plus per-symbol score assignments.

    Interpretations are finite-support (absent vectors score bottom), hence
    the structure is safe: quantifier infima and suprema always exist.
    Universe elements are plain strings.
    """

    chain: ScoreChain
    universe: tuple[str, ...]
    arities: Mapping[str, int]
    interps: Mapping[str, Mapping[tuple[str, ...], Score]]

    def __post_init__(self) -> None:
        if not self.universe:
            raise EvalError("structure universe must be non-empty")
        for symbol, interp in self.interps.items():
            arity = self.arities.get(symbol)
            if arity is None:
                raise EvalError(f"interpretation for undeclared symbol {symbol!r}")
            for vector, score in interp.items():
                if len(vector) != arity:
                    raise EvalError(f"vector {vector!r} does not match arity of {symbol!r}")
                if score.chain != self.chain:
                    raise EvalError(f"score {score!r} is off the structure's chain")

    def lookup(self, symbol: str, vector: tuple[str, ...]) -> Score:
        if symbol not in self.arities:
            raise EvalError(f"unknown relation symbol {symbol!r}")
        if len(vector) != self.arities[symbol]:
            raise EvalError(f"arity mismatch for {symbol!r}")
        return self.interps.get(symbol, {}).get(vector, self.chain.bottom)

    def compose(self, f: OrderMap) -> "Structure":
        """Transform every interpretation pointwise; entries sent to bottom drop."""
        interps = {}
        for symbol, interp in self.interps.items():
            out = {}
            for vector, score in interp.items():
                image = f.apply(score)
                if not image.is_bottom:
                    out[vector] = image
            interps[symbol] = out
        return Structure(self.chain, self.universe, dict(self.arities), interps)


def evaluate(phi: Formula, m: Structure, valuation: Mapping[str, str]) -> Score:
    """Value of a formula under a valuation of its free variables."""
    if isinstance(phi, Falsum):
        return m.chain.bottom
    if isinstance(phi, Atom):
        vector = []
        for var in phi.args:
            if var not in valuation:
                raise EvalError(f"unbound variable {var!r}")
            vector.append(valuation[var])
        return m.lookup(phi.symbol, tuple(vector))
    if isinstance(phi, And):
        return meet(evaluate(phi.left, m, valuation), evaluate(phi.right, m, valuation))
    if isinstance(phi, Implies):
        return residuum(evaluate(phi.left, m, valuation), evaluate(phi.right, m, valuation))
    if isinstance(phi, (ForAll, Exists)):
        values = []
        scoped = dict(valuation)
        for element in m.universe:
            scoped[phi.var] = element
            values.append(evaluate(phi.body, m, scoped))
        if isinstance(phi, ForAll):
            return min_score(values, m.chain.top)
        return max_score(values, m.chain.bottom)
    raise EvalError(f"unknown formula node {phi!r}")


def table_of(m: Structure, phi: Formula) -> RankedTable:
    """The ranked table a formula denotes: free variables become attributes."""
    variables = free_vars(phi)
    scheme = Scheme((var, STR) for var in variables)
    entries = {}

    def assign(index: int, valuation: dict) -> None:
        if index == len(variables):
            score = evaluate(phi, m, valuation)
            if not score.is_bottom:
                entries[Row.of(dict(valuation))] = score
            return
        for element in m.universe:
            valuation[variables[index]] = element
            assign(index + 1, valuation)
        del valuation[variables[index]]

    assign(0, {})
    return RankedTable(scheme, m.chain, entries)


# --- formula -> relational expression ---------------------------------------


def formula_to_algebra(phi: Formula, m: Structure):
    """Compile a formula into a query expression plus the base tables it needs.

    Returns ``(expr, tables)``; evaluating ``expr`` over ``tables`` yields
    exactly ``table_of(m, phi)``.  Universal quantification compiles to the
    division, with active-domain tables (every universe element at score
    top) supplying the dividend and divisor; implication compiles to the
    bounded residuum after aligning both sides on a common scheme through
    joins with those same active-domain tables.
    """
    from . import planner

    tables: dict[str, RankedTable] = {}
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"__{prefix}_{counter[0]}"

    def universe_table(var: str) -> RankedTable:
        scheme = Scheme(((var, STR),))
        return RankedTable.from_entries(
            scheme, {Row.of({var: el}): m.chain.top for el in m.universe}, m.chain
        )

    def universe_expr(var: str) -> planner.QueryExpr:
        name = fresh(f"dom_{var}")
        tables[name] = universe_table(var)
        return planner.Base(name)

    def all_of(variables) -> planner.QueryExpr:
        if not variables:
            name = fresh("unit")
            tables[name] = RankedTable.from_entries(
                Scheme(()), {Row.of({}): m.chain.top}, m.chain
            )
            return planner.Base(name)
        expr = universe_expr(variables[0])
        for var in variables[1:]:
            expr = planner.Join(expr, universe_expr(var))
        return expr

    def pad(expr: planner.QueryExpr, have: tuple[str, ...], want: tuple[str, ...]):
        for var in want:
            if var not in have:
                expr = planner.Join(expr, universe_expr(var))
        return expr

    def compile_node(node: Formula) -> planner.QueryExpr:
        if isinstance(node, Falsum):
            name = fresh("empty")
            tables[name] = RankedTable.empty(Scheme(()), m.chain)
            return planner.Base(name)
        if isinstance(node, Atom):
            name = fresh(f"atom_{node.symbol}")
            tables[name] = _atom_table(m, node)
            return planner.Base(name)
        if isinstance(node, And):
            return planner.Join(compile_node(node.left), compile_node(node.right))
        if isinstance(node, Implies):
            joint = free_vars(node)
            left = pad(compile_node(node.left), free_vars(node.left), joint)
            right = pad(compile_node(node.right), free_vars(node.right), joint)
            return planner.Residuum(all_of(joint), left, right)
        if isinstance(node, Exists):
            inner = compile_node(node.body)
            body_vars = free_vars(node.body)
            if node.var not in body_vars:
                return inner
            keep = tuple(v for v in body_vars if v != node.var)
            return planner.Project(inner, keep)
        if isinstance(node, ForAll):
            body_vars = free_vars(node.body)
            mediator = compile_node(node.body)
            if node.var not in body_vars:
                mediator = planner.Join(mediator, universe_expr(node.var))
            keep = tuple(v for v in body_vars if v != node.var)
            return planner.Divide(all_of(keep), mediator, universe_expr(node.var))
        raise EvalError(f"unknown formula node {node!r}")

    return compile_node(phi), tables


def _atom_table(m: Structure, atom: Atom) -> RankedTable:
    """Interpretation of a relation symbol as a table on the atom's variables.

    Repeated variables keep only the diagonal vectors whose positions agree.
    """
    distinct = list(dict.fromkeys(atom.args))
    scheme = Scheme((var, STR) for var in distinct)
    entries: dict[Row, Score] = {}
    for vector, score in m.interps.get(atom.symbol, {}).items():
        if len(vector) != len(atom.args):
            raise EvalError(f"arity mismatch for {atom.symbol!r}")
        assignment: dict[str, str] = {}
        consistent = True
        for var, value in zip(atom.args, vector):
            if assignment.setdefault(var, value) != value:
                consistent = False
                break
        if consistent:
            entries[Row.of(assignment)] = score
    return RankedTable(scheme, m.chain, entries)


# --- relational expression -> formula ---------------------------------------


def algebra_to_formula(expr, tables: Mapping[str, RankedTable], conditions=None):
    """Translate a query over named base tables into a formula and structure.

    Supports join, restriction, projection, union, division, and renaming
    (semijoin unfolds into its defining projection of a join); difference
    and the residuum have no counterpart in this fragment and are rejected.

    Attribute names become variables.  The structure's universe collects
    every value appearing in the referenced base tables, as strings; the
    returned formula then satisfies
    ``table_of(structure, formula) == evaluate(expr over stringified tables)``.
    """
    from . import planner

    conditions = conditions or {}
    universe: dict[str, object] = {}
    arities: dict[str, int] = {}
    interps: dict[str, dict[tuple[str, ...], Score]] = {}
    chain = [None]
    counter = [0]

    def note_chain(c: ScoreChain) -> None:
        if chain[0] is None:
            chain[0] = c
        elif chain[0] != c:
            raise UnsupportedOperationError("catalog mixes score chains")

    def collect_values(node) -> None:
        if isinstance(node, planner.Base):
            table = tables.get(node.name)
            if table is None:
                raise SchemeError(f"unknown base table {node.name!r}")
            note_chain(table.chain)
            for row, _ in table:
                for _, value in row.items:
                    text = str(value)
                    if universe.setdefault(text, value) != value:
                        raise UnsupportedOperationError(
                            f"values {universe[text]!r} and {value!r} collide as {text!r}"
                        )
        for child in planner.children(node):
            collect_values(child)

    collect_values(expr)
    if chain[0] is None:
        chain[0] = RATIONAL
    if not universe:
        universe["__nil__"] = "__nil__"

    def register(symbol: str, arity: int, entries: dict) -> None:
        arities[symbol] = arity
        interps[symbol] = entries

    def base_formula(name: str) -> Formula:
        table = tables[name]
        variables = table.scheme.names
        entries = {
            tuple(str(row.value(v)) for v in variables): score for row, score in table
        }
        register(name, len(variables), entries)
        return Atom(name, variables)

    def condition_formula(cond, scheme: Scheme) -> Formula:
        counter[0] += 1
        symbol = f"__cond_{counter[0]}"
        variables = scheme.names
        entries: dict[tuple[str, ...], Score] = {}
        for combo in _combinations(list(universe.values()), len(variables)):
            try:
                row = Row.of(dict(zip(variables, combo)))
                score = cond.score_of(row, chain[0])
            except (EvalError, SchemeError):
                continue  # type-mismatched combination: only reachable at score 0
            if not score.is_bottom:
                entries[tuple(str(v) for v in combo)] = score
        register(symbol, len(variables), entries)
        return Atom(symbol, variables)

    def translate(node) -> Formula:
        if isinstance(node, planner.Base):
            return base_formula(node.name)
        if isinstance(node, planner.Join):
            return And(translate(node.left), translate(node.right))
        if isinstance(node, planner.Restrict):
            child = translate(node.child)
            cond = planner.resolve_condition(node.condition, conditions)
            scheme = planner.infer_scheme_over(node.child, tables, conditions)
            deps = cond.free_attrs()
            cond_scheme = scheme if deps is None else scheme.project(
                tuple(deps & scheme.name_set)
            )
            return And(child, condition_formula(cond, cond_scheme))
        if isinstance(node, planner.Project):
            child = translate(node.child)
            child_scheme = planner.infer_scheme_over(node.child, tables, conditions)
            dropped = sorted(child_scheme.name_set - {a.lower() for a in node.attrs})
            for var in dropped:
                child = Exists(var, child)
            return child
        if isinstance(node, planner.Union):
            return Or(translate(node.left), translate(node.right))
        if isinstance(node, planner.Divide):
            dividend = translate(node.dividend)
            mediator = translate(node.mediator)
            divisor = translate(node.divisor)
            shared = sorted(planner.infer_scheme_over(node.divisor, tables, conditions).name_set)
            body: Formula = Implies(divisor, mediator)
            for var in reversed(shared):
                body = ForAll(var, body)
            return And(dividend, body)
        if isinstance(node, planner.Rename):
            child = translate(node.child)
            return _rename_free(child, {old: new for old, new in node.mapping})
        if isinstance(node, planner.Semijoin):
            unfolded = planner.Project(
                planner.Join(node.left, node.right),
                planner.infer_scheme_over(node.left, tables, conditions).names,
            )
            return translate(unfolded)
        raise UnsupportedOperationError(
            f"{type(node).__name__} has no formula counterpart in this fragment"
        )

    formula = translate(expr)
    structure = Structure(
        chain[0], tuple(sorted(str(v) for v in universe)), arities, interps
    )
    return formula, structure


def _combinations(values, n):
    if n == 0:
        yield ()
        return
    for rest in _combinations(values, n - 1):
        for value in values:
            yield (value,) + rest


def _all_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Atom):
        return set(phi.args)
    if isinstance(phi, (And, Implies)):
        return _all_vars(phi.left) | _all_vars(phi.right)
    if isinstance(phi, (ForAll, Exists)):
        return {phi.var} | _all_vars(phi.body)
    return set()


def _rename_free(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variables, alpha-renaming binders to avoid capture."""
    if not mapping or isinstance(phi, Falsum):
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.symbol, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, And):
        return And(_rename_free(phi.left, mapping), _rename_free(phi.right, mapping))
    if isinstance(phi, Implies):
        return Implies(_rename_free(phi.left, mapping), _rename_free(phi.right, mapping))
    if isinstance(phi, (ForAll, Exists)):
        var, body = phi.var, phi.body
        inner = {old: new for old, new in mapping.items() if old != var}
        if var in inner.values():
            taken = _all_vars(body) | set(inner) | set(inner.values())
            fresh = var
            while fresh in taken:
                fresh += "_"
            body = _rename_free(body, {var: fresh})
            var = fresh
        rebuilt = _rename_free(body, inner)
        return ForAll(var, rebuilt) if isinstance(phi, ForAll) else Exists(var, rebuilt)
    raise EvalError(f"unknown formula node {phi!r}")


def structure_from_tables(tables: Mapping[str, RankedTable]) -> Structure:
    """Treat each named table as a relation symbol; vectors follow column order."""
    chain = None
    universe: set[str] = set()
    arities: dict[str, int] = {}
    interps: dict[str, dict[tuple[str, ...], Score]] = {}
    for name, table in tables.items():
        if chain is None:
            chain = table.chain
        elif chain != table.chain:
            raise UnsupportedOperationError("structure tables must share one chain")
        columns = table.scheme.names
        arities[name] = len(columns)
        entries = {}
        for row, score in table:
            vector = tuple(str(row.value(c)) for c in columns)
            universe.update(vector)
            entries[vector] = score
        interps[name] = entries
    if chain is None:
        chain = RATIONAL
    if not universe:
        universe.add("__nil__")
    return Structure(chain, tuple(sorted(universe)), arities, interps)


def stringified(table: RankedTable) -> RankedTable:
    """The same table with every value replaced by its string form."""
    scheme = Scheme((name, STR) for name in table.scheme.names)
    entries = {
        Row.of({name: str(row.value(name)) for name in table.scheme.names}): score
        for row, score in table
    }
    return RankedTable(scheme, table.chain, entries)


# --- formula parser ---------------------------------------------------------

_FORMULA_TOKEN = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op><->|->|[()&|~.,]))"
)


def _formula_tokens(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _FORMULA_TOKEN.match(text, pos)
        if match is None:
            stray = text[pos:].lstrip()
            if not stray:
                break
            raise ParseError(f"unexpected character {stray[0]!r} in formula", column=pos)
        kind = "name" if match.group("name") else "op"
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _FormulaParser:
    def __init__(self, text: str):
        self.tokens = _formula_tokens(text)
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str):
        kind, value, pos = self.advance()
        if value != text:
            raise ParseError(f"expected {text!r}, found {value or 'end'!r}", column=pos)

    def parse(self) -> Formula:
        phi = self.implication()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {value!r} in formula", column=pos)
        return phi

    def implication(self) -> Formula:
        left = self.disjunction()
        _, value, _ = self.peek()
        if value == "->":
            self.advance()
            return Implies(left, self.implication())
        if value == "<->":
            self.advance()
            return Iff(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek()[1] == "|":
            self.advance()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.peek()[1] == "&":
            self.advance()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if value == "~":
            self.advance()
            return Not(self.unary())
        if value == "(":
            self.advance()
            phi = self.implication()
            self.expect(")")
            return phi
        if kind == "name" and value in ("forall", "exists"):
            self.advance()
            var_kind, var, var_pos = self.advance()
            if var_kind != "name":
                raise ParseError("quantifier needs a variable", column=var_pos)
            self.expect(".")
            body = self.implication()
            return ForAll(var, body) if value == "forall" else Exists(var, body)
        if kind == "name" and value == "false":
            self.advance()
            return Falsum()
        if kind == "name":
            self.advance()
            if self.peek()[1] != "(":
                return Atom(value, ())
            self.advance()
            args = []
            if self.peek()[1] != ")":
                while True:
                    arg_kind, arg, arg_pos = self.advance()
                    if arg_kind != "name":
                        raise ParseError("atom arguments must be variables", column=arg_pos)
                    args.append(arg)
                    if self.peek()[1] == ",":
                        self.advance()
                        continue
                    break
            self.expect(")")
            return Atom(value, tuple(args))
        raise ParseError(f"unexpected token {value or 'end'!r} in formula", column=pos)


def parse_formula(text: str) -> Formula:
    return _FormulaParser(text).parse()
