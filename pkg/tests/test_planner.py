"""Query parsing, scheme inference, rewrite laws, and normalization."""

import random

import pytest

from helpers import rnd_scheme, rnd_table

from rankrel import demo, planner
from rankrel.catalog import Catalog
from rankrel.conditions import ExprCondition
from rankrel.errors import ParseError, SchemeError, UnknownNameError


@pytest.fixture
def catalog():
    return demo.demo_catalog()


def rnd_catalog(rng) -> Catalog:
    tables = {
        "t1": rnd_table(rng, rnd_scheme(rng, names=("a", "b")), max_rows=8),
        "t2": rnd_table(rng, rnd_scheme(rng, names=("b", "c")), max_rows=8),
        "t3": rnd_table(rng, rnd_scheme(rng, names=("a", "b")), max_rows=8),
    }
    return Catalog.from_tables(tables)


class TestParser:
    def test_plain_join(self):
        expr = planner.parse_query("join(houses, offers)")
        assert expr == planner.Join(planner.Base("houses"), planner.Base("offers"))

    def test_nested_query(self):
        expr = planner.parse_query(
            "project(restrict(join(houses, offers), 0.1*(4+bdrm)), [id, bdrm, price])"
        )
        assert isinstance(expr, planner.Project)
        assert expr.attrs == ("id", "bdrm", "price")
        assert isinstance(expr.child, planner.Restrict)
        assert isinstance(expr.child.condition, ExprCondition)

    def test_named_condition_reference(self):
        expr = planner.parse_query("restrict(houses, theta)")
        assert expr.condition == "theta"

    def test_rename_and_divide(self):
        expr = planner.parse_query("rename(houses, [id -> house_id, sqft -> area])")
        assert expr.mapping == (("id", "house_id"), ("sqft", "area"))
        expr = planner.parse_query("divide(a, b, c)")
        assert isinstance(expr, planner.Divide)

    def test_malformed_inputs_report_position(self):
        for text in ("join(houses", "project(houses, id)", "frobnicate(x)", ""):
            with pytest.raises(ParseError):
                planner.parse_query(text)

    def test_case_insensitive(self):
        expr = planner.parse_query("JOIN(Houses, OFFERS)")
        assert expr == planner.Join(planner.Base("houses"), planner.Base("offers"))


class TestSchemeInference:
    def test_join_unions_schemes(self, catalog):
        expr = planner.parse_query("join(houses, offers)")
        scheme = planner.infer_scheme(expr, catalog)
        assert scheme.name_set == {"id", "bdrm", "sqft", "agent", "price"}

    def test_projection_error_carries_location(self, catalog):
        expr = planner.parse_query("project(houses, [price])")
        with pytest.raises(SchemeError) as err:
            planner.infer_scheme(expr, catalog)
        assert "query" in str(err.value)

    def test_unknown_base(self, catalog):
        with pytest.raises(UnknownNameError):
            planner.infer_scheme(planner.parse_query("join(houses, nonsense)"), catalog)

    def test_divide_scheme(self, catalog):
        rng = random.Random(1)
        cat = Catalog.from_tables(
            {
                "dd": rnd_table(rng, rnd_scheme(rng, names=("a",))),
                "m": rnd_table(rng, rnd_scheme(rng, names=("a", "c"))),
                "dv": rnd_table(rng, rnd_scheme(rng, names=("c",))),
            }
        )
        scheme = planner.infer_scheme(planner.parse_query("divide(dd, m, dv)"), cat)
        assert scheme.name_set == {"a"}

    def test_union_needs_equal_schemes(self, catalog):
        with pytest.raises(SchemeError):
            planner.infer_scheme(planner.parse_query("union(houses, offers)"), catalog)

    def test_inference_stable_under_rewrites(self):
        rng = random.Random(3)
        for _ in range(40):
            cat = rnd_catalog(rng)
            expr = planner.Restrict(
                planner.Join(planner.Base("t1"), planner.Base("t2")),
                ExprCondition.parse("a <= 1 ? 0.5 : 1"),
            )
            before = planner.infer_scheme(expr, cat)
            for _, rule in planner.REWRITE_RULES:
                outcome = rule(expr, cat)
                assert planner.infer_scheme(outcome.expr, cat) == before


class TestRewriteLaws:
    def test_push_restriction_left(self):
        rng = random.Random(5)
        cat = rnd_catalog(rng)
        expr = planner.Restrict(
            planner.Join(planner.Base("t1"), planner.Base("t2")),
            ExprCondition.parse("a <= 1 ? 0.5 : 1"),
        )
        outcome = planner.rewrite_push_restriction(expr, cat)
        assert outcome.applied == 1
        assert isinstance(outcome.expr, planner.Join)
        assert isinstance(outcome.expr.left, planner.Restrict)

    def test_push_restriction_not_applicable(self):
        rng = random.Random(7)
        cat = rnd_catalog(rng)
        spanning = ExprCondition.parse("a <= c ? 1 : 0.5")
        expr = planner.Restrict(
            planner.Join(planner.Base("t1"), planner.Base("t2")), spanning
        )
        outcome = planner.rewrite_push_restriction(expr, cat)
        assert outcome.applied == 0 and outcome.expr == expr
        assert any("spans both" in note for note in outcome.notes)

    def test_commute_project_restrict(self):
        rng = random.Random(9)
        cat = rnd_catalog(rng)
        expr = planner.Project(
            planner.Restrict(planner.Base("t1"), ExprCondition.parse("a/4")), ("a",)
        )
        outcome = planner.rewrite_commute_project_restrict(expr, cat)
        assert outcome.applied == 1
        assert isinstance(outcome.expr, planner.Restrict)

    def test_project_cascade(self):
        expr = planner.Project(planner.Project(planner.Base("t1"), ("a", "b")), ("a",))
        outcome = planner.rewrite_project_cascade(expr, Catalog())
        assert outcome.expr == planner.Project(planner.Base("t1"), ("a",))

    def test_fold_semijoin(self):
        rng = random.Random(11)
        cat = rnd_catalog(rng)
        expr = planner.Project(
            planner.Join(planner.Base("t1"), planner.Base("t2")), ("a", "b")
        )
        outcome = planner.rewrite_semijoin(expr, cat)
        assert outcome.expr == planner.Semijoin(planner.Base("t1"), planner.Base("t2"))

    def test_all_rules_preserve_results(self):
        rng = random.Random(13)
        shapes = self._law_shapes()
        for _ in range(120):
            cat = rnd_catalog(rng)
            for build in shapes:
                expr = build(rng)
                base = planner.evaluate(expr, cat)
                for _, rule in planner.REWRITE_RULES:
                    rewritten = rule(expr, cat).expr
                    assert planner.evaluate(rewritten, cat) == base

    @staticmethod
    def _law_shapes():
        def restriction_over_join(rng):
            side = rng.choice(("a <= 1 ? 0.5 : 1", "c <= 1 ? 0.25 : 1", "a <= c ? 0.5 : 1"))
            return planner.Restrict(
                planner.Join(planner.Base("t1"), planner.Base("t2")),
                ExprCondition.parse(side),
            )

        def project_of_restrict(rng):
            return planner.Project(
                planner.Restrict(planner.Base("t1"), ExprCondition.parse("a/4")),
                ("a",) if rng.random() < 0.5 else ("a", "b"),
            )

        def project_over_union(rng):
            return planner.Project(
                planner.Union(planner.Base("t1"), planner.Base("t3")), ("a",)
            )

        def cascade(rng):
            return planner.Project(
                planner.Project(
                    planner.Join(planner.Base("t1"), planner.Base("t2")), ("a", "b")
                ),
                ("a",),
            )

        def semijoin_shape(rng):
            return planner.Project(
                planner.Join(planner.Base("t1"), planner.Base("t2")), ("a", "b")
            )

        return (restriction_over_join, project_of_restrict, project_over_union,
                cascade, semijoin_shape)

    def test_semijoin_law_both_forms(self):
        rng = random.Random(17)
        for _ in range(60):
            cat = rnd_catalog(rng)
            t1, t2 = cat.table("t1"), cat.table("t2")
            from rankrel import algebra

            lhs = algebra.project(algebra.natural_join(t1, t2), t1.scheme.names)
            shared = t1.scheme.shared_names(t2.scheme)
            rhs = algebra.natural_join(t1, algebra.project(t2, shared))
            assert lhs == rhs == algebra.semijoin(t1, t2)


class TestNormalization:
    def test_already_normal_is_fixed(self):
        rng = random.Random(19)
        cat = rnd_catalog(rng)
        expr = planner.Join(
            planner.Restrict(planner.Base("t1"), ExprCondition.parse("a/4")),
            planner.Restrict(planner.Base("t2"), ExprCondition.parse("c/4")),
        )
        result = planner.normalize_to_join_chain(expr, cat)
        assert result.expr == expr and not result.blocked

    def test_pushes_restriction_to_leaf(self):
        rng = random.Random(23)
        cat = rnd_catalog(rng)
        expr = planner.Restrict(
            planner.Join(planner.Base("t1"), planner.Base("t2")),
            ExprCondition.parse("a/4"),
        )
        result = planner.normalize_to_join_chain(expr, cat)
        assert isinstance(result.expr, planner.Join)
        assert isinstance(result.expr.left, planner.Restrict)

    def test_non_monotone_subtree_marked(self):
        rng = random.Random(29)
        cat = rnd_catalog(rng)
        expr = planner.Join(
            planner.Base("t1"),
            planner.Union(planner.Base("t1"), planner.Base("t3")),
        )
        result = planner.normalize_to_join_chain(expr, cat)
        assert any("union" in entry for entry in result.blocked)

    def test_random_monotone_expressions_preserved(self):
        rng = random.Random(31)
        for _ in range(200):
            cat = rnd_catalog(rng)
            expr = self._random_monotone(rng, cat, depth=3)
            result = planner.normalize_to_join_chain(expr, cat)
            assert planner.evaluate(result.expr, cat) == planner.evaluate(expr, cat)

    @staticmethod
    def _random_monotone(rng, cat, depth):
        if depth == 0 or rng.random() < 0.3:
            return planner.Base(rng.choice(("t1", "t2", "t3")))
        roll = rng.random()
        node = TestNormalization._random_monotone(rng, cat, depth - 1)
        names = planner.infer_scheme(node, cat).names
        if roll < 0.45:
            other = TestNormalization._random_monotone(rng, cat, depth - 1)
            return planner.Join(node, other)
        if roll < 0.75:
            attr = rng.choice(names)
            return planner.Restrict(
                node, ExprCondition.parse(f"{attr} <= 1 ? 0.5 : 1")
            )
        kept = tuple(n for n in names if rng.random() < 0.6) or names[:1]
        return planner.Project(node, kept)

    def test_join_chain_leaves(self):
        expr = planner.Join(
            planner.Join(planner.Base("x"), planner.Base("y")), planner.Base("z")
        )
        leaves = planner.join_chain_leaves(expr)
        assert [leaf.name for leaf in leaves] == ["x", "y", "z"]
