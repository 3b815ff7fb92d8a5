"""Bundled housing demo data: the worked example the verify suite replays.

Two base tables (houses matched on size, offers matched on price), a
strictly increasing score transformation fixing 0 and 1, and a bedroom-count
restriction condition.  Tests and the ``verify`` subcommand check the engine
against frozen golden results computed over this data.
"""

from __future__ import annotations

from .catalog import Catalog
from .chain import RATIONAL
from .conditions import ExprCondition
from .maps import AnalyticMap
from .table import INT, STR, RankedTable, Scheme

HOUSES_SCHEME = Scheme((("id", INT), ("bdrm", INT), ("sqft", INT)))
OFFERS_SCHEME = Scheme((("id", INT), ("agent", STR), ("price", INT)))
JOINED_SCHEME = Scheme(
    (("id", INT), ("bdrm", INT), ("sqft", INT), ("agent", STR), ("price", INT))
)


def houses() -> RankedTable:
    """Houses with area roughly above 3500 sqft, best matches first."""
    rows = [
        ("1.000", 85, 5, 4580),
        ("0.971", 56, 3, 3400),
        ("0.937", 71, 3, 3280),
        ("0.643", 82, 4, 2350),
        ("0.426", 58, 4, 1760),
        ("0.148", 93, 2, 1130),
    ]
    return RankedTable.from_entries(
        HOUSES_SCHEME,
        [({"id": i, "bdrm": b, "sqft": s}, RATIONAL.parse(score)) for score, i, b, s in rows],
    )


def offers() -> RankedTable:
    """Offers priced around $800,000, best matches first."""
    rows = [
        ("0.997", 71, "Black", 798000),
        ("0.964", 58, "Black", 829000),
        ("0.940", 71, "Adams", 849000),
        ("0.798", 45, "Adams", 654000),
        ("0.789", 82, "Adams", 648000),
        ("0.778", 85, "Black", 998000),
        ("0.708", 45, "Black", 598000),
        ("0.708", 93, "Black", 598000),
    ]
    return RankedTable.from_entries(
        OFFERS_SCHEME,
        [
            ({"id": i, "agent": a, "price": p}, RATIONAL.parse(score))
            for score, i, a, p in rows
        ],
    )


def similar_join() -> RankedTable:
    """A table agreeing with the houses/offers join except for two top scores.

    It orders the two best rows strictly (0.939 vs 0.938) where the join
    ties them at 0.937, so it is ordinally *included* in the join but not
    equivalent to it.
    """
    rows = [
        ("0.939", 71, 3, 3280, "Black", 798000),
        ("0.938", 71, 3, 3280, "Adams", 849000),
        ("0.778", 85, 5, 4580, "Black", 998000),
        ("0.643", 82, 4, 2350, "Adams", 648000),
        ("0.426", 58, 4, 1760, "Black", 829000),
        ("0.148", 93, 2, 1130, "Black", 598000),
    ]
    return RankedTable.from_entries(
        JOINED_SCHEME,
        [
            ({"id": i, "bdrm": b, "sqft": s, "agent": a, "price": p}, RATIONAL.parse(score))
            for score, i, b, s, a, p in rows
        ],
    )


def single_column_pair() -> tuple[RankedTable, RankedTable]:
    """Two one-row tables with different scores for the same tuple.

    They are mutually ordinally included (hence equivalent) yet unequal,
    witnessing that ordinal inclusion is not antisymmetric.
    """
    scheme = Scheme((("foo", INT),))
    first = RankedTable.from_entries(scheme, [({"foo": 77}, RATIONAL.parse("0.600"))])
    second = RankedTable.from_entries(scheme, [({"foo": 77}, RATIONAL.parse("0.500"))])
    return first, second


#: Strictly increasing transformation of [0, 1] fixing both endpoints:
#: square-root growth below one half, quadratic above.
DEMO_MAP_TEXT = "x <= 0.5 ? sqrt(x)/sqrt(2) : 2*(x-0.5)^2 + 0.5"


def demo_map() -> AnalyticMap:
    return AnalyticMap.parse(
        DEMO_MAP_TEXT, declared=("preserving", "reflecting", "embedding")
    )


#: Graded preference for six or more bedrooms, tolerant toward fewer.
BEDROOMS_CONDITION_TEXT = "bdrm <= 6 ? 0.1*(4+bdrm) : 1"


def bedrooms_condition() -> ExprCondition:
    return ExprCondition.parse(BEDROOMS_CONDITION_TEXT)


def demo_catalog() -> Catalog:
    catalog = Catalog()
    catalog.tables["houses"] = houses()
    catalog.tables["offers"] = offers()
    catalog.tables["similar"] = similar_join()
    catalog.conditions["theta"] = bedrooms_condition()
    catalog.maps["f"] = demo_map()
    catalog.conditions["theta_f"] = bedrooms_condition().compose(demo_map())
    return catalog
