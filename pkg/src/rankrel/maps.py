"""Monotone self-maps of the score chain and their application to tables.

An :class:`OrderMap` transforms scores; composing a table with one transforms
every stored score pointwise.  Three representations are provided:

* piecewise-constant over half-open pieces ``(lo, hi] -> value`` plus an
  explicit value at bottom (finitely checkable; also the shape produced by
  the canonical-map construction);
* analytic expressions over the rational carrier, quantized onto a fixed
  6-decimal grid (with an order-injectivity check on the values actually
  produced, so the grid can never silently collapse distinct scores);
* explicit finite graphs of (input, output) pairs.

Order-theoretic properties (preserving / reflecting / embedding /
isomorphism-on-range) are verified on the finite score sets a map is applied
to, which is all the algebra ever needs and keeps verification decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import exprs
from .chain import Score, ScoreChain, clamp01, quantize
from .errors import (
    IncompatibleChainError,
    MapDomainError,
    MapPropertyError,
    NotEquivalentError,
    NotIncludedError,
    QuantizationError,
    UnsupportedOperationError,
)
from .table import RankedTable

PROPERTIES = (
    "preserving", "reflecting", "embedding", "isomorphism",
    "fixed-bottom", "fixed-top",
)


class OrderMap:
    """Base interface; concrete maps implement :meth:`apply`."""

    #: properties the map claims; verified on the scores it is applied to
    declared: frozenset = frozenset()

    def apply(self, score: Score) -> Score:
        raise NotImplementedError

    def apply_all(self, scores: Iterable[Score]) -> dict[Score, Score]:
        """Apply to a batch; single hook for per-batch consistency checks."""
        return {s: self.apply(s) for s in scores}

    def fixes_bottom(self, chain: ScoreChain) -> bool:
        try:
            return self.apply(chain.bottom).is_bottom
        except MapDomainError:
            return False

    def fixes_top(self, chain: ScoreChain) -> bool:
        try:
            return self.apply(chain.top).is_top
        except MapDomainError:
            return False


def is_order_preserving_on(f: OrderMap, scores: Sequence[Score]) -> bool:
    """a <= b implies f(a) <= f(b), over every pair in ``scores``."""
    ordered = sorted(scores, key=lambda s: s.value)
    images = [f.apply(s) for s in ordered]
    return all(images[i].value <= images[i + 1].value for i in range(len(images) - 1))


def is_order_reflecting_on(f: OrderMap, scores: Sequence[Score]) -> bool:
    """f(a) <= f(b) implies a <= b, over every pair in ``scores``."""
    ordered = sorted(set(scores), key=lambda s: s.value)
    images = [f.apply(s) for s in ordered]
    # On a chain with a <= b already established, reflection fails exactly
    # when two distinct inputs collapse or swap.
    return all(images[i].value < images[i + 1].value for i in range(len(images) - 1))


def is_order_embedding_on(f: OrderMap, scores: Sequence[Score]) -> bool:
    return is_order_preserving_on(f, scores) and is_order_reflecting_on(f, scores)


def verify_declared(f: OrderMap, scores: Sequence[Score], chain: ScoreChain) -> None:
    """Check every declared property of ``f`` on the given finite score set."""
    pool = list(scores)
    for name in f.declared:
        if name == "preserving" and not is_order_preserving_on(f, pool):
            raise MapPropertyError("map declared order preserving but is not on these scores")
        if name == "reflecting" and not is_order_reflecting_on(f, pool):
            raise MapPropertyError("map declared order reflecting but is not on these scores")
        if name in ("embedding", "isomorphism") and not is_order_embedding_on(f, pool):
            raise MapPropertyError(f"map declared {name} but does not embed these scores")
        if name == "fixed-bottom" and not f.fixes_bottom(chain):
            raise MapPropertyError("map declared fixed-bottom but moves bottom")
        if name == "fixed-top" and not f.fixes_top(chain):
            raise MapPropertyError("map declared fixed-top but moves top")


@dataclass(frozen=True)
class Piece:
    """Half-open piece (lo, hi] carrying a constant output value."""

    lo: Score
    hi: Score
    value: Score


@dataclass(frozen=True)
class PiecewiseConstantMap(OrderMap):
    """Piecewise-constant map with an explicit output at bottom."""

    chain: ScoreChain
    bottom_value: Score
    pieces: tuple[Piece, ...]
    declared: frozenset = frozenset()

    def __post_init__(self) -> None:
        previous = None
        for piece in self.pieces:
            if not piece.lo < piece.hi:
                raise MapPropertyError(f"empty piece ({piece.lo!r}, {piece.hi!r}]")
            if previous is not None and piece.lo < previous:
                raise MapPropertyError("pieces overlap; they must be sorted and disjoint")
            previous = piece.hi

    def apply(self, score: Score) -> Score:
        if score.chain != self.chain:
            raise IncompatibleChainError(f"{score!r} is not on this map's chain")
        if score.is_bottom:
            return self.bottom_value
        for piece in self.pieces:
            if piece.lo < score <= piece.hi:
                return piece.value
        raise MapDomainError(f"score {score!r} outside every declared piece")

    def domain_scores(self) -> list[Score]:
        scores = [self.chain.bottom]
        scores += [p.hi for p in self.pieces]
        return scores


@dataclass(frozen=True)
class AnalyticMap(OrderMap):
    """Map given by an expression in ``x`` over the rational carrier.

    Results are clamped into [0, 1] and quantized onto the 6-decimal grid
    before becoming chain elements.  Batch application refuses to proceed if
    quantization collapses two distinct inputs, since that would silently
    destroy the embedding property.
    """

    expr: exprs.Expr
    places: int = 6
    declared: frozenset = frozenset()

    @classmethod
    def parse(cls, text: str, declared: Iterable[str] = ()) -> "AnalyticMap":
        return cls(exprs.parse_expr(text), declared=frozenset(declared))

    def apply(self, score: Score) -> Score:
        if not score.chain.is_rational:
            raise UnsupportedOperationError("analytic maps require the rational carrier")
        result = exprs.evaluate(self.expr, {"x": score.value})
        return score.chain.score(clamp01(quantize(result, self.places)))

    def apply_all(self, scores: Iterable[Score]) -> dict[Score, Score]:
        out = {s: self.apply(s) for s in set(scores)}
        if len({img.value for img in out.values()}) != len(out):
            raise QuantizationError(
                f"quantization to {self.places} decimals is not injective on "
                f"the {len(out)} scores produced; refusing to transform"
            )
        return out

    def __repr__(self) -> str:
        return f"AnalyticMap({exprs.format_expr(self.expr)})"


@dataclass(frozen=True)
class GraphMap(OrderMap):
    """Map given by an explicit finite graph of (input, output) pairs."""

    graph: tuple[tuple[Score, Score], ...]
    declared: frozenset = frozenset()

    @classmethod
    def of(cls, pairs: Mapping[Score, Score] | Iterable[tuple[Score, Score]],
           declared: Iterable[str] = ()) -> "GraphMap":
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        ordered = tuple(sorted(items, key=lambda kv: kv[0].value))
        return cls(ordered, declared=frozenset(declared))

    def apply(self, score: Score) -> Score:
        for src, dst in self.graph:
            if src.chain == score.chain and src.value == score.value:
                return dst
        raise MapDomainError(f"score {score!r} outside the map's finite graph")

    def domain_scores(self) -> list[Score]:
        return [src for src, _ in self.graph]

    def inverse(self) -> "GraphMap":
        images = [dst.value for _, dst in self.graph]
        if len(set(images)) != len(images):
            raise MapPropertyError("graph map is not injective; no inverse exists")
        return GraphMap.of({dst: src for src, dst in self.graph}, declared=self.declared)


@dataclass(frozen=True)
class IdentityMap(OrderMap):
    """Total identity on any chain; exact, never quantized."""

    declared: frozenset = frozenset(PROPERTIES)

    def apply(self, score: Score) -> Score:
        return score


IDENTITY = IdentityMap()


def compose_table(table: RankedTable, f: OrderMap) -> RankedTable:
    """Pointwise transform of a table's scores: row r scores f(old score).

    Requires f(bottom) = bottom, otherwise the result would assign nonzero
    scores to the (possibly infinitely many) absent tuples and stop being a
    ranked table.  Declared map properties are verified on the scores the
    map actually touches here (the table's range).
    """
    chain = table.chain
    if not f.fixes_bottom(chain):
        raise MapPropertyError(
            "order map does not send bottom to bottom; composing it with a "
            "table would not yield a ranked table"
        )
    images = f.apply_all({score for _, score in table})
    if f.declared:
        pool = list(images) + [chain.bottom]
        try:
            f.apply(chain.top)
        except MapDomainError:
            pass
        else:
            pool.append(chain.top)
        verify_declared(f, pool, chain)
    entries = {}
    for row, score in table:
        image = images[score]
        if not image.is_bottom:
            entries[row] = image
    return RankedTable(table.scheme, chain, entries)


def canonical_map(d1: RankedTable, d2: RankedTable) -> PiecewiseConstantMap:
    """The canonical order-preserving witness of ordinal inclusion.

    For d1 ordinally included in d2 it returns the map sending each score
    ``a`` to the least d2-score among rows whose d1-score reaches ``a``
    (empty set of such rows: top).  The result is piecewise-constant over
    the partition induced by d1's range, with adjacent equal-valued pieces
    merged, and satisfies ``compose_table(d1, f) == d2``.
    """
    from .ordinal import ordinally_included  # deferred: ordinal imports maps

    if d1.scheme != d2.scheme:
        raise NotIncludedError("tables on different schemes are never ordinally included")
    if not ordinally_included(d1, d2):
        raise NotIncludedError("first table is not ordinally included in the second")
    chain = d1.chain
    levels = sorted({score.value for _, score in d1})
    rows = list(d1)

    def image_of(threshold) -> Score:
        candidates = [d2.score_of(row) for row, score in rows if score.value >= threshold]
        result = chain.top
        for c in candidates:
            if c.value < result.value:
                result = c
        return result

    pieces: list[Piece] = []
    lo = chain.bottom
    for value in levels:
        hi = Score(chain, value)
        pieces.append(Piece(lo, hi, image_of(value)))
        lo = hi
    if lo < chain.top:
        pieces.append(Piece(lo, chain.top, chain.top))  # no d1 score reaches here
    merged: list[Piece] = []
    for piece in pieces:
        if merged and merged[-1].value == piece.value:
            merged[-1] = Piece(merged[-1].lo, piece.hi, piece.value)
        else:
            merged.append(piece)
    return PiecewiseConstantMap(
        chain, chain.bottom, tuple(merged), declared=frozenset(("preserving",))
    )


def witness_isomorphism(d1: RankedTable, d2: RankedTable) -> GraphMap:
    """An order isomorphism between the two ranges carrying d1 onto d2.

    Only exists when the tables are ordinally equivalent.  Both ranges are
    finite chains of equal length then, so matching them rank by rank gives
    the unique order isomorphism between them.
    """
    from .ordinal import ordinally_equivalent

    if d1.scheme != d2.scheme or not ordinally_equivalent(d1, d2):
        raise NotEquivalentError("tables are not ordinally equivalent")
    range1 = d1.range_of()
    range2 = d2.range_of()
    if len(range1) != len(range2):  # cannot happen under equivalence
        raise NotEquivalentError("ranges have different sizes")
    return GraphMap.of(zip(range1, range2), declared=frozenset(("embedding", "isomorphism")))


def extend_piecewise(f: GraphMap, chain: ScoreChain) -> PiecewiseConstantMap:
    """Total extension of a finite-graph map by upper infima.

    Sends ``a`` to the least f-image over graph inputs >= a (top when no
    input reaches ``a``); agrees with ``f`` on its domain and is order
    preserving whenever ``f`` is.
    """
    graph = sorted(f.graph, key=lambda kv: kv[0].value)
    if not graph:
        raise MapPropertyError("cannot extend an empty graph")
    suffix_min: list[Score] = [None] * len(graph)  # least image from i onward
    best = None
    for i in range(len(graph) - 1, -1, -1):
        img = graph[i][1]
        best = img if best is None or img.value < best.value else best
        suffix_min[i] = best

    bottom_value = suffix_min[0]
    if graph[0][0].is_bottom:
        bottom_value = graph[0][1]
    pieces: list[Piece] = []
    lo = chain.bottom
    for i, (src, _) in enumerate(graph):
        if src.is_bottom:
            continue
        pieces.append(Piece(lo, src, suffix_min[i]))
        lo = src
    if lo < chain.top:
        pieces.append(Piece(lo, chain.top, chain.top))
    merged: list[Piece] = []
    for piece in pieces:
        if merged and merged[-1].value == piece.value:
            merged[-1] = Piece(merged[-1].lo, piece.hi, piece.value)
        else:
            merged.append(piece)
    return PiecewiseConstantMap(chain, bottom_value, tuple(merged), declared=f.declared
                                & frozenset(("preserving",)))
