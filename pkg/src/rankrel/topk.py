"""Threshold-style top-k evaluation of a minimum-scored join chain.

Each source offers sorted access (its answer set in descending score order,
ties broken canonically) and random access (tuples matching a partial join
key).  Round-robin sorted access feeds a threshold equal to the minimum of
the per-source last-seen scores; because every join involving a newly seen
tuple is completed immediately through random access, any join still
unmaterialized is built entirely from unseen tuples and therefore cannot
score above the threshold.  We halt once k materialized results score
strictly above it, which also pins the canonical tie order to match the
brute-force oracle exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import algebra
from .chain import Score
from .errors import IncompatibleChainError, RankrelError
from .table import RankedTable, Row, join_rows


class TopKError(RankrelError):
    pass


@dataclass
class SortedSource:
    """A materialized table wrapped with sorted and random access paths."""

    table: RankedTable
    ranked: list[tuple[Row, Score]] = field(default_factory=list)
    _indexes: dict = field(default_factory=dict)

    @classmethod
    def from_table(cls, table: RankedTable) -> "SortedSource":
        return cls(table, table.rows_by_rank())

    @property
    def names(self) -> frozenset[str]:
        return self.table.scheme.name_set

    def lookup(self, key_names: tuple[str, ...], key: tuple) -> list[tuple[Row, Score]]:
        """Random access: all tuples whose projection onto key_names matches."""
        index = self._indexes.get(key_names)
        if index is None:
            index = {}
            for row, score in self.ranked:
                index.setdefault(row.project(key_names).key(), []).append((row, score))
            self._indexes[key_names] = index
        return index.get(key, [])


@dataclass(frozen=True)
class TopKResult:
    items: tuple[tuple[Row, Score], ...]
    sorted_accesses: int = 0
    random_accesses: int = 0


def _rank_order(items: Iterable[tuple[Row, Score]]) -> list[tuple[Row, Score]]:
    return sorted(items, key=lambda kv: (-kv[1].value, kv[0].key()))


def brute_force_top_k(sources: Sequence[SortedSource], k: int) -> TopKResult:
    """Oracle: materialize the whole join, sort, truncate."""
    if k < 1:
        raise TopKError("k must be at least 1")
    joined: Optional[RankedTable] = None
    for source in sources:
        joined = source.table if joined is None else algebra.natural_join(joined, source.table)
    if joined is None:
        raise TopKError("need at least one source")
    return TopKResult(tuple(_rank_order(list(joined))[:k]))


def top_k(sources: Sequence[SortedSource], k: int) -> TopKResult:
    """The k best tuples of the full join, scored by the minimum.

    Exactly equals the brute-force oracle's list under the canonical tie
    order, but typically touches only a prefix of each source.
    """
    if k < 1:
        raise TopKError("k must be at least 1")
    if not sources:
        raise TopKError("need at least one source")
    chain = sources[0].table.chain
    for source in sources[1:]:
        if source.table.chain != chain:
            raise IncompatibleChainError("sources live on different score chains")

    n = len(sources)
    positions = [0] * n
    last_seen: list[Score] = [chain.top] * n
    results: dict[Row, Score] = {}
    counters = {"sorted": 0, "random": 0}

    # Completion orders and join-key attribute tuples are fixed per starting
    # source, so random-access indexes can be reused across accesses.
    plans: list[list[tuple[int, tuple[str, ...]]]] = []
    for start in range(n):
        seen_names = set(sources[start].names)
        plan = []
        for other in range(n):
            if other == start:
                continue
            key_names = tuple(sorted(seen_names & sources[other].names))
            plan.append((other, key_names))
            seen_names |= sources[other].names
        plans.append(plan)

    def complete(start: int, row: Row, score: Score) -> None:
        partial = [(row, score)]
        for other, key_names in plans[start]:
            counters["random"] += len(partial)
            extended = []
            for accumulated, acc_score in partial:
                key = accumulated.project(key_names).key()
                for match, match_score in sources[other].lookup(key_names, key):
                    merged_score = match_score if match_score.value < acc_score.value else acc_score
                    extended.append((join_rows(accumulated, match), merged_score))
            partial = extended
            if not partial:
                return
        for joined, joined_score in partial:
            results.setdefault(joined, joined_score)

    def threshold() -> Score:
        value = None
        for i in range(n):
            current = last_seen[i] if positions[i] <= len(sources[i].ranked) else chain.bottom
            if value is None or current.value < value.value:
                value = current
        return value

    def can_stop() -> bool:
        gate = threshold()
        above = sum(1 for score in results.values() if score.value > gate.value)
        return above >= k

    while True:
        progressed = False
        for i in range(n):
            ranked = sources[i].ranked
            if positions[i] >= len(ranked):
                if positions[i] == len(ranked):
                    positions[i] += 1
                    last_seen[i] = chain.bottom  # exhausted: no unseen tuple remains
                continue
            row, score = ranked[positions[i]]
            positions[i] += 1
            last_seen[i] = score
            counters["sorted"] += 1
            progressed = True
            complete(i, row, score)
            if can_stop():
                ordered = _rank_order(results.items())[:k]
                return TopKResult(tuple(ordered), counters["sorted"], counters["random"])
        if not progressed:
            break  # every source exhausted: results hold the entire join

    ordered = _rank_order(results.items())[:k]
    return TopKResult(tuple(ordered), counters["sorted"], counters["random"])
