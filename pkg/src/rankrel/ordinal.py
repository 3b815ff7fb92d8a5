"""Ordinal inclusion and equivalence of ranked tables via score cones.

The upper cone of a row collects every tuple scoring at least as high; a
table is ordinally included in another when every upper cone of the first
is contained in the corresponding cone of the second, and two tables are
ordinally equivalent when inclusion holds both ways (same tuple ordering by
score, regardless of the actual score values).

Cones over unbounded attribute types are infinite as soon as score-0 tuples
enter, so the decision procedures below reduce everything to finite scans
over answer sets; explicitly finite schemes fall back to direct enumeration
when their whole domain is covered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import SchemeError
from .table import RankedTable, Row

#: Cap on enumerating explicitly finite tuple domains.
ENUMERATION_CAP = 100_000


@dataclass(frozen=True)
class Cone:
    """A cone of tuples: a finite known part plus optionally everything else.

    ``rest`` records whether every tuple outside the union of the two answer
    sets also belongs (those tuples all score bottom, so lower cones always
    have ``rest`` set and an upper cone has it exactly when the witness row
    scores bottom).
    """

    known: frozenset[Row]
    rest: bool

    @property
    def is_all_tuples(self) -> bool:
        return self.rest


@dataclass(frozen=True)
class ConeReport:
    row: Row
    upper: Cone
    lower: Cone


def upper_cone(d: RankedTable, row: Row) -> Cone:
    """Rows of d scoring at least as high as ``row`` does."""
    score = d.score_of(row)
    if score.is_bottom:
        return Cone(d.answer_set, rest=True)
    known = frozenset(r for r, s in d if s.value >= score.value)
    return Cone(known, rest=False)


def lower_cone(d: RankedTable, row: Row) -> Cone:
    """Rows of d scoring at most as high as ``row`` does (absent rows always do)."""
    score = d.score_of(row)
    known = frozenset(r for r, s in d if s.value <= score.value)
    return Cone(known, rest=True)


def cone_report(d: RankedTable, row: Row) -> ConeReport:
    return ConeReport(row, upper_cone(d, row), lower_cone(d, row))


def _check_comparable(d1: RankedTable, d2: RankedTable) -> None:
    if d1.scheme != d2.scheme:
        raise SchemeError("ordinal comparison needs equal schemes")
    if d1.chain != d2.chain:
        raise SchemeError("ordinal comparison needs one shared chain")


def _covers_whole_domain(d: RankedTable) -> bool:
    size = d.scheme.domain_size()
    return size is not None and size == len(d)


def _included_reduced(d1: RankedTable, d2: RankedTable) -> bool:
    """Finite decision assuming some tuple has d2-score bottom.

    Then inclusion is equivalent to: (a) d2's answer set is contained in
    d1's (a row absent from d1 has an all-tuples upper cone, which d2 can
    only match by sending the row to bottom as well), and (b) among rows of
    d1's answer set, the d1 order is respected by the d2 scores, reading d2
    as bottom off its answer set.
    """
    if not d2.answer_set <= d1.answer_set:
        return False
    ranked = sorted(d1, key=lambda kv: -kv[1].value)
    previous_level = None
    previous_d2 = None
    level_d2 = None
    for row, score in ranked:
        image = d2.score_of(row)
        if previous_level is not None and score.value == previous_level:
            if image.value != level_d2.value:
                return False  # a d1 tie must stay a d2 tie
        else:
            if previous_d2 is not None and image.value > previous_d2.value:
                return False  # strictly lower d1 rank may not rise in d2
            level_d2 = image
        previous_level = score.value
        previous_d2 = level_d2
    return True


def _included_enumerated(d1: RankedTable, d2: RankedTable) -> bool:
    """Direct cone comparison over an explicitly finite tuple domain."""
    domain = d1.scheme.enumerate_rows(ENUMERATION_CAP)
    for row in domain:
        score1 = d1.score_of(row)
        score2 = d2.score_of(row)
        for other in domain:
            if d1.score_of(other).value >= score1.value and d2.score_of(other).value < score2.value:
                return False
    return True


def ordinally_included(d1: RankedTable, d2: RankedTable) -> bool:
    """Whether every upper cone of d1 is contained in d2's cone of the same row."""
    _check_comparable(d1, d2)
    if _covers_whole_domain(d2):
        return _included_enumerated(d1, d2)
    return _included_reduced(d1, d2)


def ordinally_included_lower(d1: RankedTable, d2: RankedTable) -> bool:
    """The same relation decided through lower cones (the dual characterization)."""
    _check_comparable(d1, d2)
    if _covers_whole_domain(d2):
        domain = d1.scheme.enumerate_rows(ENUMERATION_CAP)
        for row in domain:
            s1, s2 = d1.score_of(row), d2.score_of(row)
            for other in domain:
                if d1.score_of(other).value <= s1.value and d2.score_of(other).value > s2.value:
                    return False
        return True
    # Rows absent from d1 sit in every lower cone of d1; containment forces
    # them to bottom in d2 as well, which is condition (a) again.  On the
    # answer set the lower-cone condition is the contrapositive scan of (b).
    if not d2.answer_set <= d1.answer_set:
        return False
    rows = list(d1)
    for row, score in rows:
        image = d2.score_of(row)
        for other, other_score in rows:
            if other_score.value <= score.value and d2.score_of(other).value > image.value:
                return False
    return True


def ordinally_equivalent(d1: RankedTable, d2: RankedTable) -> bool:
    return ordinally_included(d1, d2) and ordinally_included(d2, d1)


def rank_signature(d: RankedTable) -> tuple[frozenset[Row], ...]:
    """Answer-set rows grouped by score, best group first.

    Under the convention that some tuple scores bottom in every table (true
    for unbounded attribute types), two tables are ordinally equivalent
    exactly when their signatures are equal.
    """
    groups: dict = {}
    for row, score in d:
        groups.setdefault(score.value, set()).add(row)
    return tuple(frozenset(groups[value]) for value in sorted(groups, reverse=True))


def first_inclusion_violation(d1: RankedTable, d2: RankedTable) -> Optional[Row]:
    """First row (canonical order) whose d1 upper cone escapes its d2 cone.

    Returns None when d1 is ordinally included in d2.  Used as CLI evidence.
    """
    _check_comparable(d1, d2)
    if _covers_whole_domain(d2):
        domain = sorted(d1.scheme.enumerate_rows(ENUMERATION_CAP), key=Row.key)
        for row in domain:
            s1, s2 = d1.score_of(row), d2.score_of(row)
            if any(
                d1.score_of(o).value >= s1.value and d2.score_of(o).value < s2.value
                for o in domain
            ):
                return row
        return None
    rows = sorted(d1.answer_set, key=Row.key)
    for row in rows:
        score = d1.score_of(row)
        image = d2.score_of(row)
        for other in d1.answer_set:
            if d1.score_of(other).value >= score.value and d2.score_of(other).value < image.value:
                return row
    for row in sorted(d2.answer_set - d1.answer_set, key=Row.key):
        return row  # d1-absent row: its all-tuples cone cannot be matched
    return None
