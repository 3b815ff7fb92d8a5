"""Bounded totally ordered score chains and their logical connectives.

Scores live on a chain: exact rationals in [0, 1] (the default carrier) or a
user-declared finite chain of named levels.  Every connective here is purely
order-based, so both carriers behave identically.  Mixing scores from
incompatible chains is a hard error, never an implicit coercion.

On a chain the derived connectives collapse to case splits:

    residuum(a, b)   = top  if a <= b else b
    abjunction(a, b) = bottom if a <= b else a
    negation(a)      = top  if a == bottom else bottom
    biresiduum(a, b) = top  if a == b else min(a, b)

Restricted to {bottom, top} they reproduce the Boolean truth tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ChainError, IncompatibleChainError

Rational = Union[Fraction, int]


def quantize(value: Union[Fraction, float], places: int = 6) -> Fraction:
    """Round a numeric value onto the 10**-places decimal grid (half-even)."""
    grid = 10**places
    if isinstance(value, float):
        value = Fraction(value)  # exact binary expansion
    return Fraction(round(value * grid), grid)


def clamp01(value: Fraction) -> Fraction:
    if value < 0:
        return Fraction(0)
    if value > 1:
        return Fraction(1)
    return value


def exact_decimal_str(value: Fraction) -> str:
    """Exact text form: terminating decimal when possible, else ``p/q``."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    places = max(twos, fives)
    digits = num * 10**places // den
    text = str(digits).rjust(places + 1, "0")
    return f"{text[:-places]}.{text[-places:]}"


def fixed_decimal_str(value: Fraction, places: int) -> str:
    """Round to ``places`` decimals (half-even) and render with trailing zeros."""
    scaled = round(value * 10**places)
    text = str(scaled).rjust(places + 1, "0")
    return f"{text[:-places]}.{text[-places:]}"


@dataclass(frozen=True)
class ScoreChain:
    """Carrier descriptor: rational unit interval, or named finite levels.

    ``levels`` is ``None`` for the exact-rational carrier; otherwise it lists
    the level names from bottom to top.  Chains are compatible (and their
    scores interoperate) exactly when their descriptors are equal.
    """

    levels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.levels is not None:
            if len(self.levels) < 2:
                raise ChainError("a symbolic chain needs at least two levels")
            if len(set(self.levels)) != len(self.levels):
                raise ChainError(f"duplicate level names in {self.levels}")

    @property
    def is_rational(self) -> bool:
        return self.levels is None

    @property
    def bottom(self) -> "Score":
        return Score(self, Fraction(0) if self.is_rational else 0)

    @property
    def top(self) -> "Score":
        if self.is_rational:
            return Score(self, Fraction(1))
        return Score(self, len(self.levels) - 1)

    def score(self, raw) -> "Score":
        """Build a score on this chain, validating the carrier bounds."""
        if self.is_rational:
            if isinstance(raw, bool) or not isinstance(raw, (int, Fraction)):
                raise ChainError(f"rational scores take Fraction or int, got {raw!r}")
            value = Fraction(raw)
            if not 0 <= value <= 1:
                raise ChainError(f"score {value} outside [0, 1]")
            return Score(self, value)
        if isinstance(raw, str):
            try:
                return Score(self, self.levels.index(raw))
            except ValueError:
                raise ChainError(
                    f"unknown level {raw!r}; chain levels are {self.levels}"
                ) from None
        if isinstance(raw, int) and not isinstance(raw, bool):
            if 0 <= raw < len(self.levels):
                return Score(self, raw)
        raise ChainError(f"symbolic scores take a level name, got {raw!r}")

    def parse(self, text: str) -> "Score":
        """Parse score text: exact decimal or ``p/q`` (rational), or a level name."""
        text = text.strip()
        if self.is_rational:
            try:
                return self.score(Fraction(text))
            except (ValueError, ZeroDivisionError):
                raise ChainError(f"cannot parse rational score from {text!r}") from None
        return self.score(text)

    def format(self, s: "Score", places: Optional[int] = 3) -> str:
        """Render a score: fixed decimals, exact text (``places=None``), or level name."""
        _require_chain(self, s)
        if not self.is_rational:
            return self.levels[s.value]
        if places is None:
            return exact_decimal_str(s.value)
        return fixed_decimal_str(s.value, places)


#: The default chain: exact rationals in [0, 1].
RATIONAL = ScoreChain()


def symbolic_chain(spec: str) -> ScoreChain:
    """Build a symbolic chain from ``"none < low < high < full"`` text."""
    levels = tuple(part.strip() for part in spec.split("<"))
    if any(not level for level in levels):
        raise ChainError(f"malformed chain levels: {spec!r}")
    return ScoreChain(levels)


@dataclass(frozen=True)
class Score:
    """An element of a score chain.  Comparison is exact and total."""

    chain: ScoreChain
    value: Union[Fraction, int]

    def __lt__(self, other: "Score") -> bool:
        _require_chain(self.chain, other)
        return self.value < other.value

    def __le__(self, other: "Score") -> bool:
        _require_chain(self.chain, other)
        return self.value <= other.value

    def __gt__(self, other: "Score") -> bool:
        return not self <= other

    def __ge__(self, other: "Score") -> bool:
        return not self < other

    @property
    def is_bottom(self) -> bool:
        return self.value == self.chain.bottom.value

    @property
    def is_top(self) -> bool:
        return self.value == self.chain.top.value

    def __repr__(self) -> str:
        if self.chain.is_rational:
            return f"Score({exact_decimal_str(self.value)})"
        return f"Score({self.chain.levels[self.value]!r})"


def _require_chain(chain: ScoreChain, s: Score) -> None:
    if s.chain != chain:
        raise IncompatibleChainError(
            f"score on {s.chain} used with chain {chain}; carriers must match"
        )


def _pair(a: Score, b: Score) -> None:
    if a.chain != b.chain:
        raise IncompatibleChainError(
            f"cannot combine scores from different chains: {a!r} and {b!r}"
        )


def meet(a: Score, b: Score) -> Score:
    """Greatest lower bound; on a chain, the smaller score."""
    _pair(a, b)
    return a if a.value <= b.value else b


def join_sup(a: Score, b: Score) -> Score:
    """Least upper bound; on a chain, the larger score."""
    _pair(a, b)
    return a if a.value >= b.value else b


def residuum(a: Score, b: Score) -> Score:
    """Chain implication, adjoint to meet: meet(a,b) <= c iff a <= residuum(b,c)."""
    _pair(a, b)
    return a.chain.top if a.value <= b.value else b


def abjunction(a: Score, b: Score) -> Score:
    """Chain non-implication, adjoint to join: abjunction(a,b) <= c iff a <= join(b,c)."""
    _pair(a, b)
    return a.chain.bottom if a.value <= b.value else a


def negation(a: Score) -> Score:
    return a.chain.top if a.is_bottom else a.chain.bottom


def biresiduum(a: Score, b: Score) -> Score:
    _pair(a, b)
    return a.chain.top if a.value == b.value else meet(a, b)


def min_score(scores, default: Score) -> Score:
    """Minimum of finitely many scores; ``default`` is the empty-set infimum."""
    result = default
    for s in scores:
        _pair(result, s)
        if s.value < result.value:
            result = s
    return result


def max_score(scores, default: Score) -> Score:
    """Maximum of finitely many scores; ``default`` is the empty-set supremum."""
    result = default
    for s in scores:
        _pair(result, s)
        if s.value > result.value:
            result = s
    return result
