"""Symbolic codes: words, eventually periodic sequences and the grammar rules.

Positions are always counted from the point: position 0 is the symbol right
of the ``.``.  Rule checks use the polyhedron's adjacency data:

* rule A: no symbol is immediately repeated;
* rule B: for adjacent faces ``i, j`` the factors ``(ij)^(lam+1)`` and
  ``(ji)^(lam+1)`` do not occur (odd alternations such as ``1212121`` for
  ``lam = 3`` are allowed);
* rule C: no periodic tail uses only faces meeting at one vertex.  It only
  concerns infinite tails, so it is vacuous for finite words.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

from hypbilliard.errors import AlphabetMismatch, CodeSyntaxError, PointOutOfRange


@dataclass(frozen=True)
class Word:
    symbols: tuple
    point: int = 0

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not 0 <= self.point <= len(self.symbols):
            raise PointOutOfRange(f"point {self.point} outside 0..{len(self.symbols)}")

    def __len__(self):
        return len(self.symbols)

    def at(self, n):
        """Symbol at position ``n`` relative to the point."""
        i = n + self.point
        if not 0 <= i < len(self.symbols):
            raise PointOutOfRange(f"position {n} not in the word")
        return self.symbols[i]

    @property
    def positions(self):
        return range(-self.point, len(self.symbols) - self.point)

    def __str__(self):
        left = " ".join(map(str, self.symbols[: self.point]))
        right = " ".join(map(str, self.symbols[self.point :]))
        return " ".join(s for s in (left, ".", right) if s)


@dataclass(frozen=True)
class EventuallyPeriodicCode:
    """``...LLL core RRR...`` with the point inside ``core``."""

    left_period: tuple
    core: Word
    right_period: tuple
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "left_period", tuple(int(s) for s in self.left_period))
        object.__setattr__(self, "right_period", tuple(int(s) for s in self.right_period))
        if not self.left_period or not self.right_period:
            raise CodeSyntaxError("periods must be nonempty")

    @classmethod
    def periodic(cls, period, k=None):
        return cls(period, Word((), 0), period, k)

    def at(self, n):
        i = n + self.core.point
        L = len(self.core.symbols)
        if i < 0:
            return self.left_period[i % len(self.left_period)]
        if i >= L:
            return self.right_period[(i - L) % len(self.right_period)]
        return self.core.symbols[i]

    def window(self, lo, hi):
        """Word of positions ``lo .. hi - 1`` with the point kept at position 0."""
        if not lo <= 0 <= hi:
            raise PointOutOfRange("window must contain the point")
        return Word(tuple(self.at(n) for n in range(lo, hi)), -lo)

    @property
    def preperiod(self):
        """Positions ``(lo, hi)`` outside of which the sequence is purely periodic."""
        return -self.core.point, len(self.core.symbols) - self.core.point

    def __str__(self):
        left = " ".join(map(str, self.left_period))
        right = " ".join(map(str, self.right_period))
        return f"({left})* {self.core} ({right})*".replace("  ", " ")


@dataclass(frozen=True)
class RuleViolation:
    rule: str  # "A", "B" or "C"
    position: object  # int position, or "left" / "right" for tail violations
    witness: tuple

    def __str__(self):
        w = " ".join(map(str, self.witness))
        return f"RuleViolation {self.rule} at {self.position}: {w}"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\(|\)\*|\.|\d+|\S")


def parse(text):
    """Parse ``"1 2 . 3"`` into a Word or ``"(3 4)* 1 . 2 (1 4)*"`` into a code.

    A word without a point is pointed at its first symbol.
    """
    items = []  # ints, "." or ("period", [...])
    period = None
    for tok in _TOKEN.findall(text):
        if tok == "(":
            if period is not None:
                raise CodeSyntaxError("nested parentheses")
            period = []
        elif tok == ")*":
            if period is None:
                raise CodeSyntaxError("unbalanced ')*'")
            items.append(("period", period))
            period = None
        elif tok == ".":
            if period is not None:
                raise CodeSyntaxError("point inside a period")
            items.append(".")
        elif tok.isdigit():
            (period if period is not None else items).append(int(tok))
        else:
            raise CodeSyntaxError(f"unexpected token {tok!r}")
    if period is not None:
        raise CodeSyntaxError("unclosed period")
    if items.count(".") > 1:
        raise CodeSyntaxError("more than one point")
    periods = [i for i, it in enumerate(items) if isinstance(it, tuple)]
    if not periods:
        return _word(items)
    if periods != [0, len(items) - 1] or len(periods) != 2:
        raise CodeSyntaxError("an eventually periodic code reads '(left)* core (right)*'")
    return EventuallyPeriodicCode(items[0][1], _word(items[1:-1]), items[-1][1])


def _word(items):
    symbols = [it for it in items if it != "."]
    point = items.index(".") if "." in items else 0
    return Word(symbols, point)


# ---------------------------------------------------------------------------
# rule checks


def _check_alphabet(symbols, poly, k=None):
    if k is not None and k != poly.k:
        raise AlphabetMismatch(f"code alphabet size {k} differs from k = {poly.k}")
    labels = set(poly.labels)
    bad = sorted(set(symbols) - labels)
    if bad:
        raise AlphabetMismatch(f"symbols {bad} are not face labels")


def _first_violation(symbols, poly, offset=0):
    """First rule A or B violation in a finite symbol list (positions shifted by ``offset``)."""
    n = len(symbols)
    for i in range(n - 1):
        if symbols[i] == symbols[i + 1]:
            return RuleViolation("A", i + offset, (symbols[i], symbols[i + 1]))
    # maximal alternating runs x y x y ...
    i = 0
    while i < n - 1:
        j = i + 2
        while j < n and symbols[j] == symbols[j - 2]:
            j += 1
        a, b = symbols[i], symbols[i + 1]
        if poly.adjacent(a, b):
            limit = 2 * (poly.lam(a, b) + 1)
            if j - i >= limit:
                return RuleViolation("B", i + offset, tuple(symbols[i : i + limit]))
        i = j - 1
    return None


def validate_word(w, poly):
    """Return the first violation of rules A/B in ``w``, or ``None`` if valid."""
    poly.require_coding()
    _check_alphabet(w.symbols, poly)
    return _first_violation(list(w.symbols), poly, offset=-w.point)


def _tail_window(poly):
    return 2 * poly.max_lambda + 2


def validate_code(c, poly):
    """Check rules A, B and C on an eventually periodic code; ``None`` if valid."""
    poly.require_coding()
    _check_alphabet(c.left_period + c.core.symbols + c.right_period, poly, c.k)
    v = _violation_ab(c, poly)
    if v is not None:
        return v
    return _violation_c(c, poly)


def _violation_ab(c, poly):
    reps = _tail_window(poly)
    lo, hi = c.preperiod
    lo -= reps * len(c.left_period)
    hi += reps * len(c.right_period)
    return _first_violation([c.at(n) for n in range(lo, hi)], poly, offset=lo)


def _violation_c(c, poly):
    vertex_sets = poly.vertex_label_sets()
    for side, period in (("left", c.left_period), ("right", c.right_period)):
        if any(set(period) <= vs for vs in vertex_sets):
            return RuleViolation("C", side, period)
    return None


def forbidden_words(poly):
    """Finite forbidden set of the closure shift: ``ii`` and ``(ij)^(lam+1)``."""
    poly.require_coding()
    words = {(i, i) for i in poly.labels}
    for pair in poly.adjacency:
        i, j = sorted(pair)
        m = poly.lam(i, j) + 1
        words.add((i, j) * m)
        words.add((j, i) * m)
    return words


def in_X_tilde(c, poly):
    poly.require_coding()
    _check_alphabet(c.left_period + c.core.symbols + c.right_period, poly, c.k)
    return _violation_ab(c, poly) is None


def in_X(c, poly):
    return validate_code(c, poly) is None


# ---------------------------------------------------------------------------
# shift dynamics


def shift(c, s):
    """Move the point ``s`` places to the right (sigma^s)."""
    if isinstance(c, Word):
        return Word(c.symbols, c.point + s)
    p = c.core.point + s
    core = list(c.core.symbols)
    left, right = list(c.left_period), list(c.right_period)
    # unroll periods into the core until the point lies inside it
    while p > len(core):
        core.append(right[0])
        right = right[1:] + right[:1]
    while p < 0:
        sym = left[-1]
        core.insert(0, sym)
        left = left[-1:] + left[:-1]
        p += 1
    return EventuallyPeriodicCode(left, Word(core, p), right, c.k)


def _equal_bound(x, y):
    lo = min(x.preperiod[0], y.preperiod[0]) - math.lcm(len(x.left_period), len(y.left_period))
    hi = max(x.preperiod[1], y.preperiod[1]) + math.lcm(len(x.right_period), len(y.right_period))
    return lo, hi


def same_sequence(x, y):
    """Exact equality of the pointed bi-infinite sequences."""
    lo, hi = _equal_bound(x, y)
    return all(x.at(n) == y.at(n) for n in range(lo, hi))


class SequenceDistance(NamedTuple):
    value: float
    at_horizon: bool


def sequence_metric(x, y, horizon=64):
    """``1 / 2^m`` with ``m`` the largest radius of agreement ``x_n = y_n, |n| < m``.

    Equal sequences give 0.  If agreement persists up to ``horizon``, or up
    to the end of a finite word, the value is ``1 / 2^m`` for that last ``m``
    and ``at_horizon`` is set.
    """
    if not isinstance(x, Word) and not isinstance(y, Word) and same_sequence(x, y):
        return SequenceDistance(0.0, False)
    for m in range(horizon):
        try:
            differ = x.at(m) != y.at(m) or x.at(-m) != y.at(-m)
        except PointOutOfRange:
            return SequenceDistance(2.0**-m, True)
        if differ:
            return SequenceDistance(2.0**-m, False)
    return SequenceDistance(2.0**-horizon, True)


def orbit_equal(x, y, horizon=32):
    """True if some ``sigma^s x`` with ``|s| <= horizon`` agrees with ``y`` on ``|n| < horizon``."""
    for s in range(-horizon, horizon + 1):
        if all(x.at(n + s) == y.at(n) for n in range(-horizon + 1, horizon)):
            return True
    return False
