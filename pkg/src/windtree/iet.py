"""Interval exchange transformations.

An IET is stored by its labelled permutation pair and an exact length per
label (``Fraction`` or :class:`~windtree.numbers.QuadraticNumber`).  The
domain is ``[0, total)``, normalized to ``[0, 1)`` on construction unless
asked otherwise; points are exact numbers too, so forward and inverse
evaluation round-trip without error.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    DegenerateSubinterval,
    NonPositiveLength,
    OutOfDomain,
    ReduciblePermutation,
    SizeMismatch,
)
from .numbers import Interval, QuadraticNumber

__all__ = [
    "PermutationPair",
    "IET",
    "PiecewiseConstantFn",
    "make_iet",
    "evaluate",
    "birkhoff_sum",
    "orbit_letters",
    "induce",
    "first_return",
    "InducedPiece",
    "exact",
]


def exact(x):
    """Convert a number to an exact scalar.

    Floats are read as their shortest round-tripping decimal, so ``0.7``
    becomes ``7/10`` rather than the nearest dyadic.
    """
    if isinstance(x, (QuadraticNumber, Fraction)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    raise TypeError(f"no exact form for {type(x).__name__}")


@dataclass(frozen=True)
class PermutationPair:
    """Order of the labelled intervals before (``top``) and after (``bot``) the exchange."""

    top: tuple
    bot: tuple

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bot", tuple(self.bot))
        if len(self.top) != len(self.bot):
            raise SizeMismatch("top and bottom rows differ in size")
        if len(set(self.top)) != len(self.top) or set(self.top) != set(self.bot):
            raise SizeMismatch("rows are not permutations of the same alphabet")
        if not self.top:
            raise SizeMismatch("empty alphabet")

    @classmethod
    def from_strings(cls, top, bot):
        return cls(tuple(top.split()), tuple(bot.split()))

    @property
    def n(self):
        return len(self.top)

    @property
    def alphabet(self):
        return self.top

    def pi_top(self, a):
        return self.top.index(a) + 1

    def pi_bot(self, a):
        return self.bot.index(a) + 1

    def is_irreducible(self):
        for k in range(1, self.n):
            if set(self.top[:k]) == set(self.bot[:k]):
                return False
        return True

    def __str__(self):
        return " ".join(map(str, self.top)) + "\n" + " ".join(map(str, self.bot))


@dataclass(frozen=True)
class PiecewiseConstantFn:
    """A function constant on each continuity interval: ``values[label]``."""

    values: dict

    def __call__(self, label):
        return self.values[label]

    def vector(self, alphabet):
        return [self.values[a] for a in alphabet]

    @classmethod
    def from_vector(cls, alphabet, vec):
        return cls(dict(zip(alphabet, vec)))


@dataclass(frozen=True, eq=False)
class IET:
    perm: PermutationPair
    lengths: dict
    top_left: dict = field(repr=False)
    bot_left: dict = field(repr=False)
    _top_lefts: list = field(repr=False)
    _bot_lefts: list = field(repr=False)
    total: object = Fraction(1)

    @property
    def alphabet(self):
        return self.perm.top

    @property
    def n(self):
        return self.perm.n

    def length_vector(self, alphabet=None):
        return [self.lengths[a] for a in (alphabet or self.alphabet)]

    def enclosures(self):
        """Outward-rounded double enclosures of the lengths."""
        return {a: Interval.coerce(v) for a, v in self.lengths.items()}

    def letter_at(self, x):
        if x < 0 or x >= self.total:
            raise OutOfDomain(f"{x} not in [0, {self.total})")
        i = bisect.bisect_right(self._top_lefts, x) - 1
        return self.perm.top[i]

    def image_letter_at(self, y):
        if y < 0 or y >= self.total:
            raise OutOfDomain(f"{y} not in [0, {self.total})")
        i = bisect.bisect_right(self._bot_lefts, y) - 1
        return self.perm.bot[i]

    def translation(self, a):
        return self.bot_left[a] - self.top_left[a]

    def __call__(self, x):
        return evaluate(self, x)

    def discontinuities(self):
        """Left endpoints of the top intervals, ``x_0 = 0`` included."""
        return list(self._top_lefts)

    def same_exchange(self, other):
        """Equality up to relabelling."""
        if self.n != other.n:
            return False
        if [self.lengths[a] for a in self.perm.top] != [other.lengths[a] for a in other.perm.top]:
            return False
        mine = [self.perm.top.index(a) for a in self.perm.bot]
        theirs = [other.perm.top.index(a) for a in other.perm.bot]
        return mine == theirs

    def __eq__(self, other):
        if not isinstance(other, IET):
            return NotImplemented
        return self.perm == other.perm and self.lengths == other.lengths

    def __hash__(self):
        return hash((self.perm, tuple(self.lengths[a] for a in self.perm.top)))

    def to_text(self):
        enc = self.enclosures()
        parts = []
        for a in self.perm.top:
            v = self.lengths[a]
            ex = v.to_text() if isinstance(v, QuadraticNumber) else f"{v.numerator}/{v.denominator}"
            parts.append(f"{enc[a].mid!r}:{enc[a].rad!r}:{ex}")
        return "top " + " ".join(map(str, self.perm.top)) + "\nbot " + " ".join(
            map(str, self.perm.bot)) + "\nlengths " + " ".join(parts) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln.split() for ln in text.strip().splitlines()]
        rows = {ln[0]: ln[1:] for ln in lines}
        perm = PermutationPair(tuple(rows["top"]), tuple(rows["bot"]))
        lengths = []
        for tok in rows["lengths"]:
            ex = tok.split(":", 2)[2]
            lengths.append(QuadraticNumber.from_text(ex) if "," in ex else Fraction(ex))
        return make_iet(perm, lengths, normalize=False)


def make_iet(perm, lengths, normalize=True, min_size=2):
    """Validated IET on ``[0, 1)``.

    ``lengths`` is a list in top order or a dict keyed by label.  Lengths are
    rescaled to total 1 unless ``normalize`` is false, in which case the
    domain is ``[0, sum(lengths))``.
    """
    if not isinstance(perm, PermutationPair):
        perm = PermutationPair(*perm)
    if isinstance(lengths, dict):
        if set(lengths) != set(perm.top):
            raise SizeMismatch("length labels do not match the alphabet")
        vals = [lengths[a] for a in perm.top]
    else:
        vals = list(lengths)
        if len(vals) != perm.n:
            raise SizeMismatch(f"{len(vals)} lengths for {perm.n} intervals")
    if perm.n < min_size:
        raise SizeMismatch(f"need at least {min_size} intervals")
    vals = [exact(v) for v in vals]
    for v in vals:
        if not v > 0:
            raise NonPositiveLength(f"length {v} is not positive")
    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm).replace("\n", " / "))
    total = sum(vals[1:], vals[0])
    if normalize:
        vals = [v / total for v in vals]
    else:
        total = exact(total)
    lengths = dict(zip(perm.top, vals))
    top_left, pos = {}, Fraction(0)
    for a in perm.top:
        top_left[a] = pos
        pos = pos + lengths[a]
    bot_left, pos = {}, Fraction(0)
    for a in perm.bot:
        bot_left[a] = pos
        pos = pos + lengths[a]
    return IET(perm, lengths, top_left, bot_left,
               [top_left[a] for a in perm.top], [bot_left[a] for a in perm.bot],
               Fraction(1) if normalize else total)


def evaluate(T, x, direction="forward"):
    """``T(x)`` (half-open convention) or ``T^{-1}(x)``."""
    x = exact(x)
    if direction == "forward":
        a = T.letter_at(x)
        return x + (T.bot_left[a] - T.top_left[a])
    if direction == "inverse":
        a = T.image_letter_at(x)
        return x - (T.bot_left[a] - T.top_left[a])
    raise ValueError(f"unknown direction {direction!r}")


def _as_pair(v, d):
    """``v`` as ``(p, q, den)`` with ``v = (p + q sqrt(d)) / den``."""
    if isinstance(v, QuadraticNumber):
        if v.b and v.d != d:
            raise ValueError("mixed quadratic fields")
        return v.a, v.b, v.c
    v = Fraction(v)
    return v.numerator, 0, v.denominator


class _Orbit:
    """Exact forward orbits in ``Q(sqrt d)`` with integer coordinates.

    Points are stored as ``(p, q)`` over a common denominator; a float
    bisection finds the letter and exact integer comparisons settle any
    point that lies close to a breakpoint.
    """

    def __init__(self, T, x):
        vals = list(T.top_left.values()) + list(T.bot_left.values()) + [x, T.total]
        ds = {v.d for v in vals if isinstance(v, QuadraticNumber) and v.b}
        if len(ds) > 1:
            raise ValueError("mixed quadratic fields")
        self.d = d = ds.pop() if ds else 5
        den = 1
        for v in vals:
            den = math.lcm(den, _as_pair(v, d)[2])
        self.den = den

        def ints(v):
            p, q, c = _as_pair(v, d)
            return p * (den // c), q * (den // c)

        self.ints = ints
        self.s = math.sqrt(d)
        order = list(T.perm.top)
        self.letters = order
        self.lefts = [ints(T.top_left[a]) for a in order]
        self.flefts = [self._f(v) for v in self.lefts]
        self.shift = [tuple(u - w for u, w in zip(ints(T.bot_left[a]), ints(T.top_left[a]))) for a in order]

    def _f(self, v):
        return (v[0] + v[1] * self.s) / self.den

    def _ge(self, u, v):
        """Exact ``u >= v``."""
        dp, dq = u[0] - v[0], u[1] - v[1]
        if dp >= 0 and dq >= 0:
            return True
        if dp <= 0 and dq <= 0:
            return dp == 0 and dq == 0
        lhs, rhs = dp * dp, self.d * dq * dq
        return lhs >= rhs if dp > 0 else lhs <= rhs

    def index(self, v):
        xf = self._f(v)
        i = bisect.bisect_right(self.flefts, xf) - 1
        i = max(i, 0)
        tol = 1e-9 * (1 + abs(xf))
        while i + 1 < len(self.lefts) and abs(self.flefts[i + 1] - xf) < tol and self._ge(v, self.lefts[i + 1]):
            i += 1
        while i > 0 and abs(self.flefts[i] - xf) < tol and not self._ge(v, self.lefts[i]):
            i -= 1
        return i

    def letters_along(self, x, n):
        p, q = self.ints(x)
        s, den = self.s, self.den
        fl, letters, shift = self.flefts, self.letters, self.shift
        last = len(fl) - 1
        out = []
        for _ in range(n):
            xf = (p + q * s) / den
            i = bisect.bisect_right(fl, xf) - 1
            tol = 1e-9 * (1 + abs(xf))
            if i < 0 or xf - fl[i] < tol or (i < last and fl[i + 1] - xf < tol):
                i = self.index((p, q))
            out.append(letters[i])
            sp, sq = shift[i]
            p += sp
            q += sq
        return out


def orbit_letters(T, x, n):
    """Letters of ``x, T x, ..., T^(n-1) x`` computed exactly."""
    x = exact(x)
    if x < 0 or x >= T.total:
        raise OutOfDomain(f"{x} not in [0, {T.total})")
    return _Orbit(T, x).letters_along(x, n)


def birkhoff_sum(T, phi, x, n):
    """``S_n phi(x) = sum_{k<n} phi(T^k x)`` by direct iteration."""
    if n < 0:
        raise ValueError("n must be non-negative")
    values = phi.values if isinstance(phi, PiecewiseConstantFn) else phi
    total = 0
    for a in orbit_letters(T, x, n):
        total = total + values[a]
    return total


@dataclass
class InducedPiece:
    """One continuity interval of a first-return map."""

    left: object
    length: object
    time: int
    image_left: object
    itinerary: list
    label: object = None


def induce(T, pieces, budget=10**6):
    """First return of ``T`` to a finite union of subintervals.

    ``pieces`` is a list of ``(left, right)`` pairs (half-open, disjoint).
    Returns the list of :class:`InducedPiece` sorted by left endpoint.  Every
    start interval is split exactly at the points where the return time or
    the itinerary changes.
    """
    base = sorted((exact(u), exact(v)) for u, v in pieces)
    for u, v in base:
        if not (0 <= u < v <= T.total):
            raise DegenerateSubinterval(f"bad piece [{u}, {v})")
    for (_, v1), (u2, _) in zip(base, base[1:]):
        if u2 < v1:
            raise DegenerateSubinterval("pieces overlap")
    cuts = sorted({p for uv in base for p in uv})
    cut_lefts = [u for u, _ in base]

    def in_base(u):
        i = bisect.bisect_right(cut_lefts, u) - 1
        return i >= 0 and u < base[i][1]

    tops = T._top_lefts
    out = []
    # stack entries: (start_left, length, current_left, time, itinerary)
    stack = [(u, v - u, u, 0, []) for u, v in reversed(base)]
    steps = 0
    while stack:
        start, length, cur, t, itin = stack.pop()
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"first return not found within {budget} interval steps")
        right = cur + length
        # split by the discontinuities of T inside (cur, right)
        i = bisect.bisect_right(tops, cur) - 1
        segs = []
        a_pos = cur
        while True:
            a = T.perm.top[i]
            end = tops[i + 1] if i + 1 < len(tops) else T.total
            seg_end = end if end < right else right
            segs.append((a_pos, seg_end - a_pos, a))
            if not end < right:
                break
            a_pos = end
            i += 1
        for s_cur, s_len, a in reversed(segs):
            s_start = start + (s_cur - cur)
            img = s_cur + (T.bot_left[a] - T.top_left[a])
            img_right = img + s_len
            # split the image by the base boundaries
            inner = [p for p in cuts if img < p < img_right]
            bounds = [img] + inner + [img_right]
            for lo, hi in reversed(list(zip(bounds, bounds[1:]))):
                off = lo - img
                entry = (s_start + off, hi - lo, lo, t + 1, itin + [a])
                if in_base(lo):
                    out.append(InducedPiece(entry[0], entry[1], t + 1, lo, itin + [a]))
                else:
                    stack.append(entry)
    out.sort(key=lambda p: p.left)
    return out


def _label_pieces(pieces):
    counts = {}
    for p in pieces:
        counts[p.itinerary[0]] = counts.get(p.itinerary[0], 0) + 1
    seen = {}
    for p in pieces:
        a = p.itinerary[0]
        if counts[a] == 1:
            p.label = a
        else:
            seen[a] = seen.get(a, 0) + 1
            p.label = f"{a}.{seen[a]}"
    return pieces


def first_return(T, length, budget=10**6):
    """Induced IET of ``T`` on ``[0, length)`` and its return times.

    Returns ``(S, times)`` where ``S`` is the induced map on ``[0, length)``
    and ``times`` maps each label of ``S`` to its return time.
    Labels are the first letter visited, suffixed when a letter splits.
    """
    length = exact(length)
    if not (0 < length <= T.total):
        raise DegenerateSubinterval(f"length {length} not in (0, {T.total}]")
    pieces = _label_pieces(induce(T, [(0, length)], budget))
    top = tuple(p.label for p in pieces)
    bot = tuple(p.label for p in sorted(pieces, key=lambda p: p.image_left))
    S = make_iet(PermutationPair(top, bot), [p.length for p in pieces],
                 normalize=False, min_size=1)
    return S, {p.label: p.time for p in pieces}
