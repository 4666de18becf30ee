"""Exact real quadratic numbers and outward-rounded double intervals.

Positions on a section are kept exactly whenever the data allows it
(periodic directions of square-tiled wind-trees and the golden rotation
both live in Q(sqrt 5)); derived reals such as transfer-function values
are carried as :class:`Interval` enclosures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import AmbiguousComparison

__all__ = ["QuadraticNumber", "Interval", "to_interval", "sqrt_enclosure"]


def _squarefree_part(d):
    if d <= 0:
        raise ValueError("quadratic field needs a positive discriminant")
    out, k = 1, 2
    while k * k <= d:
        while d % (k * k) == 0:
            d //= k * k
            out *= k
        k += 1
    return out, d


class QuadraticNumber:
    """The real number ``(a + b*sqrt(d)) / c`` with integers a, b, c and c > 0.

    Numbers with ``b == 0`` are rationals and combine with any field.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b=0, c=1, d=5):
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def sqrt(cls, n):
        """``sqrt(n)`` for a positive integer ``n`` (reduced to squarefree form)."""
        k, d = _squarefree_part(n)
        if d == 1:
            return cls(k, 0, 1, 5)
        return cls(0, k, 1, d)

    @classmethod
    def coerce(cls, x, d=5):
        if isinstance(x, QuadraticNumber):
            return x
        if isinstance(x, int):
            return cls(x, 0, 1, d)
        if isinstance(x, (Fraction, Rational)):
            return cls(int(x.numerator), 0, int(x.denominator), d)
        if isinstance(x, float):
            f = Fraction(x)
            return cls(f.numerator, 0, f.denominator, d)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadraticNumber")

    def _field(self, other):
        if self.b == 0:
            return other.d
        if other.b != 0 and other.d != self.d:
            raise ValueError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
        return self.d

    def is_rational(self):
        return self.b == 0

    # arithmetic
    def __add__(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        d = self._field(o)
        if self.c == o.c:
            return QuadraticNumber(self.a + o.a, self.b + o.b, self.c, d)
        return QuadraticNumber(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        d = self._field(o)
        return QuadraticNumber(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, self.c * o.c, d)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / self ** (-k)
        out, base = QuadraticNumber(1, 0, 1, self.d), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return QuadraticNumber(self.a, -self.b, self.c, self.d)

    def norm(self):
        """Field norm as a Fraction."""
        return Fraction(self.a * self.a - self.b * self.b * self.d, self.c * self.c)

    def __truediv__(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        if o.a == 0 and o.b == 0:
            raise ZeroDivisionError("division by zero")
        d = self._field(o)
        # 1/o = c (a - b sqrt d) / (a^2 - b^2 d)
        n = o.a * o.a - o.b * o.b * d
        num = QuadraticNumber(self.a, self.b, 1, d) * QuadraticNumber(o.a * o.c, -o.b * o.c, 1, d)
        return QuadraticNumber(num.a, num.b, n * self.c, d)

    def __rtruediv__(self, other):
        return QuadraticNumber.coerce(other, self.d) / self

    # order
    def sign(self):
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with b^2 d
        s = a * a - b * b * self.d
        if s == 0:
            return 0
        return (1 if a > 0 else -1) if s > 0 else (1 if b > 0 else -1)

    def _cmp(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        try:
            o = QuadraticNumber.coerce(other, self.d)
        except TypeError:
            return NotImplemented
        if self.b == 0 and o.b == 0:
            return self.a == o.a and self.c == o.c
        return self.a == o.a and self.b == o.b and self.c == o.c and self.d == o.d

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __floor__(self):
        return self.floor()

    def floor(self):
        """Largest integer not exceeding the value."""
        n = math.floor(float(self))
        while QuadraticNumber(n, 0, 1, self.d) > self:
            n -= 1
        while QuadraticNumber(n + 1, 0, 1, self.d) <= self:
            n += 1
        return n

    def __float__(self):
        if self.b == 0:
            return self.a / self.c
        lo, hi = self._fraction_bounds(80)
        return float((lo + hi) / 2)

    def _fraction_bounds(self, bits):
        s_lo, s_hi = sqrt_enclosure(self.d, bits)
        t1 = self.b * s_lo
        t2 = self.b * s_hi
        lo, hi = min(t1, t2), max(t1, t2)
        return (Fraction(self.a) + lo) / self.c, (Fraction(self.a) + hi) / self.c

    def to_interval(self):
        if self.b == 0:
            return Interval.from_fraction(Fraction(self.a, self.c))
        lo, hi = self._fraction_bounds(110)
        return Interval(_down(lo), _up(hi))

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}/{self.c}" if self.c != 1 else f"{self.a}"
        return f"({self.a}{self.b:+d}*sqrt({self.d}))/{self.c}"

    def to_text(self):
        """Compact exact text form ``a,b,c,d``."""
        return f"{self.a},{self.b},{self.c},{self.d}"

    @classmethod
    def from_text(cls, s):
        a, b, c, d = (int(t) for t in s.split(","))
        return cls(a, b, c, d)


def sqrt_enclosure(d, bits=110):
    """Fractions ``lo <= sqrt(d) <= hi`` with ``hi - lo <= 2**-bits``."""
    scale = 1 << bits
    r = math.isqrt(d * scale * scale)
    lo = Fraction(r, scale)
    hi = lo if r * r == d * scale * scale else Fraction(r + 1, scale)
    return lo, hi


def _down(q):
    f = float(q)
    if Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def _up(q):
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def _rd(x):
    return math.nextafter(x, -math.inf)


def _ru(x):
    return math.nextafter(x, math.inf)


class Interval:
    """Closed interval ``[lo, hi]`` of doubles with outward rounding.

    Every arithmetic result is widened by one ulp on each side, which keeps
    the true result inside without touching the FPU rounding mode.
    Order comparisons are certain or raise :class:`AmbiguousComparison`.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo, hi = float(lo), float(hi)
        if not lo <= hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo, self.hi = lo, hi

    @classmethod
    def from_fraction(cls, q):
        q = Fraction(q)
        return cls(_down(q), _up(q))

    @classmethod
    def around(cls, mid, rad):
        return cls(_rd(mid - rad), _ru(mid + rad))

    @staticmethod
    def coerce(x):
        if isinstance(x, Interval):
            return x
        if isinstance(x, QuadraticNumber):
            return x.to_interval()
        if isinstance(x, float):
            return Interval(x, x)
        if isinstance(x, (int, Fraction)):
            return Interval.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Interval")

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self):
        return _ru(0.5 * (self.hi - self.lo))

    def width(self):
        return self.hi - self.lo

    def __add__(self, other):
        o = Interval.coerce(other)
        return Interval(_rd(self.lo + o.lo), _ru(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = Interval.coerce(other)
        return Interval(_rd(self.lo - o.hi), _ru(self.hi - o.lo))

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        o = Interval.coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_rd(min(p)), _ru(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains 0")
        p = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_rd(min(p)), _ru(max(p)))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = Interval(1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def contains(self, x):
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __contains__(self, x):
        return self.contains(x)

    def overlaps(self, other):
        o = Interval.coerce(other)
        return self.lo <= o.hi and o.lo <= self.hi

    def hull(self, other):
        o = Interval.coerce(other)
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def intersect(self, other):
        o = Interval.coerce(other)
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        return Interval(lo, hi) if lo <= hi else None

    def _cmp(self, other):
        o = Interval.coerce(other)
        if self.hi < o.lo:
            return -1
        if self.lo > o.hi:
            return 1
        if self.lo == self.hi == o.lo == o.hi:
            return 0
        raise AmbiguousComparison(f"cannot order {self} and {o}")

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __float__(self):
        return self.mid

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def to_interval(x):
    return Interval.coerce(x)
