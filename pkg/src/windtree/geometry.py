"""Wind-tree surfaces: homology of X(a, b), the Klein deck action and sections.

Model of X(a, b): four sheets ``g = (gx, gy)``, each the square
``[-1/2, 1/2]^2`` minus the open hole ``(-a/2, a/2) x (-b/2, b/2)``.  Outer
edges are glued to the opposite outer edge of the same sheet.  Hitting the
left edge of the hole while moving right continues from its right edge on
sheet ``(gx + 1, gy)``; hitting the bottom edge while moving up continues
from its top edge on sheet ``(gx, gy + 1)``.  Sheet ``g`` carries billiard
trajectories whose velocity signs are ``((-1)^gx, (-1)^gy)``, so the flow
is a single translation direction in every chart.

Marked curves: ``h_xy`` runs rightward along the top/bottom edge of sheet
``xy``, ``v_xy`` upward along its left/right edge, ``c_{h,y}`` rightward along
``y = 0`` through sheets ``(0, y)`` and ``(1, y)``, and ``c_{v,x}`` upward along
``x = 0`` through ``(x, 0)`` and ``(x, 1)``.  Intersection numbers use
``<right, up> = +1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    BudgetExceeded,
    CornerHit,
    InvalidParams,
    SingularHit,
)
from .iet import PermutationPair, exact, make_iet
from .numbers import QuadraticNumber

GENERATORS = ("h00", "h10", "h01", "h11", "v00", "v10", "v01", "v11",
              "ch0", "ch1", "cv0", "cv1")
SHEETS = ((0, 0), (1, 0), (0, 1), (1, 1))
_IDX = {g: i for i, g in enumerate(GENERATORS)}


def _h(x, y):
    return _IDX[f"h{x}{y}"]


def _v(x, y):
    return _IDX[f"v{x}{y}"]


# ---------------------------------------------------------------- homology

@dataclass(frozen=True)
class HomologyClass:
    """Coordinates over the 12 generators, kept in canonical form.

    The two relations are used to eliminate ``ch1`` and ``cv1``, so the
    canonical coordinates are the remaining 10.
    """

    coeffs: tuple

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        if len(c) != 12:
            raise ValueError("need 12 coefficients")
        k = c[_IDX["ch1"]]
        if k:
            # ch1 = ch0 - (h00 + h10 - h01 - h11)
            c[_IDX["ch1"]] = Fraction(0)
            c[_IDX["ch0"]] += k
            for (x, y), s in {(0, 0): -1, (1, 0): -1, (0, 1): 1, (1, 1): 1}.items():
                c[_h(x, y)] += s * k
        k = c[_IDX["cv1"]]
        if k:
            # cv1 = cv0 - (v00 - v10 + v01 - v11)
            c[_IDX["cv1"]] = Fraction(0)
            c[_IDX["cv0"]] += k
            for (x, y), s in {(0, 0): -1, (1, 0): 1, (0, 1): -1, (1, 1): 1}.items():
                c[_v(x, y)] += s * k
        object.__setattr__(self, "coeffs", tuple(int(x) if x.denominator == 1 else x for x in c))

    @classmethod
    def of(cls, **named):
        c = [0] * 12
        for k, v in named.items():
            c[_IDX[k]] += v
        return cls(tuple(c))

    @classmethod
    def zero(cls):
        return cls((0,) * 12)

    def coordinates(self):
        """The 10 canonical coordinates."""
        return tuple(x for g, x in zip(GENERATORS, self.coeffs) if g not in ("ch1", "cv1"))

    def __add__(self, other):
        return HomologyClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return HomologyClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return HomologyClass(tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        return HomologyClass(tuple(a * k for a in self.coeffs))

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = [f"{x:+}*{g}" for g, x in zip(GENERATORS, self.coeffs) if x]
        return "HomologyClass(" + (" ".join(terms) or "0") + ")"


CANONICAL_BASIS = tuple(g for g in GENERATORS if g not in ("ch1", "cv1"))


def canonical_class(raw):
    """Reduce a 12-coefficient vector modulo the two relations."""
    if isinstance(raw, HomologyClass):
        return raw
    return HomologyClass(tuple(raw))


def gamma_classes():
    """``(gamma_h, gamma_v)``."""
    gh = HomologyClass.of(v00=-1, v10=1, v01=-1, v11=1)
    gv = HomologyClass.of(h00=1, h10=1, h01=-1, h11=-1)
    return gh, gv


def _flip_generator(name, s):
    kind = name[0]
    if kind in "hv":
        x, y = int(name[1]), int(name[2])
        if s == "tau_h":
            x ^= 1
        else:
            y ^= 1
        return f"{kind}{x}{y}"
    if name[:2] == "ch":
        y = int(name[2])
        return name if s == "tau_h" else f"ch{y ^ 1}"
    x = int(name[2])
    return f"cv{x ^ 1}" if s == "tau_h" else name


def klein_act(s, c):
    """Push a class forward by the deck involution ``tau_h`` or ``tau_v``."""
    if s not in ("tau_h", "tau_v"):
        raise ValueError(f"unknown symmetry {s!r}")
    out = [0] * 12
    for name, x in zip(GENERATORS, canonical_class(c).coeffs):
        if x:
            out[_IDX[_flip_generator(name, s)]] += x
    return HomologyClass(tuple(out))


BLOCKS = ("++", "+-", "-+", "--")


def block_decompose(c):
    """Projections of ``c`` to ``E^{++}, E^{+-}, E^{-+}, E^{--}`` (first sign for tau_h)."""
    c = canonical_class(c)
    th, tv = klein_act("tau_h", c), klein_act("tau_v", c)
    thv = klein_act("tau_v", th)
    out = []
    for sh, sv in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        comp = (c + th * sh + tv * sv + thv * (sh * sv)) * Fraction(1, 4)
        out.append(comp)
    return tuple(out)


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class WindTreeParams:
    """Obstacle sides ``a, b`` and flow direction ``(1, slope)``."""

    a: object
    b: object
    slope: object

    def __post_init__(self):
        a, b = exact(self.a), exact(self.b)
        s = exact(self.slope)
        if not (0 < a < 1 and 0 < b < 1):
            raise InvalidParams(f"need 0 < a, b < 1, got a={a}, b={b}")
        if not s > 0:
            raise InvalidParams("direction must point into the open first quadrant")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "slope", s)

    @property
    def theta(self):
        return math.atan(float(self.slope))


# ---------------------------------------------------------------- tracer

@dataclass
class Hit:
    x: object
    y: object
    sheet: tuple
    counts: list = field(default_factory=lambda: [0] * 12)
    steps: int = 0
    word: list = field(default_factory=list)


class Tracer:
    """Exact straight-line flow on X(a, b) in direction ``+-(1, slope)``."""

    def __init__(self, params, budget=10**6):
        self.p = params
        a2, b2 = params.a / 2, params.b / 2
        self.a2, self.b2 = a2, b2
        half = Fraction(1, 2)
        self.xs = sorted({-half, -a2, Fraction(0), a2, half})
        self.ys = sorted({-half, -b2, Fraction(0), b2, half})
        self.budget = budget

    def corners(self):
        a2, b2 = self.a2, self.b2
        return {"TR": (a2, b2), "TL": (-a2, b2), "BR": (a2, -b2), "BL": (-a2, -b2)}

    def _is_corner(self, x, y):
        return (x == self.a2 or x == -self.a2) and (y == self.b2 or y == -self.b2)

    def run(self, x, y, sheet, direction=1, stop=None):
        """Flow from ``(x, y)`` on ``sheet`` until ``stop(x, y, sheet)`` on the line ``y = b/2``.

        ``stop`` is called whenever the orbit crosses ``y = b/2`` with
        ``x > a/2``; returning true ends the trace.  Raises
        :class:`CornerHit` if the orbit reaches a hole corner.
        """
        m = self.p.slope
        a2, b2 = self.a2, self.b2
        half = Fraction(1, 2)
        gx, gy = sheet
        counts = [0] * 12
        word = []
        s = direction
        for step in range(1, self.budget + 1):
            if s > 0:
                X = next(v for v in self.xs if v > x)
                Y = next(v for v in self.ys if v > y)
                dx, dy = X - x, (Y - y) / m
            else:
                X = next(v for v in reversed(self.xs) if v < x)
                Y = next(v for v in reversed(self.ys) if v < y)
                dx, dy = x - X, (y - Y) / m
            if dx < dy:
                x, y = X, y + s * m * dx
                vert, horiz = True, False
            elif dy < dx:
                x, y = x + s * dy, Y
                vert, horiz = False, True
            else:
                x, y = X, Y
                vert = horiz = True
            if self._is_corner(x, y):
                raise CornerHit(f"orbit reaches hole corner ({x}, {y}) on sheet {(gx, gy)}")
            if vert:
                if x == s * half:
                    counts[_v(gx, gy)] -= s
                    word.append((_v(gx, gy), -s))
                    x = -x
                elif x == -s * a2 and -b2 < y < b2:
                    x, gx = -x, gx ^ 1
                elif x == 0:
                    counts[_IDX[f"cv{gx}"]] -= s
                    word.append((_IDX[f"cv{gx}"], -s))
            if horiz:
                if y == s * half:
                    counts[_h(gx, gy)] += s
                    word.append((_h(gx, gy), s))
                    y = -y
                elif y == -s * b2 and -a2 < x < a2:
                    y, gy = -y, gy ^ 1
                elif y == 0:
                    counts[_IDX[f"ch{gy}"]] += s
                    word.append((_IDX[f"ch{gy}"], s))
                elif y == b2 and x > a2 and stop is not None and stop(x, y, (gx, gy)):
                    return Hit(x, y, (gx, gy), counts, step, word)
        raise BudgetExceeded(f"no section hit within {self.budget} crossings")


def _inside(lo, hi):
    return lambda x, y, g: lo < x < hi


def _halfopen(lo, hi):
    return lambda x, y, g: lo <= x < hi


# ---------------------------------------------------------------- sections

def separatrix_hits(tracer, reach):
    """First hits of the six separatrices on ``y = b/2, a/2 < x < a/2 + reach``."""
    c = tracer.corners()
    out = {}
    for name, d in (("TR", 1), ("TL", 1), ("BR", 1), ("TL", -1), ("BR", -1), ("BL", -1)):
        x, y = c[name]
        hit = tracer.run(x, y, (0, 0), d, _inside(tracer.a2, tracer.a2 + reach))
        out[(name, d)] = hit
    return out


def _try_run(tracer, x, y, d, stop):
    try:
        return tracer.run(x, y, (0, 0), d, stop)
    except SingularHit:
        return None


@dataclass
class YSection:
    """First return to the horizontal segment ``[a/2, a/2 + L) x {b/2}``."""

    params: WindTreeParams
    length: object
    cuts: list
    image_lefts: list
    arcs: dict

    @property
    def n(self):
        return len(self.cuts)


def y_section(params, length, budget=10**6):
    """Trace the return map to a segment starting at the top-right hole corner.

    Returns the cut points (continuity-interval left endpoints), and for each
    interval on each sheet the image point and the crossing counts of its
    return arc.
    """
    tr = Tracer(params, budget)
    lo, hi = tr.a2, tr.a2 + exact(length)
    c = tr.corners()
    stop = _inside(lo, hi)
    top = {lo}
    for name in ("TL", "BR", "BL"):
        h = _try_run(tr, *c[name], -1, stop)
        if h is not None:
            top.add(h.x)
    h = _try_run(tr, hi, tr.b2, -1, stop)
    if h is not None:
        top.add(h.x)
    cuts = sorted(top)
    ends = cuts[1:] + [hi]
    arcs = {}
    images = []
    for i, (u, w) in enumerate(zip(cuts, ends)):
        mid = (u + w) / 2
        for g in SHEETS:
            hit = tr.run(mid, tr.b2, g, 1, _halfopen(lo, hi))
            arcs[i, g] = (hit.x - (mid - u), hit.sheet, hit.counts, hit.word)
        images.append(arcs[i, (0, 0)][0])
    return YSection(params, exact(length), cuts, images, arcs)


# Paths on X from the base copy (sheet (0, 0)) of the transversal to the copy
# on sheet g.  (1, 0): over the hole leftward, then rightward through its
# left edge.  (0, 1): down the right side, then upward through the bottom
# edge.  They close every return arc into a loop based at the base copy.
CONNECTORS = {
    (0, 0): (),
    (1, 0): ((_IDX["cv0"], 1),),
    (0, 1): ((_IDX["ch0"], -1),),
    (1, 1): ((_IDX["cv0"], 1), (_IDX["ch0"], -1)),
}


def _closed_word(g, arc, g2):
    back = tuple((k, -s) for k, s in reversed(CONNECTORS[g2]))
    return CONNECTORS[g] + tuple(arc) + back


def transversal_length(params, budget=10**6):
    """Distance from the top-right corner to the first separatrix hit on ``y = b/2``."""
    tr = Tracer(params, budget)
    hits = separatrix_hits(tr, Fraction(1, 2) - tr.a2)
    return min(h.x for h in hits.values()) - tr.a2


def _y_label(i):
    return "ABCDEFGHIJKLMNOPQRSTUVWXYZ"[i]


def x_label(alpha, g):
    return f"{alpha}{g[0]}{g[1]}"


def split_label(label):
    return label[:-2], (int(label[-2]), int(label[-1]))


def _word_text(word):
    return " ".join(f"{GENERATORS[k]}{'+' if s > 0 else '-'}" for k, s in word) or "-"


def _word_parse(text):
    if text.strip() == "-":
        return ()
    return tuple((_IDX[t[:-1]], 1 if t[-1] == "+" else -1) for t in text.split())


@dataclass(frozen=True, eq=False)
class SectionData:
    """Return map of the flow on X(a, b) to four lifted copies of a Y-segment.

    ``iet`` is on ``[0, 1)``; block ``k`` (of length 1/4) is the copy on sheet
    ``SHEETS[k]``.  ``words[letter]`` is the ordered list of signed marked-curve
    crossings along the loop ``xi`` of that letter: the connector to its
    sheet, the return arc, and the connector back from the landing sheet.
    """

    params: WindTreeParams
    length: object
    y_iet: object
    iet: object
    words: dict

    @property
    def alphabet(self):
        from .rauzy import letters
        return letters(self.iet.perm)

    @property
    def n(self):
        return self.iet.n

    def counts(self, letter):
        c = [0] * 12
        for k, s in self.words[letter]:
            c[k] += s
        return c

    @property
    def phi(self):
        """Integer matrix: row per letter (``alphabet`` order), column per generator."""
        return np.array([self.counts(a) for a in self.alphabet], dtype=np.int64)

    def kappa(self):
        """Sheet change of each Y-letter's return arc."""
        out = {}
        for a in self.y_iet.alphabet:
            x = self.iet.top_left[x_label(a, (0, 0))]
            y = self.iet(x)
            out[a] = SHEETS[math.floor(y * 4)]
        return out

    def involution(self, s):
        bit = 0 if s == "tau_h" else 1
        out = {}
        for lab in self.iet.alphabet:
            a, g = split_label(lab)
            g2 = (g[0] ^ 1, g[1]) if bit == 0 else (g[0], g[1] ^ 1)
            out[lab] = x_label(a, g2)
        return out

    @property
    def involutions(self):
        return {s: self.involution(s) for s in ("tau_h", "tau_v")}

    def to_text(self):
        out = ["windtree-section 1",
               f"a {self.params.a}", f"b {self.params.b}",
               f"slope {_num_text(self.params.slope)}",
               f"length {_num_text(self.length)}"]
        out += ["[y]"] + self.y_iet.to_text().strip().splitlines()
        out += ["[x]"] + self.iet.to_text().strip().splitlines()
        out.append("[crossings]")
        for lab in self.alphabet:
            out.append(f"{lab} {_word_text(self.words[lab])}")
        out.append("[phi]")
        out.append("letter " + " ".join(GENERATORS))
        for lab, row in zip(self.alphabet, self.phi):
            out.append(f"{lab} " + " ".join(str(int(v)) for v in row))
        out.append("[involutions]")
        for s, m in self.involutions.items():
            out.append(s + " " + " ".join(f"{k}>{v}" for k, v in m.items()))
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text):
        from .iet import IET
        sections, cur = {}, "head"
        for ln in text.splitlines():
            if ln.startswith("["):
                cur = ln.strip("[]")
                continue
            if ln.strip():
                sections.setdefault(cur, []).append(ln)
        head = dict(ln.split(None, 1) for ln in sections["head"][1:])
        params = WindTreeParams(Fraction(head["a"]), Fraction(head["b"]), _num_parse(head["slope"]))
        y_iet = IET.from_text("\n".join(sections["y"]))
        iet = IET.from_text("\n".join(sections["x"]))
        words = {}
        for ln in sections["crossings"]:
            lab, rest = ln.split(None, 1)
            words[lab] = _word_parse(rest)
        sd = cls(params, _num_parse(head["length"]), y_iet, iet, words)
        for ln in sections["phi"][1:]:
            lab, *vals = ln.split()
            if [int(v) for v in vals] != sd.counts(lab):
                raise ValueError(f"phi row of {lab} disagrees with its crossing word")
        return sd


def _num_text(x):
    return x.to_text() if isinstance(x, QuadraticNumber) else str(x)


def _num_parse(t):
    return QuadraticNumber.from_text(t) if "," in t else Fraction(t)


def build_section(params, length=None, budget=10**6):
    """Trace the first-return IET of X(a, b) and the crossing words of its arcs.

    The transversal is the segment of length ``length`` going right from the
    top-right hole corner at height ``b/2``, lifted to all four sheets.  By
    default its length is the first separatrix hit.
    """
    if length is None:
        length = transversal_length(params, budget)
    ys = y_section(params, length, budget)
    lo = params.a / 2
    L = exact(length)
    n = ys.n
    ends = ys.cuts[1:] + [lo + L]
    ylen = [(e - c) / L for c, e in zip(ys.cuts, ends)]
    labels = [_y_label(i) for i in range(n)]
    ytop = tuple(labels)
    ybot = tuple(labels[i] for i in sorted(range(n), key=lambda i: ys.image_lefts[i]))
    y_iet = make_iet(PermutationPair(ytop, ybot), ylen, normalize=False)

    top, lengths, image_pos, words = [], [], {}, {}
    for k, g in enumerate(SHEETS):
        for i, a in enumerate(labels):
            lab = x_label(a, g)
            top.append(lab)
            lengths.append(ylen[i] / 4)
            img, g2, counts, word = ys.arcs[i, g]
            image_pos[lab] = (SHEETS.index(g2) + (img - lo) / L) / 4
            words[lab] = _closed_word(g, word, g2)
            counts = [0] * 12
            for kk, ss in words[lab]:
                counts[kk] += ss
            rel_h = counts[_IDX["ch0"]] - counts[_IDX["ch1"]] - (
                counts[_h(0, 0)] + counts[_h(1, 0)] - counts[_h(0, 1)] - counts[_h(1, 1)])
            rel_v = counts[_IDX["cv0"]] - counts[_IDX["cv1"]] - (
                counts[_v(0, 0)] - counts[_v(1, 0)] + counts[_v(0, 1)] - counts[_v(1, 1)])
            if rel_h or rel_v:
                raise AssertionError(f"arc of {lab} violates a homology relation")
    bot = tuple(sorted(top, key=lambda lab: image_pos[lab]))
    iet = make_iet(PermutationPair(tuple(top), bot), lengths, normalize=False)
    for lab in top:
        if iet.bot_left[lab] != image_pos[lab]:
            raise AssertionError("traced images do not tile the section")
    return SectionData(params, L, y_iet, iet, words)


def phi_of(sd, c):
    """The cocycle ``alpha -> <c, xi_alpha>`` as a piecewise-constant function."""
    from .iet import PiecewiseConstantFn
    c = canonical_class(c)
    vals = {}
    for lab in sd.iet.alphabet:
        row = sd.counts(lab)
        vals[lab] = sum(r * x for r, x in zip(row, c.coeffs))
    return PiecewiseConstantFn(vals)


# ---------------------------------------------------------------- periodic parameters

def eigen_slope(M, a=Fraction(1, 2), b=Fraction(1, 2)):
    """Slope of the expanding eigendirection of a hyperbolic ``M`` in SL(2, Z).

    ``M`` acts on the rectangle-tiled surface X(a, b) after normalizing the
    tiles to unit squares, so the slope is rescaled by the tile aspect ratio.
    """
    (p, q), (r, t) = M
    if p * t - q * r != 1 or abs(p + t) <= 2:
        raise InvalidParams("matrix must be hyperbolic in SL(2, Z)")
    if q == 0:
        raise InvalidParams("expanding direction is vertical")
    disc = (p - t) ** 2 + 4 * q * r
    s = (QuadraticNumber.sqrt(disc) + (t - p)) / (2 * q)
    if (p + t) < 0:
        s = (-QuadraticNumber.sqrt(disc) + (t - p)) / (2 * q)
    a, b = exact(a), exact(b)
    if not isinstance(a, Fraction) or not isinstance(b, Fraction):
        raise InvalidParams("a and b must be rational for a square-tiled surface")
    dx = Fraction(1, 2 * a.denominator)
    dy = Fraction(1, 2 * b.denominator)
    slope = s * (dy / dx)
    if not slope > 0:
        raise InvalidParams("expanding direction does not point into the first quadrant")
    return slope


@dataclass(frozen=True, eq=False)
class PeriodicSection:
    section: SectionData
    y_periodic: object
    periodic: object
    repeats: int

    @property
    def loop(self):
        return self.y_periodic.loop


def _rv_cycle(T, max_steps):
    from .rauzy import rv_step
    seen, moves, cur = {}, [], T
    for k in range(max_steps + 1):
        key = (cur.perm, tuple(cur.lengths[a] / cur.total for a in cur.perm.top))
        if key in seen:
            return seen[key], "".join(moves[seen[key]:]), cur
        seen[key] = k
        cur, m, _ = rv_step(cur)
        moves.append(m.value)
    raise BudgetExceeded(f"Rauzy-Veech orbit not periodic within {max_steps} steps")


def find_periodic_section(params, max_steps=10**4, max_lift=64, budget=10**6):
    """Self-similar section data for a periodic direction.

    Runs exact Rauzy-Veech induction on the Y-section until a normalized
    state repeats, shortens the transversal to drop the pre-period, then
    lifts the loop to X, repeating it until the sheet cocycle is periodic.
    """
    from .rauzy import PeriodicIET, RauzyLoop, replay

    sd = build_section(params, None, budget)
    k0, word, _ = _rv_cycle(sd.y_iet, max_steps)
    if k0:
        pre = "".join(_rv_moves(sd.y_iet, k0))
        T1, _ = replay(sd.y_iet, pre)
        sd = build_section(params, sd.length * T1.total, budget)
        k0, word, _ = _rv_cycle(sd.y_iet, max_steps)
        if k0:
            raise AssertionError("pre-period survived shortening the transversal")
    loop = RauzyLoop.from_word(sd.y_iet.perm, word)
    py = PeriodicIET.from_loop(loop)
    if py.iet != sd.y_iet:
        raise AssertionError("loop fixed point differs from the traced section")
    kappa = sd.kappa()

    def lift(words):
        out = {}
        for j, w in words.items():
            acc = (0, 0)
            for s in w:
                acc = (acc[0] ^ kappa[s][0], acc[1] ^ kappa[s][1])
            out[j] = acc
        return out

    words = dict(py.words)
    for p in range(1, max_lift + 1):
        if lift(words) == kappa:
            break
        words = {j: tuple(s for a in w for s in py.words[a]) for j, w in words.items()}
    else:
        raise BudgetExceeded(f"sheet cocycle not periodic within {max_lift} loop passes")
    xwords = {}
    for j, w in words.items():
        for g in SHEETS:
            seq, cur = [], g
            for s in w:
                seq.append(x_label(s, cur))
                cur = (cur[0] ^ kappa[s][0], cur[1] ^ kappa[s][1])
            xwords[x_label(j, g)] = tuple(seq)
    px = PeriodicIET(sd.iet, py.rho ** p, xwords, 4, loop, p)
    return PeriodicSection(sd, py, px, p)


def _rv_moves(T, k):
    from .rauzy import rv_step
    out = []
    for _ in range(k):
        T, m, _ = rv_step(T)
        out.append(m.value)
    return out
