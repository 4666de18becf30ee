"""Cantor-set covers of level sets and the resulting dimension bound.

Two Bratteli edges with the same source and target but different weights
form an alternate pair.  Their cylinders (extended by a common
continuation of ``b - 1`` edges) have disjoint ``h``-images once
``F |lam|^b / (1 - |lam|) < delta``, so at least one of them misses any
given level ``z``.  Removing that cylinder from every surviving cylinder of
depth ``k b`` gives a nested sequence of covers ``C_k`` of the level set,
and the shrinking rate of ``|C_k|`` bounds its Hausdorff dimension by
``beta0 < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GapUndetermined, InsufficientDepths
from .numbers import Interval
from .transfer import StablePair, level_cells, transfer_data


def power_pair(pair, r):
    """The same eigenvector seen by the ``r``-th power of the matrix."""
    if r == 1:
        return pair
    lam = pair.exact_lam ** r if pair.is_exact else None
    return StablePair(pair.lam ** r if pair.lam.lo >= 0 else _ipow(pair.lam, r), pair.psi, pair.alphabet,
                      pair.block, lam, pair.exact_psi)


def _ipow(x, r):
    out = Interval(1.0)
    for _ in range(r):
        out = out * x
    return out


@dataclass
class AlternatePairs:
    """Alternate pairs of the period-``r`` system, keyed by ``(source, target)``."""

    r: int
    td: object
    pairs: dict
    delta: float

    @property
    def complete(self):
        """Every letter is the source of some alternate pair."""
        return {i for i, _ in self.pairs} == set(self.td.P.alphabet)

    def usable(self, source):
        """Targets ``j`` whose pair from ``source`` separates by at least ``delta``."""
        return [j for (i, j), v in self.pairs.items() if i == source and v[0] >= self.delta]


def _find_pairs(td):
    groups = {}
    for e in td.edges:
        groups.setdefault((e.s, e.j), []).append(e)
    pairs = {}
    for key, es in groups.items():
        best = None
        for i in range(len(es)):
            for k in range(i + 1, len(es)):
                d = abs(es[i].f - es[k].f)
                if d.lo > 0 and (best is None or d.lo > best[0]):
                    best = (d.lo, es[i], es[k])
        if best is not None:
            pairs[key] = best
    return pairs


def alternate_pairs(P, pair, max_doublings=4):
    """Smallest period multiple ``r = 2^t`` (``t <= max_doublings``) giving every letter an alternate pair.

    ``delta`` is the smallest, over source letters, of the best separation
    ``|f(e) - f(e')|`` available from that letter.
    """
    last = None
    for t in range(max_doublings + 1):
        r = 2 ** t
        td = transfer_data(P.power(r), power_pair(pair, r))
        found = _find_pairs(td)
        best = {}
        for (i, _), v in found.items():
            best[i] = max(best.get(i, 0.0), v[0])
        delta = min(best.values(), default=0.0)
        last = AlternatePairs(r, td, found, delta)
        if last.complete:
            return last
    return last


def gap_params(F, lam, delta):
    """Smallest ``b >= 1`` with ``F |lam|^b / (1 - |lam|) < delta``."""
    lam = abs(lam)
    if not 0 < lam < 1:
        raise ValueError("need 0 < |lam| < 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    b = 1
    while F * lam ** b / (1 - lam) >= delta:
        b += 1
    return b


def beta0(m, mu):
    """Root of ``(1 - mu/m)^beta m^(1 - beta) = 1``."""
    if m <= 1 or not 0 < mu <= 1:
        raise ValueError("need m > 1 and 0 < mu <= 1")
    lm = math.log(m)
    return lm / (lm - math.log1p(-mu / m))


@dataclass
class CoverStats:
    """Statistics of ``C_k``.

    ``cells`` counts the surviving cylinders of depth ``k b``; ``components``
    is the upper bound ``1 + #gaps`` on the number of connected components.
    """

    k: int
    cells: int
    components: int
    length: float
@dataclass
class HausdorffReport:
    """Output of :func:`hausdorff_report`.

    ``m`` is the largest entry of ``A^b``; ``m_row`` the largest row sum,
    which bounds the number of children of a cylinder.  The bounds are
    evaluated for both.
    """

    r: int
    b: int
    F: float
    delta: float
    lam: float
    n: int
    m: int
    m_row: int
    mu: float
    certified: bool
    stats: list = field(default_factory=list)

    @property
    def beta0(self):
        return beta0(self.m, self.mu)

    @property
    def beta0_row(self):
        return beta0(self.m_row, self.mu)

    def length_ok(self, m):
        return all(s.length <= (1 - self.mu / m) ** s.k * (1 + 1e-12) for s in self.stats)

    def count_ok(self, m):
        return all(s.components <= self.n * m ** s.k for s in self.stats)

    def lines(self):
        out = [f"period multiple r = {self.r}",
               f"gap depth b = {self.b} (certified: {self.certified})",
               f"F = {self.F:.6g}  delta = {self.delta:.6g}  |lam| = {self.lam:.6g}",
               f"n = {self.n}  m = {self.m}  m_row = {self.m_row}  mu = {self.mu:.6g}",
               f"beta0(m) = {self.beta0:.6f}  beta0(m_row) = {self.beta0_row:.6f}",
               "k  cells  components  |C_k|  (1-mu/m)^k  (1-mu/m_row)^k"]
        for s in self.stats:
            out.append(f"{s.k}  {s.cells}  {s.components}  {s.length:.6g}  "
                       f"{(1 - self.mu / self.m) ** s.k:.6g}  {(1 - self.mu / self.m_row) ** s.k:.6g}")
        out.append(f"length bound with m: {self.length_ok(self.m)}; with m_row: {self.length_ok(self.m_row)}")
        out.append(f"count bound with m: {self.count_ok(self.m)}; with m_row: {self.count_ok(self.m_row)}")
        return out


def _gap_letters(td, alt, b):
    """For each cell letter, the terminal letter of the gap cylinder removed below it.

    The gap is chosen so its terminal letter has the longest interval, which
    makes the removed proportion as large as possible.
    """
    P = td.P
    alph = P.alphabet
    idx = {a: i for i, a in enumerate(alph)}
    A = P.A.astype(object)
    reach = np.eye(len(alph), dtype=object)
    for _ in range(b - 1):
        reach = reach.dot(A)
    lengths = P.iet.lengths
    out = {}
    for c in alph:
        best = None
        for j in alt.usable(c):
            for t in alph:
                if reach[idx[j], idx[t]] > 0 and (best is None or lengths[t] > lengths[best[1]]):
                    best = (j, t)
        if best is None:
            raise GapUndetermined(f"no alternate pair leaves letter {c}")
        out[c] = best
    return out


def _power(A, b):
    M = np.eye(len(A), dtype=object)
    for _ in range(b):
        M = M.dot(A)
    return M


def cover_statistics(td, alt, b, K):
    """Statistics of ``C_0..C_K``.

    The two cylinders of an alternate pair share their continuation, so the
    removed cylinder has the same terminal letter whichever one misses the
    level.  Counting surviving cylinders by terminal letter therefore gives
    exact cell counts and lengths without fixing ``z``.
    """
    P = td.P
    alph = P.alphabet
    idx = {a: i for i, a in enumerate(alph)}
    M = _power(P.A.astype(object), b)
    gaps = _gap_letters(td, alt, b)
    cnt = np.ones(len(alph), dtype=object)
    lens = [P.iet.lengths[a] for a in alph]
    rho_b = P.rho ** b
    out, removed = [], 0
    for k in range(K + 1):
        total = sum((cnt[i] * lens[i] for i in range(len(alph))), 0) / rho_b ** k
        out.append(CoverStats(k, int(sum(cnt)), 1 + removed, float(total)))
        new = M.T.dot(cnt)
        for c in alph:
            new[idx[gaps[c][1]]] -= cnt[idx[c]]
        removed += int(sum(cnt))
        cnt = new
    return out


def _continuation(td, j, t, length):
    """First admissible path of ``length`` edges from letter ``j`` ending in letter ``t``."""
    src = td._by_source()
    if length == 0:
        return () if j == t else None
    for e in src[j]:
        rest = _continuation(td, e.j, t, length - 1)
        if rest is not None:
            return (e,) + rest
    return None


def cantor_cover(td, alt, b, z, k, lattice=None, max_cells=10**5):
    """Cylinders of ``C_k`` for the level ``z``.

    Below every surviving cylinder the member of an alternate pair (with a
    common continuation) whose enclosure misses ``z`` is removed.  Raises
    :class:`GapUndetermined` if neither member certifiably misses it.
    """
    from .errors import BudgetExceeded
    from .transfer import _children, hits, root_cells
    gaps = _gap_letters(td, alt, b)
    cells = root_cells(td)
    for _ in range(k):
        nxt = []
        for cell in cells:
            j, t = gaps[cell.letter]
            _, e1, e2 = alt.pairs[(cell.letter, j)]
            q = _continuation(td, j, t, b - 1)
            kids = [cell]
            for _ in range(b):
                kids = [c for kid in kids for c in _children(td, kid)]
            cands = [c for c in kids if c.path[cell.depth:] in ((e1,) + q, (e2,) + q)]
            miss = [c for c in cands if not hits(c.bound, z, lattice)]
            if len(cands) != 2:
                raise AssertionError("alternate pair cylinders not found")
            if not miss:
                raise GapUndetermined(f"no gap cylinder below {cell.path} misses the level")
            nxt.extend(c for c in kids if c is not miss[0])
            if len(nxt) > max_cells:
                raise BudgetExceeded(f"more than {max_cells} cover cylinders")
        cells = nxt
    return cells


def components(cells):
    """Merge adjacent cylinders into the connected components ``(left, right)``."""
    out = []
    for c in sorted(cells, key=lambda c: c.left):
        right = c.left + c.length
        if out and out[-1][1] == c.left:
            out[-1] = (out[-1][0], right)
        else:
            out.append((c.left, right))
    return out


def hausdorff_report(P, pair, K=5, max_doublings=4):
    """Alternate pairs, gap depth ``b``, ``m``, ``mu``, ``beta0`` and cover statistics up to ``K``."""
    alt = alternate_pairs(P, pair, max_doublings)
    if not alt.complete:
        raise GapUndetermined(f"alternate pairs incomplete after {max_doublings} doublings")
    td = alt.td
    F = td.fmax - td.fmin
    lam = abs(td.lam).hi
    b = gap_params(F, lam, alt.delta)
    certified = Interval(F) * Interval(lam) ** b / (1 - Interval(lam)) < Interval(alt.delta)
    M = _power(td.P.A.astype(object), b)
    lengths = [td.P.iet.lengths[a] for a in td.P.alphabet]
    mu = float(min(lengths) / max(lengths))
    rep = HausdorffReport(alt.r, b, F, alt.delta, lam, len(lengths), int(M.max()),
                          int(M.sum(axis=1).max()), mu, certified)
    rep.stats = cover_statistics(td, alt, b, K)
    return rep, alt


def box_dimension_estimate(counts, scales):
    """Least-squares slope of ``log N`` against ``-log(scale)``."""
    if len(counts) < 4:
        raise InsufficientDepths("need at least four depths")
    x = -np.log(np.asarray(scales, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def level_box_counts(td, z, depths, lattice=None):
    """Counts of depth-``k`` cylinders meeting the level, with scale ``rho^-k``."""
    counts, scales = [], []
    rho = float(td.P.rho)
    for k in depths:
        counts.append(len(level_cells(td, z, k, lattice)))
        scales.append(rho ** -k)
    return counts, scales


def cantor_intervals(depth):
    """Half-open intervals of the depth-``depth`` middle-thirds construction."""
    from fractions import Fraction
    out = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for l, r in out:
            w = (r - l) / 3
            nxt += [(l, l + w), (r - w, r)]
        out = nxt
    return out


def box_counts(intervals, scales):
    """Number of grid boxes ``[i s, (i + 1) s)`` meeting some half-open interval, per scale."""
    counts = []
    for s in scales:
        boxes = set()
        for l, r in intervals:
            i0 = math.floor(l / s)
            i1 = math.ceil(r / s)
            boxes.update(range(i0, i1))
        counts.append(len(boxes))
    return counts
