"""Rauzy-Veech induction, cocycle matrices, towers and loop search.

Convention: one step compares the last top interval ``a_t`` with the last
bottom interval ``a_b`` and cuts the longer one.  Matrices act on length
vectors by ``lam = E @ lam_new`` and on test vectors by ``E.T``.  Rows and
columns are indexed by :func:`letters` (sorted labels).
"""

from __future__ import annotations

import enum
import functools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotPrimitive, TieAmbiguous
from .iet import IET, PermutationPair, evaluate, exact, make_iet, orbit_letters
from .linalg import exact_root, nullspace
from .numbers import Interval

__all__ = [
    "RauzyMove",
    "RauzyLoop",
    "PeriodicIET",
    "TowerSystem",
    "letters",
    "perm_step",
    "rv_step",
    "replay",
    "loop_matrix",
    "rauzy_loop_search",
    "is_primitive",
    "fixed_point_lengths",
    "perron_exact",
    "towers",
]


class RauzyMove(str, enum.Enum):
    TOP = "t"
    BOTTOM = "b"

    @classmethod
    def coerce(cls, m):
        return m if isinstance(m, cls) else cls(str(m)[0].lower())


def letters(perm):
    """Canonical matrix index order of an alphabet."""
    try:
        return tuple(sorted(perm.top))
    except TypeError:
        return tuple(sorted(perm.top, key=repr))


def _int_matrix(n):
    return np.array([[0] * n for _ in range(n)], dtype=object)


def identity(n):
    m = _int_matrix(n)
    for i in range(n):
        m[i, i] = 1
    return m


def perm_step(perm, move):
    """Combinatorial part of one step: new permutation pair and elementary matrix."""
    move = RauzyMove.coerce(move)
    top, bot = list(perm.top), list(perm.bot)
    at, ab = top[-1], bot[-1]
    idx = {a: i for i, a in enumerate(letters(perm))}
    E = identity(perm.n)
    if move is RauzyMove.TOP:
        bot.pop()
        bot.insert(bot.index(at) + 1, ab)
        E[idx[at], idx[ab]] = 1
    else:
        top.pop()
        top.insert(top.index(ab) + 1, at)
        E[idx[ab], idx[at]] = 1
    return PermutationPair(tuple(top), tuple(bot)), E


def rv_step(T, move=None):
    """One Rauzy-Veech step.

    Without ``move`` the two rightmost lengths are compared exactly and equal
    lengths raise :class:`TieAmbiguous`.  With ``move`` the step is replayed
    symbolically.  Returns ``(T1, move, E)``; ``T1`` lives on ``[0, |I^(1)|)``.
    """
    at, ab = T.perm.top[-1], T.perm.bot[-1]
    lt, lb = T.lengths[at], T.lengths[ab]
    if move is None:
        if lt == lb:
            raise TieAmbiguous(f"rightmost lengths {lt} and {lb} are equal")
        move = RauzyMove.TOP if lt > lb else RauzyMove.BOTTOM
    move = RauzyMove.coerce(move)
    perm, E = perm_step(T.perm, move)
    lengths = dict(T.lengths)
    if move is RauzyMove.TOP:
        lengths[at] = lt - lb
    else:
        lengths[ab] = lb - lt
    return make_iet(perm, lengths, normalize=False), move, E


def replay(T, moves):
    """Apply a move word symbolically; returns the final IET and ``A``."""
    A = identity(T.n)
    for m in moves:
        T, _, E = rv_step(T, m)
        A = A.dot(E)
    return T, A


def loop_matrix(start, moves):
    perm, A = start, identity(start.n)
    for m in moves:
        perm, E = perm_step(perm, m)
        A = A.dot(E)
    return perm, A


def is_primitive(A):
    """Some power of ``A`` is entrywise positive (Wielandt bound ``n^2 - 2n + 2``)."""
    B = (np.asarray(A, dtype=object) != 0).astype(np.int64)
    n = B.shape[0]
    P = B.copy()
    for _ in range(max(1, n * n - 2 * n + 2)):
        if P.all():
            return True
        P = ((P @ B) > 0).astype(np.int64)
    return bool(P.all())


@dataclass(frozen=True)
class RauzyLoop:
    start: PermutationPair
    moves: str
    matrix: np.ndarray

    def __post_init__(self):
        end, A = loop_matrix(self.start, self.moves)
        if end != self.start:
            raise ValueError(f"move word {self.moves!r} is not a loop")
        object.__setattr__(self, "matrix", A)

    @classmethod
    def from_word(cls, start, moves):
        return cls(start, "".join(RauzyMove.coerce(m).value for m in moves), None)

    @property
    def N(self):
        return len(self.moves)

    def to_text(self):
        return f"top {' '.join(map(str, self.start.top))}\nbot {' '.join(map(str, self.start.bot))}\nmoves {self.moves}\n"

    @classmethod
    def from_text(cls, text):
        rows = {ln.split()[0]: ln.split()[1:] for ln in text.strip().splitlines()}
        return cls.from_word(PermutationPair(tuple(rows["top"]), tuple(rows["bot"])),
                             rows["moves"][0] if rows["moves"] else "")


def _rauzy_class(start):
    nodes, succ = {start: 0}, {}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        succ[p] = {}
        for m in "tb":
            q, _ = perm_step(p, m)
            succ[p][m] = q
            if q not in nodes:
                nodes[q] = len(nodes)
                queue.append(q)
    return succ


def _dist_to(start, succ):
    pred = {p: [] for p in succ}
    for p, out in succ.items():
        for q in out.values():
            pred[q].append(p)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for p in pred[q]:
            if p not in dist:
                dist[p] = dist[q] + 1
                queue.append(p)
    return dist


def _canonical(word, start, succ):
    best, p = None, start
    for r in range(len(word)):
        if p == start:
            rot = word[r:] + word[:r]
            if best is None or rot < best:
                best = rot
        p = succ[p][word[r]]
    return best


def rauzy_loop_search(start, max_len, workers=1):
    """All primitive loops through ``start`` of length at most ``max_len``.

    Loops are reported once per cyclic rotation class (the lexicographically
    least rotation that is again based at ``start``), sorted by length then
    word.  The result does not depend on ``workers``.
    """
    if max_len <= 0:
        return []
    succ = _rauzy_class(start)
    dist = _dist_to(start, succ)

    def walk(prefix):
        found, stack = set(), []
        p = start
        for m in prefix:
            p = succ[p][m]
        stack.append((p, prefix))
        while stack:
            p, w = stack.pop()
            if w and p == start:
                found.add(_canonical(w, start, succ))
            if len(w) >= max_len:
                continue
            for m in "tb":
                q = succ[p][m]
                if q in dist and len(w) + 1 + dist[q] <= max_len:
                    stack.append((q, w + m))
        return found

    prefixes = [""] if max_len < 3 else ["tt", "tb", "bt", "bb"]
    words = set()
    if max_len >= 3:
        for w in ("t", "b"):
            if succ[start][w] == start:
                words.add(w)
        for w in ("tt", "tb", "bt", "bb"):
            p = succ[succ[start][w[0]]][w[1]]
            if p == start:
                words.add(_canonical(w, start, succ))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for part in pool.map(walk, prefixes):
            words |= part
    loops = []
    for w in sorted(words, key=lambda w: (len(w), w)):
        loop = RauzyLoop.from_word(start, w)
        if is_primitive(loop.matrix):
            loops.append(loop)
    return loops


def fixed_point_lengths(A):
    """Perron eigenvalue and eigenvector (sum 1) as interval enclosures."""
    if not is_primitive(A):
        raise NotPrimitive("no power of the matrix is positive")
    M = np.array(A, dtype=float)
    w, V = np.linalg.eig(M)
    k = int(np.argmax(w.real))
    rho = float(w[k].real)
    v = np.abs(V[:, k].real)
    v = v / v.sum()
    # refine by a few power-iteration steps on the normalized vector
    for _ in range(3):
        u = M @ v
        rho = float(u.sum())
        v = u / u.sum()
    resid = float(np.max(np.abs(M @ v - rho * v)))
    rad = max(resid, 1e-15) * M.shape[0] * 4
    return Interval.around(rho, rad * (1 + rho)), [Interval.around(float(x), rad) for x in v]


def perron_exact(A):
    """Exact Perron data when the eigenvalue is rational or quadratic.

    Returns ``(rho, vec)`` as :class:`QuadraticNumber` values with ``vec``
    summing to 1, or ``None`` when the eigenvalue has higher degree.
    """
    if not is_primitive(A):
        raise NotPrimitive("no power of the matrix is positive")
    A = np.asarray(A, dtype=object)
    r = exact_root(A, float(fixed_point_lengths(A)[0].mid))
    if r is None:
        return None
    n = len(A)
    rows = [[int(A[i][j]) - (r if i == j else 0) for j in range(n)] for i in range(n)]
    basis = nullspace(rows)
    if len(basis) != 1:
        raise NotPrimitive(f"Perron eigenspace has dimension {len(basis)}")
    vec = basis[0]
    total = sum(vec[1:], vec[0])
    return r, [v / total for v in vec]


def _substitute(words, word):
    out = []
    for a in word:
        out.extend(words[a])
    return tuple(out)


@dataclass(frozen=True, eq=False)
class PeriodicIET:
    """A self-similar IET.

    ``T`` lives on ``[0, 1)`` split into ``blocks`` equal blocks; its first
    return to the left ``1/rho`` portion of every block is ``T`` again after
    the block-wise rescaling :meth:`scale`.  ``words[j]`` lists the letters
    visited by the tower over the base piece of letter ``j``.
    """

    iet: IET
    rho: object
    words: dict
    blocks: int = 1
    loop: RauzyLoop = None
    repeats: int = 1

    @property
    def alphabet(self):
        return letters(self.iet.perm)

    @property
    def N(self):
        return self.loop.N * self.repeats if self.loop is not None else None

    @property
    def A(self):
        idx = {a: i for i, a in enumerate(self.alphabet)}
        M = _int_matrix(len(idx))
        for j, w in self.words.items():
            for a in w:
                M[idx[a], idx[j]] += 1
        return M

    @property
    def perron(self):
        return self.rho

    def block_left(self, y):
        return Fraction(math.floor(y * self.blocks), self.blocks)

    def scale(self, y):
        """The renormalization map ``S``: block-wise contraction by ``1/rho``."""
        b = self.block_left(exact(y))
        return b + (y - b) / self.rho

    def power(self, r):
        """The same IET seen with period ``r`` times longer (substitution ``sigma^r``)."""
        if r < 1:
            raise ValueError("power must be at least 1")
        words = dict(self.words)
        for _ in range(r - 1):
            words = {j: _substitute(self.words, w) for j, w in words.items()}
        return PeriodicIET(self.iet, self.rho ** r, words, self.blocks, self.loop, self.repeats * r)

    @classmethod
    def from_loop(cls, loop):
        data = perron_exact(loop.matrix)
        if data is None:
            raise NotImplementedError("exact lengths need a rational or quadratic Perron value")
        rho, vec = data
        alph = letters(loop.start)
        T = make_iet(loop.start, dict(zip(alph, vec)), normalize=False)
        words = {a: (a,) for a in alph}
        cur = T
        for m in loop.moves:
            at, ab = cur.perm.top[-1], cur.perm.bot[-1]
            cur, _, _ = rv_step(cur, m)
            if RauzyMove.coerce(m) is RauzyMove.TOP:
                words[ab] = words[ab] + words[at]
            else:
                words[at] = words[ab] + words[at]
        if cur.perm != T.perm or any(cur.lengths[a] * rho != T.lengths[a] for a in alph):
            raise ValueError("loop replay is not self-similar")
        return cls(T, rho, words, 1, loop)


@dataclass(frozen=True, eq=False)
class TowerSystem:
    depth: int
    words: dict
    heights: dict
    base_left: dict
    matrix: np.ndarray
    iet: IET = None

    @functools.cached_property
    def floor_left(self):
        out = {}
        for j, w in self.words.items():
            xs, x = [], self.base_left[j]
            for _ in w:
                xs.append(x)
                x = evaluate(self.iet, x)
            out[j] = xs
        return out

    def floors(self):
        for j, w in self.words.items():
            for l, s in enumerate(w):
                yield j, l, s, self.floor_left[j][l]


def towers(P, k):
    """Rokhlin towers of ``P.iet`` over ``S^k(I)``."""
    if k < 1:
        raise ValueError("depth must be at least 1")
    words = dict(P.words)
    for _ in range(k - 1):
        words = {j: _substitute(P.words, w) for j, w in words.items()}
    T = P.iet
    base_left = {}
    for j in words:
        y = T.top_left[j]
        for _ in range(k):
            y = P.scale(y)
        base_left[j] = y
        if tuple(orbit_letters(T, y, len(words[j]))) != tuple(words[j]):
            raise AssertionError(f"tower {j} does not follow its word")
    heights = {j: len(w) for j, w in words.items()}
    A = P.A
    Ak = identity(len(A))
    for _ in range(k):
        Ak = Ak.dot(A)
    alph = P.alphabet
    for c, j in enumerate(alph):
        assert heights[j] == sum(Ak[:, c])
    measure = sum((heights[j] * T.lengths[j] / P.rho ** k for j in alph), Fraction(0))
    assert measure == T.total, "towers do not tile the domain"
    return TowerSystem(k, words, heights, base_left, Ak, T)
