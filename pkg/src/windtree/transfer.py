"""Stable eigenvectors, the Bratteli-Vershik coding and transfer functions.

For a self-similar IET with matrix ``A`` and a stable eigenvector ``psi`` of
``A^T`` (eigenvalue ``lam``, ``|lam| < 1``), the transfer function

    h(x) = sum_i lam^(i-1) f(e_i)

along the coding ``x = (e_1, e_2, ...)`` solves ``h(T x) - h(x) = psi(x)``.
A Bratteli edge ``e = (j, l, s)`` is floor ``l`` of the level-1 tower over
letter ``j``; it lies inside letter ``s`` and carries the weight ``f(e)``,
the Birkhoff sum of ``psi`` along the first ``l`` floors of that tower.
"""

from __future__ import annotations

import bisect
import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ComplexStableSpace, NearUnitEigenvalue, UnderdeterminedTau
from .iet import exact
from .linalg import exact_root, is_singular_shift, nullspace, solve
from .numbers import Interval, QuadraticNumber
from .rauzy import towers

log = logging.getLogger(__name__)


# ------------------------------------------------------------------ spectrum

@dataclass(frozen=True)
class StablePair:
    """Stable eigenvalue ``lam`` of ``A^T`` with eigenvector ``psi`` (max-norm 1)."""

    lam: Interval
    psi: dict
    alphabet: tuple
    block: str | None = None
    exact_lam: object = None
    exact_psi: dict | None = None

    @property
    def is_exact(self):
        return self.exact_lam is not None

    def vector(self):
        return np.array([self.psi[a].mid for a in self.alphabet])

    def __iter__(self):
        yield self.lam
        yield self.psi


_SIGNS = {"+": 1, "-": -1}


def _block_basis(alphabet, involutions, block):
    """Integer basis of the character block ``block`` as columns (orbit representatives)."""
    sh, sv = _SIGNS[block[0]], _SIGNS[block[1]]
    th, tv = involutions["tau_h"], involutions["tau_v"]
    idx = {a: i for i, a in enumerate(alphabet)}
    seen, cols, reps = set(), [], []
    for a in alphabet:
        if a in seen:
            continue
        orbit = {a: 1, th[a]: sh, tv[a]: sv, tv[th[a]]: sh * sv}
        if len(orbit) != 4:
            raise ValueError(f"Klein action is not free at letter {a}")
        seen.update(orbit)
        col = np.zeros(len(alphabet), dtype=object)
        for b, s in orbit.items():
            col[idx[b]] = s
        cols.append(col)
        reps.append(idx[a])
    return np.array(cols, dtype=object).T, reps


def stable_spectrum(A, alphabet=None, involutions=None, block=None, guard=1e-8):
    """Real eigenpairs of ``A^T`` with ``|lam| < 1``, largest ``|lam|`` first.

    With ``involutions`` and ``block`` (one of ``"++", "+-", "-+", "--"``) the
    search is restricted to vectors transforming by that character of the
    Klein group.  Eigenvalues of degree at most 2 are returned exactly.
    """
    A = np.asarray(A, dtype=object)
    n = len(A)
    alphabet = tuple(alphabet) if alphabet is not None else tuple(range(n))
    At = A.T
    if block is None:
        E, reps = np.eye(n, dtype=int).astype(object), list(range(n))
    else:
        E, reps = _block_basis(alphabet, involutions, block)
    AE = At.dot(E)
    M = np.array([[AE[r, c] for c in range(E.shape[1])] for r in reps], dtype=object)
    if not np.array_equal(E.dot(M), AE):
        raise ValueError("block is not invariant under the matrix")
    if M.size == 0:
        return []
    w, V = np.linalg.eig(M.astype(float))
    stable_real, stable_complex = [], []
    for k, lam in enumerate(w):
        mod = abs(lam)
        if 1 - guard <= mod <= 1 + guard:
            if abs(lam.imag) < 1e-12 and (is_singular_shift(M, 1) or is_singular_shift(M, -1)):
                continue
            raise NearUnitEigenvalue(f"eigenvalue {lam} within {guard} of the unit circle")
        if mod < 1:
            (stable_real if abs(lam.imag) < 1e-12 else stable_complex).append(k)
    if not stable_real:
        if stable_complex:
            raise ComplexStableSpace("all stable eigenvalues are non-real")
        return []
    out = []
    for k in stable_real:
        lam = float(w[k].real)
        if sum(abs(w[i] - w[k]) < 1e-9 for i in stable_real) > 1:
            log.warning("skipping repeated stable eigenvalue %s", lam)
            continue
        out.append(_pair(M, E, alphabet, lam, V[:, k].real, block))
    out.sort(key=lambda p: -abs(p.lam.mid))
    return out


def _normalize(vec, absval):
    big = max(range(len(vec)), key=lambda i: absval(vec[i]))
    return [v / vec[big] for v in vec]


def _pair(M, E, alphabet, lam, v, block):
    root = exact_root(M, lam)
    if root is not None:
        r = len(M)
        rows = [[int(M[i][j]) - (root if i == j else 0) for j in range(r)] for i in range(r)]
        basis = nullspace(rows)
        if len(basis) == 1:
            coeffs = basis[0]
            vec = [sum((int(E[i, j]) * coeffs[j] for j in range(r)), QuadraticNumber.coerce(0, root.d))
                   for i in range(len(E))]
            vec = _normalize(vec, abs)
            ex = dict(zip(alphabet, vec))
            return StablePair(root.to_interval(), {a: Interval.coerce(x) for a, x in ex.items()},
                              alphabet, block, root, ex)
    vec = np.array(_normalize(list(E.astype(float).dot(v)), abs))
    mv = M.astype(float).dot(v) - lam * v
    rad = 1e3 * (float(np.max(np.abs(mv))) / max(float(np.max(np.abs(v))), 1e-300) + 1e-15)
    return StablePair(Interval.around(lam, rad),
                      {a: Interval.around(float(x), rad) for a, x in zip(alphabet, vec)},
                      alphabet, block)


# ------------------------------------------------------------------ Bratteli

@dataclass(frozen=True)
class BratteliEdge:
    j: object
    l: int
    s: object
    left: object
    f: Interval
    f_exact: object = None


def bratteli_edges(P, psi=None):
    """Level-1 edges of ``P`` sorted by position, weighted by ``psi`` when given."""
    tw = towers(P, 1)
    W = _weights(tw.words, psi) if psi is not None else None
    out = []
    for j in P.alphabet:
        for l, s in enumerate(tw.words[j]):
            v = W[j][l] if W is not None else 0
            out.append(BratteliEdge(j, l, s, tw.floor_left[j][l], Interval.coerce(_num(v)), v))
    out.sort(key=lambda e: e.left)
    return out


def _num(v):
    return Fraction(v) if isinstance(v, int) else v


def _weights(words, psi):
    """Birkhoff sums ``f(j, l)`` of ``psi`` over the first ``l`` floors."""
    out = {}
    for j, w in words.items():
        acc, vals = 0, []
        for s in w:
            vals.append(acc)
            acc = acc + psi[s]
        out[j] = vals
    return out


@dataclass
class TransferData:
    """Everything needed to evaluate and bound one transfer function."""

    P: object
    pair: StablePair
    edges: list
    H: dict
    tau: dict
    hleft: dict
    tau_exact: dict | None = None
    _lefts: list = field(default_factory=list, repr=False)

    @property
    def lam(self):
        return self.pair.lam

    @property
    def fmin(self):
        return min(e.f.lo for e in self.edges)

    @property
    def fmax(self):
        return max(e.f.hi for e in self.edges)

    @property
    def F(self):
        return self.fmax - self.fmin

    def locate(self, x, k):
        """Edges ``e_1..e_k`` of the coding of the exact point ``x``."""
        P, T = self.P, self.P.iet
        x = exact(x)
        path = []
        for _ in range(k):
            i = bisect.bisect_right(self._lefts, x) - 1
            if i < 0:
                raise ValueError(f"{x} is left of the domain")
            e = self.edges[i]
            path.append(e)
            x = T.top_left[e.j] + P.rho * (x - e.left)
        return path, x


def transfer_data(P, pair, H_iterations=200):
    """Bratteli edges, weights, height bounds ``H_j`` and the jump vector ``tau``."""
    psi = pair.exact_psi if pair.is_exact else pair.psi
    edges = bratteli_edges(P, psi)
    H = _height_bounds(P.alphabet, edges, pair.lam, H_iterations)
    tau, tau_ex = tau_vector(P, pair)
    hleft = {}
    T = P.iet
    for b0 in range(P.blocks):
        acc = Interval(0.0)
        for a in T.perm.top:
            if P.block_left(T.top_left[a]) == Fraction(b0, P.blocks):
                hleft[a] = acc
                acc = acc + tau[a]
    td = TransferData(P, pair, edges, H, tau, hleft, tau_ex)
    td._lefts = [e.left for e in edges]
    return td


def _height_bounds(alphabet, edges, lam, iterations):
    absl = abs(lam).hi
    if absl >= 1:
        raise ValueError("eigenvalue is not stable")
    R = max(max(abs(e.f.lo), abs(e.f.hi)) for e in edges) / (1 - absl)
    R = R * (1 + 1e-12) + 1e-300
    H = {j: Interval(-R, R) for j in alphabet}
    by_src = {}
    for e in edges:
        by_src.setdefault(e.s, []).append(e)
    for _ in range(iterations):
        new = {}
        for j in alphabet:
            acc = None
            for e in by_src[j]:
                v = e.f + lam * H[e.j]
                acc = v if acc is None else acc.hull(v)
            new[j] = acc.intersect(H[j]) or acc
        if all(new[j] == H[j] for j in alphabet):
            break
        H = new
    return H


def tau_vector(P, pair):
    """Jumps ``tau_j = h(right I_j) - h(left I_j)``; returns ``(intervals, exact or None)``.

    The unknowns satisfy ``A tau = tau / lam`` plus two boundary equations per
    block, coming from ``h`` vanishing at the left end of every block.
    """
    T, alph = P.iet, P.alphabet
    n = len(alph)
    idx = {a: i for i, a in enumerate(alph)}
    A = P.A
    rows, rhs = [], []
    exact_mode = pair.is_exact
    lam = pair.exact_lam if exact_mode else pair.lam.mid
    psi = pair.exact_psi if exact_mode else {a: v.mid for a, v in pair.psi.items()}
    inv = 1 / lam
    for i in range(n):
        rows.append([int(A[i, j]) - (inv if i == j else 0) for j in range(n)])
        rhs.append(0)
    def block_tops(a):
        lo = P.block_left(T.top_left[a])
        return [t for t in T.perm.top if P.block_left(T.top_left[t]) == lo]

    for b0 in range(P.blocks):
        lo = Fraction(b0, P.blocks)
        bots = [a for a in T.perm.bot if P.block_left(T.bot_left[a]) == lo]
        beta, gamma = bots[0], bots[-1]
        # the image of beta starts where h vanishes
        row = [0] * n
        tb = block_tops(beta)
        for a in tb[: tb.index(beta)]:
            row[idx[a]] = 1
        rows.append(row)
        rhs.append(-psi[beta])
        # the image of gamma ends at the right end of block b0
        row = [0] * n
        tg = block_tops(gamma)
        for a in tg[: tg.index(gamma) + 1]:
            row[idx[a]] += 1
        for a in T.perm.top:
            if P.block_left(T.top_left[a]) == lo:
                row[idx[a]] -= 1
        rows.append(row)
        rhs.append(-psi[gamma])
    if exact_mode:
        x, rank, ok = solve(rows, rhs)
        if not ok:
            raise ValueError("inconsistent jump equations")
        if x is None:
            raise UnderdeterminedTau(f"jump equations have rank {rank} < {n}")
        ex = dict(zip(alph, x))
        return {a: v.to_interval() for a, v in ex.items()}, ex
    M = np.array([[float(v) for v in r] for r in rows])
    y = np.array([float(v) for v in rhs])
    sol, _, rank, _ = np.linalg.lstsq(M, y, rcond=None)
    if rank < n:
        raise UnderdeterminedTau(f"jump equations have rank {rank} < {n}")
    res = float(np.max(np.abs(M.dot(sol) - y)))
    rad = max(res, 1e-12) * 1e3
    return {a: Interval.around(float(v), rad) for a, v in zip(alph, sol)}, None


def tau_residual(td):
    """Max-norm residual of ``A tau - tau / lam`` evaluated in floating point."""
    A = td.P.A.astype(float)
    t = np.array([td.tau[a].mid for a in td.P.alphabet])
    return float(np.max(np.abs(A.dot(t) - t / td.lam.mid)))


# ------------------------------------------------------------------ evaluation

def path_bound(td, path):
    """Enclosure of ``h`` on the cell of a finite path."""
    lam = td.lam
    acc, p = Interval(0.0), Interval(1.0)
    for e in path:
        acc = acc + p * e.f
        p = p * lam
    if not path:
        raise ValueError("empty path")
    return acc + p * td.H[path[-1].j]


def h_eval(td, x, k=30):
    """Enclosure of ``h(x)`` from the depth-``k`` coding.

    The bounds of all prefixes are intersected, so enclosures shrink
    monotonically with ``k`` even at the rounding level.
    """
    out = td.H[td.P.iet.letter_at(exact(x))]
    if k == 0:
        return out
    path, _ = td.locate(x, k)
    lam = td.lam
    acc, p = Interval(0.0), Interval(1.0)
    for e in path:
        acc = acc + p * e.f
        p = p * lam
        nxt = out.intersect(acc + p * td.H[e.j])
        if nxt is None:
            raise AssertionError(f"prefix bounds of h({x}) are disjoint")
        out = nxt
    return out


def h_series(td, x, k=40):
    """Midpoint of the depth-``k`` partial sum (floating point)."""
    path, _ = td.locate(x, k)
    lam, acc, p = td.lam.mid, 0.0, 1.0
    for e in path:
        acc += p * e.f.mid
        p *= lam
    return acc


def h_at_left(td, letter):
    """``h`` at the left end of ``I_letter`` from the jump vector."""
    return td.hleft[letter]


# ------------------------------------------------------------------ cells

@dataclass(frozen=True)
class Cell:
    """Cylinder ``J(p)``: points whose coding starts with ``path``."""

    path: tuple
    left: object
    length: object
    bound: Interval
    letter: object

    @property
    def depth(self):
        return len(self.path)


def _children(td, cell):
    """Refine ``cell`` by one more edge."""
    P, T = td.P, td.P.iet
    k = cell.depth
    j = cell.letter
    out = []
    lamk = td.lam ** k
    prefix = Interval(0.0)
    p = Interval(1.0)
    for e in cell.path:
        prefix = prefix + p * e.f
        p = p * td.lam
    for e in td._by_source()[j]:
        left = cell.left + (e.left - T.top_left[j]) / P.rho ** k
        length = T.lengths[e.j] / P.rho ** (k + 1)
        bound = prefix + lamk * e.f + lamk * td.lam * td.H[e.j]
        out.append(Cell(cell.path + (e,), left, length, bound, e.j))
    return out


def _by_source(self):
    cache = getattr(self, "_src_cache", None)
    if cache is None:
        cache = {}
        for e in self.edges:
            cache.setdefault(e.s, []).append(e)
        self._src_cache = cache
    return cache


TransferData._by_source = _by_source


def root_cells(td):
    T = td.P.iet
    return [Cell((), T.top_left[a], T.lengths[a], td.H[a], a) for a in td.P.alphabet]


def cell_bounds(td, k):
    """All depth-``k`` cells with their enclosures, left to right."""
    cells = root_cells(td)
    for _ in range(k):
        cells = [c for cell in cells for c in _children(td, cell)]
    cells.sort(key=lambda c: c.left)
    return cells


def hits(bound, z, lattice=None):
    """Whether ``bound`` meets ``z`` (or ``z + lattice * Z``)."""
    if lattice is None:
        return bound.lo <= z <= bound.hi
    import math
    c = abs(lattice)
    return math.floor((bound.hi - z) / c) >= math.ceil((bound.lo - z) / c)


def level_cells(td, z, k, lattice=None, max_cells=10**6):
    """Depth-``k`` cells whose enclosure may contain the level ``h = z``.

    Branch and bound from the root cells; children of a discarded cell are
    never visited.  With ``lattice`` the level is ``z + lattice * Z``.
    """
    from .errors import BudgetExceeded
    cells = [c for c in root_cells(td) if hits(c.bound, z, lattice)]
    for _ in range(k):
        nxt = []
        for cell in cells:
            nxt.extend(c for c in _children(td, cell) if hits(c.bound, z, lattice))
        if len(nxt) > max_cells:
            raise BudgetExceeded(f"more than {max_cells} level cells")
        cells = nxt
    cells.sort(key=lambda c: c.left)
    return cells


def export_cells(cells, path):
    """Write cells as CSV: left, length, bound_lo, bound_hi, depth, path."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["left", "length", "bound_lo", "bound_hi", "depth", "path"])
        for c in cells:
            w.writerow([repr(float(c.left)), repr(float(c.length)), repr(c.bound.lo), repr(c.bound.hi),
                        c.depth, " ".join(f"{e.j}:{e.l}" for e in c.path)])
