"""Invariant functions of Z^m skew products and their pictures in the plane.

The skew product over a section IET ``T`` with integer cocycle ``phi`` is
``T_phi(x, a) = (T x, a + phi(x))``.  Given transfer functions ``h_i`` for
stable cocycles ``psi_i`` decomposed as

    psi = b . Phi(gamma) + C . Phi(sigma) + e . (u o T - u),

the function ``h(x) - b a - e u(x)`` changes under ``T_phi`` by a vector of
``C Z^d``, so it descends to an invariant function on the torus
``R^d / C Z^d``.  Here ``u`` is locally constant on the copies of the base
section (a coboundary of ``T`` in the sense of piecewise constant functions).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, CornerHit, NotInSpan, SingularC, StartInsideObstacle
from .geometry import SHEETS, Tracer, _halfopen, gamma_classes, phi_of
from .iet import evaluate, exact
from .linalg import solve
from .numbers import Interval
from .transfer import h_eval


# ------------------------------------------------------------------ skew products

@dataclass(frozen=True)
class SkewSystem:
    """``T_phi`` on ``I x Z^m`` for integer-valued ``phis`` (one dict per coordinate)."""

    iet: object
    phis: tuple

    @property
    def m(self):
        return len(self.phis)


def skew_apply(S, state, inverse=False):
    x, a = state
    a = tuple(a) if not isinstance(a, int) else (a,)
    if not inverse:
        letter = S.iet.letter_at(exact(x))
        return evaluate(S.iet, x), tuple(ai + phi[letter] for ai, phi in zip(a, S.phis))
    y = evaluate(S.iet, x, "inverse")
    letter = S.iet.letter_at(y)
    return y, tuple(ai - phi[letter] for ai, phi in zip(a, S.phis))


# ------------------------------------------------------------------ decomposition

def block_potential(P, u):
    """The cocycle ``u(block of T x) - u(block of x)`` for ``u`` indexed by block."""
    T = P.iet
    out = {}
    for l in P.alphabet:
        g = int(P.block_left(T.top_left[l]) * P.blocks)
        g2 = int(P.block_left(T.bot_left[l]) * P.blocks)
        out[l] = u[g2] - u[g]
    return out


@dataclass(frozen=True)
class Decomposition:
    b: list
    C: list
    e: list
    exact: bool

    def as_float(self):
        f = lambda M: np.array([[float(v) for v in r] for r in M])
        return f(self.b), f(self.C), f(self.e)


def decompose_stable(psis, phi_gammas, phi_sigmas, coboundaries=(), alphabet=None, tol=1e-9):
    """Solve ``psi_i = b_i . Phi(gamma) + C_i . Phi(sigma) + e_i . w`` for every ``i``.

    Each argument is a list of functions on the alphabet (dicts).  Exact
    arithmetic is used when every entry is exact.
    """
    alphabet = list(alphabet or psis[0].keys())
    cols = list(phi_gammas) + list(phi_sigmas) + list(coboundaries)
    m, d = len(phi_gammas), len(phi_sigmas)
    rows = [[col[l] for col in cols] for l in alphabet]
    B, C, E = [], [], []
    exact_mode = all(not isinstance(p[l], Interval) for p in psis for l in alphabet)
    for psi in psis:
        if exact_mode:
            x, rank, ok = solve(rows, [psi[l] for l in alphabet])
            if not ok:
                raise NotInSpan("stable cocycle is not in the span of the given classes")
            if x is None:
                raise NotInSpan(f"decomposition is not unique (rank {rank})")
        else:
            M = np.array([[float(v) for v in r] for r in rows])
            y = np.array([float(psi[l]) if not isinstance(psi[l], Interval) else psi[l].mid for l in alphabet])
            x, _, rank, _ = np.linalg.lstsq(M, y, rcond=None)
            if np.max(np.abs(M.dot(x) - y)) > tol:
                raise NotInSpan("stable cocycle is not in the span of the given classes")
            if rank < len(cols):
                raise NotInSpan(f"decomposition is not unique (rank {rank})")
            x = list(x)
        B.append(x[:m])
        C.append(x[m:m + d])
        E.append(x[m + d:])
    Cf = np.array([[float(v) for v in r] for r in C])
    if abs(np.linalg.det(Cf)) < 1e-12:
        raise SingularC("the lattice matrix C is singular")
    return Decomposition(B, C, E, exact_mode)


# ------------------------------------------------------------------ invariant function

def lattice_reduce(v, C):
    """Representative of ``v`` modulo ``C Z^d`` in the fundamental cell ``C [0, 1)^d``."""
    if np.isscalar(v):
        c = float(np.asarray(C).reshape(-1)[0]) if not np.isscalar(C) else float(C)
        return v - c * math.floor(v / c)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    v = np.asarray(v, dtype=float)
    k = np.floor(np.linalg.solve(C, v))
    return v - C.dot(k)


def torus_close(u, v, C, tol=0.0):
    """Whether enclosures ``u, v`` (lists of Intervals) may agree modulo ``C Z^d`` (d = 1 exact test)."""
    if len(u) == 1:
        c = abs(float(np.asarray(C).reshape(-1)[0]))
        d = u[0] - v[0]
        return math.floor((d.hi + tol) / c) >= math.ceil((d.lo - tol) / c)
    diff = np.array([a.mid - b.mid for a, b in zip(u, v)])
    r = lattice_reduce(diff, C)
    Ci = np.atleast_2d(np.asarray(C, dtype=float))
    rad = sum(a.rad + b.rad for a, b in zip(u, v)) + tol
    shifts = [np.array(k) - 1 for k in np.ndindex(*(3,) * len(u))]
    best = min(np.max(np.abs(r - Ci.dot(s))) for s in shifts)
    return best <= rad


@dataclass
class InvariantFunction:
    """``h_hat(x, a) = h(x) - b a - e u(x)`` modulo ``C Z^d``."""

    transfers: list
    decomposition: Decomposition
    potentials: list
    depth: int = 30
    _consts: tuple = field(default=None, repr=False)

    @property
    def d(self):
        return len(self.transfers)

    @property
    def lattice(self):
        return self.decomposition.as_float()[1]

    def _coeffs(self):
        if self._consts is None:
            iv = lambda M: [[Interval.coerce(exact(v) if isinstance(v, (int, float)) else v) for v in r] for r in M]
            dec = self.decomposition
            self._consts = (iv(dec.b), iv(dec.e))
        return self._consts

    def lift(self, x, a, depth=None):
        """Unreduced enclosures of ``h(x) - b a - e u(x)``."""
        depth = self.depth if depth is None else depth
        a = (a,) if isinstance(a, int) else tuple(a)
        B, E = self._coeffs()
        P = self.transfers[0].P
        blk = int(P.block_left(exact(x)) * P.blocks)
        out = []
        for i, td in enumerate(self.transfers):
            v = h_eval(td, x, depth)
            for bj, aj in zip(B[i], a):
                v = v - bj * aj
            for ej, u in zip(E[i], self.potentials):
                v = v - ej * u[blk]
            out.append(v)
        return out

    def __call__(self, x, a, depth=None):
        return hat_h(self, x, a, depth)


def hat_h(F, x, a, depth=None):
    """Enclosures of the invariant function reduced to the fundamental cell."""
    v = F.lift(x, a, depth)
    C = F.lattice
    if len(v) == 1:
        c = float(C[0][0])
        k = math.floor(v[0].mid / c)
        return [v[0] - Interval(c) * k]
    mids = np.array([t.mid for t in v])
    k = np.floor(np.linalg.solve(C, mids))
    shift = C.dot(k)
    return [t - float(s) for t, s in zip(v, shift)]


def windtree_invariant(ps, depth=30, m=1):
    """Invariant function for a periodic wind-tree section, one unstable class.

    ``m = 1`` uses ``gamma_h`` and the ``(-,+)`` character block, where the
    stable partner of ``gamma_h`` lives.
    """
    from .geometry import HomologyClass
    from .transfer import stable_spectrum, transfer_data
    if m != 1:
        raise NotImplementedError("only the gamma_h cover is wired up")
    sd, X = ps.section, ps.periodic
    pair = stable_spectrum(X.A, X.alphabet, sd.involutions, "-+")[0]
    td = transfer_data(X, pair)
    gh, _ = gamma_classes()
    sigma = HomologyClass.of(h00=1, h10=-1, h01=1, h11=-1)
    u = [(-1) ** g[0] for g in SHEETS]
    w = block_potential(X, u)
    psi = pair.exact_psi if pair.is_exact else pair.psi
    dec = decompose_stable([psi], [phi_of(sd, gh).values], [phi_of(sd, sigma).values], [w], X.alphabet)
    skew = SkewSystem(X.iet, (phi_of(sd, gh).values,))
    return InvariantFunction([td], dec, [u], depth), skew


# ------------------------------------------------------------------ billiard

@dataclass
class BilliardPath:
    points: list
    velocities: list
    bounces: int
    margin: float


def _obstacle_gap(params, x, y):
    """Signed distance-like margin from the nearest obstacle (negative inside)."""
    k, l = math.floor(x + Fraction(1, 2)), math.floor(y + Fraction(1, 2))
    dx = abs(x - k) - params.a / 2
    dy = abs(y - l) - params.b / 2
    return max(float(dx), float(dy))


def _cell(x, s, half):
    # index of the unit cell the orbit is moving through
    k = math.floor(x + half)
    return k - 1 if s < 0 and x + half == k else k


def simulate_billiard(params, start, velocity, n_bounces=100, eps=0.0, budget=10**7):
    """Event-driven billiard among the obstacles ``[k +- a/2] x [l +- b/2]``.

    Works with floats (``eps`` > 0 as the corner tolerance) or exact numbers
    (``eps == 0``).  Stops after ``n_bounces`` reflections.
    """
    x, y = start
    vx, vy = velocity
    if vx == 0 or vy == 0:
        raise ValueError("axis-parallel directions are not supported")
    a2, b2 = params.a / 2, params.b / 2
    if isinstance(x, float):
        a2, b2 = float(a2), float(b2)
    half = Fraction(1, 2) if not isinstance(x, float) else 0.5
    if _obstacle_gap(params, x, y) < 0:
        raise StartInsideObstacle(f"({x}, {y}) is inside an obstacle")
    pts, vels, margin = [(x, y)], [(vx, vy)], _obstacle_gap(params, x, y)
    bounces = 0
    for _ in range(budget):
        if bounces >= n_bounces:
            break
        sx, sy = (1 if vx > 0 else -1), (1 if vy > 0 else -1)
        k, l = _cell(x, sx, half), _cell(y, sy, half)
        tx_exit = ((k + sx * half) - x) / vx
        ty_exit = ((l + sy * half) - y) / vy
        t_exit = min(tx_exit, ty_exit)
        # obstacle slab entry
        t_hit = None
        fx = k - sx * a2
        fy = l - sy * b2
        tx = (fx - x) / vx
        ty = (fy - y) / vy
        tin = max(tx, ty)
        txo, tyo = (k + sx * a2 - x) / vx, (l + sy * b2 - y) / vy
        tout = min(txo, tyo)
        if tin <= tout and tin > eps and tin <= t_exit:
            t_hit = tin
        if t_hit is not None:
            x, y = x + vx * t_hit, y + vy * t_hit
            if abs(tx - ty) <= eps:
                raise CornerHit(f"billiard hits an obstacle corner at ({float(x)}, {float(y)})")
            if tx > ty:
                x, vx = fx, -vx
            else:
                y, vy = fy, -vy
            bounces += 1
        else:
            x, y = x + vx * t_exit, y + vy * t_exit
            if tx_exit <= ty_exit:
                x = k + sx * half
            if ty_exit <= tx_exit:
                y = l + sy * half
        pts.append((x, y))
        vels.append((vx, vy))
        margin = min(margin, _obstacle_gap(params, x, y))
        mx, my = (pts[-2][0] + x) / 2, (pts[-2][1] + y) / 2
        margin = min(margin, _obstacle_gap(params, mx, my))
    return BilliardPath(pts, vels, bounces, margin)


# ------------------------------------------------------------------ plane to section

@dataclass(frozen=True)
class SectionPoint:
    x: object
    a: int
    sheet: tuple
    cell: tuple


def trace_to_section(sd, point, velocity=(1, 1), budget=10**5):
    """Follow the billiard from ``point`` to its next section crossing.

    ``velocity`` only contributes its signs; the slope is the section's.
    Returns the section coordinate ``x`` in ``[0, 1)`` and the horizontal cell
    index ``a`` of the crossing.
    """
    p = sd.params
    X, Y = exact(point[0]), exact(point[1])
    g = (int(velocity[0] < 0), int(velocity[1] < 0))
    k, l = math.floor(X + Fraction(1, 2)), math.floor(Y + Fraction(1, 2))
    ux, uy = X - k, Y - l
    cx, cy = (-ux if g[0] else ux), (-uy if g[1] else uy)
    if abs(cx) < p.a / 2 and abs(cy) < p.b / 2:
        raise StartInsideObstacle(f"({float(X)}, {float(Y)}) is inside an obstacle")
    tr = Tracer(p, budget)
    a2 = p.a / 2
    hit = tr.run(cx, cy, g, 1, _halfopen(a2, a2 + sd.length))
    gh, gv = gamma_classes()
    dk = sum(c * v for c, v in zip(hit.counts, gh.coeffs))
    dl = sum(c * v for c, v in zip(hit.counts, gv.coeffs))
    x = (SHEETS.index(hit.sheet) + (hit.x - a2) / sd.length) / 4
    return SectionPoint(x, k + dk, hit.sheet, (k + dk, l + dl))


# ------------------------------------------------------------------ raster

@dataclass(frozen=True)
class RasterSpec:
    window: tuple
    size: tuple
    z: float
    tol: float
    depth: int
    mode: str = "level"


def _pixel_center(spec, i, j):
    x0, y0, x1, y1 = (Fraction(v) for v in spec.window)
    W, H = spec.size
    return (x0 + (x1 - x0) * Fraction(2 * i + 1, 2 * W),
            y1 - (y1 - y0) * Fraction(2 * j + 1, 2 * H))


def _pixel_grid(spec):
    x0, y0, x1, y1 = (float(Fraction(v)) for v in spec.window)
    W, H = spec.size
    xs = x0 + (x1 - x0) * (2 * np.arange(W) + 1) / (2 * W)
    ys = y1 - (y1 - y0) * (2 * np.arange(H) + 1) / (2 * H)
    return np.meshgrid(xs, ys)


def trace_batch(sd, X, Y, tol=1e-9, budget=10**5):
    """Vectorized float version of :func:`trace_to_section` for velocity ``(1, slope)``.

    Returns section coordinates, cell indices and a flag array marking
    orbits that pass within ``tol`` of a singular configuration; those must
    be redone exactly.
    """
    p = sd.params
    a2, b2, m = float(p.a) / 2, float(p.b) / 2, float(p.slope)
    L = float(sd.length)
    k = np.floor(X + 0.5)
    x, y = X - k, Y - np.floor(Y + 0.5)
    gx = np.zeros(X.shape, dtype=int)
    gy = np.zeros(X.shape, dtype=int)
    inside = (np.abs(x) < a2) & (np.abs(y) < b2)
    flag = (np.abs(np.abs(x) - a2) < tol) | (np.abs(np.abs(y) - b2) < tol)
    active = ~inside
    out_x = np.full(X.shape, np.nan)
    out_g = np.zeros(X.shape, dtype=int)
    dk = np.zeros(X.shape)
    xl = np.array([-0.5, -a2, 0.0, a2, 0.5])
    yl = np.array([-0.5, -b2, 0.0, b2, 0.5])
    for _ in range(budget):
        if not active.any():
            break
        cx, cy = x[active], y[active]
        nx = xl[np.minimum(np.searchsorted(xl, cx, side="right"), 4)]
        ny = yl[np.minimum(np.searchsorted(yl, cy, side="right"), 4)]
        tx, ty = nx - cx, (ny - cy) / m
        vert = tx <= ty
        horiz = ty <= tx
        cx = np.where(vert, nx, cx + ty)
        cy = np.where(horiz, ny, cy + m * tx)
        tie = np.abs(tx - ty) < tol
        g_x, g_y, d_k = gx[active], gy[active], dk[active]
        # outer vertical edge
        e = vert & (cx == 0.5)
        d_k = d_k + np.where(e, np.where(g_x == 0, 1, -1), 0)
        cx = np.where(e, -0.5, cx)
        # left side of the hole
        e = vert & (cx == -a2) & (np.abs(cy) < b2)
        f = tie | (vert & (cx == -a2) & (np.abs(np.abs(cy) - b2) < tol))
        cx = np.where(e, a2, cx)
        g_x = np.where(e, g_x ^ 1, g_x)
        # outer horizontal edge
        e = horiz & (cy == 0.5)
        cy = np.where(e, -0.5, cy)
        # bottom of the hole
        e = horiz & (cy == -b2) & (np.abs(cx) < a2)
        f = f | (horiz & (cy == -b2) & (np.abs(np.abs(cx) - a2) < tol))
        cy = np.where(e, b2, cy)
        g_y = np.where(e, g_y ^ 1, g_y)
        # section
        stop = horiz & (cy == b2) & (cx >= a2) & (cx < a2 + L)
        f = f | (horiz & (cy == b2) & ((np.abs(cx - a2) < tol) | (np.abs(cx - a2 - L) < tol)))
        x[active], y[active] = cx, cy
        gx[active], gy[active], dk[active] = g_x, g_y, d_k
        fl = flag[active] | f
        flag[active] = fl
        ox, og = out_x[active], out_g[active]
        ox = np.where(stop, cx, ox)
        og = np.where(stop, 2 * g_y + g_x, og)
        out_x[active], out_g[active] = ox, og
        act = active.copy()
        act[active] = ~stop
        active = act
    else:
        raise BudgetExceeded("batch trace did not reach the section")
    sec = (out_g + (out_x - a2) / L) / 4
    return sec, (k + dk).astype(np.int64), flag, inside


def h_batch(td, xs, depth=14):
    """Float partial sums of the transfer series for an array of points."""
    P = td.P
    lefts = np.array([float(e.left) for e in td.edges])
    jleft = np.array([float(P.iet.top_left[e.j]) for e in td.edges])
    f = np.array([e.f.mid for e in td.edges])
    lam, rho = td.lam.mid, float(P.rho)
    x = np.asarray(xs, dtype=float).copy()
    acc = np.zeros_like(x)
    p = 1.0
    for _ in range(depth):
        i = np.clip(np.searchsorted(lefts, x, side="right") - 1, 0, len(lefts) - 1)
        acc += p * f[i]
        x = jleft[i] + rho * (x - lefts[i])
        p *= lam
    return acc


def hat_batch(F, xs, a, depth=14):
    """Float ``h_hat`` for arrays (one transfer function)."""
    td = F.transfers[0]
    b, C, e = F.decomposition.as_float()
    P = td.P
    blk = np.clip(np.floor(xs * P.blocks).astype(int), 0, P.blocks - 1)
    v = h_batch(td, xs, depth) - b[0][0] * a
    for ej, u in zip(e[0], F.potentials):
        v = v - ej * np.asarray(u, dtype=float)[blk]
    c = abs(C[0][0])
    return v - c * np.floor(v / c)


def _exact_pixel(sd, F, spec, X, Y, c):
    try:
        sp = trace_to_section(sd, (X, Y))
    except StartInsideObstacle:
        return -1.0
    except CornerHit:
        return -2.0
    v = F(sp.x, sp.a, spec.depth)[0]
    return v.mid / c


def raster_values(sd, F, spec, exact_pixels=False):
    """Per-pixel ``h_hat / c`` in ``[0, 1)``; ``-1`` marks obstacles, ``-2`` singular pixels.

    The default path traces all pixels at once in floating point and redoes
    the few flagged near-singular pixels exactly.
    """
    W, H = spec.size
    c = abs(float(F.lattice[0][0]))
    grid = np.zeros((H, W))
    if exact_pixels:
        for j in range(H):
            for i in range(W):
                X, Y = _pixel_center(spec, i, j)
                grid[j, i] = _exact_pixel(sd, F, spec, X, Y, c)
        return grid
    PX, PY = _pixel_grid(spec)
    sec, a, flag, inside = trace_batch(sd, PX.ravel(), PY.ravel())
    ok = ~inside & ~flag
    vals = np.full(sec.shape, -1.0)
    vals[ok] = hat_batch(F, sec[ok], a[ok], max(spec.depth, 1)) / c
    for n in np.nonzero(flag & ~inside)[0]:
        j, i = divmod(int(n), W)
        X, Y = _pixel_center(spec, i, j)
        vals[n] = _exact_pixel(sd, F, spec, X, Y, c)
    return vals.reshape(H, W)


def level_mask(grid, z, tol, c=1.0):
    """Pixels whose value is within ``tol`` of ``z / c`` on the circle."""
    d = np.abs(((grid - z / c) + 0.5) % 1.0 - 0.5)
    return (grid >= 0) & (d <= tol)


def render_raster(sd, F, spec, path, exact_pixels=False):
    """Write a PGM (grayscale) or PPM (level set) image plus a JSON sidecar."""
    grid = raster_values(sd, F, spec, exact_pixels)
    c = abs(float(F.lattice[0][0]))
    H, W = grid.shape
    if spec.mode == "level":
        mask = level_mask(grid, spec.z, spec.tol / c, c)
        img = np.full((H, W, 3), 255, dtype=np.uint8)
        img[grid == -1] = (90, 90, 90)
        img[grid == -2] = (200, 0, 0)
        img[mask] = (0, 0, 0)
        header = f"P6\n{W} {H}\n255\n".encode()
        data = img.tobytes()
        frac = float(mask.sum()) / max(1, int((grid >= 0).sum()))
    else:
        img = np.where(grid >= 0, np.floor(grid * 255.999), 0).astype(np.uint8)
        header = f"P5\n{W} {H}\n255\n".encode()
        data = img.tobytes()
        frac = None
    with open(path, "wb") as fh:
        fh.write(header + data)
    meta = {
        "a": str(sd.params.a), "b": str(sd.params.b), "slope": float(sd.params.slope),
        "window": [str(Fraction(v)) for v in spec.window], "size": list(spec.size),
        "z": spec.z, "tol": spec.tol, "depth": spec.depth, "mode": spec.mode,
        "lattice": c, "marked_fraction": frac,
        "obstacle_pixels": int((grid == -1).sum()), "singular_pixels": int((grid == -2).sum()),
    }
    with open(os.path.splitext(path)[0] + ".json", "w") as fh:
        json.dump(meta, fh, indent=2)
    return grid, meta
