"""Exact Gaussian elimination over Q or a real quadratic field."""

from __future__ import annotations

from fractions import Fraction

import sympy

from .numbers import QuadraticNumber


def field_of(values):
    """Common quadratic field discriminant of a collection of numbers (5 if all rational)."""
    ds = {v.d for v in values if isinstance(v, QuadraticNumber) and v.b != 0}
    if len(ds) > 1:
        raise ValueError(f"mixed quadratic fields {sorted(ds)}")
    return ds.pop() if ds else 5


def _lift(rows):
    flat = [v for r in rows for v in r]
    d = field_of(flat)
    return [[QuadraticNumber.coerce(v, d) for v in r] for r in rows], d


def rref(rows):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m, d = _lift(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(rows):
    """Basis of the right kernel."""
    m, pivots = rref(rows)
    ncols = len(rows[0])
    d = field_of([v for r in m for v in r])
    zero, one = QuadraticNumber.coerce(0, d), QuadraticNumber.coerce(1, d)
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [zero] * ncols
        vec[free] = one
        for i, c in enumerate(pivots):
            vec[c] = -m[i][free]
        basis.append(vec)
    return basis


def solve(rows, rhs):
    """Unique solution of ``rows @ x = rhs``.

    Returns ``(x, rank, consistent)``; ``x`` is None unless the system is
    consistent with full column rank.
    """
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    ncols = len(rows[0])
    consistent = ncols not in pivots
    rank = len([p for p in pivots if p < ncols])
    if not consistent or rank < ncols:
        return None, rank, consistent
    x = [None] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return x, rank, consistent


def exact_root(M, approx, tol=1e-9):
    """The eigenvalue of an integer matrix closest to ``approx``, exactly, if its degree is at most 2."""
    n = len(M)
    S = sympy.Matrix(n, n, lambda i, j: int(M[i][j]))
    x = sympy.Symbol("x")
    best = None
    for fac, _ in sympy.factor_list(S.charpoly(x).as_expr())[1]:
        poly = sympy.Poly(fac, x)
        coeffs = [int(c) for c in poly.all_coeffs()]
        roots = []
        if poly.degree() == 1:
            roots = [QuadraticNumber(-coeffs[1], 0, coeffs[0])]
        elif poly.degree() == 2:
            a, b, c = coeffs
            disc = b * b - 4 * a * c
            if disc > 0:
                s = QuadraticNumber.sqrt(disc)
                roots = [(s - b) / (2 * a), (-s - b) / (2 * a)]
        for r in roots:
            err = abs(float(r) - approx)
            if err < tol * max(1.0, abs(approx)) and (best is None or err < best[0]):
                best = (err, r)
    return None if best is None else best[1]


def is_singular_shift(M, value):
    """Whether ``M - value * I`` is singular, for integer ``M`` and rational ``value``."""
    n = len(M)
    S = sympy.Matrix(n, n, lambda i, j: int(M[i][j])) - sympy.Rational(value) * sympy.eye(n)
    return S.det() == 0


def as_fraction(x):
    return Fraction(x.a, x.c) if isinstance(x, QuadraticNumber) and x.b == 0 else x
