import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from windtree.errors import ComplexStableSpace
from windtree.iet import birkhoff_sum, evaluate
from windtree.numbers import Interval, QuadraticNumber
from windtree.rauzy import towers
from windtree.transfer import (StablePair, bratteli_edges, cell_bounds, export_cells, h_eval, h_series,
                               level_cells, stable_spectrum, tau_residual, tau_vector, transfer_data)

SQ13 = QuadraticNumber.sqrt(13)


def test_golden_stable_pair(golden):
    (pair,) = stable_spectrum(golden.A, golden.alphabet)
    assert abs(pair.lam.mid - 0.3819660) < 1e-7
    assert pair.exact_lam == (3 - QuadraticNumber.sqrt(5)) / 2


def test_permutation_matrix_has_no_stable_pair():
    assert stable_spectrum([[0, 1], [1, 0]]) == []


def test_complex_stable_space_rejected():
    # companion matrix of x^3 - 3x^2 + x - 1: one expanding root, a complex stable pair
    with pytest.raises(ComplexStableSpace):
        stable_spectrum([[0, 0, 1], [1, 0, -1], [0, 1, 3]])


def test_wind_spectrum_frozen(wind):
    X, sd = wind.periodic, wind.section
    got = {}
    for blk in ("++", "+-", "-+", "--"):
        got[blk] = [round(p.lam.mid, 4) for p in stable_spectrum(X.A, X.alphabet, sd.involutions, blk)]
    assert got == {"++": [0.382, 0.0557], "+-": [0.0917], "-+": [0.0917], "--": [0.382]}


def test_reciprocal_pairs(wind):
    X = wind.periodic
    w = np.linalg.eigvals(X.A.astype(float).T)
    for p in stable_spectrum(X.A, X.alphabet):
        assert np.min(np.abs(w - 1 / p.lam.mid)) < 1e-6 * (1 / p.lam.mid)


def test_wind_psi_exact(wind_pair):
    assert wind_pair.exact_lam == (11 - 3 * SQ13) / 2
    psi = wind_pair.exact_psi
    assert psi["A00"] == 1 and psi["B00"] == (5 - SQ13) / 2
    assert psi["A10"] == -1


def test_edges_count_and_weights(golden, golden_td):
    edges = bratteli_edges(golden, golden_td.pair.psi)
    assert len(edges) == 5 == int(golden.A.sum())
    counts = Counter((e.s, e.j) for e in edges)
    alph = golden.alphabet
    for i, a in enumerate(alph):
        for j, b in enumerate(alph):
            assert counts[(a, b)] == golden.A[i, j]
    assert all(e.f.contains(0.0) for e in edges if e.l == 0)


def test_edge_weights_telescope(wind, wind_td):
    tw = towers(wind.periodic, 1)
    psi = wind_td.pair.exact_psi
    T = wind.periodic.iet
    for e in wind_td.edges:
        want = birkhoff_sum(T, psi, tw.base_left[e.j], e.l)
        assert e.f_exact == want


def test_tau_zero_for_zero_psi(golden):
    zero = StablePair(Interval(0.5), {a: Interval(0.0) for a in golden.alphabet}, golden.alphabet)
    tau, _ = tau_vector(golden, zero)
    assert all(t.contains(0.0) and t.width() < 1e-8 for t in tau.values())


def test_tau_residual_and_total(golden_td, wind_td):
    for td in (golden_td, wind_td):
        assert tau_residual(td) < 1e-10
    # sum of jumps within a block is the limit of h at the block's right end
    td = golden_td
    total = sum((t.mid for t in td.tau.values()), 0.0)
    near_one = Fraction(10 ** 12 - 1, 10 ** 12)
    assert abs(h_series(td, near_one, 40) - total) < 1e-6


def test_h_at_origin_and_nesting(golden_td, wind_td):
    rng = random.Random(7)
    for td in (golden_td, wind_td):
        assert h_eval(td, 0, 30).contains(0.0)
        for _ in range(100):
            x = Fraction(rng.randrange(10 ** 9), 10 ** 9)
            k = rng.randrange(0, 20)
            shallow, deep = h_eval(td, x, k), h_eval(td, x, k + 5)
            assert shallow.lo <= deep.lo and deep.hi <= shallow.hi


def test_induced_map_contraction(golden, golden_td):
    td = golden_td
    T = golden.iet
    rng = random.Random(8)
    tw = towers(golden, 1)
    for j in golden.alphabet:
        for _ in range(20):
            x = tw.base_left[j] + Fraction(rng.randrange(10 ** 6), 10 ** 6) * T.lengths[j] / golden.rho
            y = x
            for _ in range(tw.heights[j]):
                y = evaluate(T, y)
            d = h_eval(td, y, 30) - h_eval(td, x, 30)
            assert d.overlaps(td.lam * td.pair.psi[j])


def test_cells_tile_and_contract(golden_td, wind_td):
    for td in (golden_td, wind_td):
        T = td.P.iet
        widths = []
        for k in range(5 if td.P.blocks == 1 else 3):
            cells = cell_bounds(td, k)
            assert sum((c.length for c in cells), Fraction(0)) == T.total
            assert cells[0].bound.contains(0.0)
            widths.append(max(c.bound.width() for c in cells))
        lam = abs(td.lam.mid)
        assert all(w <= widths[0] * lam ** k * 1.001 for k, w in enumerate(widths))


def test_cell_bounds_are_not_constant(wind_td):
    cells = cell_bounds(wind_td, 2)
    lo = min(cells, key=lambda c: c.bound.hi)
    hi = max(cells, key=lambda c: c.bound.lo)
    assert lo.bound.hi < hi.bound.lo


def test_level_cells(golden_td, tmp_path):
    td = golden_td
    assert level_cells(td, td.fmin - 100, 6) == []
    cells = level_cells(td, 0.0, 6)
    assert cells[0].left == 0
    A = td.P.A
    col = int(A.sum(axis=0).max())
    counts = [len(level_cells(td, 0.3, k)) for k in range(8)]
    assert all(b <= a * col for a, b in zip(counts, counts[1:]))
    export_cells(cells, tmp_path / "cells.csv")
    assert (tmp_path / "cells.csv").read_text().count("\n") == len(cells) + 1
