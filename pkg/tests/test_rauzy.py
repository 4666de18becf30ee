from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windtree.errors import NotPrimitive, TieAmbiguous
from windtree.iet import PermutationPair, first_return, make_iet
from windtree.numbers import QuadraticNumber
from windtree.rauzy import (PeriodicIET, RauzyLoop, fixed_point_lengths, loop_matrix, perron_exact,
                            rauzy_loop_search, replay, rv_step, towers)

SWAP = PermutationPair(("A", "B"), ("B", "A"))
ROT3 = PermutationPair(tuple("ABC"), tuple("CBA"))


def test_rv_step_cuts_longer_letter():
    T1, move, _ = rv_step(make_iet(SWAP, [0.7, 0.3]))
    assert move.value == "b"  # the bottom row ends with the longer A
    assert T1.lengths == {"A": Fraction(2, 5), "B": Fraction(3, 10)}
    S, _ = first_return(make_iet(SWAP, [0.7, 0.3]), T1.total)
    assert S.same_exchange(T1)


def test_rv_step_tie():
    with pytest.raises(TieAmbiguous):
        rv_step(make_iet(SWAP, [0.5, 0.5]))


def test_matrix_product_over_steps():
    T = make_iet(ROT3, [0.5, 0.3, 0.21])
    T1, _, E1 = rv_step(T)
    T2, m2, E2 = rv_step(T1)
    _, A2 = replay(T, [rv_step(T)[1], m2])
    assert np.array_equal(A2, E1.dot(E2))
    # lengths transform by lambda = A lambda'
    lam = np.array([T.lengths[a] for a in "ABC"], dtype=object)
    lam2 = np.array([T2.lengths[a] for a in "ABC"], dtype=object)
    assert list(A2.dot(lam2)) == list(lam)


def test_golden_loop_search():
    loops = rauzy_loop_search(SWAP, 2)
    assert loops[0].moves in ("bt", "tb")
    assert np.array_equal(loops[0].matrix, [[2, 1], [1, 1]])
    assert rauzy_loop_search(SWAP, 0) == []


def test_loop_search_ignores_worker_count():
    a = [l.moves for l in rauzy_loop_search(ROT3, 5, workers=1)]
    b = [l.moves for l in rauzy_loop_search(ROT3, 5, workers=4)]
    assert a == b and a


def test_loops_are_unimodular():
    for loop in rauzy_loop_search(ROT3, 5):
        assert abs(round(np.linalg.det(loop.matrix.astype(float)))) == 1
        assert RauzyLoop.from_text(loop.to_text()).moves == loop.moves


def test_fixed_point_golden():
    rho, vec = fixed_point_lengths([[2, 1], [1, 1]])
    assert rho.contains((3 + 5 ** 0.5) / 2)
    assert abs(vec[0].mid - 0.6180340) < 1e-7 and abs(vec[1].mid - 0.3819660) < 1e-7
    r, v = perron_exact([[2, 1], [1, 1]])
    assert r == (3 + QuadraticNumber.sqrt(5)) / 2
    assert v[0] == (QuadraticNumber.sqrt(5) - 1) / 2


def test_fixed_point_identity_not_primitive():
    with pytest.raises(NotPrimitive):
        fixed_point_lengths([[1, 0], [0, 1]])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=16, max_size=16))
def test_fixed_point_residual(entries):
    A = np.array(entries).reshape(4, 4)
    rho, vec = fixed_point_lengths(A)
    v = np.array([x.mid for x in vec])
    assert np.max(np.abs(A.dot(v) - rho.mid * v)) < 1e-12 * rho.mid


@pytest.fixture(scope="module")
def golden():
    return PeriodicIET.from_loop(rauzy_loop_search(SWAP, 2)[0])


def test_golden_towers(golden):
    tw = towers(golden, 1)
    assert (tw.heights["A"], tw.heights["B"]) == (3, 2)
    assert sum(tw.heights[j] * golden.iet.lengths[j] / golden.rho for j in "AB") == 1
    assert np.array_equal(towers(golden, 2).matrix, golden.A.dot(golden.A))


def test_replay_is_self_similar(golden):
    T = golden.iet
    end, A = replay(T, golden.loop.moves)
    assert end.perm == T.perm
    assert all(end.lengths[a] * golden.rho == T.lengths[a] for a in T.alphabet)
    perm, A3 = loop_matrix(T.perm, golden.loop.moves * 3)
    assert np.array_equal(A3, np.linalg.matrix_power(A.astype(object), 3))


def test_power_words(golden):
    P2 = golden.power(2)
    assert np.array_equal(P2.A, golden.A.dot(golden.A))
    assert P2.rho == golden.rho ** 2


def test_floor_positions_follow_orbit(golden):
    tw = towers(golden, 2)
    for j, l, s, x in tw.floors():
        assert golden.iet.letter_at(x) == s
