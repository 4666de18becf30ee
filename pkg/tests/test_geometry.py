import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windtree.errors import InvalidParams
from windtree.geometry import (BLOCKS, GENERATORS, SHEETS, HomologyClass, SectionData, WindTreeParams,
                               block_decompose, canonical_class, eigen_slope, gamma_classes, klein_act,
                               phi_of, split_label)
from windtree.iet import evaluate
from windtree.invariant import block_potential
from windtree.linalg import solve
from windtree.numbers import QuadraticNumber

classes = st.lists(st.integers(-5, 5), min_size=12, max_size=12).map(lambda c: HomologyClass(tuple(c)))


def test_relations_vanish():
    r1 = HomologyClass.of(ch0=1, ch1=-1, h00=-1, h10=-1, h01=1, h11=1)
    r2 = HomologyClass.of(cv0=1, cv1=-1, v00=-1, v10=1, v01=-1, v11=1)
    assert not r1 and not r2
    assert canonical_class(HomologyClass.of(h00=1)) == HomologyClass.of(h00=1)


def test_gamma_classes():
    gh, gv = gamma_classes()
    assert [gh.coeffs[GENERATORS.index(g)] for g in ("v00", "v10", "v01", "v11")] == [-1, 1, -1, 1]
    assert gv == HomologyClass.of(h00=1, h10=1, h01=-1, h11=-1)
    assert gh and gv
    assert HomologyClass.of(ch0=1, ch1=-1) == gv


def test_klein_action_table():
    assert klein_act("tau_h", HomologyClass.of(h00=1)) == HomologyClass.of(h10=1)
    assert klein_act("tau_h", HomologyClass.of(ch0=1)) == HomologyClass.of(ch0=1)
    with pytest.raises(ValueError):
        klein_act("tau_x", HomologyClass.zero())


@settings(max_examples=100)
@given(classes)
def test_klein_involution(c):
    for s in ("tau_h", "tau_v"):
        assert klein_act(s, klein_act(s, c)) == c
    assert klein_act("tau_h", klein_act("tau_v", c)) == klein_act("tau_v", klein_act("tau_h", c))


@settings(max_examples=100)
@given(classes)
def test_blocks_resolve_identity(c):
    parts = block_decompose(c)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    assert total == c
    pm = parts[BLOCKS.index("+-")]
    assert klein_act("tau_h", pm) == pm and klein_act("tau_v", pm) == -pm


def test_gamma_h_in_minus_plus_block():
    gh, _ = gamma_classes()
    assert block_decompose(gh) == (HomologyClass.zero(), HomologyClass.zero(), gh, HomologyClass.zero())
    sigma = HomologyClass.of(h00=1, h10=-1, h01=1, h11=-1)
    assert block_decompose(sigma)[2] == sigma


def test_params_validation():
    with pytest.raises(InvalidParams):
        WindTreeParams(Fraction(3, 2), Fraction(1, 2), 1)
    with pytest.raises(InvalidParams):
        WindTreeParams(Fraction(1, 2), Fraction(1, 2), -1)


def test_eigen_slope_golden():
    s = eigen_slope([[1, 1], [1, 2]])
    assert s == (1 + QuadraticNumber.sqrt(5)) / 2


def test_section_shape(wind):
    sd = wind.section
    # 4 sheets of the 4-interval Y-section
    assert sd.n == 16 and sd.y_iet.n == 4
    assert sd.iet.total == 1


def test_phi_gamma_h_frozen(wind):
    sd = wind.section
    gh, _ = gamma_classes()
    phi = phi_of(sd, gh).values
    frozen = {"A": 3, "B": 13, "C": 10, "D": 2}
    for lab, v in phi.items():
        a, g = split_label(lab)
        assert v == (-1) ** g[0] * frozen[a]


def test_phi_is_linear_and_integral(wind):
    sd = wind.section
    rng = random.Random(3)
    zero = phi_of(sd, HomologyClass.zero()).values
    assert set(zero.values()) == {0}
    for _ in range(20):
        c1 = HomologyClass(tuple(rng.randrange(-3, 4) for _ in range(12)))
        c2 = HomologyClass(tuple(rng.randrange(-3, 4) for _ in range(12)))
        p1, p2, p12 = (phi_of(sd, c).values for c in (c1, c2, c1 + c2))
        assert all(p12[l] == p1[l] + p2[l] for l in p1)
        assert all(isinstance(v, int) for v in p12.values())


def test_phi_equivariance(wind):
    # equivariant up to the coboundary of a function of the sheet
    sd = wind.section
    basis = [block_potential(wind.periodic, [int(i == k) for i in range(4)]) for k in range(4)]
    alph = sd.alphabet
    rows = [[w[l] for w in basis] for l in alph]
    rng = random.Random(4)
    for s in ("tau_h", "tau_v"):
        inv = sd.involution(s)
        for _ in range(10):
            c = HomologyClass(tuple(rng.randrange(-3, 4) for _ in range(12)))
            lhs = phi_of(sd, klein_act(s, c)).values
            rhs = phi_of(sd, c).values
            _, _, ok = solve(rows, [lhs[inv[l]] - rhs[l] for l in alph])
            assert ok


def test_deck_maps_commute_with_section(wind):
    sd = wind.section
    T = sd.iet
    rng = random.Random(6)
    for s, flip in (("tau_h", (1, 0)), ("tau_v", (0, 1))):
        def deck(x):
            k = math.floor(x * 4)
            g = SHEETS[k]
            g2 = (g[0] ^ flip[0], g[1] ^ flip[1])
            return x + Fraction(SHEETS.index(g2) - k, 4)
        for _ in range(50):
            x = Fraction(rng.randrange(10 ** 9), 10 ** 9)
            assert evaluate(T, deck(x)) == deck(evaluate(T, x))


def test_section_text_round_trip(wind):
    sd = wind.section
    again = SectionData.from_text(sd.to_text())
    assert again.to_text() == sd.to_text()
    assert again.iet == sd.iet
