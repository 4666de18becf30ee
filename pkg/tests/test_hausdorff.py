import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windtree.errors import InsufficientDepths
from windtree.hausdorff import (alternate_pairs, beta0, box_counts, box_dimension_estimate, cantor_cover,
                                cantor_intervals, components, gap_params, hausdorff_report,
                                level_box_counts)
from windtree.numbers import Interval
from windtree.transfer import StablePair, level_cells


@pytest.fixture(scope="module")
def golden_report(golden, golden_td):
    return hausdorff_report(golden, golden_td.pair, K=5)


def test_gap_params():
    assert gap_params(1, 0.5, 0.1) == 5
    assert gap_params(1, 0.5, 5.0) == 1
    b = gap_params(2.2, 0.0917, 0.2389)
    assert 2.2 * 0.0917 ** b / (1 - 0.0917) < 0.2389


@settings(max_examples=100)
@given(F=st.floats(0.1, 10), lam=st.floats(0.01, 0.9), delta=st.floats(0.01, 1))
def test_gap_params_minimal(F, lam, delta):
    b = gap_params(F, lam, delta)
    assert F * lam ** b / (1 - lam) < delta
    assert b == 1 or F * lam ** (b - 1) / (1 - lam) >= delta


def _beta_root(m, mu):
    f = lambda b: b * math.log1p(-mu / m) + (1 - b) * math.log(m)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
    return lo


def test_beta0_closed_form():
    assert abs(beta0(4, 1) - math.log(4) / (math.log(4) + math.log(4 / 3))) < 1e-15
    assert abs(beta0(4, 1) - 0.8282) < 1e-3


@settings(max_examples=100)
@given(m=st.integers(2, 50), mu=st.floats(0.01, 1), nu=st.floats(0.01, 1))
def test_beta0_bounds_and_monotone(m, mu, nu):
    b = beta0(m, mu)
    assert 0 < b < 1
    assert abs(b - _beta_root(m, mu)) < 1e-9
    if mu < nu - 1e-9:
        assert beta0(m, nu) < b


def test_zero_psi_has_no_pairs(golden):
    zero = StablePair(Interval(0.5), {a: Interval(0.0) for a in golden.alphabet}, golden.alphabet)
    alt = alternate_pairs(golden, zero, max_doublings=2)
    assert alt.pairs == {} and not alt.complete


def test_golden_pairs(golden_report):
    rep, alt = golden_report
    assert alt.complete and alt.r <= 16
    for (i, j), (d, e1, e2) in alt.pairs.items():
        assert e1.s == e2.s == i and e1.j == e2.j == j
        assert not e1.f.overlaps(e2.f) and d > 0


def test_golden_report_bounds(golden_report):
    rep, _ = golden_report
    assert rep.certified
    assert rep.stats[0].cells == rep.n and rep.stats[0].components == 1 and rep.stats[0].length == 1
    assert rep.length_ok(rep.m) and rep.count_ok(rep.m)
    assert rep.beta0 < 1 - 1e-3
    assert any("beta0" in line for line in rep.lines())


def test_cover_matches_statistics_and_contains_level(golden_report):
    rep, alt = golden_report
    td = alt.td
    for z in (-0.5, 0.2):
        for k in range(4):
            cells = cantor_cover(td, alt, rep.b, z, k)
            assert float(sum(c.length for c in cells)) == pytest.approx(rep.stats[k].length, rel=1e-12)
            assert len(components(cells)) <= rep.stats[k].components
            spans = [(c.left, c.left + c.length) for c in cells]
            depth = k * rep.b
            for lc in level_cells(td, z, depth):
                assert any(l <= lc.left and lc.left + lc.length <= r for l, r in spans)


def test_wind_report_flags_max_entry_bound(wind, wind_pair):
    rep, alt = hausdorff_report(wind.periodic, wind_pair, K=3)
    assert alt.complete and rep.certified
    # the counting bound needs the row sum of A^b, not its largest entry
    assert not rep.length_ok(rep.m)
    assert rep.length_ok(rep.m_row) and rep.count_ok(rep.m_row)
    assert rep.beta0_row < 1


def test_box_dimension_fixtures():
    scales = [Fraction(1, 3 ** k) for k in range(1, 9)]
    est = box_dimension_estimate(box_counts(cantor_intervals(8), scales), scales)
    assert abs(est - math.log(2) / math.log(3)) < 0.05
    full = box_dimension_estimate(box_counts([(Fraction(0), Fraction(1))], scales), scales)
    assert abs(full - 1) < 0.02
    with pytest.raises(InsufficientDepths):
        box_dimension_estimate([1, 2, 4], [1, 0.5, 0.25])


def test_wind_level_box_count_below_bound(wind, wind_pair, wind_td):
    rep, _ = hausdorff_report(wind.periodic, wind_pair, K=1)
    counts, scales = level_box_counts(wind_td, 0.0, [1, 2, 3, 4])
    assert box_dimension_estimate(counts, scales) <= rep.beta0_row + 0.05
