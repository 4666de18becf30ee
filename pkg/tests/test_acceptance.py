"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v``; the verdict lines are collected
in the "acceptance verdicts" section of the terminal summary.
"""

import hashlib
import math
import random
import time
from fractions import Fraction

import numpy as np

from conftest import VERDICTS
from windtree.errors import WindTreeError
from windtree.geometry import gamma_classes, phi_of
from windtree.hausdorff import (beta0, box_counts, box_dimension_estimate, cantor_intervals,
                                hausdorff_report)
from windtree.iet import birkhoff_sum, evaluate
from windtree.invariant import (RasterSpec, hat_batch, render_raster, simulate_billiard,
                                skew_apply, torus_close, trace_batch, trace_to_section)
from windtree.rauzy import towers
from windtree.transfer import h_eval, tau_residual


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def _cocycle_mismatches(P, phi, kmax=4):
    bad, checked = 0, 0
    alph = P.alphabet
    vec = np.array([phi[a] for a in alph], dtype=object)
    for k in range(1, kmax + 1):
        tw = towers(P, k)
        Ak = np.linalg.matrix_power(np.asarray(P.A, dtype=object), k)
        want = Ak.T.dot(vec)
        for i, j in enumerate(alph):
            got = birkhoff_sum(P.iet, phi, tw.base_left[j], tw.heights[j])
            checked += 1
            bad += got != want[i]
    return bad, checked


def test_c1_cocycle_oracle(golden, wind):
    t = time.time()
    b1, n1 = _cocycle_mismatches(golden, {"A": 3, "B": -5})
    gh, _ = gamma_classes()
    b2, n2 = _cocycle_mismatches(wind.periodic, phi_of(wind.section, gh).values)
    dt = time.time() - t
    verdict(1, b1 == 0 and b2 == 0 and dt < 10,
            f"{n1 + n2} tower sums, {b1 + b2} mismatches, {dt:.1f}s")


def test_c2_coboundary(wind_td, wind_pair):
    rng = random.Random(20)
    T = wind_td.P.iet
    t = time.time()
    worst, bad = 0.0, 0
    for _ in range(1000):
        x = Fraction(rng.randrange(10 ** 12), 10 ** 12)
        d = h_eval(wind_td, evaluate(T, x), 30) - h_eval(wind_td, x, 30) - wind_pair.psi[T.letter_at(x)]
        worst = max(worst, d.width())
        bad += not (d.contains(0.0) and d.width() < 1e-6)
    dt = time.time() - t
    verdict(2, bad == 0 and dt < 30, f"1000 points, {bad} failures, max width {worst:.2e}, {dt:.1f}s")


def test_c3_tau(golden_td, wind_td):
    res = max(tau_residual(golden_td), tau_residual(wind_td))
    bad = 0
    for td in (golden_td, wind_td):
        for a, v in td.hleft.items():
            enc = h_eval(td, td.P.iet.top_left[a], 40)
            bad += not enc.overlaps(v)
    verdict(3, res < 1e-10 and bad == 0, f"residual {res:.2e}, {bad} discontinuities outside depth-40 enclosures")


def test_c4_invariance(wind_invariant):
    F, skew = wind_invariant
    rng = random.Random(40)
    t = time.time()
    fails, values = 0, []
    for _ in range(1000):
        x = Fraction(rng.randrange(10 ** 12), 10 ** 12)
        a = rng.randrange(-100, 101)
        u = F(x, a)
        x2, a2 = skew_apply(skew, (x, a))
        fails += not torus_close(u, F(x2, a2), F.lattice)
        values.append(((x, a), u))
    base = values[0][1]
    witness = next((s for s, u in values[1:] if not torus_close(base, u, F.lattice)), None)
    dt = time.time() - t
    verdict(4, fails == 0 and witness is not None and dt < 60,
            f"1000 states, {fails} failures, witness {values[0][0]} vs {witness}, {dt:.1f}s")


def test_c5_hausdorff_pipeline(wind, wind_pair):
    t = time.time()
    rep, alt = hausdorff_report(wind.periodic, wind_pair, K=5)
    dt = time.time() - t
    gap = rep.F * rep.lam ** rep.b / (1 - rep.lam)
    checks = {
        "alternate pairs complete": alt.complete,
        "certified b": rep.certified and gap < rep.delta,
        "|C_k| <= (1-mu/m)^k": rep.length_ok(rep.m),
        "N_k <= n m^k": rep.count_ok(rep.m),
        "beta0 <= 1 - 1e-3": rep.beta0 <= 1 - 1e-3,
        "runtime < 300s": dt < 300,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"m={rep.m} mu={rep.mu:.4f} beta0={rep.beta0:.4f} b={rep.b} "
              f"F lam^b/(1-lam)={gap:.4f} < delta={rep.delta:.4f}; failed: {failed or 'none'}; "
              f"with m_row={rep.m_row}: length {rep.length_ok(rep.m_row)}, count {rep.count_ok(rep.m_row)}, "
              f"beta0={rep.beta0_row:.4f}; {dt:.1f}s")
    verdict(5, not failed, detail)


def _beta_root(m, mu):
    # bisection on (1 - mu/m)^beta m^(1 - beta) = 1
    f = lambda b: b * math.log1p(-mu / m) + (1 - b) * math.log(m)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
    return lo


def test_c6_beta0():
    b = beta0(4, 1)
    grid = [beta0(4, mu) for mu in np.linspace(0.1, 1.0, 10)]
    mono = all(x > y for x, y in zip(grid, grid[1:]))
    ok = abs(b - 0.8282) <= 1e-3 and abs(b - _beta_root(4, 1)) < 1e-12 and mono
    verdict(6, ok, f"beta0(4, 1) = {b:.6f}, decreasing in mu on 10 points: {mono}")


def test_c7_box_counting():
    scales = [Fraction(1, 3 ** k) for k in range(1, 11)]
    cantor = box_dimension_estimate(box_counts(cantor_intervals(10), scales), scales)
    full = box_dimension_estimate(box_counts([(Fraction(0), Fraction(1))], scales), scales)
    ok = abs(cantor - math.log(2) / math.log(3)) <= 0.05 and abs(full - 1) <= 0.02
    verdict(7, ok, f"Cantor {cantor:.4f}, interval {full:.4f}")


def test_c8_raster(wind, wind_invariant, tmp_path):
    F, _ = wind_invariant
    sd = wind.section
    spec = RasterSpec((0, 0, 20, 20), (400, 400), 0.0, 0.15, 14)
    t = time.time()
    _, meta = render_raster(sd, F, spec, str(tmp_path / "a.ppm"))
    render_raster(sd, F, spec, str(tmp_path / "b.ppm"))
    dt = time.time() - t
    same = (hashlib.sha256((tmp_path / "a.ppm").read_bytes()).digest()
            == hashlib.sha256((tmp_path / "b.ppm").read_bytes()).digest())
    frac = meta["marked_fraction"]
    rng = random.Random(80)
    c = abs(float(F.lattice[0][0]))
    inconsistent, hits = 0, 0
    for _ in range(10):
        while True:
            start = (Fraction(rng.randrange(2000), 100), Fraction(1, 2) + Fraction(rng.randrange(1, 1000), 1000) / 2)
            try:
                path = simulate_billiard(sd.params, start, (1, sd.params.slope), 4)
                break
            except WindTreeError:
                continue
        ref = None
        for p0, p1, v in zip(path.points, path.points[1:], path.velocities):
            mid = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
            sp = trace_to_section(sd, mid, v)
            val = F(sp.x, sp.a)
            sec, a, flag, inside = trace_batch(sd, np.array([float(mid[0])]), np.array([float(mid[1])]))
            fast = hat_batch(F, sec, a, 14)[0] if v[0] > 0 and v[1] > 0 else val[0].mid
            hits += 1
            ref = ref or val
            d = ((fast - val[0].mid) / c + 0.5) % 1 - 0.5
            inconsistent += not torus_close(ref, val, F.lattice) or abs(d) > 1e-6
    ok = same and frac < 0.5 and inconsistent == 0 and dt < 600
    verdict(8, ok, f"deterministic {same}, marked {frac:.4f}, {hits} section hits, "
                   f"{inconsistent} inconsistent, {dt:.1f}s")


def test_c9_billiard(wind_params):
    v = (1.0, float(wind_params.slope))
    path = simulate_billiard(wind_params, (0.0, 0.5), v, 10 ** 4, eps=1e-12)
    s0 = math.hypot(*v)
    drift = max(abs(math.hypot(*w) - s0) for w in path.velocities)
    ok = path.bounces == 10 ** 4 and drift <= 4 * np.finfo(float).eps * s0 and path.margin >= -1e-12
    verdict(9, ok, f"{path.bounces} bounces, speed drift {drift:.1e}, margin {path.margin:.1e}")
