"""Command-line entry point: ``windtree {search,analyze,plot,hdim,simulate}``."""

from __future__ import annotations

import argparse
import configparser
import io
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import EXIT_CODES, ConfigError, WindTreeError
from .numbers import QuadraticNumber

log = logging.getLogger("windtree")

DEFAULTS = {
    "params": {"a": "1/2", "b": "1/2", "matrix": "1 1 1 2"},
    "search": {"family": "windtree", "top": "A B", "bot": "B A", "max_len": "6",
               "max_entry": "3", "max_steps": "10000"},
    "analyze": {"samples": "1000", "depth": "30"},
    "plot": {"window": "0 0 20 20", "size": "400 400", "z": "0", "tol": "0.15",
             "depth": "14", "mode": "level", "output": "levelset.ppm"},
    "hdim": {"levels": "5", "z": "0", "box_depths": "1 2 3 4", "cover_depth": "2",
             "fixture": "none"},
    "simulate": {"start": "0 0.5", "direction": "matrix", "bounces": "10000",
                 "output": "billiard.csv"},
    "run": {"seed": "12345", "workers": "1", "budget": "1000000"},
}


@dataclass
class RunConfig:
    """Flat ``key = value`` configuration grouped into sections."""

    sections: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text):
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        merged = {s: dict(v) for s, v in DEFAULTS.items()}
        for s in cp.sections():
            if s not in merged:
                raise ConfigError(f"unknown section [{s}]")
            for k, v in cp.items(s):
                if k not in merged[s]:
                    raise ConfigError(f"unknown key {k!r} in [{s}]")
                merged[s][k] = v
        cfg = cls(merged)
        cfg.validate()
        return cfg

    @classmethod
    def default(cls):
        return cls({s: dict(v) for s, v in DEFAULTS.items()})

    def to_text(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp.read_dict(self.sections)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def get(self, section, key):
        return self.sections[section][key]

    def set(self, section, key, value):
        self.sections[section][key] = str(value)

    def integer(self, section, key):
        try:
            return int(self.get(section, key))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be an integer") from exc

    def number(self, section, key):
        return parse_number(self.get(section, key))

    def numbers(self, section, key):
        return [parse_number(t) for t in self.get(section, key).split()]

    def validate(self):
        for s, k in (("run", "budget"), ("run", "workers"), ("analyze", "samples"),
                     ("simulate", "bounces"), ("search", "max_steps")):
            if self.integer(s, k) <= 0:
                raise ConfigError(f"[{s}] {k} must be positive")
        if self.integer("search", "max_len") < 0:
            raise ConfigError("[search] max_len must be non-negative")
        if self.get("plot", "mode") not in ("level", "gray"):
            raise ConfigError("[plot] mode must be 'level' or 'gray'")


def parse_number(text):
    """``p/q``, a decimal, or ``a,b,c,d`` for ``(a + b sqrt d) / c``."""
    text = text.strip()
    try:
        if "," in text:
            return QuadraticNumber.from_text(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def parse_matrix(text):
    vals = [int(t) for t in text.replace(",", " ").split()]
    if len(vals) != 4:
        raise ConfigError("matrix needs four integers")
    return [[vals[0], vals[1]], [vals[2], vals[3]]]


# ------------------------------------------------------------------ shared steps

def _params(cfg):
    from .geometry import WindTreeParams, eigen_slope
    a, b = cfg.number("params", "a"), cfg.number("params", "b")
    return WindTreeParams(a, b, eigen_slope(parse_matrix(cfg.get("params", "matrix")), a, b))


def _section(cfg):
    from .geometry import find_periodic_section
    return find_periodic_section(_params(cfg), cfg.integer("search", "max_steps"),
                                 budget=cfg.integer("run", "budget"))


def growth_rate(A, vec, k=16):
    """``(|(A^T)^(2k) v| / |(A^T)^k v|)^(1/k)``: above 1 iff ``v`` has an expanding component."""
    At = np.asarray(A, dtype=object).T
    v = np.asarray(vec, dtype=object)
    for _ in range(k):
        v = At.dot(v)
    n1 = max(abs(int(x)) for x in v)
    for _ in range(k):
        v = At.dot(v)
    n2 = max(abs(int(x)) for x in v)
    if n1 == 0:
        return 0.0
    return (n2 / n1) ** (1.0 / k)


# ------------------------------------------------------------------ commands

def cmd_search(cfg, out):
    """Write a catalog of periodic loops (2-IET family) or wind-tree records."""
    from .iet import PermutationPair
    from .rauzy import PeriodicIET, RauzyLoop, rauzy_loop_search
    family = cfg.get("search", "family")
    max_len = cfg.integer("search", "max_len")
    path = out / "catalog.txt"
    blocks = []
    if family == "iet":
        perm = PermutationPair(tuple(cfg.get("search", "top").split()), tuple(cfg.get("search", "bot").split()))
        for loop in rauzy_loop_search(perm, max_len, cfg.integer("run", "workers")):
            PeriodicIET.from_loop(RauzyLoop.from_text(loop.to_text()))
            blocks.append(loop.to_text())
    elif family == "windtree":
        from .geometry import WindTreeParams, eigen_slope, find_periodic_section
        a, b = cfg.number("params", "a"), cfg.number("params", "b")
        top = cfg.integer("search", "max_entry")
        seen = set()
        for p in range(0, top + 1):
            for q in range(1, top + 1):
                for r in range(0, top + 1):
                    for t in range(0, top + 1):
                        if p * t - q * r != 1 or p + t <= 2 or max_len == 0:
                            continue
                        try:
                            slope = eigen_slope([[p, q], [r, t]], a, b)
                        except WindTreeError:
                            continue
                        if slope in seen:
                            continue
                        seen.add(slope)
                        try:
                            ps = find_periodic_section(WindTreeParams(a, b, slope),
                                                       cfg.integer("search", "max_steps"))
                        except WindTreeError as exc:
                            log.info("matrix %s: %s", (p, q, r, t), exc)
                            continue
                        if ps.loop.N > max_len * 100:
                            continue
                        blocks.append(f"matrix {p} {q} {r} {t}\nslope {slope.to_text()}\n"
                                      f"repeats {ps.repeats}\n" + ps.loop.to_text())
    else:
        raise ConfigError(f"unknown search family {family!r}")
    path.write_text("\n".join(blocks))
    return f"{len(blocks)} records written to {path}"


def _invariance_certificate(F, skew, n, rng):
    from .invariant import skew_apply, torus_close
    fails, witness = 0, None
    first = None
    for _ in range(n):
        x = Fraction(rng.randrange(10 ** 12), 10 ** 12)
        a = rng.randrange(-100, 101)
        u = F(x, a)
        x2, a2 = skew_apply(skew, (x, a))
        if not torus_close(u, F(x2, a2), F.lattice):
            fails += 1
        if first is None:
            first = (x, a, u)
        elif witness is None and not torus_close(first[2], u, F.lattice):
            witness = (first[:2], (x, a))
    return fails, witness


def cmd_analyze(cfg, out):
    """Spectral data, transfer function, decomposition and an invariance certificate."""
    from .geometry import BLOCKS, gamma_classes, phi_of
    from .invariant import windtree_invariant
    from .transfer import stable_spectrum, tau_residual
    ps = _section(cfg)
    sd, X = ps.section, ps.periodic
    (out / "section.txt").write_text(sd.to_text())
    (out / "loop.txt").write_text(ps.loop.to_text())
    lines = [f"a = {sd.params.a}  b = {sd.params.b}  slope = {sd.params.slope!r} ~ {float(sd.params.slope):.12g}",
             f"section letters n = {sd.n}  loop length N = {X.N}  rho = {X.rho!r} ~ {float(X.rho):.10g}"]
    gh, gv = gamma_classes()
    for name, c in (("gamma_h", gh), ("gamma_v", gv)):
        vec = [phi_of(sd, c)(l) for l in X.alphabet]
        g = growth_rate(X.A, vec)
        lines.append(f"{name}: growth {g:.6g} -> {'unstable' if g > 1 + 1e-6 else 'not unstable'}")
    for blk in BLOCKS:
        try:
            sp = stable_spectrum(X.A, X.alphabet, sd.involutions, blk)
        except WindTreeError as exc:
            lines.append(f"block {blk}: {type(exc).__name__}: {exc}")
            continue
        lines.append(f"block {blk}: stable eigenvalues {[round(p.lam.mid, 12) for p in sp]}")
    depth = cfg.integer("analyze", "depth")
    F, skew = windtree_invariant(ps, depth)
    td = F.transfers[0]
    pair = td.pair
    lines.append(f"lambda = {pair.exact_lam!r} ~ {pair.lam.mid:.12g}")
    lines.append("psi: " + " ".join(f"{l}={pair.psi[l].mid:.10g}" for l in X.alphabet))
    lines.append("tau: " + " ".join(f"{l}={td.tau[l].mid:.10g}" for l in X.alphabet))
    lines.append(f"tau residual = {tau_residual(td):.3e}")
    dec = F.decomposition
    lines.append(f"b = {dec.b[0][0]!r}  C = {dec.C[0][0]!r}  e = {dec.e[0][0]!r}")
    lines.append(f"lattice Lambda = {float(F.lattice[0][0]):.12g} Z")
    rng = random.Random(cfg.integer("run", "seed"))
    fails, witness = _invariance_certificate(F, skew, cfg.integer("analyze", "samples"), rng)
    lines.append(f"invariance certificate: {cfg.integer('analyze', 'samples')} states, {fails} failures")
    lines.append(f"non-constancy witness: {witness}")
    text = "\n".join(lines) + "\n"
    (out / "analysis.txt").write_text(text)
    return text


def cmd_plot(cfg, out):
    from .invariant import RasterSpec, render_raster, windtree_invariant
    ps = _section(cfg)
    F, _ = windtree_invariant(ps)
    w = cfg.numbers("plot", "window")
    size = tuple(int(v) for v in cfg.get("plot", "size").split())
    spec = RasterSpec(tuple(w), size, float(cfg.number("plot", "z")), float(cfg.number("plot", "tol")),
                      cfg.integer("plot", "depth"), cfg.get("plot", "mode"))
    path = out / cfg.get("plot", "output")
    t = time.time()
    _, meta = render_raster(ps.section, F, spec, str(path))
    return f"wrote {path} in {time.time() - t:.1f}s\n" + json.dumps(meta, indent=2)


def cmd_hdim(cfg, out):
    from .hausdorff import (box_counts, box_dimension_estimate, cantor_cover, cantor_intervals,
                            components, hausdorff_report, level_box_counts)
    from .invariant import windtree_invariant
    if cfg.get("hdim", "fixture") != "none":
        kind = cfg.get("hdim", "fixture")
        depth = 10
        intervals = cantor_intervals(depth) if kind == "cantor" else [(Fraction(0), Fraction(1))]
        scales = [Fraction(1, 3 ** k) for k in range(1, depth + 1)]
        est = box_dimension_estimate(box_counts(intervals, scales), scales)
        text = f"fixture {kind}: box-count dimension {est:.6f}\n"
        (out / "hdim.txt").write_text(text)
        return text
    ps = _section(cfg)
    F, _ = windtree_invariant(ps)
    td = F.transfers[0]
    rep, alt = hausdorff_report(td.P, td.pair, cfg.integer("hdim", "levels"))
    lines = rep.lines()
    lines.append(f"certified: F |lam|^b / (1 - |lam|) = {rep.F * rep.lam ** rep.b / (1 - rep.lam):.6g} "
                 f"< delta = {rep.delta:.6g}")
    z = float(cfg.number("hdim", "z"))
    depths = [int(v) for v in cfg.get("hdim", "box_depths").split()]
    try:
        counts, scales = level_box_counts(alt.td, z, depths)
        lines.append(f"box counts {counts} -> estimate {box_dimension_estimate(counts, scales):.4f}")
    except WindTreeError as exc:
        lines.append(f"box count skipped: {exc}")
    k = cfg.integer("hdim", "cover_depth")
    cells = cantor_cover(alt.td, alt, rep.b, z, k)
    comps = components(cells)
    with open(out / "cover.csv", "w") as fh:
        fh.write("left,right\n")
        for l, r in comps:
            fh.write(f"{float(l)!r},{float(r)!r}\n")
    lines.append(f"explicit cover at k = {k}: {len(cells)} cylinders, {len(comps)} components")
    text = "\n".join(lines) + "\n"
    (out / "hdim.txt").write_text(text)
    return text


def cmd_simulate(cfg, out):
    from .invariant import simulate_billiard
    p = _params(cfg)
    x, y = (float(v) for v in cfg.numbers("simulate", "start"))
    d = cfg.get("simulate", "direction")
    v = (1.0, float(p.slope)) if d == "matrix" else tuple(float(parse_number(t)) for t in d.split())
    n = cfg.integer("simulate", "bounces")
    path = simulate_billiard(p, (x, y), v, n, eps=1e-12, budget=cfg.integer("run", "budget"))
    speed0 = np.hypot(*v)
    drift = max(abs(np.hypot(*w) - speed0) for w in path.velocities)
    fname = out / cfg.get("simulate", "output")
    with open(fname, "w") as fh:
        fh.write("x,y,vx,vy\n")
        for (px, py), (vx, vy) in zip(path.points, path.velocities):
            fh.write(f"{px!r},{py!r},{vx!r},{vy!r}\n")
    return (f"{path.bounces} bounces, {len(path.points)} events, speed drift {drift:.3e}, "
            f"margin {path.margin:.3e}; wrote {fname}")


COMMANDS = {"search": cmd_search, "analyze": cmd_analyze, "plot": cmd_plot,
            "hdim": cmd_hdim, "simulate": cmd_simulate}


def build_parser():
    ap = argparse.ArgumentParser(prog="windtree", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--depth", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_text(args.config.read_text()) if args.config else RunConfig.default()
        if args.depth is not None:
            for s in ("analyze", "plot"):
                cfg.set(s, "depth", args.depth)
        if args.workers is not None:
            cfg.set("run", "workers", args.workers)
        if args.seed is not None:
            cfg.set("run", "seed", args.seed)
        cfg.validate()
        args.out.mkdir(parents=True, exist_ok=True)
        print(COMMANDS[args.command](cfg, args.out))
    except WindTreeError as exc:
        print(f"error family={exc.family} type={type(exc).__name__} message={exc}", file=sys.stderr)
        return EXIT_CODES[exc.family]
    except OSError as exc:
        print(f"error family=input type={type(exc).__name__} message={exc}", file=sys.stderr)
        return EXIT_CODES["input"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
