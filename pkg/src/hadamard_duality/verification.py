"""Randomized verification suites for the duality inequalities and identities.

Each suite draws its cases from labelled random streams of a
:class:`SolverConfig`, so a report is a pure function of (inputs, seed).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import geometry as geo
from .conjugation import biconjugate, equivalent, fenchel_young_gap
from .config import DEFAULT_SOLVER
from .extreal import INF, to_json
from .functions import (Distance, EpigraphPoint, IndicatorBall, IndicatorPoint,
                        SquaredDistance)
from .manifolds import SPD, BundleElement, CotangentVector, Euclidean, Point

__all__ = ["SuiteReport", "SUITES", "run_suite", "random_atom"]


@dataclass
class SuiteReport:
    suite: str
    trials: int
    max_violation: float
    threshold: float
    results: list = field(default_factory=list)

    @property
    def failures(self):
        return sum(1 for r in self.results if not r["passed"])

    @property
    def passed(self):
        return self.failures == 0

    def to_dict(self):
        return {"suite": self.suite, "trials": self.trials, "passed": self.passed,
                "failures": self.failures, "threshold": self.threshold,
                "max_violation": to_json(self.max_violation),
                "results": [{k: to_json(v) if isinstance(v, float) else v
                             for k, v in r.items()} for r in self.results]}


ATOM_KINDS = ("squared_distance", "distance", "indicator_ball", "indicator_point")


def random_atom(m, rng, center=None, kinds=ATOM_KINDS):
    """One convex atom with a random center near ``center``."""
    c = Point(m, m.random_point(rng, center, 1.0), check=False)
    kind = kinds[rng.integers(len(kinds))]
    if kind == "squared_distance":
        return SquaredDistance(c)
    if kind == "distance":
        return Distance(c)
    if kind == "indicator_point":
        return IndicatorPoint(c)
    return IndicatorBall(c, float(rng.uniform(0.3, 1.5)))


def _record(report, passed, violation, **extra):
    report.results.append({"trial": len(report.results), "passed": bool(passed),
                           "violation": float(violation), **extra})
    if violation > report.max_violation:
        report.max_violation = float(violation)


def _point_in_dom(F, rng, radius=1.5):
    m = F.manifold
    dom = F.domain()
    if dom is not None:
        return dom.sample(rng, 1)[0]
    return m.random_point(rng, F.witness(), radius)


def suite_fenchel_young(m, F, trials, cfg, threshold=1e-8):
    rng = cfg.rng("suite-fenchel-young")
    rep = SuiteReport("fenchel-young", trials, -INF, threshold)
    for _ in range(trials):
        G = F if F is not None else random_atom(m, rng)
        p = Point(m, m.random_point(rng, None, 1.5), check=False)
        xi = CotangentVector(p, m.flat(p.coords, m.random_tangent(rng, p.coords, 2.0)), check=False)
        q = Point(m, _point_in_dom(G, rng), check=False)
        gap = fenchel_young_gap(G, BundleElement(p, xi), q, cfg)
        _record(rep, gap >= -threshold, -gap if math.isfinite(gap) else -INF, atom=repr(G))
    return rep


def suite_moreau(m, F, trials, cfg, threshold=1e-3, radius=3.0):
    rng = cfg.rng("suite-moreau")
    rep = SuiteReport("moreau", trials, -INF, threshold)
    for _ in range(trials):
        G = F if F is not None else random_atom(m, rng, kinds=ATOM_KINDS[:3])
        p = Point(m, m.random_point(rng, G.witness(), radius), check=False)
        fp = G.value(p.coords)
        est = biconjugate(G, p, cfg)
        fb = est.value
        if fp == INF or fb == INF:
            err = 0.0 if fp == fb else INF
        else:
            err = abs(fb - fp)
        # F** <= F must hold everywhere, equality for convex lsc proper F
        bound_ok = fb <= fp + 1e-6 * (1 + abs(fp)) if math.isfinite(fp) else True
        _record(rep, err <= threshold and bound_ok, err, atom=repr(G), value=fp, biconjugate=fb)
    return rep


def suite_cosine_law(m, F, trials, cfg, threshold=1e-8):
    rng = cfg.rng("suite-cosine-law")
    rep = SuiteReport("cosine-law", trials, -INF, threshold)
    flat = isinstance(m, Euclidean)
    for _ in range(trials):
        pts = [Point(m, m.random_point(rng, None, 2.0), check=False) for _ in range(3)]
        try:
            T = geo.GeodesicTriangle(*pts)
        except Exception:
            continue
        r1, r2 = geo.cosine_law_residuals(T)
        worst = -min(r1.min(), r2.min())
        ok = worst <= threshold
        if flat:
            ok = ok and np.abs(r1).max() <= 1e-10 * (1 + max(np.abs(r1).max(), 1.0))
        _record(rep, ok, worst)
    return rep


def _random_set(m, rng):
    c1 = Point(m, m.random_point(rng, None, 1.0), check=False)
    r1 = float(rng.uniform(0.5, 1.5))
    if rng.uniform() < 0.5:
        return geo.Ball(c1, r1)
    c2 = Point(m, m.random_point(rng, c1.coords, 0.8 * r1), check=False)
    return geo.Intersection([geo.Ball(c1, r1), geo.Ball(c2, float(rng.uniform(0.5, 1.5)))])


def suite_projection(m, F, trials, cfg, threshold=1e-7, samples=100):
    rng = cfg.rng("suite-projection")
    rep = SuiteReport("projection", trials, -INF, threshold)
    for k in range(trials):
        if k % 2 == 0:
            C = _random_set(m, rng)
            p = m.random_point(rng, None, 3.0)
            v = geo.projection_violation(C, p, samples, rng)
            _record(rep, v <= threshold, v, kind="set")
        else:
            G = F if F is not None else random_atom(m, rng)
            p = Point(m, m.random_point(rng, G.witness(), 2.0), check=False)
            fp = G.value(p.coords)
            s = fp - float(rng.uniform(0.1, 2.0)) if math.isfinite(fp) else float(rng.uniform(-1, 1))
            v = geo.epigraph_violation(G, EpigraphPoint(p, s), samples, rng)
            _record(rep, v <= threshold, v, kind="epigraph")
    return rep


def suite_separation(m, F, trials, cfg, threshold=1e-9, samples=500, sets=None):
    rng = cfg.rng("suite-separation")
    rep = SuiteReport("separation", trials, -INF, threshold)
    for _ in range(trials):
        if sets is not None:
            A, B = sets
        else:
            c1 = Point(m, m.random_point(rng, None, 0.5), check=False)
            c2 = Point(m, m.exp(c1.coords, float(rng.uniform(2.0, 4.0)) * m.random_unit(rng, c1.coords)),
                       check=False)
            A, B = geo.Ball(c1, float(rng.uniform(0.2, 0.8))), geo.Ball(c2, float(rng.uniform(0.2, 0.8)))
        res = geo.separating_hypersurface(A, B, cfg, samples=samples, rng=rng)
        p = res.hypersurface.base.coords
        qa, qb = (q.coords for q in res.pair)
        da, db = m.dist(qa, p), m.dist(qb, p)
        sym = max(abs(da - db), abs(da - 0.5 * res.gap))
        _record(rep, res.strict and sym <= threshold, sym, inf_a=res.inf_a, sup_b=res.sup_b)
    return rep


def suite_equivalence(m, F, trials, cfg, threshold=1e-8):
    rng = cfg.rng("suite-equivalence")
    rep = SuiteReport("equivalence", trials, -INF, threshold)
    for _ in range(trials):
        p = Point(m, m.random_point(rng, None, 1.0), check=False)
        xi = CotangentVector(p, m.flat(p.coords, m.random_tangent(rng, p.coords, 1.0)), check=False)
        e = BundleElement(p, xi)
        ok = equivalent(e, e, samples=50, rng=rng, tol=threshold)
        if isinstance(m, SPD):
            # (A, A^flat) ~ (V A V^T, (V A V^T)^flat) for orthogonal V
            V, _ = np.linalg.qr(rng.standard_normal((m.n, m.n)))
            A2 = V @ p.coords @ V.T
            P2 = Point(m, 0.5 * (A2 + A2.T), check=False)
            e1 = BundleElement(p, CotangentVector(p, m.flat(p.coords, p.coords), check=False))
            e2 = BundleElement(P2, CotangentVector(P2, m.flat(P2.coords, P2.coords), check=False))
            ok = ok and equivalent(e1, e2, samples=50, rng=rng, tol=threshold)
        # a perturbed covector must be told apart
        bump = m.flat(p.coords, m.random_tangent(rng, p.coords, 1.0) + 1e-3 * m.random_unit(rng, p.coords))
        e3 = BundleElement(p, CotangentVector(p, xi.coords + bump, check=False))
        ok = ok and not equivalent(e, e3, samples=50, rng=rng, tol=threshold)
        _record(rep, ok, 0.0 if ok else 1.0)
    return rep


SUITES = {
    "fenchel-young": suite_fenchel_young,
    "moreau": suite_moreau,
    "cosine-law": suite_cosine_law,
    "projection": suite_projection,
    "separation": suite_separation,
    "equivalence": suite_equivalence,
}


def run_suite(name, manifold, trials, F=None, cfg=None, **kwargs):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    cfg = cfg or DEFAULT_SOLVER
    rep = SUITES[name](manifold, F, int(trials), cfg, **kwargs)
    if not rep.results:
        rep.max_violation = 0.0 if rep.max_violation == -INF else rep.max_violation
    return rep
