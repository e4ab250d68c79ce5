"""Fenchel conjugates and biconjugates on Hadamard manifolds.

``F*(p, xi) = sup_q <xi, log_p q> - F(q)`` is computed by multistart local
ascent in normal coordinates at p (where the pairing term is exactly linear),
with an explicit divergence certificate for unbounded suprema.  Every
reported finite value is the objective at an evaluated point, so estimates
are lower bounds of the true supremum.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._optim import NormalChart, slsqp
from .config import DEFAULT_SOLVER, SolverConfig
from .errors import (DomainError, HadamardError, HypothesisError,
                     ManifoldMismatchError, PreconditionError)
from .extreal import INF, to_json
from .geometry import _epigraph_project_raw
from .manifolds import BundleElement, CotangentVector, Point

__all__ = [
    "SolverConfig", "ConjugateEstimate", "MinorantCertificate",
    "CONVERGED", "DIVERGED", "EXHAUSTED", "conjugate", "biconjugate",
    "fenchel_young_gap", "subdiff_check", "base_shift_inequality",
    "partial_convexity_probe", "equivalent", "minorant", "properness_audit",
]

CONVERGED = "converged"
DIVERGED = "diverged-to-+inf"
EXHAUSTED = "budget-exhausted"


@dataclass
class ConjugateEstimate:
    value: float
    status: str
    argmax: Point = None
    certificate: dict = None
    evaluations: int = 0
    iterations: int = 0
    covector: CotangentVector = None

    def to_dict(self):
        d = {"value": to_json(self.value), "status": self.status,
             "evaluations": self.evaluations, "iterations": self.iterations,
             "argmax": None if self.argmax is None else self.argmax.coords.ravel().tolist()}
        if self.covector is not None:
            d["covector"] = self.covector.coords.ravel().tolist()
        if self.certificate is not None:
            d["certificate"] = self.certificate
        return d


class _Tracker:
    """Best evaluated probe; the running maximum is the reported value."""

    def __init__(self, objective):
        self.objective = objective
        self.value = -INF
        self.arg = None
        self.evaluations = 0

    def probe(self, x):
        v = self.objective(x)
        self.evaluations += 1
        if v > self.value:
            self.value, self.arg = v, x
        return v


def _require_proper(F):
    if not F.claims_proper:
        raise HypothesisError("operation requires a function flagged proper")


def _ray_certificate(track, m, p, chart, u, cfg, inner_best):
    """Look for linear growth of the objective along exp_p(t u)."""
    U = chart.vector(u)
    t_max = m.ray_cap(p, U)
    rho = min(cfg.escape_radius, t_max / 4.0)
    ts = []
    t = rho
    while t <= t_max * (1 + 1e-12):
        ts.append(t)
        t *= 2.0
    if len(ts) < 3:
        return None
    vals = [track.probe(m.exp(p, t * U)) for t in ts]
    t0, t1, t2 = ts[-3:]
    v0, v1, v2 = vals[-3:]
    if not (v0 < v1 < v2 and v0 > cfg.v_max):
        return None
    s1, s2 = (v1 - v0) / (t1 - t0), (v2 - v1) / (t2 - t1)
    if not (s1 > 0 and s2 >= 0.5 * s1):
        return None
    # a maximizer found inside the probed radius beats the ray: not unbounded
    if inner_best(t2) > v2:
        return None
    return {"base": p.ravel().tolist(), "direction": U.ravel().tolist(),
            "radii": [t0, t1, t2], "values": [v0, v1, v2]}


def _conjugate_raw(F, p, xi, cfg, hints=(), label="conjugate"):
    m = F.manifold
    dom = F.domain()

    def objective(x):
        fx = F.value(x)
        if fx == INF:
            return -INF
        return m.pair(xi, m.log(p, x)) - fx

    track = _Tracker(objective)
    if dom is not None and dom.singleton is not None:
        c = dom.singleton
        track.probe(c)
        return track, CONVERGED, None, 0

    chart = NormalChart(m, p)
    g = chart.covector_coords(xi)
    rng = cfg.rng(label)

    starts = [p, F.witness()] + list(F.anchors()) + [np.asarray(h, float) for h in hints]
    radii = (cfg.radius / 4, cfg.radius / 2, cfg.radius)
    for k in range(cfg.restarts):
        starts.append(m.random_point(rng, p, radii[k % 3]))
    if dom is not None:
        starts = [dom.project_raw(x) for x in starts]

    cons = [] if dom is None else [(lambda a, c=c: c(chart.point(a))) for c in dom.constraints()]

    def neg_phi(a):
        v = a @ g - F.finite_value(chart.point(a))
        return -v if math.isfinite(v) else 1e30

    seen = set()
    locals_found = []  # (|a|, value)
    iterations = 0
    for x in starts:
        key = np.round(x, 12).tobytes()
        if key in seen:
            continue
        seen.add(key)
        v0 = track.probe(x)
        if not math.isfinite(v0):
            continue
        a, nit = slsqp(neg_phi, chart.coords(x), cons, radius=chart.cap,
                       maxiter=cfg.max_iterations)
        iterations += nit
        y = chart.point(a)
        if dom is not None and not dom.contains(y):
            y = dom.project_raw(y)
        v = track.probe(y)
        locals_found.append((float(np.linalg.norm(a)), v, a))

    status = CONVERGED
    cert = None
    if not F.dom_bounded:
        def inner_best(radius):
            inside = [v for r, v, _ in locals_found if r < 0.99 * radius]
            return max(inside, default=-INF)

        dirs = []
        gn = np.linalg.norm(g)
        if gn > 0:
            dirs.append(g / gn)
        for r, v, a in locals_found:
            if r > cfg.escape_radius:
                dirs.append(a / r)
        for u in dirs:
            cert = _ray_certificate(track, m, p, chart, u, cfg, inner_best)
            if cert is not None:
                status = DIVERGED
                break
        if cert is None and track.arg is not None:
            if chart.coords(track.arg) @ chart.coords(track.arg) >= (0.999 * chart.cap) ** 2:
                status = EXHAUSTED
    return track, status, cert, iterations


def _estimate(F, track, status, cert, iterations):
    m = F.manifold
    if status == DIVERGED:
        return ConjugateEstimate(INF, DIVERGED, None, cert, track.evaluations, iterations)
    arg = None if track.arg is None else Point(m, track.arg, check=False)
    return ConjugateEstimate(track.value, status, arg, None, track.evaluations, iterations)


def conjugate(F, e, cfg=None, hints=()):
    """Estimate F*(p, xi) for the bundle element ``e = (p, xi)``.

    ``hints`` are extra start points (Points or raw arrays); every probe only
    raises the reported lower bound.
    """
    cfg = cfg or DEFAULT_SOLVER
    _require_proper(F)
    if e.manifold != F.manifold:
        raise ManifoldMismatchError("bundle element and function live on different manifolds")
    hints = [h.coords if isinstance(h, Point) else h for h in hints]
    track, status, cert, it = _conjugate_raw(F, e.point.coords, e.covector.coords, cfg, hints)
    return _estimate(F, track, status, cert, it)


# -- biconjugate ---------------------------------------------------------------------

class _Biconj:
    """Outer objective (q, xi) -> <xi, log_q p> - F*(q, xi) with cached inner solves."""

    def __init__(self, F, p, cfg):
        self.F, self.p, self.cfg = F, p, cfg
        self.m = F.manifold
        self.best = -INF
        self.arg = None
        self.calls = 0
        self._cache = {}

    def term(self, q, xi):
        key = (q.tobytes(), xi.tobytes())
        if key in self._cache:
            return self._cache[key]
        # p as a start point makes every inner estimate at least <xi, log_q p> - F(p)
        track, status, _, _ = _conjugate_raw(self.F, q, xi, self.cfg, hints=(self.p,),
                                             label="biconjugate-inner")
        self.calls += 1
        fstar = INF if status == DIVERGED else track.value
        t = -INF if fstar == INF else self.m.pair(xi, self.m.log(q, self.p)) - fstar
        self._cache[key] = t
        if t > self.best:
            self.best, self.arg = t, (q, xi)
        return t


def _sigma_family(obj, q, L, cfg):
    """Terms along (q, sigma L^flat); linear growth certifies F**(p) = +inf."""
    m = obj.m
    Lf = m.flat(q, L)
    sig = [2.0 ** k for k in range(12)]
    vals = [obj.term(q, s * Lf) for s in sig]
    v0, v1, v2 = vals[-3:]
    s0, s1, s2 = sig[-3:]
    if v0 < v1 < v2 and v0 > cfg.v_max:
        k1, k2 = (v1 - v0) / (s1 - s0), (v2 - v1) / (s2 - s1)
        if k1 > 0 and k2 >= 0.5 * k1:
            return {"base": q.ravel().tolist(), "direction": Lf.ravel().tolist(),
                    "scales": [s0, s1, s2], "values": [v0, v1, v2]}
    return None


def biconjugate(F, p, cfg=None):
    """Estimate F**(p) = sup_(q, xi) <xi, log_q p> - F*(q, xi)."""
    cfg = cfg or DEFAULT_SOLVER
    _require_proper(F)
    if p.manifold != F.manifold:
        raise ManifoldMismatchError("point and function live on different manifolds")
    m = F.manifold
    x = p.coords
    fp = F.value(x)
    obj = _Biconj(F, x, cfg)

    def done():
        return math.isfinite(fp) and obj.best >= fp - cfg.value_tol

    def result(status=CONVERGED, cert=None):
        if status == DIVERGED:
            return ConjugateEstimate(INF, DIVERGED, None, cert, obj.calls, 0)
        q, xi = obj.arg if obj.arg is not None else (x, m.zero(x))
        Q = Point(m, q, check=False)
        return ConjugateEstimate(obj.best, status, Q, None, obj.calls, 0,
                                 CotangentVector(Q, xi, check=False))

    obj.term(x, m.zero(x))
    if math.isfinite(fp):
        sub = F.subgradient_raw(x)
        if sub is not None:
            obj.term(x, np.asarray(sub, float))
        for delta in (1.0, 1e-2, 1e-4):
            if done():
                return result()
            s = fp - delta
            qh, sh = _epigraph_project_raw(F, x, s)
            if sh - s > 1e-14:
                obj.term(qh, m.flat(qh, m.log(qh, x)) / (sh - s))
        if done():
            return result()
    else:
        dom = F.domain()
        if dom is not None:
            qh = dom.project_raw(x)
            cert = _sigma_family(obj, qh, m.log(qh, x), cfg)
            if cert is not None:
                return result(DIVERGED, cert)

    # pattern search over (q, xi): q in normal coordinates at p, xi in a coframe at q
    if obj.arg is None:
        return result(EXHAUSTED)
    chart = NormalChart(m, x)
    q0, xi0 = obj.arg
    b = chart.coords(q0)
    qc = chart.point(b)
    frame = m.frame(qc)
    c = np.array([m.pair(xi0, e) for e in frame])

    def covector(q, coeffs):
        fr = m.frame(q)
        return m.flat(q, sum(ck * e for ck, e in zip(coeffs, fr)))

    step_b = step_c = 0.5
    budget = cfg.biconjugate_budget
    current = obj.term(chart.point(b), covector(chart.point(b), c))
    while budget > 0 and not done() and max(step_b, step_c) > 1e-6:
        improved = False
        for which in ("c", "b"):
            vec, step = (c, step_c) if which == "c" else (b, step_b)
            for k in range(vec.size):
                for sgn in (1.0, -1.0):
                    if budget <= 0:
                        break
                    trial = vec.copy()
                    trial[k] += sgn * step
                    bb, cc = (b, trial) if which == "c" else (trial, c)
                    q = chart.point(bb)
                    t = obj.term(q, covector(q, cc))
                    budget -= 1
                    if t > current:
                        current, improved = t, True
                        if which == "c":
                            c = trial
                        else:
                            b = trial
                        break
        if not improved:
            step_b *= 0.5
            step_c *= 0.5
    if done() or not math.isfinite(fp):
        return result()
    return result(CONVERGED if max(step_b, step_c) <= 1e-6 else EXHAUSTED)


# -- identities and inequalities ---------------------------------------------------

def fenchel_young_gap(F, e, q, cfg=None):
    """F(q) + F*(p, xi) - <xi, log_p q>; nonnegative by Fenchel-Young."""
    cfg = cfg or DEFAULT_SOLVER
    _require_proper(F)
    m = F.manifold
    fq = F.value(q.coords)
    if not math.isfinite(fq):
        raise DomainError("q must lie in dom F")
    est = conjugate(F, e, cfg, hints=[q])
    if est.value == INF:
        return INF
    return fq + est.value - m.pair(e.covector.coords, m.log(e.point.coords, q.coords))


def subdiff_check(F, e, cfg=None, tol=None):
    """Decide xi in dF(p) through F*(p, xi) = -F(p)."""
    cfg = cfg or DEFAULT_SOLVER
    _require_proper(F)
    if not F.claims_convex:
        raise HypothesisError("subdifferential characterization needs a convex function")
    tol = cfg.value_tol if tol is None else tol
    fp = F.value(e.point.coords)
    if not math.isfinite(fp):
        return False
    est = conjugate(F, e, cfg, hints=[e.point])
    return est.value != INF and abs(est.value + fp) <= tol


@dataclass
class BaseShiftReport:
    lhs: float
    rhs: float
    holds: bool


def base_shift_inequality(F, p, p2, cfg=None):
    """F*(p, [log_p p']^flat) against F*(p', [-log_p' p]^flat) + d(p, p')^2."""
    cfg = cfg or DEFAULT_SOLVER
    m = F.manifold
    x, y = p.coords, p2.coords
    e_r = BundleElement(p2, CotangentVector(p2, m.flat(y, -m.log(y, x)), check=False))
    e_l = BundleElement(p, CotangentVector(p, m.flat(x, m.log(x, y)), check=False))
    r = conjugate(F, e_r, cfg)
    hints = [] if r.argmax is None else [r.argmax]
    l = conjugate(F, e_l, cfg, hints=hints)
    rhs = INF if r.value == INF else r.value + m.dist(x, y) ** 2
    lhs = l.value
    return BaseShiftReport(lhs, rhs, lhs == INF or lhs >= rhs - cfg.value_tol * (1 + abs(rhs)))


@dataclass
class ConvexityProbeReport:
    trials: int
    max_violation: float
    finite_trials: int

    @property
    def convex(self):
        return self.max_violation <= 1e-6


def partial_convexity_probe(F, p, trials, cfg=None, rng=None, scale=1.5):
    """Sampled convexity of xi -> F*(p, xi) along segments in T_p^* M."""
    cfg = cfg or DEFAULT_SOLVER
    rng = rng if rng is not None else cfg.rng("partial-convexity")
    m = F.manifold
    x = p.coords
    worst, finite = -INF, 0
    for _ in range(trials):
        a = m.flat(x, m.random_tangent(rng, x, scale))
        b = m.flat(x, m.random_tangent(rng, x, scale))
        lam = rng.uniform()
        mid = (1 - lam) * a + lam * b
        t_mid, s_mid, c_mid, _ = _conjugate_raw(F, x, mid, cfg, label="pc-mid")
        hint = () if t_mid.arg is None else (t_mid.arg,)
        vals = []
        for xi in (a, b):
            t, s, _, _ = _conjugate_raw(F, x, xi, cfg, hints=hint, label="pc-end")
            vals.append(INF if s == DIVERGED else t.value)
        rhs = (1 - lam) * vals[0] + lam * vals[1]
        lhs = INF if s_mid == DIVERGED else t_mid.value
        if rhs == INF:
            continue
        finite += 1
        worst = max(worst, lhs - rhs)
    return ConvexityProbeReport(trials, max(worst, 0.0) if finite else 0.0, finite)


def equivalent(e1, e2, samples=200, radius=3.0, tol=1e-8, rng=None):
    """Sampled test of <xi, log_p q> = <xi', log_p' q> for all q.

    ``True`` means no violation was found among the samples.
    """
    if e1.manifold != e2.manifold:
        raise ManifoldMismatchError("bundle elements live on different manifolds")
    m = e1.manifold
    rng = rng if rng is not None else np.random.default_rng(0)
    p1, x1 = e1.point.coords, e1.covector.coords
    p2, x2 = e2.point.coords, e2.covector.coords
    for k in range(samples):
        q = m.random_point(rng, p1 if k % 2 == 0 else p2, radius)
        a, b = m.pair(x1, m.log(p1, q)), m.pair(x2, m.log(p2, q))
        if abs(a - b) > tol * (1 + abs(a)):
            return False
    return True


class DegenerateProjectionError(HadamardError, RuntimeError):
    """The epigraph projection did not move the level; diagnostics attached."""


@dataclass
class MinorantCertificate:
    q: Point
    lam: float
    alpha: float
    margin: float
    samples: int
    level: float = field(default=None)

    def to_dict(self):
        return {"q": self.q.coords.ravel().tolist(), "lambda": self.lam,
                "alpha": self.alpha, "margin": self.margin, "samples": self.samples}


def minorant(F, p, s, cfg=None, samples=200, rng=None, radius=3.0):
    """Affine-type minorant from the epigraph projection of (p, s).

    Returns q, lam and alpha with lam <log_q p, log_q q'> - F(q') <= alpha on
    sampled q' in dom F; ``margin`` is the largest observed excess.
    """
    cfg = cfg or DEFAULT_SOLVER
    _require_proper(F)
    if not (F.claims_convex and F.claims_lsc):
        raise HypothesisError("minorant construction needs a convex lsc function")
    m = F.manifold
    x = p.coords
    fp = F.value(x)
    if not math.isfinite(fp):
        raise PreconditionError("p must lie in dom F")
    if not s < fp:
        raise PreconditionError(f"level {s} must be below F(p) = {fp}")
    qh, sh = _epigraph_project_raw(F, x, s)
    if not sh - s > 0:
        raise DegenerateProjectionError(
            f"epigraph projection of (p, {s}) kept the level: q = {qh.ravel().tolist()}, F(q) = {F.value(qh)}")
    lam, alpha = 1.0 / (sh - s), -sh
    rng = rng if rng is not None else cfg.rng("minorant")
    L = m.log(qh, x)
    dom = F.domain()
    pts = [qh, x] + list(F.anchors())
    for k in range(samples):
        if dom is not None:
            pts.append(dom.sample(rng, 1)[0])
        else:
            pts.append(m.random_point(rng, qh if k % 2 else x, radius))
    margin = -INF
    for y in pts:
        fy = F.value(y)
        if math.isfinite(fy):
            margin = max(margin, lam * m.inner(qh, L, m.log(qh, y)) - fy - alpha)
    return MinorantCertificate(Point(m, qh, check=False), lam, alpha, margin, len(pts), sh)


@dataclass
class PropernessReport:
    witness: BundleElement
    bound: float
    estimate: ConjugateEstimate
    lower_probe: float
    proper: bool
    status: str


def properness_audit(F, cfg=None):
    """Exhibit (q, xi) with F*(q, xi) < +inf and check F* > -inf by a dom F probe."""
    cfg = cfg or DEFAULT_SOLVER
    m = F.manifold
    w = Point(m, F.witness(), check=False)
    cert = minorant(F, w, F.value(w.coords) - 1.0, cfg, samples=20)
    q = cert.q
    xi = CotangentVector(q, cert.lam * m.flat(q.coords, m.log(q.coords, w.coords)), check=False)
    e = BundleElement(q, xi)
    est = conjugate(F, e, cfg)
    # any q' in dom F gives F*(e) >= <xi, log_q q'> - F(q') > -inf
    probe = m.pair(xi.coords, m.log(q.coords, w.coords)) - F.value(w.coords)
    finite = est.status != DIVERGED and est.value <= cert.alpha + 1e-6 * (1 + abs(cert.alpha))
    ok = finite and math.isfinite(probe)
    status = CONVERGED if ok else (est.status if est.status != CONVERGED else EXHAUSTED)
    return PropernessReport(e, cert.alpha, est, probe, ok, status)
