"""Convex sets, projections, geodesic triangles and strict separation.

Balls and points project in closed form.  Sublevel sets and intersections
are projected by solving ``min |a|^2 / 2`` in normal coordinates at the
projected point, where ``|a|`` is exactly the distance, subject to the
membership constraints (SLSQP).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._optim import NormalChart, slsqp
from .config import DEFAULT_SOLVER
from .errors import DomainError, HypothesisError, SeparationImpossibleError
from .manifolds import CotangentVector, Point, _same_manifold

__all__ = [
    "ConvexSet", "Ball", "PointSet", "Sublevel", "Intersection", "project",
    "project_epigraph", "set_distance_function", "projection_violation",
    "epigraph_violation", "GeodesicTriangle", "cosine_law_residuals",
    "Hypersurface", "SeparationResult", "closest_pair",
    "separating_hypersurface", "separation_margin",
]

_MEMBER_TOL = 1e-9


class ConvexSet:
    """Closed geodesically convex subset, working on raw chart arrays."""

    manifold = None
    compact = False
    singleton = None

    def contains(self, x, tol=_MEMBER_TOL):
        raise NotImplementedError

    def constraints(self):
        """Smooth functions g with the set equal to {g <= 0 for all g}."""
        raise NotImplementedError

    def witness(self):
        raise NotImplementedError

    def bounding_ball(self):
        """(center, radius) of a ball containing the set, or ``None``."""
        return None

    def project_raw(self, x):
        if self.contains(x, 0.0):
            return x
        return _project_constrained(self, x)

    def sample(self, rng, k):
        """``k`` points of the set (rejection from a bounding ball, then projection)."""
        m = self.manifold
        bb = self.bounding_ball()
        center, radius = bb if bb is not None else (self.witness(), 3.0)
        out = []
        for _ in range(50 * k):
            if len(out) == k:
                break
            x = m.random_point(rng, center, radius)
            if self.contains(x, 0.0):
                out.append(x)
        while len(out) < k:
            out.append(self.project_raw(m.random_point(rng, center, radius)))
        return out

    # typed helpers
    def __contains__(self, q):
        _check_on(self, q)
        return self.contains(q.coords)


def _check_on(C, q):
    if q.manifold != C.manifold:
        raise DomainError(f"point on {q.manifold!r}, set on {C.manifold!r}")


class Ball(ConvexSet):
    """Closed geodesic ball B(c, r)."""

    compact = True

    def __init__(self, center, radius):
        radius = float(radius)
        if not radius >= 0:
            raise ValueError("radius must be nonnegative")
        self.center = center
        self.radius = radius
        self.manifold = center.manifold
        self._c = center.coords

    def contains(self, x, tol=_MEMBER_TOL):
        return self.manifold.dist(self._c, x) <= self.radius + tol * (1 + self.radius)

    def constraints(self):
        m, c, r2 = self.manifold, self._c, self.radius ** 2
        return [lambda x: 0.5 * (m.dist(c, x) ** 2 - r2)]

    def witness(self):
        return self._c

    def bounding_ball(self):
        return self._c, self.radius

    def project_raw(self, x):
        d = self.manifold.dist(self._c, x)
        if d <= self.radius:
            return x
        return self.manifold.geodesic(self._c, x, self.radius / d)

    def sample(self, rng, k):
        m = self.manifold
        return [m.random_point(rng, self._c, self.radius) for _ in range(k)]

    def __repr__(self):
        return f"Ball({self._c.ravel().tolist()}, {self.radius})"

    def to_dict(self):
        return {"set": "ball", "center": self._c.ravel().tolist(), "radius": self.radius}


class PointSet(ConvexSet):
    compact = True

    def __init__(self, center):
        self.center = center
        self.manifold = center.manifold
        self._c = center.coords
        self.singleton = self._c

    def contains(self, x, tol=_MEMBER_TOL):
        return self.manifold.dist(self._c, x) <= tol

    def constraints(self):
        m, c = self.manifold, self._c
        return [lambda x: 0.5 * m.dist(c, x) ** 2]

    def witness(self):
        return self._c

    def bounding_ball(self):
        return self._c, 0.0

    def project_raw(self, x):
        return self._c

    def sample(self, rng, k):
        return [self._c] * k

    def __repr__(self):
        return f"PointSet({self._c.ravel().tolist()})"

    def to_dict(self):
        return {"set": "point", "center": self._c.ravel().tolist()}


class Sublevel(ConvexSet):
    """{q : F(q) <= level} for a convex-flagged function F.

    ``bound`` is an optional enclosing ball ``(center Point, radius)``; it is
    used for sampling and, with ``compact=True``, asserts compactness.
    """

    def __init__(self, F, level, bound=None, compact=False):
        if not F.claims_convex:
            raise HypothesisError("sublevel sets need a convex-flagged function")
        self.F = F
        self.level = float(level)
        self.manifold = F.manifold
        self.compact = bool(compact)
        self._bound = None if bound is None else (bound[0].coords, float(bound[1]))
        self._witness = None

    def contains(self, x, tol=_MEMBER_TOL):
        return self.F.value(x) <= self.level + tol * (1 + abs(self.level))

    def constraints(self):
        F, lev = self.F, self.level
        dom = F.domain()
        extra = dom.constraints() if dom is not None else []
        return [lambda x: F.finite_value(x) - lev] + extra

    def witness(self):
        if self._witness is None:
            F = self.F
            for c in [F.witness()] + F.anchors():
                if self.contains(c, 0.0):
                    self._witness = c
                    break
            else:
                x = _project_constrained(self, F.witness())
                if not self.contains(x):
                    raise DomainError("sublevel set appears to be empty")
                self._witness = x
        return self._witness

    def bounding_ball(self):
        return self._bound

    def __repr__(self):
        return f"Sublevel({self.F!r}, {self.level})"

    def to_dict(self):
        d = {"set": "sublevel", "function": self.F.to_dict(), "level": self.level,
             "compact": self.compact}
        if self._bound is not None:
            d["bound"] = {"center": self._bound[0].ravel().tolist(), "radius": self._bound[1]}
        return d


class Intersection(ConvexSet):
    def __init__(self, sets):
        sets = list(sets)
        if not sets:
            raise ValueError("intersection of no sets")
        self.manifold = sets[0].manifold
        for s in sets[1:]:
            if s.manifold != self.manifold:
                raise DomainError("all sets must live on the same manifold")
        self.sets = sets
        self.compact = any(s.compact for s in sets)
        pts = [s.singleton for s in sets if s.singleton is not None]
        self.singleton = pts[0] if pts else None
        self._witness = None

    def contains(self, x, tol=_MEMBER_TOL):
        return all(s.contains(x, tol) for s in self.sets)

    def constraints(self):
        return [g for s in self.sets for g in s.constraints()]

    def witness(self):
        if self._witness is None:
            for s in self.sets:
                try:
                    w = s.witness()
                except DomainError:
                    continue
                if self.contains(w, 0.0):
                    self._witness = w
                    break
            else:
                x = _project_constrained(self, self.sets[0].witness(), fallback=False)
                if not self.contains(x):
                    raise DomainError("intersection appears to be empty")
                self._witness = x
        return self._witness

    def bounding_ball(self):
        balls = [s.bounding_ball() for s in self.sets if s.bounding_ball() is not None]
        return min(balls, key=lambda b: b[1]) if balls else None

    def project_raw(self, x):
        if self.singleton is not None:
            if not self.contains(self.singleton):
                raise DomainError("intersection is empty")
            return self.singleton
        return super().project_raw(x)

    def __repr__(self):
        return f"Intersection({self.sets!r})"

    def to_dict(self):
        return {"set": "intersection", "sets": [s.to_dict() for s in self.sets]}


def _project_constrained(C, x, witness=None, fallback=True):
    """argmin_{q in C} d(x, q) for a set given by smooth constraints."""
    if C.singleton is not None:
        return C.singleton
    m = C.manifold
    chart = NormalChart(m, x)
    cons = [(lambda a, g=g: g(chart.point(a))) for g in C.constraints()]
    starts = [np.zeros(chart.dim)]
    bb = C.bounding_ball()
    if bb is not None:
        starts.append(chart.coords(bb[0]))
    if witness is not None:
        starts.append(chart.coords(witness))
    best = None
    for a0 in starts:
        a, _ = slsqp(lambda a: 0.5 * (a @ a), a0, cons, radius=chart.cap)
        q = chart.point(a)
        if not C.contains(q) and witness is not None:
            q = _restore(C, q, witness)
        if C.contains(q):
            d = m.dist(x, q)
            if best is None or d < best[0]:
                best = (d, q)
    if best is None:
        if witness is None and fallback:
            try:
                w = C.witness()
            except DomainError:
                w = None
            if w is not None:
                return _project_constrained(C, x, w)
        raise DomainError("projection failed: no feasible point found (empty set?)")
    return best[1]


def _restore(C, q, w, steps=60):
    """Bisect along the geodesic from q toward the member w for the first feasible point."""
    m = C.manifold
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if C.contains(m.geodesic(q, w, mid)):
            hi = mid
        else:
            lo = mid
    return m.geodesic(q, w, hi)


def project(C, p, cfg=None):
    """Metric projection of ``p`` onto the closed convex set ``C``."""
    _check_on(C, p)
    return Point(C.manifold, C.project_raw(p.coords), check=False)


def set_distance_function(A, p):
    """d(p, A) = d(p, P_A(p))."""
    _check_on(A, p)
    q = A.project_raw(p.coords)
    return 0.0 if np.array_equal(q, p.coords) else A.manifold.dist(p.coords, q)


def projection_violation(C, p, samples=100, rng=None):
    """max over sampled q in C of <log_P(p) p, log_P(p) q> (should be <= 0)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    m = C.manifold
    x = p.coords if isinstance(p, Point) else p
    ph = C.project_raw(x)
    L = m.log(ph, x)
    worst = -math.inf
    for q in C.sample(rng, samples):
        worst = max(worst, m.inner(ph, L, m.log(ph, q)))
    return worst


# -- epigraphs -----------------------------------------------------------------------

def _epigraph_project_raw(F, x, s):
    m = F.manifold
    fx = F.value(x)
    if fx <= s:
        return x, s
    dom = F.domain()
    if dom is not None and dom.singleton is not None:
        c = dom.singleton
        return c, max(s, F.value(c))
    chart = NormalChart(m, x)
    cons = [] if dom is None else [(lambda a, g=g: g(chart.point(a))) for g in dom.constraints()]

    def h(a):
        excess = max(F.finite_value(chart.point(a)) - s, 0.0)
        return 0.5 * (a @ a) + 0.5 * excess * excess

    def full(q):
        return 0.5 * m.dist(x, q) ** 2 + 0.5 * max(F.value(q) - s, 0.0) ** 2

    cands = []
    starts = [np.zeros(chart.dim), chart.coords(F.witness())]
    for a0 in starts:
        a, _ = slsqp(h, a0, cons, radius=chart.cap)
        q = chart.point(a)
        if dom is not None and not dom.contains(q):
            q = dom.project_raw(q)
        cands.append(q)
    # kinks are where smooth solvers stall; compare against them directly
    cands.extend(c for c in F.anchors() if math.isfinite(F.value(c)))
    q = min(cands, key=full)
    return q, max(s, F.value(q))


def project_epigraph(F, ep, cfg=None):
    """Projection of ``(p, s)`` onto epi F in M x R (input returned if already inside)."""
    from .functions import EpigraphPoint
    _same_manifold(ep.point, Point(F.manifold, F.witness(), check=False))
    q, s = _epigraph_project_raw(F, ep.point.coords, float(ep.level))
    return EpigraphPoint(Point(F.manifold, q, check=False), s)


def epigraph_violation(F, ep, samples=100, rng=None, radius=2.0):
    """max of <log_ph p, log_ph q> + (s - sh)(r - sh) over sampled (q, r) in epi F."""
    rng = rng if rng is not None else np.random.default_rng(0)
    m = F.manifold
    x, s = ep.point.coords, float(ep.level)
    ph, sh = _epigraph_project_raw(F, x, s)
    L = m.log(ph, x)
    dom = F.domain()
    worst = -math.inf
    for _ in range(samples):
        if dom is not None:
            q = dom.sample(rng, 1)[0]
        else:
            q = m.random_point(rng, ph, radius)
        fq = F.value(q)
        if not math.isfinite(fq):
            continue
        r = fq + rng.exponential(0.5) * (rng.uniform() < 0.5)
        worst = max(worst, m.inner(ph, L, m.log(ph, q)) + (s - sh) * (r - sh))
    return worst


# -- geodesic triangles --------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicTriangle:
    p0: Point
    p1: Point
    p2: Point

    def __post_init__(self):
        v = self.vertices
        _same_manifold(v[0], v[1])
        _same_manifold(v[0], v[2])
        m = v[0].manifold
        for i in range(3):
            if m.dist(v[i].coords, v[(i + 1) % 3].coords) <= 1e-10:
                raise DomainError("triangle vertices must be pairwise distinct")

    @property
    def vertices(self):
        return (self.p0, self.p1, self.p2)


def cosine_law_residuals(T):
    """Residuals of the two comparison inequalities at each vertex (all >= 0)."""
    m = T.p0.manifold
    v = [p.coords for p in T.vertices]
    r1, r2 = np.empty(3), np.empty(3)
    for i in range(3):
        a, b, c = v[(i - 1) % 3], v[i], v[(i + 1) % 3]
        La, Lc = m.log(b, a), m.log(b, c)
        d_ac, d_ab, d_cb = m.dist(a, c), m.dist(a, b), m.dist(c, b)
        ang = m.inner(b, La, Lc)
        r1[i] = d_ac ** 2 - (d_ab ** 2 - 2 * ang + d_cb ** 2)
        r2[i] = ang + m.inner(c, m.log(c, a), m.log(c, b)) - d_cb ** 2
    return r1, r2


# -- separation ----------------------------------------------------------------------

@dataclass(frozen=True)
class Hypersurface:
    """{q : <xi, log_p q> = offset}.

    ``orientation`` names the side convention: "A-positive" means the first
    set lies where the pairing exceeds the offset.
    """

    base: Point
    covector: CotangentVector
    offset: float = 0.0
    orientation: str = "A-positive"

    def __post_init__(self):
        m = self.base.manifold
        if m.norm(self.base.coords, m.sharp(self.base.coords, self.covector.coords)) <= 0:
            raise DomainError("hypersurface covector must be nonzero")

    def level(self, x):
        m = self.base.manifold
        return m.pair(self.covector.coords, m.log(self.base.coords, x))

    def negated(self):
        flip = "A-negative" if self.orientation == "A-positive" else "A-positive"
        return Hypersurface(self.base, -self.covector, -self.offset, flip)

    def to_dict(self):
        return {"base": self.base.coords.ravel().tolist(),
                "covector": self.covector.coords.ravel().tolist(),
                "offset": self.offset, "orientation": self.orientation}


@dataclass(frozen=True)
class SeparationResult:
    hypersurface: Hypersurface
    pair: tuple
    inf_a: float
    sup_b: float
    samples: int
    strict: bool
    gap: float = field(default=0.0)

    def to_dict(self):
        return {"hypersurface": self.hypersurface.to_dict(),
                "pair": [q.coords.ravel().tolist() for q in self.pair],
                "margins": {"inf_a": self.inf_a, "sup_b": self.sup_b},
                "samples_per_set": self.samples, "strict": self.strict,
                "distance": self.gap}


def closest_pair(A, B, cfg=None, rng=None):
    """Nearest points (a in A, b in B) by alternating projections."""
    cfg = cfg or DEFAULT_SOLVER
    if A.manifold != B.manifold:
        raise DomainError("sets live on different manifolds")
    rng = rng if rng is not None else cfg.rng("closest-pair")
    m = A.manifold
    b = B.witness()
    best = (math.inf, None, None)
    stall = 0
    for _ in range(max(cfg.max_iterations, 1) * 20):
        a = A.project_raw(b)
        b_new = B.project_raw(a)
        gap = m.dist(a, b_new)
        move = m.dist(b, b_new)
        b = b_new
        if gap < best[0] - 1e-15:
            best, stall = (gap, a, b), 0
        else:
            stall += 1
        if gap <= 1e-8:
            raise SeparationImpossibleError("the sets intersect")
        if move <= cfg.step_tol * (1 + gap):
            break
        if stall >= 50:
            b, stall = B.sample(rng, 1)[0], 0
    _, a, b = best
    return Point(m, a, check=False), Point(m, b, check=False)


def separation_margin(H, A, B, samples, rng=None):
    """(inf over A, sup over B) of <xi, log_p .>, each set's nearest point included."""
    rng = rng if rng is not None else np.random.default_rng(0)
    x = H.base.coords
    a_pts = [A.project_raw(x)] + A.sample(rng, samples)
    b_pts = [B.project_raw(x)] + B.sample(rng, samples)
    return min(map(H.level, a_pts)), max(map(H.level, b_pts))


def separating_hypersurface(A, B, cfg=None, samples=500, rng=None):
    """Hypersurface through the midpoint of the closest pair, A on the positive side."""
    cfg = cfg or DEFAULT_SOLVER
    m = A.manifold
    qa, qb = closest_pair(A, B, cfg)
    p = m.geodesic(qa.coords, qb.coords, 0.5)
    P = Point(m, p, check=False)
    xi = CotangentVector(P, m.flat(p, m.log(p, qa.coords)), check=False)
    H = Hypersurface(P, xi, 0.0, "A-positive")
    rng = rng if rng is not None else cfg.rng("separation-samples")
    inf_a, sup_b = separation_margin(H, A, B, samples, rng)
    return SeparationResult(H, (qa, qb), inf_a, sup_b, samples,
                            strict=bool(sup_b < H.offset < inf_a),
                            gap=m.dist(qa.coords, qb.coords))
