"""Extended-real functions on Hadamard manifolds as closed descriptor trees.

Atoms (squared distance, distance, ball and point indicators, linear
pull-backs, opaque callables) are combined by :class:`Sum`, :class:`Max`,
:class:`Scale` and :class:`AddConstant`.  Every node knows its effective
domain, a witness point in it, its kink points ("anchors") and, where one
exists in closed form, a Riemannian gradient and a subgradient.  The
convex/lsc/proper flags travel with the tree so that theorem-level
operations can check their hypotheses.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, ManifoldMismatchError
from .extreal import INF
from .manifolds import CotangentVector, Point
from . import geometry

__all__ = [
    "ConvexFunction", "SquaredDistance", "Distance", "IndicatorBall",
    "IndicatorPoint", "LinearPullback", "Opaque", "Sum", "Max", "Scale",
    "AddConstant", "EpigraphPoint", "evaluate", "subgradient", "in_epigraph",
    "convexity_probe", "epigraph_closure_probe", "function_from_dict",
    "squared_distance", "distance", "indicator_ball", "indicator_point",
    "linear_pullback",
]

# slack used by indicator membership so that closed-form projections stay inside
_MEMBER_TOL = 1e-10


class ConvexFunction:
    """Node of a function descriptor tree.

    Subclasses implement ``value`` on raw chart arrays; ``__call__`` accepts a
    :class:`Point` and returns an extended real (a float, possibly ``inf``).
    """

    claims_convex = True
    claims_lsc = True
    claims_proper = True

    manifold = None

    def value(self, q):
        raise NotImplementedError

    def finite_value(self, q):
        """Value with indicator atoms read as 0: a finite extension off dom F."""
        return self.value(q)

    def __call__(self, q):
        return evaluate(self, q)

    def gradient(self, q):
        """Riemannian gradient of the finite part at ``q`` or ``None``.

        Indicator atoms contribute zero; their effect is carried by
        :meth:`domain`.
        """
        return None

    def subgradient_raw(self, q):
        """A covector in the subdifferential at ``q`` (raw coords) or ``None``."""
        return None

    def domain(self):
        """:class:`geometry.ConvexSet` equal to ``dom F``, or ``None`` for all of M."""
        return None

    def anchors(self):
        return []

    def witness(self):
        raise NotImplementedError

    @property
    def dom_bounded(self):
        d = self.domain()
        return d is not None and d.compact

    def to_dict(self):
        raise NotImplementedError

    # combinator sugar
    def __add__(self, other):
        if isinstance(other, ConvexFunction):
            return Sum([self, other])
        return AddConstant(float(other), self)

    __radd__ = __add__

    def __mul__(self, lam):
        return Scale(float(lam), self)

    __rmul__ = __mul__


class _Centered(ConvexFunction):
    name = None

    def __init__(self, center):
        if not isinstance(center, Point):
            raise TypeError("center must be a Point")
        self.center = center
        self.manifold = center.manifold

    def anchors(self):
        return [self.center.coords]

    def witness(self):
        return self.center.coords

    def __repr__(self):
        return f"{self.name}({self.center.coords.ravel().tolist()})"

    def to_dict(self):
        return {"atom": self.name, "center": self.center.coords.ravel().tolist()}


class SquaredDistance(_Centered):
    """q -> d(c, q)^2 / 2."""

    name = "squared_distance"

    def value(self, q):
        d = self.manifold.dist(self.center.coords, q)
        return 0.5 * d * d

    def gradient(self, q):
        return -self.manifold.log(q, self.center.coords)

    def subgradient_raw(self, q):
        return self.manifold.flat(q, self.gradient(q))


class Distance(_Centered):
    """q -> d(c, q); not differentiable at the center."""

    name = "distance"

    def value(self, q):
        return self.manifold.dist(self.center.coords, q)

    def gradient(self, q):
        m = self.manifold
        L = m.log(q, self.center.coords)
        d = m.norm(q, L)
        if d <= 1e-14:
            return None
        return -L / d

    def subgradient_raw(self, q):
        g = self.gradient(q)
        # at the center the subdifferential is the whole unit ball
        return None if g is None else self.manifold.flat(q, g)


class IndicatorBall(_Centered):
    """0 on the closed geodesic ball B(c, r), +inf outside."""

    name = "indicator_ball"

    def __init__(self, center, radius):
        super().__init__(center)
        radius = float(radius)
        if not radius >= 0:
            raise ValueError("radius must be nonnegative")
        self.radius = radius
        self._set = geometry.Ball(center, radius)

    def value(self, q):
        d = self.manifold.dist(self.center.coords, q)
        return 0.0 if d <= self.radius + _MEMBER_TOL * (1.0 + self.radius) else INF

    def finite_value(self, q):
        return 0.0

    def gradient(self, q):
        return self.manifold.zero(q)

    def subgradient_raw(self, q):
        return self.manifold.zero(q)

    def domain(self):
        return self._set

    def __repr__(self):
        return f"indicator_ball({self.center.coords.ravel().tolist()}, {self.radius})"

    def to_dict(self):
        return {**super().to_dict(), "radius": self.radius}


class IndicatorPoint(_Centered):
    """0 at c, +inf elsewhere."""

    name = "indicator_point"

    def __init__(self, center):
        super().__init__(center)
        self._set = geometry.PointSet(center)

    def value(self, q):
        return 0.0 if self.manifold.dist(self.center.coords, q) <= _MEMBER_TOL else INF

    def finite_value(self, q):
        return 0.0

    def gradient(self, q):
        return self.manifold.zero(q)

    def subgradient_raw(self, q):
        return self.manifold.zero(q)

    def domain(self):
        return self._set


class LinearPullback(ConvexFunction):
    """q -> <xi, log_p q>.  Not geodesically convex on curved manifolds."""

    claims_convex = False
    name = "linear_pullback"

    def __init__(self, base, covector):
        if not isinstance(covector, CotangentVector):
            raise TypeError("covector must be a CotangentVector")
        if covector.base != base:
            raise ValueError("covector must be attached to the base point")
        self.base = base
        self.covector = covector
        self.manifold = base.manifold

    def value(self, q):
        m = self.manifold
        return m.pair(self.covector.coords, m.log(self.base.coords, q))

    def anchors(self):
        return [self.base.coords]

    def witness(self):
        return self.base.coords

    def __repr__(self):
        return f"linear_pullback({self.base.coords.ravel().tolist()})"

    def to_dict(self):
        return {"atom": self.name, "base": self.base.coords.ravel().tolist(),
                "covector": self.covector.coords.ravel().tolist()}


class Opaque(ConvexFunction):
    """User callable with user-declared flags.

    ``fn`` maps a :class:`Point` to an extended real.  Theorems applied to an
    opaque atom rest entirely on the declared flags.  ``anchors`` should list
    every isolated point of the domain (solvers only find those through it).
    """

    name = "opaque"

    def __init__(self, manifold, fn, witness, *, anchors=(), subgradient=None,
                 domain=None, convex=False, lsc=False, proper=True, label="opaque"):
        self.manifold = manifold
        self.fn = fn
        self._witness = witness.coords if isinstance(witness, Point) else np.asarray(witness, float)
        self._anchors = [a.coords if isinstance(a, Point) else np.asarray(a, float) for a in anchors]
        self._subgradient = subgradient
        self._domain = domain
        self.claims_convex = convex
        self.claims_lsc = lsc
        self.claims_proper = proper
        self.label = label

    def value(self, q):
        return float(self.fn(Point(self.manifold, q, check=False)))

    def subgradient_raw(self, q):
        if self._subgradient is None:
            return None
        xi = self._subgradient(Point(self.manifold, q, check=False))
        return None if xi is None else np.asarray(getattr(xi, "coords", xi), float)

    def domain(self):
        return self._domain

    def anchors(self):
        return list(self._anchors)

    def witness(self):
        return self._witness

    def __repr__(self):
        return f"opaque({self.label})"

    def to_dict(self):
        return {"atom": "opaque", "label": self.label}


# -- combinators -------------------------------------------------------------------

def _check_same(terms):
    m = terms[0].manifold
    for t in terms[1:]:
        if t.manifold != m:
            raise ManifoldMismatchError("all terms must live on the same manifold")
    return m


def _intersect(domains):
    domains = [d for d in domains if d is not None]
    if not domains:
        return None
    if len(domains) == 1:
        return domains[0]
    return geometry.Intersection(domains)


class _Multi(ConvexFunction):
    name = None

    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise ValueError(f"{self.name} needs at least one term")
        self.terms = terms
        self.manifold = _check_same(terms)
        self.claims_convex = all(t.claims_convex for t in terms)
        self.claims_lsc = all(t.claims_lsc for t in terms)
        self._domain = _intersect([t.domain() for t in terms])
        self._witness = self._find_witness()
        self.claims_proper = all(t.claims_proper for t in terms) and self._witness is not None

    def _find_witness(self):
        cands = [t.witness() for t in self.terms]
        cands += [a for t in self.terms for a in t.anchors()]
        if self._domain is not None:
            try:
                cands.append(self._domain.witness())
            except DomainError:
                return None
        for c in cands:
            if math.isfinite(self.value(c)):
                return c
        return None

    def domain(self):
        return self._domain

    def anchors(self):
        out = []
        for t in self.terms:
            out.extend(t.anchors())
        return out

    def witness(self):
        if self._witness is None:
            raise DomainError(f"{self.name} has an empty domain")
        return self._witness

    def __repr__(self):
        return f"{self.name}({', '.join(map(repr, self.terms))})"

    def to_dict(self):
        return {"combinator": self.name, "terms": [t.to_dict() for t in self.terms]}


class Sum(_Multi):
    name = "sum"

    def value(self, q):
        s = 0.0
        for t in self.terms:
            s += t.value(q)
            if s == INF:
                return INF
        return s

    def finite_value(self, q):
        return sum(t.finite_value(q) for t in self.terms)

    def gradient(self, q):
        gs = [t.gradient(q) for t in self.terms]
        if any(g is None for g in gs):
            return None
        return sum(gs[1:], gs[0])

    def subgradient_raw(self, q):
        # subgradient inequalities add, so any available choice per term works
        xs = [t.subgradient_raw(q) for t in self.terms]
        if any(x is None for x in xs):
            return None
        return sum(xs[1:], xs[0])


class Max(_Multi):
    name = "max"

    def value(self, q):
        return max(t.value(q) for t in self.terms)

    def finite_value(self, q):
        return max(t.finite_value(q) for t in self.terms)

    def _active(self, q):
        vals = [t.value(q) for t in self.terms]
        top = max(vals)
        return [t for t, v in zip(self.terms, vals) if v >= top - 1e-12 * (1 + abs(top))]

    def gradient(self, q):
        active = self._active(q)
        return active[0].gradient(q) if len(active) == 1 else None

    def subgradient_raw(self, q):
        # any active term's subgradient bounds the max from below
        for t in self._active(q):
            x = t.subgradient_raw(q)
            if x is not None:
                return x
        return None


class Scale(ConvexFunction):
    name = "scale"

    def __init__(self, lam, term):
        lam = float(lam)
        if not lam > 0:
            raise ValueError("scale factor must be > 0")
        self.lam = lam
        self.term = term
        self.manifold = term.manifold
        self.claims_convex = term.claims_convex
        self.claims_lsc = term.claims_lsc
        self.claims_proper = term.claims_proper

    def value(self, q):
        return self.lam * self.term.value(q)

    def finite_value(self, q):
        return self.lam * self.term.finite_value(q)

    def gradient(self, q):
        g = self.term.gradient(q)
        return None if g is None else self.lam * g

    def subgradient_raw(self, q):
        x = self.term.subgradient_raw(q)
        return None if x is None else self.lam * x

    def domain(self):
        return self.term.domain()

    def anchors(self):
        return self.term.anchors()

    def witness(self):
        return self.term.witness()

    def __repr__(self):
        return f"scale({self.lam}, {self.term!r})"

    def to_dict(self):
        return {"combinator": "scale", "factor": self.lam, "term": self.term.to_dict()}


class AddConstant(ConvexFunction):
    name = "add_constant"

    def __init__(self, alpha, term):
        self.alpha = float(alpha)
        if not math.isfinite(self.alpha):
            raise ValueError("constant must be finite")
        self.term = term
        self.manifold = term.manifold
        self.claims_convex = term.claims_convex
        self.claims_lsc = term.claims_lsc
        self.claims_proper = term.claims_proper

    def value(self, q):
        return self.term.value(q) + self.alpha

    def finite_value(self, q):
        return self.term.finite_value(q) + self.alpha

    def gradient(self, q):
        return self.term.gradient(q)

    def subgradient_raw(self, q):
        return self.term.subgradient_raw(q)

    def domain(self):
        return self.term.domain()

    def anchors(self):
        return self.term.anchors()

    def witness(self):
        return self.term.witness()

    def __repr__(self):
        return f"add_constant({self.alpha}, {self.term!r})"

    def to_dict(self):
        return {"combinator": "add_constant", "constant": self.alpha, "term": self.term.to_dict()}


# short constructors
squared_distance = SquaredDistance
distance = Distance
indicator_ball = IndicatorBall
indicator_point = IndicatorPoint
linear_pullback = LinearPullback


# -- operations --------------------------------------------------------------------

def _on(F, q):
    if q.manifold != F.manifold:
        raise ManifoldMismatchError(f"point on {q.manifold!r}, function on {F.manifold!r}")


def evaluate(F, q):
    """F(q) as an extended real."""
    _on(F, q)
    return float(F.value(q.coords))


def subgradient(F, q):
    """An element of the subdifferential of ``F`` at ``q``, or ``None``.

    ``None`` means no closed-form element is available (e.g. the distance
    function at its own center).
    """
    _on(F, q)
    if not math.isfinite(F.value(q.coords)):
        raise DomainError("point is outside dom F")
    xi = F.subgradient_raw(q.coords)
    return None if xi is None else CotangentVector(q, xi, check=False)


@dataclass(frozen=True)
class EpigraphPoint:
    point: Point
    level: float

    def to_dict(self):
        return {"point": self.point.to_dict(), "level": self.level}


def in_epigraph(F, ep):
    return evaluate(F, ep.point) <= ep.level


@dataclass
class ConvexityReport:
    trials: int
    max_violation: float
    worst: tuple = None
    threshold: float = 1e-7

    @property
    def convex(self):
        return self.max_violation <= self.threshold


def _probe_points(F, rng, radius):
    m = F.manifold
    centers = [F.witness()] + F.anchors()
    c = centers[rng.integers(len(centers))]
    dom = F.domain()
    x = m.random_point(rng, c, radius)
    if dom is not None:
        x = dom.sample(rng, 1)[0] if rng.uniform() < 0.7 else dom.project_raw(x)
    return x


def convexity_probe(F, trials, rng=None, radius=2.0):
    """Largest sampled violation of F(gamma(t)) <= (1-t) F(p) + t F(q)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    m = F.manifold
    worst, arg = -INF, None
    for _ in range(trials):
        p = _probe_points(F, rng, radius)
        q = _probe_points(F, rng, radius)
        t = rng.uniform(0.0, 1.0)
        fp, fq = F.value(p), F.value(q)
        if not (math.isfinite(fp) and math.isfinite(fq)):
            continue
        ft = F.value(m.geodesic(p, q, t))
        v = ft - ((1 - t) * fp + t * fq) if math.isfinite(ft) else INF
        if v > worst:
            worst, arg = v, (p, q, t)
    return ConvexityReport(trials=trials, max_violation=max(worst, 0.0), worst=arg)


@dataclass
class ClosureReport:
    trials: int
    max_violation: float

    @property
    def closed(self):
        return self.max_violation <= 1e-7


def epigraph_closure_probe(F, trials, rng=None, radius=2.0, steps=30):
    """Check lim (p_k, s_k) of epigraph points stays in epi F on sampled sequences.

    Limits p are the declared anchors first, then random points; sequences
    approach p along a geodesic (step 2^-k) with s_k = F(p_k).  A
    violation measures F(p) - liminf F(p_k), less twice the last increment so
    that a Lipschitz approach still converging at rate 2^-k is not flagged.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    m = F.manifold
    worst = 0.0
    anchors = F.anchors()
    for trial in range(trials):
        # semicontinuity fails on thin sets, so anchors are tried explicitly
        p = np.asarray(anchors[trial], float) if trial < len(anchors) else _probe_points(F, rng, radius)
        q = _probe_points(F, rng, radius)
        levels = []
        for k in range(1, steps + 1):
            pk = m.geodesic(p, q, 2.0 ** (-k))
            fk = F.value(pk)
            if math.isfinite(fk):
                levels.append(fk)
        if not levels:
            continue
        s = min(levels[-3:])
        tail = 2.0 * abs(levels[-1] - levels[-2]) if len(levels) > 1 else 0.0
        fp = F.value(p)
        worst = max(worst, fp - s - tail if math.isfinite(fp) else INF)
    return ClosureReport(trials=trials, max_violation=worst)


# -- serialization -----------------------------------------------------------------

def function_from_dict(d, manifold, names=None):
    """Build a descriptor tree from its JSON-compatible form.

    Point fields may be coordinate lists or names looked up in ``names``.
    """
    names = names or {}

    def pt(v):
        if isinstance(v, str):
            try:
                v = names[v]
            except KeyError:
                raise KeyError(f"unknown point name {v!r}") from None
        return v if isinstance(v, Point) else Point(manifold, v)

    if "combinator" in d:
        kind = d["combinator"]
        if kind in ("sum", "max"):
            terms = [function_from_dict(t, manifold, names) for t in d["terms"]]
            return Sum(terms) if kind == "sum" else Max(terms)
        if kind == "scale":
            return Scale(d["factor"], function_from_dict(d["term"], manifold, names))
        if kind == "add_constant":
            return AddConstant(d["constant"], function_from_dict(d["term"], manifold, names))
        raise ValueError(f"unknown combinator {kind!r}")
    atom = d.get("atom")
    if atom == "squared_distance":
        return SquaredDistance(pt(d["center"]))
    if atom == "distance":
        return Distance(pt(d["center"]))
    if atom == "indicator_ball":
        return IndicatorBall(pt(d["center"]), d["radius"])
    if atom == "indicator_point":
        return IndicatorPoint(pt(d["center"]))
    if atom == "linear_pullback":
        base = pt(d["base"])
        return LinearPullback(base, CotangentVector(base, d["covector"]))
    raise ValueError(f"unknown atom {atom!r}")

