import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadamard_duality import (SPD, AddConstant, DomainError, Distance, Euclidean, Hyperboloid,
                              IndicatorBall, IndicatorPoint, LinearPullback, ManifoldMismatchError,
                              Max, Opaque, Point, Scale, SquaredDistance, Sum, convexity_probe,
                              evaluate, subgradient)
from hadamard_duality.functions import (EpigraphPoint, epigraph_closure_probe, function_from_dict,
                                        in_epigraph)
from hadamard_duality.manifolds import CotangentVector

M = [Euclidean(2), Hyperboloid(2), SPD(2)]


def _pts(m, rng, k, center=None, radius=2.0):
    return [Point(m, m.random_point(rng, center, radius), check=False) for _ in range(k)]


@pytest.mark.parametrize("m", M, ids=repr)
def test_atom_values(m, rng):
    c, q = _pts(m, rng, 2)
    d = m.dist(c.coords, q.coords)
    assert evaluate(SquaredDistance(c), q) == pytest.approx(0.5 * d * d)
    assert evaluate(Distance(c), q) == pytest.approx(d)
    assert evaluate(IndicatorBall(c, d + 0.1), q) == 0.0
    assert evaluate(IndicatorBall(c, 0.5 * d), q) == math.inf
    assert evaluate(IndicatorPoint(c), c) == 0.0
    assert evaluate(IndicatorPoint(c), q) == math.inf


def test_sum_with_constant_at_center():
    m = Hyperboloid(2)
    c = Point(m, m.reference_point())
    assert evaluate(Sum([Distance(c), AddConstant(2.0, IndicatorPoint(c))]), c) == 2.0
    assert evaluate(Distance(c) + 2.0, c) == 2.0


def test_combinators(rng):
    m = SPD(2)
    c1, c2, q = _pts(m, rng, 3)
    f, g = SquaredDistance(c1), Distance(c2)
    assert evaluate(Max([f, g]), q) == max(evaluate(f, q), evaluate(g, q))
    assert evaluate(Scale(3.0, f), q) == pytest.approx(3 * evaluate(f, q))
    assert evaluate(2.0 * f, q) == pytest.approx(2 * evaluate(f, q))
    assert evaluate(f + g, q) == pytest.approx(evaluate(f, q) + evaluate(g, q))
    with pytest.raises(ValueError):
        Scale(0.0, f)
    with pytest.raises(ValueError):
        Sum([])
    with pytest.raises(ManifoldMismatchError):
        Sum([f, Distance(Point(Euclidean(2), [0, 0]))])


def test_sum_domain_is_intersection(rng):
    m = Euclidean(2)
    a, b = Point(m, [0, 0]), Point(m, [1.5, 0])
    F = IndicatorBall(a, 1.0) + IndicatorBall(b, 1.0)
    w = F.witness()
    assert F.value(w) == 0.0
    assert F.domain().contains(np.array([0.75, 0.0]))
    assert not F.domain().contains(np.array([-0.5, 0.0]))


@pytest.mark.parametrize("m", M, ids=repr)
def test_subgradient_closed_forms(m, rng):
    c, q = _pts(m, rng, 2)
    lg = m.log(q.coords, c.coords)
    d = m.dist(q.coords, c.coords)
    np.testing.assert_allclose(subgradient(SquaredDistance(c), q).coords, m.flat(q.coords, -lg),
                               atol=1e-12)
    np.testing.assert_allclose(subgradient(Distance(c), q).coords, m.flat(q.coords, -lg / d),
                               atol=1e-12)
    assert subgradient(Distance(c), c) is None or np.allclose(subgradient(Distance(c), c).coords, 0)


@pytest.mark.parametrize("m", M, ids=repr)
def test_subgradient_inequality_holds_on_samples(m, rng):
    c = _pts(m, rng, 1)[0]
    for F in (SquaredDistance(c), Distance(c), SquaredDistance(c) + Distance(c), 2.0 * SquaredDistance(c)):
        q = _pts(m, rng, 1, c.coords, 2.0)[0]
        xi = subgradient(F, q)
        for r in _pts(m, rng, 50, q.coords, 3.0):
            lhs = evaluate(F, r)
            rhs = evaluate(F, q) + m.pair(xi.coords, m.log(q.coords, r.coords))
            assert lhs >= rhs - 1e-9


def test_subgradient_outside_domain_raises():
    m = Euclidean(2)
    F = IndicatorBall(Point(m, [0, 0]), 1.0)
    with pytest.raises(DomainError):
        subgradient(F, Point(m, [3, 0]))


@pytest.mark.parametrize("m", M, ids=repr)
def test_convexity_probe_passes_atoms(m, rng):
    c = _pts(m, rng, 1)[0]
    for F in (SquaredDistance(c), Distance(c), IndicatorBall(c, 1.0), Max([Distance(c), SquaredDistance(c)])):
        assert convexity_probe(F, 200, rng).convex


def test_convexity_probe_flags_nonconvex_function(rng):
    m = Euclidean(1)
    F = Opaque(m, lambda q: -float(q.coords[0] ** 2), [0.0], label="concave")
    rep = convexity_probe(F, 100, rng)
    assert not rep.convex and rep.max_violation > 0.01


def test_epigraph_closure_probe():
    m = Euclidean(1)
    assert epigraph_closure_probe(SquaredDistance(Point(m, [0.0])), 50).closed
    # jump up at 0: not lower semicontinuous
    jump = Opaque(m, lambda q: 1.0 if q.coords[0] == 0.0 else 0.0, [0.0], anchors=[[0.0]])
    assert not epigraph_closure_probe(jump, 50).closed


def test_in_epigraph():
    m = Euclidean(1)
    F = Distance(Point(m, [0.0]))
    assert in_epigraph(F, EpigraphPoint(Point(m, [1.0]), 1.0))
    assert not in_epigraph(F, EpigraphPoint(Point(m, [1.0]), 0.5))


def test_linear_pullback_value():
    m = Euclidean(2)
    b = Point(m, [1.0, -1.0])
    F = LinearPullback(b, CotangentVector(b, [2.0, 0.5]))
    q = Point(m, [3.0, 1.0])
    assert evaluate(F, q) == pytest.approx(2.0 * 2.0 + 0.5 * 2.0)


@pytest.mark.parametrize("m", M, ids=repr)
def test_serialization_roundtrip(m, rng):
    c, q = _pts(m, rng, 2)
    F = Sum([Scale(2.0, SquaredDistance(c)), AddConstant(1.0, Distance(c)),
             Max([IndicatorBall(c, 5.0), Distance(c)])])
    G = function_from_dict(F.to_dict(), m)
    assert evaluate(G, q) == evaluate(F, q)


def test_serialization_named_points_and_errors():
    m = Euclidean(2)
    names = {"c": Point(m, [1.0, 0.0])}
    F = function_from_dict({"atom": "distance", "center": "c"}, m, names)
    assert evaluate(F, Point(m, [0.0, 0.0])) == 1.0
    with pytest.raises(ValueError):
        function_from_dict({"atom": "nope"}, m)
    with pytest.raises(KeyError):
        function_from_dict({"atom": "distance", "center": "missing"}, m, names)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_squared_distance_geodesically_convex_on_spd(seed, t):
    m = SPD(2)
    rng = np.random.default_rng(seed)
    c, p, q = (m.random_point(rng, None, 2.0) for _ in range(3))
    F = SquaredDistance(Point(m, c, check=False))
    mid = F.value(m.geodesic(p, q, t))
    assert mid <= (1 - t) * F.value(p) + t * F.value(q) + 1e-9


def test_dyadic_scale_is_exact(rng):
    m = Euclidean(3)
    c = Point(m, [0.5, 0.25, -1.0])
    q = Point(m, [1.5, 0.25, -1.0])  # d = 1, so every value below is exact in binary
    for lam in (0.5, 2.0, 4.0, 0.125):
        assert evaluate(Scale(lam, SquaredDistance(c)), q) == lam * 0.5
        assert evaluate(Scale(lam, Distance(c)), q) == lam * 1.0
