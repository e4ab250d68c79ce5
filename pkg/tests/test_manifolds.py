import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadamard_duality import (SPD, BaseMismatchError, ChartError, CotangentVector, DomainError,
                              Euclidean, Hyperboloid, ManifoldMismatchError, Point,
                              ProductWithLine, TangentVector, distance, exp, flat,
                              geodesic_point, log, metric, norm, pairing, sharp)
from hadamard_duality import _pykernels, kernels
from hadamard_duality.manifolds import manifold_from_dict

ORACLE = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())
MANIFOLDS = [Euclidean(3), Hyperboloid(2), Hyperboloid(3), SPD(2), SPD(3),
             ProductWithLine(Hyperboloid(2))]


def _pt(m, coords):
    return Point(m, coords)


# closed-form examples ----------------------------------------------------------

def test_exp_of_zero_vector_is_identity():
    m = Euclidean(2)
    p = _pt(m, [1, 2])
    assert np.array_equal(exp(p, TangentVector(p, [0, 0])).coords, [1, 2])


def test_spd_exp_at_identity_is_matrix_exponential():
    m = SPD(2)
    p = _pt(m, np.eye(2))
    q = exp(p, TangentVector(p, np.diag([math.log(2), 0.0])))
    np.testing.assert_allclose(q.coords, np.diag([2.0, 1.0]), atol=1e-14)


def test_hyperboloid_exp_matches_integrated_geodesic():
    m = Hyperboloid(2)
    for key in ("hyperboloid_exp_unit", "hyperboloid_exp_long"):
        o = ORACLE[key]
        p = _pt(m, o["p"])
        q = exp(p, TangentVector(p, o["X"]))
        np.testing.assert_allclose(q.coords, o["q"], atol=1e-9)
    o = ORACLE["hyperboloid_exp_unit"]
    assert distance(_pt(m, o["p"]), _pt(m, o["q"])) == pytest.approx(1.0, abs=1e-9)


def test_spd_log_examples():
    m = SPD(2)
    I = _pt(m, np.eye(2))
    np.testing.assert_allclose(log(I, _pt(m, np.diag([math.e, 1.0]))).coords, np.diag([1.0, 0.0]),
                               atol=1e-14)
    o = ORACLE["spd_log_diag"]
    np.testing.assert_allclose(log(_pt(m, o["A"]), _pt(m, o["B"])).coords, o["log"], atol=1e-12)
    # A^(1/2) ln(A^(-1/2) B A^(-1/2)) A^(1/2) with A = diag(4,1), B = I
    assert o["log"][0][0] == pytest.approx(-8 * math.log(2), abs=1e-12)


def test_spd_general_pair_against_scipy():
    m = SPD(3)
    o = ORACLE["spd_general"]
    A, B = _pt(m, o["A"]), _pt(m, o["B"])
    np.testing.assert_allclose(log(A, B).coords, o["log"], atol=1e-11)
    assert distance(A, B) == pytest.approx(o["dist"], abs=1e-12)
    np.testing.assert_allclose(geodesic_point(A, B, 0.5).coords, o["mid"], atol=1e-11)


@pytest.mark.parametrize("m", MANIFOLDS, ids=repr)
def test_log_at_self_is_zero_and_distance_zero(m):
    p = _pt(m, m.random_point(np.random.default_rng(1)))
    assert np.abs(log(p, p).coords).max() <= 1e-12
    assert distance(p, p) <= 1e-12


def test_metric_examples():
    s = SPD(2)
    I = _pt(s, np.eye(2))
    X = TangentVector(I, np.diag([1.0, -1.0]))
    assert metric(I, X, X) == pytest.approx(2.0)
    e = Euclidean(2)
    p = _pt(e, [0, 0])
    Y = TangentVector(p, [3, 4])
    assert metric(p, Y, Y) == 25.0


def test_distance_examples():
    o = ORACLE["spd_dist_scalar"]
    s = SPD(2)
    assert distance(_pt(s, o["A"]), _pt(s, o["B"])) == pytest.approx(math.sqrt(8), abs=1e-13)
    assert o["dist"] == pytest.approx(math.sqrt(8), abs=1e-13)
    e = Euclidean(2)
    assert distance(_pt(e, [0, 0]), _pt(e, [3, 4])) == 5.0


def test_geodesic_point_examples():
    e = Euclidean(2)
    a, b = _pt(e, [0, 0]), _pt(e, [2, 0])
    assert geodesic_point(a, b, 0.0) == a and geodesic_point(a, b, 1.0) == b
    np.testing.assert_allclose(geodesic_point(a, b, 0.5).coords, [1, 0])
    s = SPD(2)
    mid = geodesic_point(_pt(s, np.eye(2)), _pt(s, 4 * np.eye(2)), 0.5)
    np.testing.assert_allclose(mid.coords, ORACLE["spd_midpoint"]["mid"], atol=1e-13)
    with pytest.raises(DomainError):
        geodesic_point(a, b, 1.5)


def test_product_with_line():
    m = ProductWithLine(Hyperboloid(2))
    base = Hyperboloid(2).reference_point()
    p0, p3 = _pt(m, np.append(base, 0.0)), _pt(m, np.append(base, 3.0))
    np.testing.assert_allclose(log(p0, p3).coords, [0, 0, 0, 3.0], atol=1e-15)
    assert distance(p0, p3) == pytest.approx(3.0)
    assert m.dim == 3
    assert manifold_from_dict(m.to_dict()) == m


def test_pairing_of_zero_covector_is_zero():
    m = SPD(2)
    p = _pt(m, np.eye(2))
    assert pairing(CotangentVector(p, np.zeros((2, 2))), TangentVector(p, np.diag([1.0, 2.0]))) == 0.0


def test_spd_flat_pairing_trace_identity():
    m = SPD(3)
    rng = np.random.default_rng(4)
    for _ in range(20):
        A = m.random_point(rng, None, 1.5)
        B = m.random_point(rng, None, 1.5)
        lhs = m.pair(m.flat(A, A), m.log(A, B))
        rhs = np.linalg.slogdet(B)[1] - np.linalg.slogdet(A)[1]
        assert lhs == pytest.approx(rhs, abs=1e-10)


# validation --------------------------------------------------------------------

def test_chart_validation():
    with pytest.raises(ChartError):
        Point(Hyperboloid(2), [1.0, 0.0, 1.0])
    with pytest.raises(ChartError):
        Point(SPD(2), [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ChartError):
        Point(SPD(2), [[1.0, 0.5], [0.0, 1.0]])
    h = Hyperboloid(2)
    p = Point(h, [0, 0, 1])
    with pytest.raises(ChartError):
        TangentVector(p, [0, 0, 1])


def test_base_and_manifold_mismatch():
    e = Euclidean(2)
    p, q = Point(e, [0, 0]), Point(e, [1, 0])
    with pytest.raises(BaseMismatchError):
        pairing(CotangentVector(p, [1, 0]), TangentVector(q, [1, 0]))
    with pytest.raises(ManifoldMismatchError):
        distance(p, Point(Euclidean(3), [0, 0, 0]))


def test_unknown_manifold_kind():
    with pytest.raises(ValueError):
        manifold_from_dict({"kind": "sphere", "n": 2})


# properties --------------------------------------------------------------------

@pytest.mark.parametrize("m", MANIFOLDS, ids=repr)
def test_exp_log_roundtrip(m):
    rng = np.random.default_rng(7)
    for _ in range(30):
        p = m.random_point(rng, None, 2.0)
        q = m.random_point(rng, p, 3.0)
        np.testing.assert_allclose(m.exp(p, m.log(p, q)), q, atol=1e-8 * (1 + np.abs(q).max()))
        assert m.norm(p, m.log(p, q)) == pytest.approx(m.dist(p, q), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("m", MANIFOLDS, ids=repr)
def test_flat_sharp_inverse_and_pairing_is_metric(m):
    rng = np.random.default_rng(8)
    p = Point(m, m.random_point(rng, None, 1.0))
    X = TangentVector(p, m.random_tangent(rng, p.coords, 2.0), check=False)
    Y = TangentVector(p, m.random_tangent(rng, p.coords, 2.0), check=False)
    np.testing.assert_allclose(sharp(flat(X)).coords, X.coords, atol=1e-12)
    assert pairing(flat(X), Y) == pytest.approx(metric(p, X, Y), abs=1e-12)
    assert norm(flat(X)) == pytest.approx(norm(X), rel=1e-12)


@pytest.mark.parametrize("m", MANIFOLDS, ids=repr)
def test_frame_is_orthonormal(m):
    p = m.random_point(np.random.default_rng(9), None, 1.0)
    F = m.frame(p)
    G = np.array([[m.inner(p, a, b) for b in F] for a in F])
    assert len(F) == m.dim
    np.testing.assert_allclose(G, np.eye(m.dim), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(MANIFOLDS[:4]))
def test_triangle_inequality_and_symmetry(seed, m):
    rng = np.random.default_rng(seed)
    a, b, c = (m.random_point(rng, None, 2.0) for _ in range(3))
    assert m.dist(a, b) == pytest.approx(m.dist(b, a), rel=1e-9, abs=1e-12)
    assert m.dist(a, c) <= m.dist(a, b) + m.dist(b, c) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_geodesic_splits_distance(seed, t):
    m = SPD(2)
    rng = np.random.default_rng(seed)
    a, b = m.random_point(rng, None, 2.0), m.random_point(rng, None, 2.0)
    g = m.geodesic(a, b, t)
    assert m.dist(a, g) == pytest.approx(t * m.dist(a, b), abs=1e-8)
    assert m.dist(g, b) == pytest.approx((1 - t) * m.dist(a, b), abs=1e-8)


@pytest.mark.parametrize("m", [Hyperboloid(2), SPD(2)], ids=repr)
def test_ray_cap_keeps_points_valid(m):
    rng = np.random.default_rng(10)
    for _ in range(20):
        p = m.random_point(rng, None, 3.0)
        u = m.random_unit(rng, p)
        m.check_point(m.exp(p, 0.999 * m.ray_cap(p, u) * u))
        assert m.safe_radius(p) <= m.ray_cap(p, u) + 1e-9


# backends ----------------------------------------------------------------------

@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
def test_compiled_and_python_kernels_agree():
    rng = np.random.default_rng(11)
    h = Hyperboloid(3)
    for _ in range(50):
        p, q = h.random_point(rng, None, 3.0), h.random_point(rng, None, 3.0)
        X = h.log(p, q)
        assert kernels.hyp_dist(p, q, 1.0) == pytest.approx(_pykernels.hyp_dist(p, q, 1.0), rel=1e-13)
        np.testing.assert_allclose(kernels.hyp_log(p, q, 1.0), _pykernels.hyp_log(p, q, 1.0),
                                   rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(kernels.hyp_exp(p, X), _pykernels.hyp_exp(p, X), rtol=1e-10, atol=1e-11)
    s = SPD(3)
    for _ in range(50):
        A, B = s.random_point(rng, None, 2.0), s.random_point(rng, None, 2.0)
        c = kernels.spd_sqrt_pair(A, 1e-300)
        py = _pykernels.spd_sqrt_pair(A, 1e-300)
        for x, y in zip(c, py):
            np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-12)
        Ah, Aih = py
        np.testing.assert_allclose(kernels.spd_log_f(Ah, Aih, B, 1e-300),
                                   _pykernels.spd_log_f(Ah, Aih, B, 1e-300), atol=1e-10)
        assert kernels.spd_dist_f(Aih, B, 1e-300) == pytest.approx(
            _pykernels.spd_dist_f(Aih, B, 1e-300), rel=1e-10)


def test_environment_switch_selects_fallback():
    import os
    import subprocess
    import sys
    env = {**os.environ, "HADAMARD_DUALITY_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "import hadamard_duality as h; print(h.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("m", MANIFOLDS, ids=repr)
def test_log_inverts_exp_up_to_norm_five(m):
    rng = np.random.default_rng(12)
    for _ in range(30):
        p = m.random_point(rng, None, 1.0)
        X = m.random_tangent(rng, p, 5.0)
        if m.ray_cap(p, X / max(m.norm(p, X), 1e-300)) < m.norm(p, X):
            continue
        err = m.norm(p, m.log(p, m.exp(p, X)) - X)
        assert err <= 1e-7 * (1 + m.norm(p, X))


def test_spd_tiny_eigenvalue_is_a_chart_error():
    with pytest.raises(ChartError):
        Point(SPD(2), np.diag([1.0, 1e-14]))
