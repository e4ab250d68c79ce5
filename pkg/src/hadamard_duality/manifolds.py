"""Hadamard manifolds: Euclidean space, the hyperboloid, SPD(n), and M x R.

Each manifold exposes a raw array API (``exp``, ``log``, ``inner``, ``dist``,
``flat``, ``sharp``, ``pair`` ...) operating on float64 NumPy arrays in the
ambient chart; solvers use that directly.  The typed layer (:class:`Point`,
:class:`TangentVector`, :class:`CotangentVector`, :class:`BundleElement`)
validates chart invariants and base points at the public boundary.

Cotangent vectors are stored in the same chart as tangent vectors, paired by a
fixed bilinear form: the dot product on R^n, the Minkowski form on the
hyperboloid and ``trace(xi @ Y)`` on SPD(n).
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from . import kernels
from .errors import BaseMismatchError, ChartError, DomainError, ManifoldMismatchError
from .tolerances import DEFAULT

__all__ = [
    "Manifold", "Euclidean", "Hyperboloid", "SPD", "ProductWithLine",
    "Point", "TangentVector", "CotangentVector", "BundleElement",
    "exp", "log", "metric", "norm", "distance", "flat", "sharp", "pairing",
    "geodesic_point", "manifold_from_dict", "point_from_dict",
]

_FAR = 1e8


class Manifold:
    """Base class; subclasses implement the raw chart kernels."""

    kind = None

    def __init__(self, n, tol=DEFAULT):
        n = int(n)
        if n < 1:
            raise ValueError("dimension parameter must be >= 1")
        self.n = n
        self.tol = tol

    # identity --------------------------------------------------------------
    def _key(self):
        return (self.kind, self.n)

    def __eq__(self, other):
        return isinstance(other, Manifold) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}({self.n})"

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}

    # chart -----------------------------------------------------------------
    @property
    def dim(self):
        raise NotImplementedError

    @property
    def shape(self):
        raise NotImplementedError

    def as_array(self, coords):
        x = np.array(coords, dtype=float).reshape(self.shape)
        return np.ascontiguousarray(x)

    def check_point(self, x):
        raise NotImplementedError

    def check_tangent(self, p, X):
        raise NotImplementedError

    def project_tangent(self, p, V):
        return V

    def reference_point(self):
        raise NotImplementedError

    # geometry --------------------------------------------------------------
    def exp(self, p, X):
        raise NotImplementedError

    def log(self, p, q):
        raise NotImplementedError

    def inner(self, p, X, Y):
        raise NotImplementedError

    def dist(self, p, q):
        return self.norm(p, self.log(p, q))

    def norm(self, p, X):
        return math.sqrt(max(self.inner(p, X, X), 0.0))

    def pair(self, xi, X):
        return float(np.sum(xi * X))

    def flat(self, p, X):
        return X.copy()

    def sharp(self, p, xi):
        return xi.copy()

    def zero(self, p):
        return np.zeros_like(p)

    def geodesic(self, p, q, t):
        return self.exp(p, t * self.log(p, q))

    def frame(self, p):
        """Orthonormal basis of T_p M by Gram-Schmidt over the ambient basis."""
        basis = []
        size = int(np.prod(self.shape))
        for i in range(size):
            e = np.zeros(size)
            e[i] = 1.0
            v = self.project_tangent(p, e.reshape(self.shape))
            for b in basis:
                v = v - self.inner(p, v, b) * b
            nv = self.norm(p, v)
            if nv > 1e-8:
                basis.append(v / nv)
            if len(basis) == self.dim:
                break
        return basis

    def ray_cap(self, p, u):
        """Largest t for which exp_p(t u), with u a unit vector, is reliable."""
        return _FAR

    def safe_radius(self, p):
        """A radius below every ``ray_cap(p, u)``."""
        return _FAR

    # sampling --------------------------------------------------------------
    def random_unit(self, rng, p):
        z = rng.standard_normal(self.dim)
        z /= np.linalg.norm(z)
        return sum(zi * e for zi, e in zip(z, self.frame(p)))

    def random_tangent(self, rng, p, radius=1.0):
        """Uniform sample from the tangent ball of the given radius at p."""
        r = radius * rng.uniform() ** (1.0 / self.dim)
        return r * self.random_unit(rng, p)

    def random_point(self, rng, center=None, radius=1.0):
        if center is None:
            center = self.reference_point()
        return self.exp(center, self.random_tangent(rng, center, radius))

    # typed helpers ---------------------------------------------------------
    def point(self, coords, check=True):
        return Point(self, coords, check=check)


class Euclidean(Manifold):
    """R^n with the standard inner product."""

    kind = "euclidean"

    @property
    def dim(self):
        return self.n

    @property
    def shape(self):
        return (self.n,)

    def check_point(self, x):
        if x.shape != self.shape or not np.all(np.isfinite(x)):
            raise ChartError(f"expected a finite vector of length {self.n}")

    def check_tangent(self, p, X):
        self.check_point(X)

    def reference_point(self):
        return np.zeros(self.n)

    def exp(self, p, X):
        return p + X

    def log(self, p, q):
        return q - p

    def inner(self, p, X, Y):
        return float(X @ Y)

    def dist(self, p, q):
        return float(np.linalg.norm(q - p))

    def frame(self, p):
        return list(np.eye(self.n))


class Hyperboloid(Manifold):
    """Hyperbolic n-space as the upper sheet {x : <x,x>_L = -1, x_n > 0}.

    The time-like coordinate is the last one; the metric is the Minkowski form
    restricted to tangent spaces.
    """

    kind = "hyperboloid"

    @property
    def dim(self):
        return self.n

    @property
    def shape(self):
        return (self.n + 1,)

    def check_point(self, x):
        if x.shape != self.shape or not np.all(np.isfinite(x)):
            raise ChartError(f"expected a finite vector of length {self.n + 1}")
        res = abs(kernels.mink_dot(x, x) + 1.0)
        if x[-1] <= 0 or res > self.tol.on_manifold * (1.0 + x @ x):
            raise ChartError("point is not on the upper sheet of the hyperboloid")

    def check_tangent(self, p, X):
        if X.shape != self.shape or not np.all(np.isfinite(X)):
            raise ChartError(f"expected a finite vector of length {self.n + 1}")
        scale = 1.0 + np.linalg.norm(p) * np.linalg.norm(X)
        if abs(kernels.mink_dot(p, X)) > self.tol.on_manifold * scale:
            raise ChartError("vector is not Minkowski-orthogonal to its base point")

    def project_tangent(self, p, V):
        return V + kernels.mink_dot(V, p) * p

    def reference_point(self):
        x = np.zeros(self.n + 1)
        x[-1] = 1.0
        return x

    def exp(self, p, X):
        return kernels.hyp_exp(p, X)

    def log(self, p, q):
        return kernels.hyp_log(p, q, self.tol.acosh_clamp)

    def inner(self, p, X, Y):
        return kernels.mink_dot(X, Y)

    def dist(self, p, q):
        return kernels.hyp_dist(p, q, self.tol.acosh_clamp)

    def pair(self, xi, X):
        return kernels.mink_dot(xi, X)

    def ray_cap(self, p, u):
        # coordinates grow like exp(d(origin, p) + t); keep them far from overflow
        return max(300.0 - math.acosh(max(p[-1], 1.0)), 1.0)

    def safe_radius(self, p):
        return self.ray_cap(p, None)


class SPD(Manifold):
    """Symmetric positive definite n x n matrices, affine-invariant metric.

    ``<X, Y>_A = tr(X A^-1 Y A^-1)``; covectors pair with tangent vectors by
    ``tr(xi Y)``, so ``X^flat = A^-1 X A^-1``.
    """

    kind = "spd"

    @property
    def dim(self):
        return self.n * (self.n + 1) // 2

    @property
    def shape(self):
        return (self.n, self.n)

    def _roots(self, A):
        return _spd_roots(A.tobytes(), self.n, self.tol.spd_min_eig)

    def check_point(self, x):
        if x.shape != self.shape or not np.all(np.isfinite(x)):
            raise ChartError(f"expected a finite {self.n}x{self.n} matrix")
        if np.abs(x - x.T).max() > self.tol.on_manifold * max(1.0, np.abs(x).max()):
            raise ChartError("matrix is not symmetric")
        if np.linalg.eigvalsh(x)[0] <= self.tol.spd_min_eig:
            raise ChartError("matrix is not positive definite")

    def check_tangent(self, p, X):
        if X.shape != self.shape or not np.all(np.isfinite(X)):
            raise ChartError(f"expected a finite {self.n}x{self.n} matrix")
        if np.abs(X - X.T).max() > self.tol.on_manifold * max(1.0, np.abs(X).max()):
            raise ChartError("tangent matrix is not symmetric")

    def as_array(self, coords):
        return np.ascontiguousarray(np.array(coords, dtype=float).reshape(self.shape))

    def project_tangent(self, p, V):
        return 0.5 * (V + V.T)

    def reference_point(self):
        return np.eye(self.n)

    def exp(self, p, X):
        Ah, Aih = self._roots(p)
        return kernels.spd_exp_f(Ah, Aih, np.ascontiguousarray(X))

    def log(self, p, q):
        Ah, Aih = self._roots(p)
        return kernels.spd_log_f(Ah, Aih, np.ascontiguousarray(q), self.tol.spd_min_eig)

    def dist(self, p, q):
        _, Aih = self._roots(p)
        return kernels.spd_dist_f(Aih, np.ascontiguousarray(q), self.tol.spd_min_eig)

    def inner(self, p, X, Y):
        _, Aih = self._roots(p)
        return float(np.sum((Aih @ X @ Aih) * (Aih @ Y @ Aih)))

    def flat(self, p, X):
        _, Aih = self._roots(p)
        Ai = Aih @ Aih
        return Ai @ X @ Ai

    def sharp(self, p, xi):
        return p @ xi @ p

    def ray_cap(self, p, u):
        # exp_p(tu) = A^1/2 expm(t W) A^1/2 with W = A^-1/2 u A^-1/2; keep its
        # eigenvalues inside [e^-12, e^12] and its condition number below e^20
        _, Aih = self._roots(p)
        w = np.linalg.eigvalsh(Aih @ u @ Aih)
        lam = np.log(np.linalg.eigvalsh(p))
        caps = [_FAR]
        if w[0] < 0:
            caps.append(max(_SPD_LOG_BOUND + lam[0], 0.0) / -w[0])
        if w[-1] > 0:
            caps.append(max(_SPD_LOG_BOUND - lam[-1], 0.0) / w[-1])
        spread = w[-1] - w[0]
        if spread > 0:
            caps.append(max(_SPD_LOG_COND - (lam[-1] - lam[0]), 0.0) / spread)
        return min(caps)

    def safe_radius(self, p):
        # a unit tangent has whitened eigenvalues in [-1, 1] and spread <= sqrt(2)
        lam = np.log(np.linalg.eigvalsh(p))
        return max(min(_SPD_LOG_BOUND - np.abs(lam).max(),
                       (_SPD_LOG_COND - (lam[-1] - lam[0])) / math.sqrt(2.0)), 0.0)


_SPD_LOG_BOUND = 12.0
_SPD_LOG_COND = 20.0


@lru_cache(maxsize=512)
def _spd_roots(buf, n, min_eig):
    A = np.frombuffer(buf, dtype=float).reshape(n, n)
    Ah, Aih = kernels.spd_sqrt_pair(np.ascontiguousarray(A), min_eig)
    Ah.flags.writeable = False
    Aih.flags.writeable = False
    return Ah, Aih


class ProductWithLine(Manifold):
    """M x R with the product metric; coordinates are (flattened M chart, r)."""

    kind = "product-with-line"

    def __init__(self, base, tol=None):
        if isinstance(base, ProductWithLine):
            raise ValueError("only a single product with R is supported")
        self.base = base
        super().__init__(base.n, tol or base.tol)
        self._size = int(np.prod(base.shape))

    def _key(self):
        return (self.kind, self.base._key())

    def __repr__(self):
        return f"ProductWithLine({self.base!r})"

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict()}

    @property
    def dim(self):
        return self.base.dim + 1

    @property
    def shape(self):
        return (self._size + 1,)

    def split(self, x):
        return np.ascontiguousarray(x[:-1].reshape(self.base.shape)), float(x[-1])

    def join(self, m, r):
        return np.concatenate([np.ravel(m), [float(r)]])

    def check_point(self, x):
        if x.shape != self.shape:
            raise ChartError("product point has the wrong size")
        m, r = self.split(x)
        self.base.check_point(m)
        if not math.isfinite(r):
            raise ChartError("line coordinate must be finite")

    def check_tangent(self, p, X):
        if X.shape != self.shape:
            raise ChartError("product vector has the wrong size")
        self.base.check_tangent(self.split(p)[0], self.split(X)[0])

    def project_tangent(self, p, V):
        return self.join(self.base.project_tangent(self.split(p)[0], self.split(V)[0]), V[-1])

    def reference_point(self):
        return self.join(self.base.reference_point(), 0.0)

    def exp(self, p, X):
        (pm, pr), (Xm, Xr) = self.split(p), self.split(X)
        return self.join(self.base.exp(pm, Xm), pr + Xr)

    def log(self, p, q):
        (pm, pr), (qm, qr) = self.split(p), self.split(q)
        return self.join(self.base.log(pm, qm), qr - pr)

    def inner(self, p, X, Y):
        pm = self.split(p)[0]
        return self.base.inner(pm, self.split(X)[0], self.split(Y)[0]) + X[-1] * Y[-1]

    def dist(self, p, q):
        (pm, pr), (qm, qr) = self.split(p), self.split(q)
        return math.hypot(self.base.dist(pm, qm), qr - pr)

    def pair(self, xi, X):
        return self.base.pair(self.split(xi)[0], self.split(X)[0]) + xi[-1] * X[-1]

    def flat(self, p, X):
        return self.join(self.base.flat(self.split(p)[0], self.split(X)[0]), X[-1])

    def sharp(self, p, xi):
        return self.join(self.base.sharp(self.split(p)[0], self.split(xi)[0]), xi[-1])

    def frame(self, p):
        e_r = np.zeros(self.shape)
        e_r[-1] = 1.0
        return [self.join(e, 0.0) for e in self.base.frame(self.split(p)[0])] + [e_r]

    def ray_cap(self, p, u):
        um = self.split(u)[0]
        pm = self.split(p)[0]
        s = self.base.norm(pm, um)
        if s < 1e-300:
            return _FAR
        return self.base.ray_cap(pm, um / s) / s

    def safe_radius(self, p):
        return self.base.safe_radius(self.split(p)[0])


_KINDS = {"euclidean": Euclidean, "hyperboloid": Hyperboloid, "spd": SPD}


def manifold_from_dict(d, tol=DEFAULT):
    kind = d["kind"]
    if kind == ProductWithLine.kind:
        return ProductWithLine(manifold_from_dict(d["base"], tol))
    if kind not in _KINDS:
        raise ValueError(f"unknown manifold kind {kind!r}")
    return _KINDS[kind](d["n"], tol)


# -- typed layer -----------------------------------------------------------------

def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    manifold: Manifold
    coords: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        x = _frozen(self.manifold.as_array(self.coords))
        if self.check:
            self.manifold.check_point(x)
        object.__setattr__(self, "coords", x)

    def __eq__(self, other):
        return (isinstance(other, Point) and self.manifold == other.manifold
                and np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash((self.manifold, self.coords.tobytes()))

    def to_dict(self):
        return {"manifold": self.manifold.to_dict(), "coords": self.coords.ravel().tolist()}


def point_from_dict(d, manifold=None):
    m = manifold or manifold_from_dict(d["manifold"])
    return Point(m, d["coords"])


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: Point
    coords: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = self.base.manifold
        X = _frozen(m.as_array(self.coords))
        if self.check:
            m.check_tangent(self.base.coords, X)
        object.__setattr__(self, "coords", X)

    @property
    def manifold(self):
        return self.base.manifold

    def __mul__(self, s):
        return TangentVector(self.base, s * self.coords, check=False)

    __rmul__ = __mul__

    def __add__(self, other):
        _same_base(self.base, other.base)
        return TangentVector(self.base, self.coords + other.coords, check=False)

    def __neg__(self):
        return TangentVector(self.base, -self.coords, check=False)

    def to_dict(self):
        return {"base": self.base.to_dict(), "coords": self.coords.ravel().tolist()}


@dataclass(frozen=True, eq=False)
class CotangentVector:
    base: Point
    coords: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = self.base.manifold
        xi = _frozen(m.as_array(self.coords))
        if self.check:
            m.check_tangent(self.base.coords, xi)
        object.__setattr__(self, "coords", xi)

    @property
    def manifold(self):
        return self.base.manifold

    def __mul__(self, s):
        return CotangentVector(self.base, s * self.coords, check=False)

    __rmul__ = __mul__

    def __add__(self, other):
        _same_base(self.base, other.base)
        return CotangentVector(self.base, self.coords + other.coords, check=False)

    def __neg__(self):
        return CotangentVector(self.base, -self.coords, check=False)

    def to_dict(self):
        return {"base": self.base.to_dict(), "coords": self.coords.ravel().tolist()}


@dataclass(frozen=True, eq=False)
class BundleElement:
    """A point (p, xi) of the cotangent bundle."""

    point: Point
    covector: CotangentVector

    def __post_init__(self):
        _same_base(self.point, self.covector.base)

    @property
    def manifold(self):
        return self.point.manifold

    def to_dict(self):
        return {"point": self.point.to_dict(), "covector": self.covector.coords.ravel().tolist()}


def _same_manifold(p, q):
    if p.manifold != q.manifold:
        raise ManifoldMismatchError(f"{p.manifold!r} vs {q.manifold!r}")


def _same_base(p, q):
    if p is q:
        return
    _same_manifold(p, q)
    if not np.array_equal(p.coords, q.coords):
        raise BaseMismatchError("vectors are attached to different base points")


def exp(p, X):
    """Endpoint of the geodesic leaving ``p`` with velocity ``X``."""
    _same_base(p, X.base)
    return Point(p.manifold, p.manifold.exp(p.coords, X.coords), check=False)


def log(p, q):
    """Initial velocity of the unique geodesic from ``p`` to ``q``."""
    _same_manifold(p, q)
    return TangentVector(p, p.manifold.log(p.coords, q.coords), check=False)


def metric(p, X, Y):
    _same_base(p, X.base)
    _same_base(p, Y.base)
    return p.manifold.inner(p.coords, X.coords, Y.coords)


def norm(v):
    """Riemannian norm of a tangent or cotangent vector."""
    m = v.base.manifold
    if isinstance(v, CotangentVector):
        return m.norm(v.base.coords, m.sharp(v.base.coords, v.coords))
    return m.norm(v.base.coords, v.coords)


def distance(p, q):
    _same_manifold(p, q)
    return p.manifold.dist(p.coords, q.coords)


def flat(X):
    m = X.base.manifold
    return CotangentVector(X.base, m.flat(X.base.coords, X.coords), check=False)


def sharp(xi):
    m = xi.base.manifold
    return TangentVector(xi.base, m.sharp(xi.base.coords, xi.coords), check=False)


def pairing(xi, X):
    """Duality product <xi, X> of a covector and a tangent vector at one base."""
    _same_base(xi.base, X.base)
    return xi.base.manifold.pair(xi.coords, X.coords)


def geodesic_point(p, q, t):
    """gamma(t) on the geodesic from ``p`` (t = 0) to ``q`` (t = 1)."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t = {t} lies outside [0, 1]")
    _same_manifold(p, q)
    if t == 0.0:
        return p
    if t == 1.0:
        return q
    return Point(p.manifold, p.manifold.geodesic(p.coords, q.coords, t), check=False)
