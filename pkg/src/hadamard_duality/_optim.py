"""Local optimization in normal coordinates.

Points near a base point p are parametrized by ``q = exp_p(sum_k a_k e_k)``
with ``e_k`` an orthonormal frame of T_p M.  In this chart ``d(p, q) = |a|``
and ``<xi, log_p q> = sum_k a_k <xi, e_k>`` hold exactly, which is what makes
it the natural chart for conjugates and projections.
"""
import math
import warnings

import numpy as np
from scipy.optimize import minimize


class NormalChart:
    def __init__(self, manifold, p):
        self.m = manifold
        self.p = p
        self.frame = manifold.frame(p)
        self.dim = len(self.frame)
        self._E = np.stack([e.ravel() for e in self.frame])
        # chart radius: exp_p stays numerically reliable inside this ball
        self.cap = manifold.safe_radius(p)

    def vector(self, a):
        return (np.asarray(a) @ self._E).reshape(self.m.shape)

    def point(self, a):
        a = np.asarray(a, float)
        r = math.sqrt(a @ a)
        if r > self.cap:
            a = a * (self.cap / r)
        return self.m.exp(self.p, self.vector(a))

    def coords(self, x):
        X = self.m.log(self.p, x)
        return np.array([self.m.inner(self.p, X, e) for e in self.frame])

    def covector_coords(self, xi):
        """Components <xi, e_k>, so that <xi, log_p exp_p(a)> = a . g."""
        return np.array([self.m.pair(xi, e) for e in self.frame])


def fd_gradient(f, a, h=None):
    """Central differences; one-sided where one side is not finite."""
    a = np.asarray(a, float)
    if h is None:
        h = 1e-5 * (1.0 + np.linalg.norm(a))
    g = np.empty_like(a)
    f0 = None
    for k in range(a.size):
        e = np.zeros_like(a)
        e[k] = h
        fp, fm = f(a + e), f(a - e)
        if math.isfinite(fp) and math.isfinite(fm):
            g[k] = (fp - fm) / (2 * h)
        else:
            if f0 is None:
                f0 = f(a)
            if math.isfinite(fp):
                g[k] = (fp - f0) / h
            elif math.isfinite(fm):
                g[k] = (f0 - fm) / h
            else:
                g[k] = 0.0
    return g


class _Stalled(Exception):
    pass


def slsqp(fun, a0, constraints=(), radius=None, maxiter=300, ftol=1e-15, patience=12):
    """Minimize ``fun`` subject to ``g(a) <= 0`` for each g, and |a| <= radius.

    Gradients come from central differences.  Returns the final iterate; the
    caller re-evaluates and validates it.
    """
    cons = [{"type": "ineq", "fun": (lambda a, g=g: -g(a)),
             "jac": (lambda a, g=g: -fd_gradient(g, a))} for g in constraints]
    if radius is not None:
        r2 = radius * radius
        cons.append({"type": "ineq", "fun": lambda a: (r2 - a @ a) / max(r2, 1.0),
                     "jac": lambda a: -2 * a / max(r2, 1.0)})
    history = []
    best = [np.asarray(a0, float)]

    def stop_on_stall(xk):
        # nonsmooth objectives make SLSQP crawl at a kink; stop once it stalls
        history.append(fun(xk))
        best[0] = np.array(xk)
        if len(history) > patience:
            old = history[-patience - 1]
            if old - history[-1] <= 1e-13 * (1.0 + abs(old)):
                raise _Stalled

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            res = minimize(fun, np.asarray(a0, float), jac=lambda a: fd_gradient(fun, a),
                           method="SLSQP", constraints=cons, callback=stop_on_stall,
                           options={"maxiter": maxiter, "ftol": ftol})
            x, nit = res.x, res.nit
        except _Stalled:
            x, nit = best[0], len(history)
    if not np.all(np.isfinite(x)):
        return np.asarray(a0, float), nit
    return x, nit
