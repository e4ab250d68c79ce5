"""Recompute the frozen reference values in values.json.

Nothing here imports hadamard_duality: every number comes from a different
route than the library (ODE integration, scipy.linalg matrix functions, grid
search, bisection).  Run ``python3 tests/oracles/generate.py`` to refresh.
"""
import json
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, logm, sqrtm
from scipy.optimize import brentq

OUT = Path(__file__).with_name("values.json")


def minkowski(x, y):
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


def hyperboloid_exp_ode(p, X):
    """Integrate x'' = <x', x'>_L x on the hyperboloid from (p, X) over t in [0, 1]."""
    n = len(p)

    def rhs(_, y):
        x, v = y[:n], y[n:]
        return np.concatenate([v, minkowski(v, v) * x])

    sol = solve_ivp(rhs, (0.0, 1.0), np.concatenate([p, X]), rtol=1e-12, atol=1e-13)
    return sol.y[:n, -1]


def spd_log(A, B):
    Ah = np.real(sqrtm(A))
    Aih = np.linalg.inv(Ah)
    return np.real(Ah @ logm(Aih @ B @ Aih) @ Ah)


def spd_dist(A, B):
    Aih = np.linalg.inv(np.real(sqrtm(A)))
    return float(np.linalg.norm(np.real(logm(Aih @ B @ Aih)), "fro"))


def geometric_mean(A, B):
    Ah = np.real(sqrtm(A))
    Aih = np.linalg.inv(Ah)
    return np.real(Ah @ sqrtm(Aih @ B @ Aih) @ Ah)


def ball_support_grid(exp_at, pair_with_log, r, k=2001):
    """sup over the ball of <xi, log_p q>, scanning exp_p of scaled frame vectors.

    The objective is linear in the normal coordinates, so only the boundary
    circle matters; the scan still samples radii to stay a plain grid search.
    """
    best = -np.inf
    for theta in np.linspace(0.0, 2 * np.pi, k):
        for rho in np.linspace(0.0, r, 5):
            best = max(best, pair_with_log(exp_at(rho * np.cos(theta), rho * np.sin(theta))))
    return best


def main():
    out = {}

    # hyperboloid exp of a unit vector at the apex, integrated
    p = np.array([0.0, 0.0, 1.0])
    X = np.array([0.6, 0.8, 0.0])
    q = hyperboloid_exp_ode(p, X)
    out["hyperboloid_exp_unit"] = {"p": p.tolist(), "X": X.tolist(), "q": q.tolist(),
                                   "dist": float(np.arccosh(-minkowski(p, q)))}
    # a longer, off-apex vector
    p2 = np.array([0.3, -0.2, np.sqrt(1 + 0.13)])
    V = np.array([1.1, 0.4, 0.0])
    V = V + minkowski(V, p2) * p2  # project to T_p
    out["hyperboloid_exp_long"] = {"p": p2.tolist(), "X": V.tolist(),
                                   "q": hyperboloid_exp_ode(p2, V).tolist()}

    # spd log / distance / midpoint via scipy.linalg
    A, B = np.diag([4.0, 1.0]), np.eye(2)
    out["spd_log_diag"] = {"A": A.tolist(), "B": B.tolist(), "log": spd_log(A, B).tolist()}
    out["spd_dist_scalar"] = {"A": np.eye(2).tolist(), "B": (np.e ** 2 * np.eye(2)).tolist(),
                              "dist": spd_dist(np.eye(2), np.e ** 2 * np.eye(2))}
    out["spd_midpoint"] = {"A": np.eye(2).tolist(), "B": (4 * np.eye(2)).tolist(),
                           "mid": geometric_mean(np.eye(2), 4 * np.eye(2)).tolist()}
    A3 = np.array([[2.0, 0.5, 0.1], [0.5, 1.5, -0.3], [0.1, -0.3, 1.0]])
    B3 = np.array([[1.0, -0.2, 0.0], [-0.2, 3.0, 0.4], [0.0, 0.4, 0.7]])
    out["spd_general"] = {"A": A3.tolist(), "B": B3.tolist(), "log": spd_log(A3, B3).tolist(),
                          "dist": spd_dist(A3, B3), "mid": geometric_mean(A3, B3).tolist()}

    # indicator-ball conjugate at its center: hyperboloid apex and spd identity
    r = 0.8
    xi_h = np.array([0.3, -0.4, 0.0])  # at the apex the metric is the Euclidean one on the first two coords

    def hexp(a, b):
        v = np.array([a, b, 0.0])
        nv = np.hypot(a, b)
        return p if nv == 0 else np.cosh(nv) * p + np.sinh(nv) * v / nv

    def hpair(qq):
        d = np.arccosh(max(-minkowski(p, qq), 1.0))
        u = qq + minkowski(p, qq) * p
        nu = np.sqrt(max(minkowski(u, u), 0.0))
        logv = np.zeros(3) if nu == 0 else d * u / nu
        return float(xi_h[:2] @ logv[:2])

    out["indicator_ball_hyperboloid"] = {"center": p.tolist(), "radius": r, "xi": xi_h.tolist(),
                                         "value": ball_support_grid(hexp, hpair, r)}
    # spd(2) at I: frame diag(1,0), diag(0,1), offdiag/sqrt2; covector coords g
    g = np.array([0.5, -0.2, 0.3])
    E = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.array([[0, 1], [1, 0]]) / np.sqrt(2)]

    def sexp(a, b):
        # scan a 2-D slice containing the maximizing direction g/|g|
        u1 = g / np.linalg.norm(g)
        u2 = np.cross(u1, [1.0, 0.0, 0.0])
        u2 /= np.linalg.norm(u2)
        c = a * u1 + b * u2
        return expm(sum(ci * Ei for ci, Ei in zip(c, E)))

    def spair(Q):
        L = np.real(logm(Q))
        return float(sum(gi * np.trace(Ei @ L) for gi, Ei in zip(g, E)))

    out["indicator_ball_spd"] = {"radius": r, "frame_coords": g.tolist(),
                                 "value": ball_support_grid(sexp, spair, r, k=721)}

    # 1-D epigraph projections
    # F = x^2/2, (2, 0): stationarity of (x-2)^2 + (x^2/2)^2  ->  x - 2 + x^3/2 = 0
    x = brentq(lambda t: t - 2 + 0.5 * t ** 3, 0.0, 2.0, xtol=1e-15)
    out["epigraph_half_square"] = {"x": 2.0, "s": 0.0, "proj": [x, 0.5 * x * x]}
    # F = |x|, (0, -1): the epigraph is the cone s >= |x|; nearest point is the apex
    xs = np.linspace(-2, 2, 40001)
    dists = np.minimum((xs - 0) ** 2 + (np.abs(xs) + 1) ** 2, np.inf)
    i = int(np.argmin(dists))
    out["epigraph_abs"] = {"x": 0.0, "s": -1.0, "proj": [float(xs[i]), float(abs(xs[i]))]}
    # F = |x|^2/2 on R^2 at p = 0, s = -1: radial symmetry, brute-force grid in x
    xs = np.linspace(0, 2, 200001)
    dd = xs ** 2 + (0.5 * xs ** 2 + 1) ** 2
    i = int(np.argmin(dd))
    out["minorant_half_square"] = {"p": [0.0, 0.0], "s": -1.0, "proj_height": float(0.5 * xs[i] ** 2),
                                   "proj_dist": float(xs[i])}

    # closest pair of hyperboloid balls: along the center geodesic
    c1 = np.array([0.0, 0.0, 1.0])
    c2 = np.array([np.sinh(3.0), 0.0, np.cosh(3.0)])
    out["hyperboloid_closest_pair"] = {"c1": c1.tolist(), "c2": c2.tolist(), "r1": 0.5, "r2": 0.7,
                                       "gap": 3.0 - 0.5 - 0.7}

    OUT.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
