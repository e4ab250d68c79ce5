"""Pure-NumPy geometry kernels.

Reference implementation of the hot kernels; ``_ckernels`` mirrors every
function here with identical signatures.  All arrays are float64 and
C-contiguous.
"""
import math

import numpy as np

from .errors import ChartError


# -- hyperboloid --------------------------------------------------------------

def mink_dot(x, y):
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


def hyp_dist(p, q, clamp):
    a = -mink_dot(p, q)
    if a < 2.0:
        # 2 asinh(|q - p|_L / 2) stays accurate for nearly coincident points
        diff = q - p
        s = mink_dot(diff, diff)
        if s <= 0.0:
            if a < 1.0 - clamp:
                raise ChartError("points are not on the hyperboloid")
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(s))
    return math.acosh(a)


def hyp_log(p, q, clamp):
    a = -mink_dot(p, q)
    if a < 1.0:
        if a < 1.0 - clamp:
            raise ChartError("points are not on the hyperboloid")
        a = 1.0
    d = hyp_dist(p, q, clamp)
    if d == 0.0:
        return np.zeros_like(p)
    u = q - a * p
    return (d / math.sinh(d)) * u


def hyp_exp(p, X):
    t = X[:-1] @ X[:-1] - X[-1] * X[-1]
    if t <= 0.0:
        return p.copy()
    t = math.sqrt(t)
    y = math.cosh(t) * p + (math.sinh(t) / t) * X
    # restore the sheet through the time coordinate; stable at any distance
    y[-1] = math.sqrt(1.0 + y[:-1] @ y[:-1])
    return y


# -- SPD, affine-invariant metric ---------------------------------------------

def _sym(M):
    return 0.5 * (M + M.T)


def spd_sqrt_pair(A, min_eig):
    w, V = np.linalg.eigh(A)
    if w[0] <= min_eig:
        raise ChartError(f"matrix is not positive definite (min eigenvalue {w[0]:.3g})")
    s = np.sqrt(w)
    return _sym((V * s) @ V.T), _sym((V / s) @ V.T)


def spd_log_f(Ah, Aih, B, min_eig):
    w, V = np.linalg.eigh(_sym(Aih @ B @ Aih))
    if w[0] <= min_eig:
        raise ChartError(f"matrix is not positive definite (min eigenvalue {w[0]:.3g})")
    return _sym(Ah @ ((V * np.log(w)) @ V.T) @ Ah)


def spd_exp_f(Ah, Aih, X):
    w, V = np.linalg.eigh(_sym(Aih @ X @ Aih))
    return _sym(Ah @ ((V * np.exp(w)) @ V.T) @ Ah)


def spd_dist_f(Aih, B, min_eig):
    w = np.linalg.eigvalsh(_sym(Aih @ B @ Aih))
    if w[0] <= min_eig:
        raise ChartError(f"matrix is not positive definite (min eigenvalue {w[0]:.3g})")
    lw = np.log(w)
    return float(math.sqrt(lw @ lw))
