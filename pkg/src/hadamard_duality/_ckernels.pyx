# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled geometry kernels; same contract as ``_pykernels``."""
import numpy as np

from libc.math cimport sqrt, cosh, sinh, acosh, asinh, log, exp
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_lapack cimport dsyev

from .errors import ChartError


# -- hyperboloid --------------------------------------------------------------

cdef inline double _mink(const double[::1] x, const double[::1] y) noexcept nogil:
    cdef Py_ssize_t i, m = x.shape[0] - 1
    cdef double s = 0.0
    for i in range(m):
        s += x[i] * y[i]
    return s - x[m] * y[m]


def mink_dot(const double[::1] x, const double[::1] y):
    return _mink(x, y)


cdef double _hyp_dist(const double[::1] p, const double[::1] q, double clamp) except -1.0:
    cdef double a = -_mink(p, q), s = 0.0, t
    cdef Py_ssize_t i, m = p.shape[0] - 1
    if a < 2.0:
        for i in range(m):
            t = q[i] - p[i]
            s += t * t
        t = q[m] - p[m]
        s -= t * t
        if s <= 0.0:
            if a < 1.0 - clamp:
                raise ChartError("points are not on the hyperboloid")
            return 0.0
        return 2.0 * asinh(0.5 * sqrt(s))
    return acosh(a)


def hyp_dist(const double[::1] p, const double[::1] q, double clamp):
    return _hyp_dist(p, q, clamp)


def hyp_log(const double[::1] p, const double[::1] q, double clamp):
    cdef Py_ssize_t i, m = p.shape[0]
    cdef double a = -_mink(p, q), d, c
    if a < 1.0:
        if a < 1.0 - clamp:
            raise ChartError("points are not on the hyperboloid")
        a = 1.0
    d = _hyp_dist(p, q, clamp)
    out = np.zeros(m)
    cdef double[::1] o = out
    if d == 0.0:
        return out
    c = d / sinh(d)
    for i in range(m):
        o[i] = c * (q[i] - a * p[i])
    return out


def hyp_exp(const double[::1] p, const double[::1] X):
    cdef Py_ssize_t i, m = p.shape[0] - 1
    cdef double t = _mink(X, X), ch, sh, s = 0.0
    out = np.empty(m + 1)
    cdef double[::1] o = out
    if t <= 0.0:
        for i in range(m + 1):
            o[i] = p[i]
        return out
    t = sqrt(t)
    ch = cosh(t)
    sh = sinh(t) / t
    for i in range(m):
        o[i] = ch * p[i] + sh * X[i]
        s += o[i] * o[i]
    o[m] = sqrt(1.0 + s)
    return out


# -- SPD, affine-invariant metric ---------------------------------------------

cdef int _eigh(double* a, int n, double* w) noexcept nogil:
    # On exit row k of the C-ordered buffer holds eigenvector k.
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int lwork = 8 * n + 8, info = 0
    cdef double* work = <double*> malloc(lwork * sizeof(double))
    dsyev(&jobz, &uplo, &n, a, &n, w, work, &lwork, &info)
    free(work)
    return info


cdef void _matmul(const double* A, const double* B, double* C, int n) noexcept nogil:
    cdef int i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += A[i * n + k] * B[k * n + j]
            C[i * n + j] = s


cdef void _sandwich(const double* L, const double* M, double* out, double* tmp, int n) noexcept nogil:
    # out = sym(L M L) for symmetric L
    cdef int i, j
    cdef double s
    _matmul(L, M, tmp, n)
    _matmul(tmp, L, out, n)
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.5 * (out[i * n + j] + out[j * n + i])
            out[i * n + j] = s
            out[j * n + i] = s


cdef void _apply(const double* V, const double* fw, double* out, int n) noexcept nogil:
    cdef int i, j, k
    cdef double s
    for i in range(n):
        for j in range(i, n):
            s = 0.0
            for k in range(n):
                s += fw[k] * V[k * n + i] * V[k * n + j]
            out[i * n + j] = s
            out[j * n + i] = s


cdef void _sym_copy(const double[:, ::1] M, double* a, int n) noexcept nogil:
    cdef int i, j
    for i in range(n):
        for j in range(n):
            a[i * n + j] = 0.5 * (M[i, j] + M[j, i])


def spd_sqrt_pair(const double[:, ::1] A, double min_eig):
    cdef int n = A.shape[0], k, info
    Ah = np.empty((n, n))
    Aih = np.empty((n, n))
    cdef double[:, ::1] ah = Ah, aih = Aih
    cdef double* a = <double*> malloc(n * n * sizeof(double))
    cdef double* w = <double*> malloc(3 * n * sizeof(double))
    _sym_copy(A, a, n)
    info = _eigh(a, n, w)
    if info != 0 or w[0] <= min_eig:
        k = info
        free(a); free(w)
        raise ChartError("matrix is not positive definite" if k == 0 else "eigensolver failed")
    for k in range(n):
        w[n + k] = sqrt(w[k])
        w[2 * n + k] = 1.0 / w[n + k]
    _apply(a, w + n, &ah[0, 0], n)
    _apply(a, w + 2 * n, &aih[0, 0], n)
    free(a); free(w)
    return Ah, Aih


def spd_log_f(const double[:, ::1] Ah, const double[:, ::1] Aih, const double[:, ::1] B, double min_eig):
    cdef int n = B.shape[0], k, info
    out = np.empty((n, n))
    cdef double[:, ::1] o = out
    cdef double* b = <double*> malloc(n * n * sizeof(double))
    cdef double* m = <double*> malloc(n * n * sizeof(double))
    cdef double* tmp = <double*> malloc(n * n * sizeof(double))
    cdef double* w = <double*> malloc(2 * n * sizeof(double))
    _sym_copy(B, b, n)
    _sandwich(&Aih[0, 0], b, m, tmp, n)
    info = _eigh(m, n, w)
    if info != 0 or w[0] <= min_eig:
        free(b); free(m); free(tmp); free(w)
        raise ChartError("matrix is not positive definite")
    for k in range(n):
        w[n + k] = log(w[k])
    _apply(m, w + n, b, n)
    _sandwich(&Ah[0, 0], b, &o[0, 0], tmp, n)
    free(b); free(m); free(tmp); free(w)
    return out


def spd_exp_f(const double[:, ::1] Ah, const double[:, ::1] Aih, const double[:, ::1] X):
    cdef int n = X.shape[0], k, info
    out = np.empty((n, n))
    cdef double[:, ::1] o = out
    cdef double* x = <double*> malloc(n * n * sizeof(double))
    cdef double* m = <double*> malloc(n * n * sizeof(double))
    cdef double* tmp = <double*> malloc(n * n * sizeof(double))
    cdef double* w = <double*> malloc(2 * n * sizeof(double))
    _sym_copy(X, x, n)
    _sandwich(&Aih[0, 0], x, m, tmp, n)
    info = _eigh(m, n, w)
    if info != 0:
        free(x); free(m); free(tmp); free(w)
        raise ChartError("eigensolver failed")
    for k in range(n):
        w[n + k] = exp(w[k])
    _apply(m, w + n, x, n)
    _sandwich(&Ah[0, 0], x, &o[0, 0], tmp, n)
    free(x); free(m); free(tmp); free(w)
    return out


def spd_dist_f(const double[:, ::1] Aih, const double[:, ::1] B, double min_eig):
    cdef int n = B.shape[0], k, info
    cdef double s = 0.0, lw
    cdef double* b = <double*> malloc(n * n * sizeof(double))
    cdef double* m = <double*> malloc(n * n * sizeof(double))
    cdef double* tmp = <double*> malloc(n * n * sizeof(double))
    cdef double* w = <double*> malloc(n * sizeof(double))
    _sym_copy(B, b, n)
    _sandwich(&Aih[0, 0], b, m, tmp, n)
    info = _eigh(m, n, w)
    if info != 0 or w[0] <= min_eig:
        free(b); free(m); free(tmp); free(w)
        raise ChartError("matrix is not positive definite")
    for k in range(n):
        lw = log(w[k])
        s += lw * lw
    free(b); free(m); free(tmp); free(w)
    return sqrt(s)
