# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled O(N^2) pair kernels.

Row-range contract matches `_reference`: each function fills rows
[row0, row1) of its output from the full input arrays.  Scalar row sums
use Kahan compensation to control cancellation in the alternating-sign
potential values.
"""

from libc.math cimport INFINITY, pow, sqrt

COMPILED = True

# same slack as kernel.HARD_CUTOFF_TOL
cdef double HARD_TOL = 1e-12


cdef inline double wval(double r, double alpha, double beta, bint hard) nogil:
    cdef double attract
    if r == 0.0:
        return 0.0
    if hard:
        if r > 1.0 + HARD_TOL:
            return INFINITY
        return -pow(r, beta) / beta
    attract = pow(r, alpha) / alpha
    if attract == INFINITY and alpha > beta:
        # both power terms overflow for huge separations; attraction wins
        return INFINITY
    return attract - pow(r, beta) / beta


cdef inline double pair_dist(const double[:, ::1] pts, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0, diff
    for k in range(pts.shape[1]):
        diff = pts[i, k] - pts[j, k]
        acc += diff * diff
    return sqrt(acc)


def row_energies(const double[:, ::1] pts, const double[::1] wts,
                 double alpha, double beta, bint hard,
                 double[::1] out, Py_ssize_t row0, Py_ssize_t row1):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j
    cdef double s, comp, term, y, t, wv
    cdef bint blown
    with nogil:
        for i in range(row0, row1):
            s = 0.0
            comp = 0.0
            blown = 0
            for j in range(i + 1, n):
                wv = wval(pair_dist(pts, i, j), alpha, beta, hard)
                if wv == INFINITY:
                    blown = 1
                    break
                term = wts[j] * wv
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            out[i - row0] = INFINITY if blown else 2.0 * wts[i] * s


def power_moment_rows(const double[:, ::1] pts, const double[::1] wts,
                      double p,
                      double[::1] out, Py_ssize_t row0, Py_ssize_t row1):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j
    cdef double s, comp, term, y, t, r
    with nogil:
        for i in range(row0, row1):
            s = 0.0
            comp = 0.0
            for j in range(i + 1, n):
                r = pair_dist(pts, i, j)
                term = 0.0 if r == 0.0 else wts[j] * pow(r, p) / p
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            out[i - row0] = 2.0 * wts[i] * s


def field_gradient_rows(const double[:, ::1] pts, const double[::1] wts,
                        double alpha, double beta,
                        double[:, ::1] out, Py_ssize_t row0, Py_ssize_t row1):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double r, factor
    with nogil:
        for i in range(row0, row1):
            for k in range(d):
                out[i - row0, k] = 0.0
            for j in range(n):
                if j == i:
                    continue
                r = pair_dist(pts, i, j)
                if r == 0.0:
                    continue
                factor = wts[j] * (pow(r, alpha - 2.0) - pow(r, beta - 2.0))
                for k in range(d):
                    out[i - row0, k] += factor * (pts[i, k] - pts[j, k])


def potential_rows(const double[:, ::1] pts, const double[::1] wts,
                   double alpha, double beta, bint hard,
                   const double[:, ::1] targets,
                   double[::1] out, Py_ssize_t t0, Py_ssize_t t1):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t ti, j, k
    cdef double s, comp, term, y, t, acc, diff, wv
    cdef bint blown
    with nogil:
        for ti in range(t0, t1):
            s = 0.0
            comp = 0.0
            blown = 0
            for j in range(n):
                acc = 0.0
                for k in range(d):
                    diff = targets[ti, k] - pts[j, k]
                    acc += diff * diff
                wv = wval(sqrt(acc), alpha, beta, hard)
                if wv == INFINITY:
                    blown = 1
                    break
                term = wts[j] * wv
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            out[ti - t0] = INFINITY if blown else s


def gram_rows(const double[:, ::1] pts,
              double alpha, double beta, bint hard,
              double[:, ::1] out, Py_ssize_t row0, Py_ssize_t row1):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(row0, row1):
            for j in range(n):
                if j == i:
                    out[i - row0, j] = 0.0
                else:
                    out[i - row0, j] = wval(pair_dist(pts, i, j), alpha, beta, hard)
