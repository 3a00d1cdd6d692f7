# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic coordinate-descent kernel (covariance updates).

Same update order and arithmetic as hdlp._cd_py.lasso_cd_gram, so both
backends produce bit-identical iterates.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def lasso_cd_gram(double[:, ::1] gram, double[::1] q, double[::1] weight,
                  double lam, double[::1] beta, double[::1] gb,
                  int max_sweeps, double tol):
    """Minimize ||y - X b||^2/T + 2*lam*sum_j weight_j*|b_j| in place.

    gram = X'X/T, q = X'y/T, gb = gram @ beta (maintained incrementally),
    beta is the warm start and is overwritten. Returns (sweeps, max_delta).
    """
    cdef Py_ssize_t n = beta.shape[0]
    cdef Py_ssize_t j, k
    cdef int sweep
    cdef double g_jj, b_old, b_new, c, thr, d, max_delta
    cdef double eps = 1e-14

    max_delta = 0.0
    for sweep in range(max_sweeps):
        max_delta = 0.0
        for j in range(n):
            g_jj = gram[j, j]
            if g_jj <= eps:
                continue  # degenerate column, coefficient frozen at 0
            b_old = beta[j]
            c = q[j] - gb[j] + g_jj * b_old
            thr = lam * weight[j]
            if c > thr:
                b_new = (c - thr) / g_jj
            elif c < -thr:
                b_new = (c + thr) / g_jj
            else:
                b_new = 0.0
            d = b_new - b_old
            if d != 0.0:
                beta[j] = b_new
                for k in range(n):
                    gb[k] += gram[k, j] * d
                if d < 0.0:
                    d = -d
                if d > max_delta:
                    max_delta = d
        if max_delta < tol:
            return sweep + 1, max_delta
    return max_sweeps, max_delta
