# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the numpy kernels in ``pure.py``.

Same signatures, same semantics; the win is fusing each gradient pass into a
single sweep over the data matrix with no temporaries. Float results may
differ from the numpy path in the last bits (different summation order), so
cross-backend tests compare with tolerances.
"""

import numpy as np

from libc.math cimport exp, log1p, sqrt

BACKEND = "compiled"


cdef inline double _softplus(double x) noexcept nogil:
    # log(1 + e^x) without overflow
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef double _logistic_pass(const double[:, ::1] X, const double[::1] y,
                           const double[::1] w, double b, double lam,
                           double[::1] gw, double* gb_out, bint want_value) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double m, s, ym, val = 0.0, gb = 0.0
    for j in range(d):
        gw[j] = 0.0
    for i in range(n):
        m = b
        for j in range(d):
            m += X[i, j] * w[j]
        ym = y[i] * m
        if want_value:
            val += _softplus(-ym)
        s = y[i] / (1.0 + exp(ym))  # exp overflow -> s == 0, which is correct
        gb -= s
        for j in range(d):
            gw[j] -= s * X[i, j]
    for j in range(d):
        gw[j] = gw[j] / n + lam * w[j]
    gb_out[0] = gb / n
    if want_value:
        val /= n
        for j in range(d):
            val += 0.5 * lam * w[j] * w[j]
    return val


cdef double _hinge_pass(const double[:, ::1] X, const double[::1] y,
                        const double[::1] w, double b, double lam,
                        double[::1] gw, double* gb_out, bint want_value) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double m, slack, val = 0.0, gb = 0.0
    for j in range(d):
        gw[j] = 0.0
    for i in range(n):
        m = b
        for j in range(d):
            m += X[i, j] * w[j]
        slack = 1.0 - y[i] * m
        if slack > 0.0:
            if want_value:
                val += slack
            gb -= y[i]
            for j in range(d):
                gw[j] -= y[i] * X[i, j]
    for j in range(d):
        gw[j] = gw[j] / n + lam * w[j]
    gb_out[0] = gb / n
    if want_value:
        val /= n
        for j in range(d):
            val += 0.5 * lam * w[j] * w[j]
    return val


def logistic_value_grad(X, y, w, b, lam):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    grad = np.empty_like(w)
    cdef double gb = 0.0
    val = _logistic_pass(X, y, w, float(b), float(lam), grad, &gb, True)
    return float(val), grad, float(gb)


def hinge_value_grad(X, y, w, b, lam):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    grad = np.empty_like(w)
    cdef double gb = 0.0
    val = _hinge_pass(X, y, w, float(b), float(lam), grad, &gb, True)
    return float(val), grad, float(gb)


def logistic_gd(X, y, lam, step, tol, max_iter, w0, b0):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w_arr = np.array(w0, dtype=np.float64, copy=True)
    gw_arr = np.empty_like(w_arr)
    cdef double[:, ::1] Xv = X
    cdef double[::1] yv = y
    cdef double[::1] w = w_arr
    cdef double[::1] gw = gw_arr
    cdef double b = float(b0), lam_c = float(lam), step_c = float(step), tol_c = float(tol)
    cdef Py_ssize_t d = w.shape[0]
    cdef Py_ssize_t it = 0, j
    cdef int max_it = int(max_iter)
    cdef double gb = 0.0, gnorm = 0.0
    with nogil:
        for it in range(1, max_it + 1):
            _logistic_pass(Xv, yv, w, b, lam_c, gw, &gb, False)
            gnorm = gb * gb
            for j in range(d):
                gnorm += gw[j] * gw[j]
            gnorm = sqrt(gnorm)
            if gnorm <= tol_c:
                break
            for j in range(d):
                w[j] -= step_c * gw[j]
            b -= step_c * gb
    return w_arr, float(b), int(it), float(gnorm)


def hinge_subgradient(X, y, lam, eta0, max_iter, w0, b0):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w_arr = np.array(w0, dtype=np.float64, copy=True)
    gw_arr = np.empty_like(w_arr)
    acc_arr = np.zeros_like(w_arr)
    cdef double[:, ::1] Xv = X
    cdef double[::1] yv = y
    cdef double[::1] w = w_arr
    cdef double[::1] gw = gw_arr
    cdef double[::1] w_acc = acc_arr
    cdef double b = float(b0), lam_c = float(lam), eta = float(eta0)
    cdef double b_acc = 0.0, gb = 0.0, gnorm = 0.0, step
    cdef Py_ssize_t d = w.shape[0]
    cdef int max_it = int(max_iter), half = int(max_iter) // 2, t, n_acc = 0
    cdef Py_ssize_t j
    with nogil:
        for t in range(max_it):
            _hinge_pass(Xv, yv, w, b, lam_c, gw, &gb, False)
            gnorm = gb * gb
            for j in range(d):
                gnorm += gw[j] * gw[j]
            gnorm = sqrt(gnorm)
            step = eta / (1.0 + lam_c * eta * t)
            for j in range(d):
                w[j] -= step * gw[j]
            b -= step * gb
            if t >= half:
                for j in range(d):
                    w_acc[j] += w[j]
                b_acc += b
                n_acc += 1
    if n_acc:
        acc_arr /= n_acc
        return acc_arr, float(b_acc / n_acc), int(max_it), float(gnorm)
    return w_arr, float(b), int(max_it), float(gnorm)


def midranks(values):
    """1-based ranks, ties get the mean rank of their run."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = values.shape[0]
    order = np.argsort(values, kind="stable")
    order = np.ascontiguousarray(order, dtype=np.intp)
    ranks = np.empty(n, dtype=np.float64)
    cdef const double[::1] v = values
    cdef const Py_ssize_t[::1] o = order
    cdef double[::1] r = ranks
    cdef Py_ssize_t i = 0, j, run_end
    cdef double mid
    while i < n:
        run_end = i + 1
        while run_end < n and v[o[run_end]] == v[o[i]]:
            run_end += 1
        mid = (i + 1 + run_end) / 2.0  # mean of 1-based ranks i+1..run_end
        for j in range(i, run_end):
            r[o[j]] = mid
        i = run_end
    return ranks


def roc_auc_kernel(scores, labels):
    labels = np.asarray(labels)
    ranks = midranks(scores)
    pos = labels == 1
    n_pos = int(np.count_nonzero(pos))
    n_neg = labels.shape[0] - n_pos
    rank_sum = float(np.sum(ranks[pos]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
