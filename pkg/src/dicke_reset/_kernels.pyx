# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping kernel for the Dicke birth-death chain.

Same contract as ``_kernels_py.Stepper``: one ESDIRK4(3) step with a
Thomas solve per implicit stage, heat / entropy production / activity
quadratures carried along as augmented components.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, fabs, fmax

from ._tableau import A as _A, B as _B, B_ERR as _B_ERR, GAMMA as _GAMMA, N_STAGES as _NS

cnp.import_array()

cdef enum:
    NS = 6
cdef double LOG_FLOOR = 1e-300


cdef inline void _rates(double beta, double gamma0, double omega, double[::1] deg,
                        double[::1] w_minus, double[::1] w_plus, Py_ssize_t m) noexcept nogil:
    cdef double x = beta * omega, e, down, up
    cdef Py_ssize_t n
    if x >= 0:
        e = exp(-x)
        down = gamma0 / (1.0 + e)
        up = gamma0 * e / (1.0 + e)
    else:
        e = exp(x)
        down = gamma0 * e / (1.0 + e)
        up = gamma0 / (1.0 + e)
    for n in range(m):
        w_minus[n] = deg[n] * down
    for n in range(m - 1):
        w_plus[n] = deg[n + 1] * up
    w_plus[m - 1] = 0.0


cdef inline void _apply(double[::1] p, double[::1] w_minus, double[::1] w_plus,
                        double[::1] out, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t n
    cdef double v
    for n in range(m):
        v = -(w_minus[n] + w_plus[n]) * p[n]
        if n > 0:
            v += w_plus[n - 1] * p[n - 1]
        if n < m - 1:
            v += w_minus[n + 1] * p[n + 1]
        out[n] = v


cdef inline void _stage_rates(double[::1] p, double[::1] dp, double omega, double beta,
                              double[::1] w_minus, double[::1] w_plus, Py_ssize_t m,
                              double* heat, double* ep, double* act) noexcept nogil:
    cdef Py_ssize_t n
    cdef double s_heat = 0.0, s_ep = 0.0, s_act = 0.0, down, up, lo, hi
    cdef double bw = beta * omega
    for n in range(m):
        s_heat += n * dp[n]
        s_act += (w_minus[n] + w_plus[n]) * p[n]
    for n in range(m - 1):
        down = w_minus[n + 1] * p[n + 1]
        up = w_plus[n] * p[n]
        hi = fmax(p[n + 1], LOG_FLOOR)
        lo = fmax(p[n], LOG_FLOOR)
        s_ep += (down - up) * (log(hi) - log(lo) + bw)
    heat[0] = -omega * s_heat
    ep[0] = s_ep
    act[0] = s_act


cdef class Stepper:
    """One-step ESDIRK4(3) kernel; see the pure-Python twin for the contract."""

    cdef readonly int n_qubits
    cdef readonly double beta, gamma0
    cdef readonly str backend
    cdef double[::1] deg, w_minus, w_plus, rhs, y, cp, dp
    cdef double[:, ::1] k, kacc, a
    cdef double[::1] b, b_err

    def __init__(self, n_qubits, beta, gamma0):
        self.n_qubits = int(n_qubits)
        self.beta = float(beta)
        self.gamma0 = float(gamma0)
        self.backend = "cython"
        m = self.n_qubits + 1
        n = np.arange(m, dtype=float)
        self.deg = n * (self.n_qubits - n + 1)
        self.w_minus = np.empty(m)
        self.w_plus = np.empty(m)
        self.rhs = np.empty(m)
        self.y = np.empty(m)
        self.cp = np.empty(m)
        self.dp = np.empty(m)
        self.k = np.empty((NS, m))
        self.kacc = np.empty((NS, 3))
        self.a = np.ascontiguousarray(_A, dtype=float)
        self.b = np.ascontiguousarray(_B, dtype=float)
        self.b_err = np.ascontiguousarray(_B_ERR, dtype=float)

    property deg_array:
        def __get__(self):
            return np.asarray(self.deg)

    def derivatives(self, p, double omega):
        cdef double[::1] pv = np.ascontiguousarray(p, dtype=float)
        cdef Py_ssize_t m = self.n_qubits + 1
        cdef double heat, ep, act
        out = np.empty(m)
        cdef double[::1] ov = out
        _rates(self.beta, self.gamma0, omega, self.deg, self.w_minus, self.w_plus, m)
        _apply(pv, self.w_minus, self.w_plus, ov, m)
        _stage_rates(pv, ov, omega, self.beta, self.w_minus, self.w_plus, m, &heat, &ep, &act)
        return out, heat, ep, act

    def step(self, double[::1] p, double[::1] acc, double h, double[::1] omegas,
             double rtol, double atol, double[::1] p_out, double[::1] acc_out):
        cdef Py_ssize_t m = self.n_qubits + 1
        cdef Py_ssize_t i, j, n, q
        cdef double hg = h * _GAMMA
        cdef double heat, ep, act, denom, sub, sup, e, s, sc, err_sq = 0.0, err_acc = 0.0, r
        cdef double[::1] wm = self.w_minus, wp = self.w_plus, rhs = self.rhs, y = self.y, cp = self.cp
        cdef double[:, ::1] k = self.k, kacc = self.kacc, a = self.a
        with nogil:
            for i in range(NS):
                _rates(self.beta, self.gamma0, omegas[i], self.deg, wm, wp, m)
                if i == 0:
                    for n in range(m):
                        y[n] = p[n]
                else:
                    for n in range(m):
                        s = 0.0
                        for j in range(i):
                            s = s + a[i, j] * k[j, n]
                        rhs[n] = p[n] + h * s
                    # Thomas sweep on (I - h*gamma*W) y = rhs; the matrix is a
                    # column-diagonally-dominant M-matrix, no pivoting needed
                    denom = 1.0 + hg * (wm[0] + wp[0])
                    sup = -hg * wm[1] if m > 1 else 0.0
                    cp[0] = sup / denom
                    y[0] = rhs[0] / denom
                    for n in range(1, m):
                        sub = -hg * wp[n - 1]
                        sup = -hg * wm[n + 1] if n < m - 1 else 0.0
                        denom = 1.0 + hg * (wm[n] + wp[n]) - sub * cp[n - 1]
                        cp[n] = sup / denom
                        y[n] = (rhs[n] - sub * y[n - 1]) / denom
                    for n in range(m - 2, -1, -1):
                        y[n] = y[n] - cp[n] * y[n + 1]
                _apply(y, wm, wp, k[i], m)
                _stage_rates(y, k[i], omegas[i], self.beta, wm, wp, m, &heat, &ep, &act)
                kacc[i, 0] = heat
                kacc[i, 1] = ep
                kacc[i, 2] = act
            for n in range(m):
                s = 0.0
                e = 0.0
                for i in range(NS):
                    s = s + self.b[i] * k[i, n]
                    e = e + self.b_err[i] * k[i, n]
                p_out[n] = p[n] + h * s
                sc = atol + rtol * fmax(fabs(p[n]), fabs(p_out[n]))
                r = h * e / sc
                err_sq = err_sq + r * r
            for q in range(3):
                s = 0.0
                e = 0.0
                for i in range(NS):
                    s = s + self.b[i] * kacc[i, q]
                    e = e + self.b_err[i] * kacc[i, q]
                acc_out[q] = acc[q] + h * s
                sc = atol + rtol * fmax(fabs(acc[q]), fabs(acc_out[q]))
                r = fabs(h * e) / sc
                if r > err_acc:
                    err_acc = r
        return fmax(sqrt(err_sq / m), err_acc)
