"""Pure numpy implementation of the stepping kernel.

Mirrors ``_kernels.pyx`` line for line; used when the compiled extension is
unavailable or when ``DICKE_RESET_BACKEND=python``.
"""

import math

import numpy as np
from scipy.linalg import solve_banded

from ._tableau import A, B, B_ERR, C, GAMMA, N_STAGES

LOG_FLOOR = 1e-300


def _rates(n_qubits, beta, gamma0, omega, deg):
    x = beta * omega
    if x >= 0:
        e = math.exp(-x)
        down = gamma0 / (1.0 + e)
        up = gamma0 * e / (1.0 + e)
    else:
        e = math.exp(x)
        down = gamma0 * e / (1.0 + e)
        up = gamma0 / (1.0 + e)
    w_minus = deg * down
    w_plus = np.empty_like(deg)
    w_plus[:-1] = deg[1:] * up
    w_plus[-1] = 0.0
    return w_minus, w_plus


def _apply(p, w_minus, w_plus):
    out = -(w_minus + w_plus) * p
    out[1:] += w_plus[:-1] * p[:-1]
    out[:-1] += w_minus[1:] * p[1:]
    return out


def _rates_of_state(p, dp, omega, beta, w_minus, w_plus, levels):
    """(heat, entropy production, activity) rates at one stage."""
    heat = -omega * float(levels @ dp)
    down = w_minus[1:] * p[1:]
    up = w_plus[:-1] * p[:-1]
    logs = (np.log(np.maximum(p[1:], LOG_FLOOR)) - np.log(np.maximum(p[:-1], LOG_FLOOR))
            + beta * omega)
    ep = float(np.sum((down - up) * logs))
    act = float((w_minus + w_plus) @ p)
    return heat, ep, act


class Stepper:
    """One-step ESDIRK4(3) kernel for the Dicke birth-death chain.

    Holds the degeneracy factors and scratch space for a fixed register
    size; ``step`` advances populations and the three accumulators
    (heat, entropy production, activity) and returns the weighted error norm.
    """

    backend = "python"

    def __init__(self, n_qubits, beta, gamma0):
        self.n_qubits = int(n_qubits)
        self.beta = float(beta)
        self.gamma0 = float(gamma0)
        n = np.arange(self.n_qubits + 1, dtype=float)
        self.deg = n * (self.n_qubits - n + 1)
        self.levels = n
        self._k = np.empty((N_STAGES, self.n_qubits + 1))
        self._kacc = np.empty((N_STAGES, 3))
        self._ab = np.empty((3, self.n_qubits + 1))

    def derivatives(self, p, omega):
        p = np.asarray(p, dtype=float)
        w_minus, w_plus = _rates(self.n_qubits, self.beta, self.gamma0, omega, self.deg)
        dp = _apply(p, w_minus, w_plus)
        heat, ep, act = _rates_of_state(p, dp, omega, self.beta, w_minus, w_plus, self.levels)
        return dp, heat, ep, act

    def step(self, p, acc, h, omegas, rtol, atol, p_out, acc_out):
        k, kacc, ab = self._k, self._kacc, self._ab
        hg = h * GAMMA
        for i in range(N_STAGES):
            w_minus, w_plus = _rates(self.n_qubits, self.beta, self.gamma0, omegas[i], self.deg)
            if i == 0:
                y = p
            else:
                rhs = p + h * (A[i, :i] @ k[:i])
                ab[0, 0] = 0.0
                ab[0, 1:] = -hg * w_minus[1:]
                ab[1] = 1.0 + hg * (w_minus + w_plus)
                ab[2, :-1] = -hg * w_plus[:-1]
                ab[2, -1] = 0.0
                y = solve_banded((1, 1), ab, rhs, check_finite=False)
            k[i] = _apply(y, w_minus, w_plus)
            kacc[i] = _rates_of_state(y, k[i], omegas[i], self.beta, w_minus, w_plus, self.levels)
        p_out[:] = p + h * (B @ k)
        acc_out[:] = acc + h * (B @ kacc)
        err_p = h * (B_ERR @ k)
        err_acc = h * (B_ERR @ kacc)
        scale = atol + rtol * np.maximum(np.abs(p), np.abs(p_out))
        rms = math.sqrt(float(np.mean((err_p / scale) ** 2)))
        scale_acc = atol + rtol * np.maximum(np.abs(acc), np.abs(acc_out))
        return max(rms, float(np.max(np.abs(err_acc) / scale_acc)))


__all__ = ["Stepper", "C"]
