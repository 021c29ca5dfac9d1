"""Full Hilbert-space reference for small registers.

Integrates the collective-decay Lindblad equation on all ``2**N`` basis
states with scipy's DOP853, independently of the birth-death reduction,
and projects the density matrix back onto the Dicke states so the two
routes can be compared.

Basis convention: bit ``j`` of a basis index is 1 when qubit ``j`` is excited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import IntegratorOptions, integrate
from .errors import DomainError, IntegrationError, IntegrityError
from .model import Protocol, SystemParams, bath_rates

MAX_QUBITS = 8
TRACE_TOL = 1e-8


def _check_size(n_qubits):
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise DomainError(f"oracle supports 1 <= N <= {MAX_QUBITS}, got {n_qubits}")


def excitation_counts(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    return np.array([bin(i).count("1") for i in idx], dtype=float)


def build_operators(n_qubits: int, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian ``omega * (number of excitations)`` and ``L = sum_j sigma_j^-``."""
    _check_size(n_qubits)
    dim = 2**n_qubits
    h = np.diag(omega * excitation_counts(n_qubits)).astype(complex)
    lower = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(n_qubits):
            if i >> j & 1:
                lower[i & ~(1 << j), i] += 1.0
    return h, lower


def dicke_basis(n_qubits: int) -> np.ndarray:
    """Rows are the symmetric states with 0..N excitations."""
    _check_size(n_qubits)
    dim = 2**n_qubits
    basis = np.zeros((n_qubits + 1, dim))
    for n in range(n_qubits + 1):
        members = [sum(1 << j for j in c) for c in combinations(range(n_qubits), n)]
        basis[n, members] = 1.0 / math.sqrt(math.comb(n_qubits, n))
    return basis


def initial_density(n_qubits: int) -> np.ndarray:
    """Equal mixture of the N + 1 Dicke projectors."""
    basis = dicke_basis(n_qubits)
    return (basis.T @ basis / (n_qubits + 1)).astype(complex)


@dataclass(frozen=True)
class FullTrajectory:
    times: np.ndarray
    probs: np.ndarray
    heat: np.ndarray
    leakage: np.ndarray
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float


def integrate_full(params: SystemParams, protocol: Protocol, output_grid=None,
                   rtol: float = 1e-10, atol: float = 1e-12) -> FullTrajectory:
    """Run the Lindblad equation on the full register and project onto Dicke levels.

    Heat released to the bath is accumulated as ``-Tr(d rho/dt H)``.
    """
    n = params.n_qubits
    _check_size(n)
    if not math.isclose(protocol.duration, params.tau, rel_tol=1e-12):
        raise DomainError(f"protocol duration {protocol.duration} != tau {params.tau}")
    dim = 2**n
    counts = excitation_counts(n)
    _, lower = build_operators(n, 1.0)
    raise_ = lower.conj().T
    ldl = raise_ @ lower
    lld = lower @ raise_
    basis = dicke_basis(n)
    # energy differences for the commutator, per unit omega
    gaps = counts[:, None] - counts[None, :]

    def f(t, y):
        rho = y[:-1].reshape(dim, dim)
        omega = float(protocol(t))
        down, up = bath_rates(params.beta, params.gamma0, omega)
        drho = -1j * omega * gaps * rho
        drho += down * (lower @ rho @ raise_ - 0.5 * (ldl @ rho + rho @ ldl))
        drho += up * (raise_ @ rho @ lower - 0.5 * (lld @ rho + rho @ lld))
        heat_rate = -omega * np.real(np.dot(np.diagonal(drho), counts))
        return np.concatenate([drho.ravel(), [heat_rate]])

    grid = np.linspace(0.0, params.tau, 101) if output_grid is None else np.asarray(output_grid, float)
    edges = sorted({0.0, params.tau, *protocol.breakpoints})
    y = np.concatenate([initial_density(n).ravel(), [0.0]])
    ts, ys = [], []
    for a, b in zip(edges, edges[1:]):
        last = b == edges[-1]
        sel = grid[(grid >= a) & ((grid <= b) if last else (grid < b))]
        t_eval = np.union1d(sel, [b])
        sol = solve_ivp(f, (a, b), y, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegrationError(f"full Lindblad integration failed: {sol.message}")
        keep = np.isin(sol.t, sel)
        ts.append(sol.t[keep])
        ys.append(sol.y.T[keep])
        y = sol.y[:, -1]
    ts = np.concatenate(ts)
    ys = np.concatenate(ys)

    probs = np.empty((ts.size, n + 1))
    trace_err = herm_err = 0.0
    min_eig = np.inf
    for k, row in enumerate(ys):
        rho = row[:-1].reshape(dim, dim)
        probs[k] = np.real(np.einsum("ni,ij,nj->n", basis, rho, basis))
        trace_err = max(trace_err, abs(np.trace(rho) - 1.0))
        herm_err = max(herm_err, float(np.abs(rho - rho.conj().T).max()))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()))
    if trace_err > TRACE_TOL or herm_err > TRACE_TOL or min_eig < -TRACE_TOL:
        raise IntegrityError(
            f"density matrix degraded: trace err {trace_err:.2g}, "
            f"hermiticity err {herm_err:.2g}, min eigenvalue {min_eig:.2g}")
    heat = np.real(ys[:, -1])
    return FullTrajectory(ts, probs, heat, 1.0 - probs.sum(axis=1), float(trace_err),
                          herm_err, min_eig)


@dataclass(frozen=True)
class DeviationReport:
    max_population_deviation: float
    heat_deviation: float
    max_leakage: float

    def within(self, tol: float = 1e-6, leakage_tol: float = 1e-8) -> bool:
        return (self.max_population_deviation <= tol and self.heat_deviation <= tol
                and self.max_leakage <= leakage_tol)


def compare(full: FullTrajectory, reduced) -> DeviationReport:
    """Largest population gap over samples and levels, and heat gap at the end."""
    if full.times.shape != reduced.times.shape or not np.allclose(full.times, reduced.times,
                                                                  rtol=0, atol=1e-12):
        raise DomainError("full and reduced trajectories are sampled on different grids")
    if full.probs.shape != reduced.probs.shape:
        raise DomainError("full and reduced trajectories have different level counts")
    dp = float(np.abs(full.probs - reduced.probs).max())
    dq = abs(float(full.heat[-1]) - float(reduced.heat[-1]))
    return DeviationReport(dp, dq, float(np.abs(full.leakage).max()))


def oracle_check(params: SystemParams, protocol: Protocol, n_samples: int = 101,
                 opts=None, backend=None) -> DeviationReport:
    """Run both integrators on a shared grid and compare them."""
    grid = np.linspace(0.0, params.tau, n_samples)
    base = opts or IntegratorOptions()
    reduced = integrate(params, protocol, IntegratorOptions(base.rel_tol, base.abs_tol,
                                                            base.max_steps, grid),
                        backend=backend)
    full = integrate_full(params, protocol, grid)
    return compare(full, reduced)
