"""Time integration of the Dicke birth-death master equation.

The populations obey a tridiagonal, time-dependent linear system whose
fastest rates grow like ``gamma0 (N + 1)**2 / 4``. :func:`integrate`
drives an L-stable ESDIRK4(3) stepper (compiled when available, see
:mod:`dicke_reset.kernels`) with embedded error control; heat, entropy
production and dynamical activity are integrated as extra components
under the same control.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from . import thermo
from ._tableau import C, ERR_ORDER
from .errors import DomainError, IntegrationError, IntegrityError
from .kernels import get_stepper
from .model import (NEG_TOL, NORM_TOL, DickeDistribution, Protocol, RateSet,
                    SystemParams, build_rates, initial_state)

_SAFETY = 0.9
_GROW_MAX = 5.0
_SHRINK_MIN = 0.2


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_steps: int = 500_000
    output_grid: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if int(self.max_steps) < 1:
            raise DomainError("max_steps must be >= 1")
        if self.output_grid is not None:
            grid = tuple(float(t) for t in self.output_grid)
            if any(b < a for a, b in zip(grid, grid[1:])):
                raise DomainError("output_grid must be sorted")
            object.__setattr__(self, "output_grid", grid)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of one reset run.

    ``probs[k]`` holds the populations at ``times[k]``; ``heat``,
    ``entropy_production`` and ``activity`` are the running integrals
    (heat released to the bath, Schnakenberg entropy production and the
    expected number of jumps).
    """

    params: SystemParams
    protocol: Protocol
    times: np.ndarray
    probs: np.ndarray
    heat: np.ndarray
    entropy_production: np.ndarray
    activity: np.ndarray
    n_accepted: int = 0
    n_rejected: int = 0
    backend: str = ""

    @property
    def n_qubits(self) -> int:
        return self.params.n_qubits

    @property
    def epsilon(self) -> np.ndarray:
        return thermo.error_probability(self.probs)

    @property
    def zeta(self) -> np.ndarray:
        return thermo.zeta(self.probs)

    @property
    def states(self) -> list:
        return [DickeDistribution(self.n_qubits, p) for p in self.probs]

    def state_at(self, index: int) -> DickeDistribution:
        return DickeDistribution(self.n_qubits, self.probs[index])

    @property
    def final_state(self) -> DickeDistribution:
        return self.state_at(-1)

    @property
    def heat_acc(self):
        return self.heat

    @property
    def ep_acc(self):
        return self.entropy_production

    @property
    def activity_integral(self):
        return self.activity


def rhs(p, rates: RateSet) -> np.ndarray:
    """Time derivative of the level populations for fixed rates."""
    p = np.asarray(p.p if isinstance(p, DickeDistribution) else p, dtype=float)
    w_minus, w_plus = rates.w_minus, rates.w_plus
    if p.shape != w_minus.shape:
        raise DomainError(f"population vector of length {p.size} does not match "
                          f"rates for {w_minus.size} levels")
    # p[-1] = p[N+1] = 0 at the chain ends
    gain_from_below = np.concatenate(([0.0], w_plus[:-1] * p[:-1]))
    gain_from_above = np.concatenate((w_minus[1:] * p[1:], [0.0]))
    return gain_from_below + gain_from_above - (w_minus + w_plus) * p


def _initial_step(params: SystemParams, opts: IntegratorOptions) -> float:
    fastest = params.gamma0 * (params.n_qubits + 1) ** 2 / 4.0
    return min(params.tau * 1e-2, 1e-3 * opts.rel_tol ** (1.0 / (ERR_ORDER + 1)) / fastest * 10)


def integrate(params: SystemParams, protocol: Protocol,
              opts: IntegratorOptions | None = None, *,
              p0=None, t0: float = 0.0, backend: str | None = None) -> Trajectory:
    """Integrate populations and accumulators from ``t0`` (default 0) to ``tau``.

    Starts from the uniform state unless ``p0`` is given. When
    ``opts.output_grid`` is set, the stepper lands exactly on those times
    and only they (plus the end points) are recorded; otherwise every
    accepted step is kept.

    Raises
    ------
    IntegrationError
        Step size underflow or ``max_steps`` exhausted; ``exc.partial`` holds
        the samples so far.
    IntegrityError
        Normalization drift beyond 1e-9 or populations below -1e-12.
    """
    opts = opts or IntegratorOptions()
    if not math.isclose(protocol.duration, params.tau, rel_tol=1e-12):
        raise DomainError(f"protocol duration {protocol.duration} != tau {params.tau}")
    tau = params.tau
    if not 0.0 <= t0 < tau:
        raise DomainError(f"start time {t0} outside [0, {tau})")
    n = params.n_qubits
    if p0 is None:
        p = initial_state(n).p.copy()
    else:
        p = np.array(p0.p if isinstance(p0, DickeDistribution) else p0, dtype=float)
        DickeDistribution(n, p)

    grid = None
    if opts.output_grid is not None:
        grid = np.array([t for t in opts.output_grid if t0 <= t <= tau], dtype=float)
    stops = {tau}
    stops.update(b for b in protocol.breakpoints if t0 < b < tau)
    if grid is not None:
        stops.update(float(t) for t in grid if t > t0)
    stops = np.array(sorted(stops))
    record_at = set(grid.tolist()) if grid is not None else None

    stepper = get_stepper(backend)(n, params.beta, params.gamma0)
    acc = np.zeros(3)
    p_new = np.empty_like(p)
    acc_new = np.empty(3)
    times, probs, accs = [t0], [p.copy()], [acc.copy()]

    def partial():
        return _assemble(params, protocol, times, probs, accs, n_acc, n_rej, stepper)

    t = t0
    h = _initial_step(params, opts)
    h_min = 1e-14 * tau
    n_acc = n_rej = 0
    stop_idx = 0
    rtol, atol = opts.rel_tol, opts.abs_tol
    expo = -1.0 / (ERR_ORDER + 1)
    while t < tau:
        while stops[stop_idx] <= t:
            stop_idx += 1
        target = stops[stop_idx]
        remaining = target - t
        landing = h >= remaining * (1 - 1e-12)
        step = remaining if landing else h
        omegas = np.asarray(protocol(t + C * step), dtype=float)
        err = stepper.step(p, acc, step, omegas, rtol, atol, p_new, acc_new)
        if not np.isfinite(err):
            err = np.inf
        if err <= 1.0:
            n_acc += 1
            t = target if landing else t + step
            p, p_new = p_new, p
            acc, acc_new = acc_new, acc
            if record_at is None or (landing and t in record_at) or t >= tau:
                times.append(t)
                probs.append(p.copy())
                accs.append(acc.copy())
                _check_integrity(p, t, partial)
        else:
            n_rej += 1
        factor = _GROW_MAX if err == 0 else min(_GROW_MAX, max(_SHRINK_MIN, _SAFETY * err ** expo))
        if err > 1.0:
            factor = min(factor, 0.9)
        # a step truncated to land on a stop says little about the natural size
        h = max(h, step * factor) if landing and err <= 1.0 else step * factor
        if t < tau and h < h_min:
            raise IntegrationError(f"step size underflow at t = {t:.6g} (h = {h:.3g})", partial())
        if n_acc + n_rej >= opts.max_steps:
            raise IntegrationError(f"max_steps = {opts.max_steps} exceeded at t = {t:.6g}", partial())
    return partial()


def _check_integrity(p, t, partial):
    drift = abs(p.sum() - 1.0)
    if drift > NORM_TOL:
        raise IntegrityError(f"normalization drift {drift:.3g} at t = {t:.6g}", partial())
    low = p.min()
    if low < -NEG_TOL:
        raise IntegrityError(f"population {low:.3g} below -{NEG_TOL:g} at t = {t:.6g}", partial())


def _assemble(params, protocol, times, probs, accs, n_acc, n_rej, stepper) -> Trajectory:
    acc = np.array(accs)
    arrays = dict(times=np.array(times), probs=np.array(probs), heat=acc[:, 0].copy(),
                  entropy_production=acc[:, 1].copy(), activity=acc[:, 2].copy())
    for arr in arrays.values():
        arr.setflags(write=False)
    return Trajectory(params, protocol, n_accepted=n_acc, n_rejected=n_rej,
                      backend=stepper.backend, **arrays)


def zeta_interpolant(traj: Trajectory) -> Callable[[float], float]:
    """Cubic spline through the sampled second moment of the run."""
    return CubicSpline(traj.times, traj.zeta)


def integrate_epsilon_ode(params: SystemParams, protocol: Protocol,
                          zeta_source: Callable[[float], float],
                          opts: IntegratorOptions | None = None) -> Callable[[float], float]:
    """Integrate the scalar error-probability equation with an external second moment.

    ``d eps/dt = (gamma0 - delta)/2 - gamma0 eps - N delta (eps - zeta)``,
    ``delta = gamma0 tanh(beta omega / 2)``, from ``eps(0) = 1/2``. Uses
    scipy's Radau, independent of the population stepper, so it serves as a
    cross-check on ``error_probability`` of the full run.
    """
    opts = opts or IntegratorOptions()
    n, g0, beta = params.n_qubits, params.gamma0, params.beta

    def f(t, y):
        delta = g0 * math.tanh(0.5 * beta * float(protocol(t)))
        eps = y[0]
        return [0.5 * (g0 - delta) - g0 * eps - n * delta * (eps - float(zeta_source(t)))]

    def jac(t, y):
        delta = g0 * math.tanh(0.5 * beta * float(protocol(t)))
        return [[-g0 - n * delta]]

    edges = [0.0, *protocol.breakpoints, params.tau]
    pieces = []
    y0 = [0.5]
    for a, b in zip(edges, edges[1:]):
        sol = solve_ivp(f, (a, b), y0, method="Radau", jac=jac, dense_output=True,
                        rtol=min(opts.rel_tol, 1e-10), atol=min(opts.abs_tol, 1e-13))
        if not sol.success:
            raise IntegrationError(f"epsilon ODE failed: {sol.message}")
        pieces.append((b, sol.sol))
        y0 = [sol.y[0, -1]]

    def epsilon(t):
        for end, piece in pieces:
            if t <= end:
                return float(piece(t)[0])
        if t <= params.tau * (1 + 1e-12):
            return float(pieces[-1][1](params.tau)[0])
        raise DomainError(f"t = {t} outside [0, {params.tau}]")

    return epsilon


def write_trajectory_csv(traj: Trajectory, path, emit_states: bool = False) -> None:
    """Columns: t, [p_0..p_N], epsilon, zeta, heat_acc, ep_acc, activity_integral."""
    header = ["t"]
    if emit_states:
        header += [f"p_{k}" for k in range(traj.n_qubits + 1)]
    header += ["epsilon", "zeta", "heat_acc", "ep_acc", "activity_integral"]
    eps, zet = traj.epsilon, traj.zeta
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k, t in enumerate(traj.times):
            row = [t]
            if emit_states:
                row += list(traj.probs[k])
            row += [eps[k], zet[k], traj.heat[k], traj.entropy_production[k], traj.activity[k]]
            writer.writerow([fmt(v) for v in row])


def read_trajectory_csv(path) -> dict:
    """Column name -> numpy array for a file written by :func:`write_trajectory_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    return {name: rows[:, j] for j, name in enumerate(header)}


def fmt(value) -> str:
    """Fixed 12-significant-digit formatting used by every CSV writer."""
    return format(float(value), ".12g")
