"""Scalar thermodynamic observables of Dicke-level states and reset runs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UndefinedResetFactor
from .model import DickeDistribution

# |1 - 2 eps| below this counts as "no reset progress"
_NO_PROGRESS = 1e-12


def _probs(d) -> np.ndarray:
    if isinstance(d, DickeDistribution):
        return d.p
    return np.asarray(d, dtype=float)


def error_probability(d):
    """Fraction of excited qubits, ``sum_n n p_n / N``.

    Accepts a :class:`DickeDistribution` or an array whose last axis runs
    over levels (so a whole trajectory can be passed at once).
    """
    p = _probs(d)
    n = p.shape[-1] - 1
    out = p @ np.arange(n + 1) / n
    return float(out) if np.ndim(out) == 0 else out


def zeta(d):
    """Normalized second moment ``sum_n n**2 p_n / N**2``."""
    p = _probs(d)
    n = p.shape[-1] - 1
    out = p @ (np.arange(n + 1) ** 2) / n**2
    return float(out) if np.ndim(out) == 0 else out


def one_norm_distance(a, b) -> float:
    pa, pb = _probs(a), _probs(b)
    if pa.shape != pb.shape:
        raise DomainError(f"distributions have different sizes {pa.size} and {pb.size}")
    return float(np.abs(pa - pb).sum())


def shannon_entropy(d) -> float:
    p = _probs(d)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def avg_dynamical_activity(traj) -> float:
    """Time-averaged total jump rate over the run."""
    duration = traj.times[-1] - traj.times[0]
    if duration <= 0:
        raise DomainError("trajectory has zero duration")
    return float(traj.activity[-1] - traj.activity[0]) / duration


def reset_factor(heat_per_qubit: float, tau: float, epsilon: float) -> float:
    """``Q tau / (1 - 2 eps)**2``; smaller means a better reset."""
    progress = 1.0 - 2.0 * epsilon
    if abs(progress) <= _NO_PROGRESS:
        raise UndefinedResetFactor(f"reset factor undefined at eps = {epsilon!r}")
    return heat_per_qubit * tau / progress**2


@dataclass(frozen=True)
class ResetSummary:
    epsilon_final: float
    heat_total: float
    heat_per_qubit: float
    distance: float
    avg_activity: float
    entropy_production: float
    reset_factor: Optional[float]
    # metadata
    n_qubits: int = 0
    protocol: str = ""
    tau: float = float("nan")
    beta: float = float("nan")
    gamma0: float = float("nan")

    @property
    def reset_factor_defined(self) -> bool:
        return self.reset_factor is not None

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(traj, params) -> ResetSummary:
    """Collect the end-of-run observables; ``reset_factor`` is None when eps = 1/2."""
    first, last = traj.probs[0], traj.probs[-1]
    eps = error_probability(last)
    heat_total = float(traj.heat[-1] - traj.heat[0])
    q = heat_total / params.n_qubits
    tau = float(traj.times[-1] - traj.times[0])
    try:
        factor = reset_factor(q, tau, eps)
    except UndefinedResetFactor:
        factor = None
    return ResetSummary(
        epsilon_final=eps,
        heat_total=heat_total,
        heat_per_qubit=q,
        distance=one_norm_distance(last, first),
        avg_activity=avg_dynamical_activity(traj),
        entropy_production=float(traj.entropy_production[-1] - traj.entropy_production[0]),
        reset_factor=factor,
        n_qubits=params.n_qubits,
        protocol=traj.protocol.kind,
        tau=params.tau,
        beta=params.beta,
        gamma0=params.gamma0,
    )


def entropy_balance(traj, params) -> float:
    """Entropy production from the balance ``S(p(tau)) - S(p(0)) + beta Q_N``.

    Independent of the flux-log integral carried by the stepper; the two
    must agree.
    """
    return (shannon_entropy(traj.probs[-1]) - shannon_entropy(traj.probs[0])
            + params.beta * float(traj.heat[-1] - traj.heat[0]))

