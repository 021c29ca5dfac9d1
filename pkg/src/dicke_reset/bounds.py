"""Inequalities and limits for collective reset, evaluated on simulation output.

Each ``check_*`` returns a :class:`BoundReport`. Hard inequalities are
judged with a relative slack of 1e-9; asymptotic statements are reported
as informational (``hard=False``) with explicit finite-N margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import thermo
from .errors import DomainError, InconsistencyError
from .model import SystemParams

REL_SLACK = 1e-9
ABS_SLACK = 1e-12
WINDOW_MARGIN = 0.10

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not_applicable"


@dataclass(frozen=True)
class BoundReport:
    """Both sides of one inequality; ``margin`` is positive when it holds."""

    name: str
    lhs: float
    rhs: float
    satisfied: bool | None
    margin: float
    context: dict = field(default_factory=dict)
    hard: bool = True

    @property
    def status(self) -> str:
        if self.satisfied is None:
            return NOT_APPLICABLE
        return PASS if self.satisfied else FAIL


def _slack(lhs, rhs):
    return REL_SLACK * max(abs(lhs), abs(rhs)) + ABS_SLACK


def _upper(name, lhs, rhs, context, hard=True):
    """Report for ``lhs <= rhs``."""
    return BoundReport(name, lhs, rhs, bool(lhs <= rhs + _slack(lhs, rhs)), rhs - lhs, context, hard)


def _lower(name, lhs, rhs, context, hard=True):
    """Report for ``lhs >= rhs``."""
    return BoundReport(name, lhs, rhs, bool(lhs >= rhs - _slack(lhs, rhs)), lhs - rhs, context, hard)


def _not_applicable(name, reason, context, hard=True):
    ctx = dict(context, reason=reason)
    return BoundReport(name, math.nan, math.nan, None, math.nan, ctx, hard)


def _context(summary) -> dict:
    return {"N": summary.n_qubits, "protocol": summary.protocol, "tau": summary.tau,
            "beta": summary.beta, "gamma0": summary.gamma0}


def landauer_collective(params: SystemParams, per_qubit: bool = False) -> float:
    """Quasistatic cost ``ln(N + 1) / beta`` of resetting the Dicke register."""
    total = math.log(params.n_qubits + 1) / params.beta
    return total / params.n_qubits if per_qubit else total


def reset_factor_bound(params: SystemParams, single_qubit: bool = False) -> float:
    """Lower bound on the reset factor: ``2 / (beta gamma0 N (N+1)**2)``.

    ``single_qubit=True`` gives the independent-qubit bound ``1 / (beta gamma0)``.
    """
    if single_qubit:
        return 1.0 / (params.beta * params.gamma0)
    n = params.n_qubits
    return 2.0 / (params.beta * params.gamma0 * n * (n + 1) ** 2)


def activity_bound(params: SystemParams) -> float:
    return params.gamma0 * (params.n_qubits + 1) ** 2 / 4.0


def check_speed_limit(traj, summary) -> BoundReport:
    """``D**2 / (2 Sigma <A> tau) <= 1``."""
    ctx = _context(summary)
    d, sigma = summary.distance, summary.entropy_production
    tau = float(traj.times[-1] - traj.times[0])
    if d <= ABS_SLACK:
        return _upper("speed_limit", 0.0, 1.0, ctx)
    denom = 2.0 * sigma * summary.avg_activity * tau
    if denom <= 0:
        raise InconsistencyError(
            f"state moved (D = {d:.3g}) with nonpositive entropy production {sigma:.3g}")
    return _upper("speed_limit", d * d / denom, 1.0, ctx)


def check_distance_bound(summary) -> BoundReport:
    """``D >= 1 - 2 eps`` (equality for a single qubit)."""
    return _lower("distance", summary.distance, 1.0 - 2.0 * summary.epsilon_final, _context(summary))


def check_activity_bound(summary, params: SystemParams) -> BoundReport:
    return _upper("activity", summary.avg_activity, activity_bound(params), _context(summary))


def check_sigma_heat(summary, params: SystemParams) -> BoundReport:
    """Entropy production against ``beta N Q`` (``Q`` per qubit, so ``beta Q_N``)."""
    return _upper("sigma_heat", summary.entropy_production,
                  params.beta * params.n_qubits * summary.heat_per_qubit, _context(summary))


def check_reset_factor(summary, params: SystemParams) -> BoundReport:
    ctx = _context(summary)
    if summary.reset_factor is None:
        return _not_applicable("reset_factor", "eps = 1/2, reset factor undefined", ctx)
    return _lower("reset_factor", summary.reset_factor, reset_factor_bound(params), ctx)


def zeta_coefficient(n_qubits: int) -> float:
    return 2.0 / 3.0 + 1.0 / (3.0 * n_qubits)


def check_zeta_bound(traj) -> BoundReport:
    """Worst sample of ``zeta(t) <= (2/3 + 1/(3N)) eps(t)``.

    Only meaningful for N >= 2 and schedules that never decrease; other
    runs give a not-applicable report.
    """
    params = traj.params
    ctx = {"N": params.n_qubits, "protocol": traj.protocol.kind, "tau": params.tau,
           "beta": params.beta, "gamma0": params.gamma0}
    if params.n_qubits < 2:
        return _not_applicable("zeta", "N = 1: zeta equals eps identically", ctx)
    if not traj.protocol.is_monotone_increasing():
        return _not_applicable("zeta", "protocol is not monotone increasing", ctx)
    lhs = traj.zeta
    rhs = zeta_coefficient(params.n_qubits) * traj.epsilon
    slack = REL_SLACK * np.maximum(np.abs(lhs), np.abs(rhs)) + ABS_SLACK
    k = int(np.argmax(lhs - rhs - slack))
    ctx["t_worst"] = float(traj.times[k])
    return BoundReport("zeta", float(lhs[k]), float(rhs[k]), bool(lhs[k] <= rhs[k] + slack[k]),
                       float(rhs[k] - lhs[k]), ctx)


def asymptotic_window(beta: float, omega: float) -> tuple[float, float]:
    """Limits ``(1, 3) / (exp(beta omega) - 1)`` bracketing ``N eps`` for large N."""
    x = beta * omega
    if x <= 0:
        raise DomainError("asymptotic window diverges at beta * omega = 0")
    return 1.0 / math.expm1(x), 3.0 / math.expm1(x)


def check_asymptotic_window(traj, margin: float = WINDOW_MARGIN) -> BoundReport:
    """``N eps(tau)`` against the large-N window, widened by ``margin`` on both sides.

    Evaluated with ``omega(tau)``. Informational only: a lim inf / lim sup
    statement cannot be falsified at one N, and for time-varying schedules
    the window presumes quasi-stationary balance.
    """
    params = traj.params
    omega = float(traj.protocol(traj.times[-1]))
    ctx = {"N": params.n_qubits, "protocol": traj.protocol.kind, "omega_end": omega,
           "margin": margin}
    if params.beta * omega <= 0:
        return _not_applicable("asymptotic_window", "beta * omega = 0", ctx, hard=False)
    lower, upper = asymptotic_window(params.beta, omega)
    value = params.n_qubits * float(traj.epsilon[-1])
    lo, hi = (1 - margin) * lower, (1 + margin) * upper
    ctx.update(window_lower=lower, window_upper=upper)
    inside = lo <= value <= hi
    return BoundReport("asymptotic_window", value, hi if value > hi else lo, inside,
                       min(value - lo, hi - value), ctx, hard=False)


def asymptotic_window_series(traj) -> np.ndarray:
    """Per-sample ``(t, N eps(t), lower(t), upper(t))`` using ``omega(t)``; rows with omega = 0 are nan."""
    params = traj.params
    omegas = np.asarray(traj.protocol(traj.times), dtype=float)
    x = params.beta * omegas
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.where(x > 0, 1.0 / np.expm1(x), np.nan)
    return np.column_stack([traj.times, params.n_qubits * traj.epsilon, lower, 3 * lower])


def check_all(traj, summary, params: SystemParams, include_window: bool = True) -> list[BoundReport]:
    reports = [
        check_speed_limit(traj, summary),
        check_distance_bound(summary),
        check_activity_bound(summary, params),
        check_reset_factor(summary, params),
        check_sigma_heat(summary, params),
        check_zeta_bound(traj),
    ]
    if include_window:
        reports.append(check_asymptotic_window(traj))
    return reports


def hard_failures(reports) -> list[BoundReport]:
    return [r for r in reports if r.hard and r.satisfied is False]


def distance_equality_gap(summary) -> float:
    """``D - (1 - 2 eps)``; zero for a single qubit."""
    return summary.distance - (1.0 - 2.0 * summary.epsilon_final)
