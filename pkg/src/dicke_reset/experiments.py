"""Parameter sweeps behind the scaling, heat and reset-factor studies."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bounds, thermo
from .dynamics import IntegratorOptions, fmt, integrate
from .errors import DickeResetError, DomainError
from .model import Linear, Protocol, SystemParams, figure_protocols

DEFAULT_N_VALUES = tuple(2**k for k in range(11))  # 1 .. 1024
FIT_MIN_N = 64
PERFECT_RESET_EPS = 1e-4


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple
    protocols: dict
    params_base: SystemParams
    options: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_values)
        if not ns or any(n < 1 for n in ns) or list(ns) != sorted(ns):
            raise DomainError("n_values must be a non-empty sorted list of positive integers")
        if not self.protocols:
            raise DomainError("sweep needs at least one protocol")
        object.__setattr__(self, "n_values", ns)


def figure_spec(params_base: SystemParams | None = None,
                n_values: Sequence[int] = DEFAULT_N_VALUES,
                options: IntegratorOptions | None = None) -> SweepSpec:
    """Three reference protocols at beta = gamma0 = tau = 1 unless overridden."""
    base = params_base or SystemParams(1, 1.0, 1.0, 1.0)
    return SweepSpec(tuple(n_values), figure_protocols(base), base,
                     options or IntegratorOptions())


@dataclass(frozen=True)
class SweepRow:
    n_qubits: int
    protocol: str
    summary: Optional[thermo.ResetSummary]
    reports: tuple = ()
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_point(args) -> SweepRow:
    params, name, protocol, options = args
    try:
        traj = integrate(params, protocol, options)
        summary = thermo.summarize(traj, params)
        reports = tuple(bounds.check_all(traj, summary, params))
    except DickeResetError as exc:
        return SweepRow(params.n_qubits, name, None, (), f"{type(exc).__name__}: {exc}")
    return SweepRow(params.n_qubits, name, summary, reports)


def sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    """One row per (N, protocol), ordered by protocol then N.

    ``workers > 1`` runs points in a process pool; failures are recorded on
    the row and the sweep carries on.
    """
    jobs = []
    for name, protocol in spec.protocols.items():
        for n in spec.n_values:
            jobs.append((spec.params_base.with_n(n), name, protocol, spec.options))
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_point, jobs))
    else:
        rows = [_run_point(job) for job in jobs]
    order = {name: k for k, name in enumerate(spec.protocols)}
    return sorted(rows, key=lambda r: (order[r.protocol], r.n_qubits))


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    window: tuple
    n_points: int


def fit_power_law(n_values, values, window=(FIT_MIN_N, math.inf)) -> ScalingFit:
    n = np.asarray(n_values, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (n >= window[0]) & (n <= window[1])
    if mask.sum() < 4:
        raise DomainError(f"need at least 4 points in window {window}, have {int(mask.sum())}")
    slope, intercept = np.polyfit(np.log(n[mask]), np.log(v[mask]), 1)
    return ScalingFit(float(slope), float(intercept), tuple(window), int(mask.sum()))


def scaling_fit(rows, protocol: str, window=(FIT_MIN_N, math.inf),
                observable: str = "epsilon_final") -> ScalingFit:
    """Least-squares slope of ``log(observable)`` against ``log N`` for one protocol."""
    sel = [r for r in rows if r.protocol == protocol and r.ok]
    return fit_power_law([r.n_qubits for r in sel],
                         [getattr(r.summary, observable) for r in sel], window)


@dataclass(frozen=True)
class ParallelComparison:
    n_qubits: int
    protocol: str
    heat_parallel: float
    heat_collective: float
    epsilon_parallel: float
    epsilon_collective: float

    @property
    def heat_ratio(self) -> float:
        return self.heat_collective / self.heat_parallel if self.heat_parallel else math.nan

    @property
    def epsilon_ratio(self) -> float:
        return self.epsilon_collective / self.epsilon_parallel if self.epsilon_parallel else math.nan


def parallel_vs_collective(params: SystemParams, protocol: Protocol,
                           options: IntegratorOptions | None = None) -> ParallelComparison:
    """Independent qubits (N copies of one single-qubit run) against the Dicke register."""
    single = thermo.summarize(integrate(params.with_n(1), protocol, options), params.with_n(1))
    if params.n_qubits == 1:
        collective = single
    else:
        collective = thermo.summarize(integrate(params, protocol, options), params)
    return ParallelComparison(
        params.n_qubits, protocol.kind,
        heat_parallel=params.n_qubits * single.heat_total,
        heat_collective=collective.heat_total,
        epsilon_parallel=single.epsilon_final,
        epsilon_collective=collective.epsilon_final,
    )


@dataclass(frozen=True)
class QuasistaticPoint:
    tau: float
    heat_total: float
    epsilon_final: float
    landauer: float

    @property
    def perfect_reset(self) -> bool:
        return self.epsilon_final < PERFECT_RESET_EPS


def quasistatic_convergence(n_qubits: int, tau_list: Sequence[float], final_omega: float = 10.0,
                            beta: float = 1.0, gamma0: float = 1.0,
                            options: IntegratorOptions | None = None) -> list[QuasistaticPoint]:
    """Total heat of a linear ramp ``0 -> final_omega`` for each duration in ``tau_list``."""
    taus = [float(t) for t in tau_list]
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise DomainError("tau_list must be increasing")
    points = []
    for tau in taus:
        params = SystemParams(n_qubits, beta, gamma0, tau)
        traj = integrate(params, Linear(tau, rate_coeff=final_omega / tau), options)
        points.append(QuasistaticPoint(tau, float(traj.heat[-1]), float(traj.epsilon[-1]),
                                       bounds.landauer_collective(params)))
    return points


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def write_fig2a(rows, path):
    _write(path, ["N", "protocol", "epsilon"],
           [(str(r.n_qubits), r.protocol, r.summary.epsilon_final) for r in rows if r.ok])


def write_fig2b(rows, path, beta: float = 1.0):
    out = []
    for r in rows:
        if r.ok:
            lb = math.log(r.n_qubits + 1) / (beta * r.n_qubits)
            out.append((str(r.n_qubits), r.protocol, r.summary.heat_per_qubit, lb))
    _write(path, ["N", "protocol", "heat_per_qubit", "landauer_per_qubit"], out)


def write_fig3(rows, path):
    out = []
    for r in rows:
        if not r.ok:
            continue
        s = r.summary
        params = SystemParams(s.n_qubits, s.beta, s.gamma0, s.tau)
        f = s.reset_factor if s.reset_factor is not None else math.nan
        out.append((str(r.n_qubits), r.protocol, f, bounds.reset_factor_bound(params),
                    bounds.reset_factor_bound(params, single_qubit=True)))
    _write(path, ["N", "protocol", "F", "bound_N", "bound_1"], out)


def write_bounds_csv(rows_or_reports, path):
    """One row per report: name, N, protocol, lhs, rhs, margin, satisfied."""
    reports = []
    for item in rows_or_reports:
        reports.extend(item.reports if isinstance(item, SweepRow) else [item])
    _write(path, ["name", "N", "protocol", "lhs", "rhs", "margin", "satisfied"],
           [(r.name, str(r.context.get("N", "")), str(r.context.get("protocol", "")),
             r.lhs, r.rhs, r.margin, r.status) for r in reports])


def write_quasistatic(points, path, n_qubits: int):
    _write(path, ["N", "tau", "heat_total", "landauer", "epsilon"],
           [(str(n_qubits), p.tau, p.heat_total, p.landauer, p.epsilon_final) for p in points])


def emit_figures(rows, out_dir, figures=("2", "3"), beta: float = 1.0) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "2" in figures:
        write_fig2a(rows, out_dir / "fig2a.csv")
        write_fig2b(rows, out_dir / "fig2b.csv", beta)
        written += [out_dir / "fig2a.csv", out_dir / "fig2b.csv"]
    if "3" in figures:
        write_fig3(rows, out_dir / "fig3.csv")
        written.append(out_dir / "fig3.csv")
    return written
