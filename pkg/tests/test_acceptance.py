"""Acceptance criteria 1-9; each test records one pass/fail line in the terminal summary."""

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, EPS_BENCH, F_BENCH, HEAT_BENCH, fig_protocol
from dicke_reset import Quench, SystemParams, integrate, integrate_epsilon_ode, summarize
from dicke_reset import bounds, experiments, oracle
from dicke_reset.dynamics import zeta_interpolant

PROTOCOLS = ("quench", "linear", "exponential")


def record(k, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def figure_rows():
    rows = experiments.sweep(experiments.figure_spec())
    assert all(r.ok for r in rows), [r.error for r in rows if not r.ok]
    return {(r.protocol, r.n_qubits): r for r in rows}


def _series(rows, protocol, attr):
    ns = experiments.DEFAULT_N_VALUES
    return ns, np.array([getattr(rows[protocol, n].summary, attr) for n in ns])


def test_criterion_1_two_level_closed_form():
    params = SystemParams(1)
    s = summarize(integrate(params, Quench(1.0, 1.0)), params)
    errs = (abs(s.epsilon_final - EPS_BENCH), abs(s.heat_per_qubit - HEAT_BENCH))
    ok = (max(errs) <= 1e-8 and abs(EPS_BENCH - 0.353944) < 1e-6
          and abs(HEAT_BENCH - 0.146056) < 1e-6 and s.reset_factor > 1.0
          and abs(s.reset_factor - F_BENCH) < 1e-7)
    record(1, ok, f"eps={s.epsilon_final:.9f} Q={s.heat_per_qubit:.9f} F={s.reset_factor:.6f} "
                  f"max|dev|={max(errs):.2e} (tol 1e-8)")


def test_criterion_2_oracle_equivalence():
    worst = [0.0, 0.0, 0.0]
    for n in (2, 3, 4, 5, 6):
        params = SystemParams(n)
        for name in PROTOCOLS:
            rep = oracle.oracle_check(params, fig_protocol(name, params), n_samples=51)
            worst = [max(worst[0], rep.max_population_deviation),
                     max(worst[1], rep.heat_deviation), max(worst[2], rep.max_leakage)]
    ok = worst[0] <= 1e-6 and worst[1] <= 1e-6 and worst[2] <= 1e-8
    record(2, ok, f"N=2..6 x 3 protocols: max dp={worst[0]:.2e} dQ={worst[1]:.2e} "
                  f"leakage={worst[2]:.2e}")


def test_criterion_3_error_scaling(figure_rows):
    slopes, decreasing = {}, True
    for name in PROTOCOLS:
        ns, eps = _series(figure_rows, name, "epsilon_final")
        slopes[name] = experiments.fit_power_law(ns, eps, window=(128, 1024)).slope
        decreasing &= bool(np.all(np.diff(eps) < 0))
    ok = decreasing and all(abs(s + 1) <= 0.1 for s in slopes.values())
    record(3, ok, "slopes on [128,1024] " + " ".join(f"{k}={v:.4f}" for k, v in slopes.items())
           + f"; strictly decreasing={decreasing}")


def test_criterion_4_heat_per_qubit(figure_rows):
    q = {(p, n): figure_rows[p, n].summary.heat_per_qubit for p in PROTOCOLS for n in (64, 1024)}
    ok = abs(q["quench", 1024] - 0.5) < min(abs(q["quench", 64] - 0.5), 0.1)
    for name in ("linear", "exponential"):
        ok &= q[name, 1024] < q[name, 64] and q[name, 1024] < 0.05
    record(4, ok, " ".join(f"Q_{p}({n})={v:.5f}" for (p, n), v in q.items()))


def test_criterion_5_quasistatic_landauer():
    devs = {}
    for n in (1, 2, 3, 4):
        (pt,) = experiments.quasistatic_convergence(n, [1e4], final_omega=10.0)
        devs[n] = abs(pt.heat_total / pt.landauer - 1)
    ok = max(devs.values()) <= 0.02
    record(5, ok, "tau=1e4 |Q_N/ln(N+1) - 1|: " + " ".join(f"N={n}:{d:.2e}" for n, d in devs.items()))


def test_criterion_6_hard_inequalities():
    failures, n_runs, eq_gap = [], 0, 0.0
    for n in (1, 2, 4, 8, 16, 64, 256):
        params = SystemParams(n)
        for name in PROTOCOLS:
            traj = integrate(params, fig_protocol(name, params))
            summary = summarize(traj, params)
            reports = bounds.check_all(traj, summary, params, include_window=False)
            failures += [f"{r.name}@N={n},{name}" for r in bounds.hard_failures(reports)]
            if n == 1:
                eq_gap = max(eq_gap, abs(bounds.distance_equality_gap(summary)))
            n_runs += 1
    ok = not failures and eq_gap <= 1e-9
    record(6, ok, f"{n_runs} runs, hard failures={failures or 'none'}, "
                  f"N=1 |D-(1-2eps)|={eq_gap:.1e}")


def test_criterion_7_reset_factor(figure_rows):
    decreasing, f_end = True, {}
    for name in PROTOCOLS:
        ns, f = _series(figure_rows, name, "reset_factor")
        decreasing &= bool(np.all(np.diff(f) < 0))
        f_end[name] = f[-1]
    ok = decreasing and f_end["linear"] < 1.0 and f_end["exponential"] < 1.0
    record(7, ok, f"F decreasing={decreasing}; F(1024) "
           + " ".join(f"{k}={v:.4f}" for k, v in f_end.items()) + " vs single-qubit bound 1")


def test_criterion_8_asymptotic_window(figure_rows):
    n_eps = 1024 * figure_rows["quench", 1024].summary.epsilon_final
    lo, hi = bounds.asymptotic_window(1.0, 1.0)
    ok = 0.9 * lo <= n_eps <= 1.1 * hi
    record(8, ok, f"N*eps={n_eps:.5f} in [{0.9 * lo:.5f}, {1.1 * hi:.5f}]")


def test_criterion_9_epsilon_ode():
    worst = 0.0
    for n in (1, 16, 64):
        params = SystemParams(n)
        for name in PROTOCOLS:
            prot = fig_protocol(name, params)
            traj = integrate(params, prot)
            eps = integrate_epsilon_ode(params, prot, zeta_interpolant(traj))
            # every accepted step of the full run
            worst = max(worst, max(abs(eps(t) - e) for t, e in zip(traj.times, traj.epsilon)))
    ok = worst <= 1e-6
    record(9, ok, f"N in (1,16,64) x 3 protocols: max |eps_ode - eps| = {worst:.2e}")
