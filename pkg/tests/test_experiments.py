import csv
import math

import numpy as np
import pytest

from dicke_reset import DomainError, Quench, SystemParams
from dicke_reset import experiments as ex


def test_power_law_fit_recovers_slope():
    n = np.array([64, 128, 256, 512, 1024])
    fit = ex.fit_power_law(n, 0.7 / n)
    assert fit.slope == pytest.approx(-1.0, abs=1e-10)
    assert math.exp(fit.intercept) == pytest.approx(0.7, rel=1e-10)
    assert fit.n_points == 5


def test_power_law_needs_points():
    with pytest.raises(DomainError):
        ex.fit_power_law([1, 2, 64], [1, 1, 1])


def test_spec_validation():
    with pytest.raises(DomainError):
        ex.figure_spec(n_values=[4, 2])
    with pytest.raises(DomainError):
        ex.figure_spec(n_values=[0, 1])


def test_sweep_rows_and_ordering():
    rows = ex.sweep(ex.figure_spec(n_values=[1, 2, 4]))
    assert [(r.protocol, r.n_qubits) for r in rows] == [
        (p, n) for p in ("quench", "linear", "exponential") for n in (1, 2, 4)]
    assert all(r.ok and len(r.reports) == 7 for r in rows)


def test_sweep_parallel_matches_serial():
    spec = ex.figure_spec(n_values=[2, 8])
    a, b = ex.sweep(spec), ex.sweep(spec, workers=2)
    assert [r.summary for r in a] == [r.summary for r in b]


def test_sweep_records_failures():
    from dicke_reset import IntegratorOptions
    spec = ex.SweepSpec((64,), {"quench": Quench(1.0, 1.0)}, SystemParams(1),
                        IntegratorOptions(max_steps=3))
    (row,) = ex.sweep(spec)
    assert not row.ok and row.error.startswith("IntegrationError")


def test_parallel_vs_collective():
    cmp = ex.parallel_vs_collective(SystemParams(4), Quench(1.0, 1.0))
    assert cmp.heat_parallel == pytest.approx(0.58422, abs=1e-5)
    assert cmp.epsilon_collective < cmp.epsilon_parallel
    one = ex.parallel_vs_collective(SystemParams(1), Quench(1.0, 1.0))
    assert one.heat_ratio == pytest.approx(1.0) and one.epsilon_ratio == pytest.approx(1.0)


def test_quasistatic_heat_decreases_toward_landauer():
    pts = ex.quasistatic_convergence(2, [1.0, 10.0, 100.0])
    heats = [p.heat_total for p in pts]
    assert heats[0] > heats[1] > heats[2] > pts[0].landauer * 0.99
    assert pts[-1].perfect_reset
    with pytest.raises(DomainError):
        ex.quasistatic_convergence(2, [10.0, 1.0])


def _header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def test_csv_outputs(tmp_path):
    rows = ex.sweep(ex.figure_spec(n_values=[1, 2]))
    written = ex.emit_figures(rows, tmp_path)
    assert [p.name for p in written] == ["fig2a.csv", "fig2b.csv", "fig3.csv"]
    assert _header(tmp_path / "fig2a.csv") == ["N", "protocol", "epsilon"]
    assert _header(tmp_path / "fig2b.csv") == ["N", "protocol", "heat_per_qubit",
                                               "landauer_per_qubit"]
    assert _header(tmp_path / "fig3.csv") == ["N", "protocol", "F", "bound_N", "bound_1"]
    ex.write_bounds_csv(rows, tmp_path / "bounds.csv")
    with open(tmp_path / "bounds.csv") as fh:
        table = list(csv.DictReader(fh))
    assert len(table) == 7 * len(rows)
    assert {r["satisfied"] for r in table} <= {"pass", "fail", "not_applicable"}
    pts = ex.quasistatic_convergence(1, [1.0, 2.0])
    ex.write_quasistatic(pts, tmp_path / "q.csv", 1)
    assert _header(tmp_path / "q.csv") == ["N", "tau", "heat_total", "landauer", "epsilon"]
