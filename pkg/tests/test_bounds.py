import math

import numpy as np
import pytest

from conftest import fig_protocol
from dicke_reset import (DomainError, InconsistencyError, Quench, SystemParams, Tabulated,
                         asymptotic_window, integrate, landauer_collective, reset_factor_bound,
                         summarize)
from dicke_reset import bounds
from dicke_reset.thermo import ResetSummary


def test_landauer():
    assert landauer_collective(SystemParams(1)) == pytest.approx(math.log(2))
    assert landauer_collective(SystemParams(3)) == pytest.approx(math.log(4))
    assert landauer_collective(SystemParams(3, beta=2.0), per_qubit=True) == pytest.approx(
        math.log(4) / 6)


def test_reset_factor_bound_examples():
    assert reset_factor_bound(SystemParams(1)) == pytest.approx(0.5)
    assert reset_factor_bound(SystemParams(1), single_qubit=True) == pytest.approx(1.0)
    assert reset_factor_bound(SystemParams(3)) == pytest.approx(1 / 24)
    assert reset_factor_bound(SystemParams(2, beta=2.0, gamma0=0.5)) == pytest.approx(1 / 9)


def test_activity_bound():
    assert bounds.activity_bound(SystemParams(3, gamma0=2.0)) == pytest.approx(8.0)


def test_zeta_coefficient():
    assert bounds.zeta_coefficient(1) == pytest.approx(1.0)
    assert bounds.zeta_coefficient(4) == pytest.approx(0.75)


def test_window():
    lo, hi = asymptotic_window(1.0, 1.0)
    assert lo == pytest.approx(0.58198, abs=1e-5) and hi == pytest.approx(1.74594, abs=1e-5)
    assert asymptotic_window(1.0, math.log(2)) == pytest.approx((1.0, 3.0))
    for omega in (0.0, -1.0):
        with pytest.raises(DomainError):
            asymptotic_window(1.0, omega)


@pytest.mark.parametrize("n", [1, 4, 32, 256])
def test_hard_bounds_hold(protocol_name, n):
    params = SystemParams(n)
    traj = integrate(params, fig_protocol(protocol_name, params))
    reports = bounds.check_all(traj, summarize(traj, params), params)
    assert bounds.hard_failures(reports) == []
    names = [r.name for r in reports]
    assert names == ["speed_limit", "distance", "activity", "reset_factor", "sigma_heat",
                     "zeta", "asymptotic_window"]
    assert not reports[-1].hard


def test_single_qubit_distance_equality(protocol_name, unit_params):
    traj = integrate(unit_params, fig_protocol(protocol_name, unit_params))
    assert abs(bounds.distance_equality_gap(summarize(traj, unit_params))) < 1e-12


def test_not_applicable_cases(unit_params):
    traj = integrate(unit_params, Quench(1.0, 1.0))
    assert bounds.check_zeta_bound(traj).status == "not_applicable"
    params = SystemParams(4)
    traj = integrate(params, Tabulated(1.0, points=[(0, 0), (0.5, 2.0), (1, 0.5)]))
    assert bounds.check_zeta_bound(traj).status == "not_applicable"
    idle = integrate(params, Quench(1.0, 0.0))
    s = summarize(idle, params)
    assert bounds.check_reset_factor(s, params).status == "not_applicable"
    assert bounds.check_asymptotic_window(idle).status == "not_applicable"
    # no motion, no entropy production: speed limit reads 0
    speed = bounds.check_speed_limit(idle, s)
    assert speed.lhs == 0.0 and speed.satisfied


def test_speed_limit_inconsistency(unit_params):
    traj = integrate(unit_params, Quench(1.0, 1.0))
    s = summarize(traj, unit_params)
    broken = ResetSummary(**dict(s.as_dict(), entropy_production=0.0))
    with pytest.raises(InconsistencyError):
        bounds.check_speed_limit(traj, broken)


def test_violation_is_reported():
    params = SystemParams(2)
    traj = integrate(params, Quench(1.0, 1.0))
    s = summarize(traj, params)
    fake = ResetSummary(**dict(s.as_dict(), entropy_production=10 * s.entropy_production + 5))
    report = bounds.check_sigma_heat(fake, params)
    assert report.status == "fail" and report.margin < 0
    assert bounds.hard_failures([report]) == [report]


def test_window_series_shape():
    params = SystemParams(8)
    traj = integrate(params, fig_protocol("linear", params))
    series = bounds.asymptotic_window_series(traj)
    assert series.shape == (len(traj.times), 4)
    assert np.isnan(series[0, 2])
    np.testing.assert_allclose(series[1:, 3], 3 * series[1:, 2])
