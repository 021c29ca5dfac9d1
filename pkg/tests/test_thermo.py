import math

import numpy as np
import pytest

from conftest import EPS_BENCH, F_BENCH, HEAT_BENCH
from dicke_reset import (DickeDistribution, DomainError, Quench, SystemParams,
                         UndefinedResetFactor, avg_dynamical_activity, error_probability,
                         initial_state, integrate, one_norm_distance, reset_factor, summarize,
                         zeta)
from dicke_reset.thermo import shannon_entropy


def test_error_probability_examples():
    assert error_probability(DickeDistribution(2, [0.5, 0.3, 0.2])) == pytest.approx(0.35)
    assert error_probability(initial_state(7)) == pytest.approx(0.5)
    assert error_probability(DickeDistribution(3, [1, 0, 0, 0])) == 0.0


def test_zeta_examples():
    assert zeta(initial_state(2)) == pytest.approx(5 / 12)
    assert zeta(DickeDistribution(2, [0.5, 0.3, 0.2])) == pytest.approx(0.275)
    # a single qubit has n**2 = n
    assert zeta(DickeDistribution(1, [0.3, 0.7])) == pytest.approx(0.7)


def test_vectorized_over_trajectory():
    p = np.array([[0.5, 0.5], [0.9, 0.1]])
    np.testing.assert_allclose(error_probability(p), [0.5, 0.1])


def test_distance_examples():
    assert one_norm_distance(initial_state(1), DickeDistribution(1, [1, 0])) == pytest.approx(1.0)
    assert one_norm_distance(initial_state(2), DickeDistribution(2, [1, 0, 0])) == pytest.approx(4 / 3)
    with pytest.raises(DomainError):
        one_norm_distance(initial_state(1), initial_state(2))


def test_entropy():
    assert shannon_entropy(initial_state(3)) == pytest.approx(math.log(4))
    assert shannon_entropy(DickeDistribution(1, [1, 0])) == 0.0


def test_activity_at_zero_splitting():
    traj = integrate(SystemParams(1), Quench(1.0, 0.0))
    assert avg_dynamical_activity(traj) == pytest.approx(0.5, rel=1e-12)


def test_reset_factor():
    assert reset_factor(0.25, 2.0, 0.25) == pytest.approx(2.0)
    with pytest.raises(UndefinedResetFactor):
        reset_factor(0.1, 1.0, 0.5)


def test_summary_of_two_level_run(unit_params):
    s = summarize(integrate(unit_params, Quench(1.0, 1.0)), unit_params)
    assert s.epsilon_final == pytest.approx(EPS_BENCH, abs=1e-8)
    assert s.heat_total == s.heat_per_qubit == pytest.approx(HEAT_BENCH, abs=1e-8)
    assert s.reset_factor == pytest.approx(F_BENCH, rel=1e-7)
    assert s.distance == pytest.approx(1 - 2 * s.epsilon_final, abs=1e-12)
    assert s.entropy_production > 0
    d = s.as_dict()
    assert d["n_qubits"] == 1 and d["protocol"] == "quench"


def test_summary_without_progress():
    params = SystemParams(4)
    s = summarize(integrate(params, Quench(1.0, 0.0)), params)
    assert s.reset_factor is None and not s.reset_factor_defined
    assert s.epsilon_final == pytest.approx(0.5)
