import math

import numpy as np
import pytest

from conftest import fig_protocol
from dicke_reset import DomainError, Exponential, Quench, SystemParams, Tabulated, integrate
from dicke_reset import oracle


def test_operator_shapes_and_spectrum():
    h, low = oracle.build_operators(3, 2.0)
    assert h.shape == low.shape == (8, 8)
    np.testing.assert_allclose(np.sort(np.diag(h).real), 2.0 * np.array([0, 1, 1, 1, 2, 2, 2, 3]))


def test_dicke_basis_orthonormal():
    for n in (1, 3, 5):
        b = oracle.dicke_basis(n)
        np.testing.assert_allclose(b @ b.T, np.eye(n + 1), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_lowering_matrix_elements(n):
    b = oracle.dicke_basis(n)
    _, low = oracle.build_operators(n, 1.0)
    m = b @ low.real @ b.T
    for k in range(1, n + 1):
        assert m[k - 1, k] == pytest.approx(math.sqrt(k * (n - k + 1)), rel=1e-13)
    # L maps the symmetric sector into itself
    assert np.abs(m - np.diag(np.diag(m, 1), 1)).max() < 1e-13


def test_initial_density_is_uniform_on_levels():
    rho = oracle.initial_density(3)
    b = oracle.dicke_basis(3)
    np.testing.assert_allclose(np.einsum("ki,ij,kj->k", b, rho.real, b), [0.25] * 4)
    assert np.trace(rho).real == pytest.approx(1.0)


def test_size_limits():
    for n in (0, oracle.MAX_QUBITS + 1):
        with pytest.raises(DomainError):
            oracle.dicke_basis(n)


def test_compare_identical_is_zero():
    params = SystemParams(2)
    grid = np.linspace(0, 1, 5)
    full = oracle.integrate_full(params, Quench(1.0, 1.0), grid)
    rep = oracle.compare(full, full)
    assert rep.max_population_deviation == 0 and rep.heat_deviation == 0


def test_compare_rejects_mismatch():
    params = SystemParams(2)
    full = oracle.integrate_full(params, Quench(1.0, 1.0), np.linspace(0, 1, 5))
    with pytest.raises(DomainError):
        oracle.compare(full, integrate(params, Quench(1.0, 1.0)))


def test_full_run_is_physical():
    full = oracle.integrate_full(SystemParams(4), Quench(1.0, 1.0), np.linspace(0, 1, 11))
    assert full.trace_error < 1e-9 and full.hermiticity_error < 1e-10
    assert full.min_eigenvalue > -1e-10
    assert np.abs(full.leakage).max() < 1e-10


@pytest.mark.parametrize("n", [1, 3, 5])
def test_reduction_matches_full_space(protocol_name, n):
    params = SystemParams(n)
    rep = oracle.oracle_check(params, fig_protocol(protocol_name, params), n_samples=21)
    assert rep.within(1e-6, 1e-8), rep


@pytest.mark.slow
def test_six_qubits_exponential():
    params = SystemParams(6)
    rep = oracle.oracle_check(params, Exponential(1.0, 1.0, 1.0), n_samples=11)
    assert rep.within(1e-6, 1e-8), rep


def test_tabulated_through_oracle():
    params = SystemParams(3, tau=2.0)
    prot = Tabulated(2.0, points=[(0, 0.2), (0.7, 1.5), (2.0, 0.4)])
    assert oracle.oracle_check(params, prot, n_samples=21).within()
