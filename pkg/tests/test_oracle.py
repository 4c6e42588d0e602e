import numpy as np
import pytest
from scipy.linalg import expm

from qbfcs import oracle
from qbfcs.dynamics import JCParams, QubitDensity, product_state
from qbfcs.fcs import evaluate_gf, generating_function, moments
from qbfcs.fockspace import Fock, Thermal, TruncationPolicy, build_cavity_state


@pytest.fixture
def params():
    return JCParams.from_ratios(0.01, 0.005)


def test_hamiltonian_structure(params):
    h = oracle.dense_hamiltonian(params, 4)
    assert np.allclose(h, h.conj().T)
    # <e,0|H|g,1> = g
    assert h[0, 5 + 1] == pytest.approx(params.g)
    # energy of |g,3>
    assert h[5 + 3, 5 + 3] == pytest.approx(-0.5 + 3 * params.omega_cav)
    excitation = oracle.excitation_number(4)
    assert np.allclose(h @ excitation, excitation @ h)


def test_dense_propagator_matches_expm(params):
    h = oracle.dense_hamiltonian(params, 6)
    assert np.allclose(oracle.dense_propagator(h, 77.0), expm(-1j * 77.0 * h), atol=1e-12)
    with pytest.raises(ValueError):
        oracle.dense_propagator(h + np.triu(np.ones_like(h), 1), 1.0)


def test_tilted_gf_at_zero_field_is_trace(params):
    rc = build_cavity_state(Thermal(nbar=1.0), TruncationPolicy(30, 1e-4))
    rho = product_state(QubitDensity.ground(), rc)
    assert oracle.dense_tilted_gf(rho, params, 150.0, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-12)


def test_tpm_distribution_fock(params):
    rc = build_cavity_state(Fock(3), TruncationPolicy(4))
    tau = 0.8 / params.g
    dist = oracle.tpm_distribution(QubitDensity.ground().matrix, rc.matrix, params, tau)
    assert dist.total == pytest.approx(1.0, abs=1e-12)
    assert {(du, q) for du, q, _ in dist.atoms} <= {(0.0, 0.0), (params.omega_qub, params.omega_cav)}
    G = generating_function(QubitDensity.ground(), rc, params, tau)
    for a, b in [(1, 0), (0, 1), (2, 1)]:
        assert dist.moment(a, b) == pytest.approx(moments(G, a, b).real, abs=1e-12)


def test_tpm_first_law_on_every_atom(params):
    rc = build_cavity_state(Thermal(nbar=0.5), TruncationPolicy(25, 1e-4))
    dist = oracle.tpm_distribution(np.diag([0.4, 0.6]), rc.matrix, params, 120.0)
    for du, q, _ in dist.atoms:
        # W = dU - Q is -k detuning for an exchanged quantum
        assert du - q == pytest.approx(np.sign(du) * params.detuning, abs=1e-12)


def test_tpm_rejects_coherences(params):
    with pytest.raises(ValueError, match="diagonal"):
        oracle.tpm_distribution(np.array([[0.5, 0.5], [0.5, 0.5]]), np.eye(3) / 3, params, 1.0)


def test_oracle_cutoff_guard(params):
    big = np.zeros((2 * (oracle.MAX_ORACLE_CUTOFF + 2),) * 2)
    with pytest.raises(ValueError, match="restricted"):
        oracle.dense_tilted_gf(big, params, 1.0, (0.0, 0.0))


def test_finite_differences(params):
    rc = build_cavity_state(Thermal(nbar=1.0), TruncationPolicy(30, 1e-4))
    G = generating_function(QubitDensity.ground(), rc, params, 70.0)
    for order in (1, 2):
        fd = oracle.finite_diff_moments(lambda x: evaluate_gf(G, (x, 0.0)), order, 1e-4)
        assert fd == pytest.approx(moments(G, order, 0).real, rel=1e-6)
    with pytest.raises(ValueError):
        oracle.finite_diff_moments(lambda x: 1.0, 3, 1e-4)
    with pytest.raises(ValueError):
        oracle.finite_diff_moments(lambda x: 1.0, 1, 0.0)


def test_interaction_energy_vanishes_initially(params):
    rc = build_cavity_state(Fock(2), TruncationPolicy(3))
    rho = product_state(QubitDensity.ground(), rc)
    assert oracle.interaction_energy(rho, params, 0.0) == pytest.approx(0.0, abs=1e-15)
