import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_krylov.floquet import (
    DimerParams,
    DriveParams,
    build_dimer_floquet,
    build_kicked_ising,
    build_self_dual,
    evolve,
    find_period,
    hermitian_expm,
    ising_diagonal_unitary,
    ising_energies,
    iter_states,
    kick_unitary,
    unitarity_error,
)
from floquet_krylov.statespace import (
    Operator,
    SpinBasis,
    angular_momentum_operators,
    parity_sector,
    reflection_permutation,
    total_spin_operator,
)
from floquet_krylov.states import all_up, jx_top_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_kick_zero_field_is_identity():
    np.testing.assert_allclose(kick_unitary(SpinBasis(3), 0.0, 0.7, 1.0).matrix, np.eye(8))


def test_kick_longitudinal_is_diagonal():
    basis = SpinBasis(3)
    b, T = 0.8, 1.3
    u = kick_unitary(basis, b, 0.0, T).matrix
    expected = np.exp(-1j * T * b * basis.spins().sum(axis=1))
    np.testing.assert_allclose(u, np.diag(expected), atol=1e-14)


def test_kick_single_site_rotation():
    u = kick_unitary(SpinBasis(1), np.pi / 2, np.pi / 2, 1.0).matrix
    np.testing.assert_allclose(u, -1j * SX, atol=1e-15)


@pytest.mark.parametrize("phi", [0.0, 0.3, np.pi / 3, np.pi / 2])
def test_kick_matches_exponential_of_field_hamiltonian(phi):
    basis = SpinBasis(4)
    b, T = 1.1, 0.9
    field = b * (np.sin(phi) * total_spin_operator(basis, "x").matrix
                 + np.cos(phi) * total_spin_operator(basis, "z").matrix)
    via_expm = hermitian_expm(Operator(field, hermitian=True), T).matrix
    assert np.abs(kick_unitary(basis, b, phi, T).matrix - via_expm).max() < 1e-10


def test_ising_zero_couplings_identity():
    np.testing.assert_allclose(ising_diagonal_unitary(SpinBasis(3), 0.0, 0.0, 1.0).matrix, np.eye(8))


def test_ising_two_site_phases():
    u = np.diag(ising_diagonal_unitary(SpinBasis(2), np.pi / 4, 0.0, 1.0).matrix)
    e = np.exp(-1j * np.pi / 4)
    np.testing.assert_allclose(u, [e, e.conj(), e.conj(), e], atol=1e-15)


def test_all_to_all_phase_on_all_up():
    g, T = 0.37, 1.4
    u = ising_diagonal_unitary(SpinBasis(3), 0.0, g, T).matrix
    assert abs(u[0, 0] - np.exp(-1j * 3 * g * T)) < 1e-14


@given(n=st.integers(2, 7), J=st.floats(-2, 2), g=st.floats(-2, 2))
@settings(max_examples=30, deadline=None)
def test_ising_energies_match_pair_enumeration(n, J, g):
    basis = SpinBasis(n)
    energies = ising_energies(basis, J, g)
    for s, z in enumerate(basis.spins()):
        nn = sum(z[i] * z[i + 1] for i in range(n - 1))
        allpairs = sum(z[a] * z[c] for a, c in itertools.combinations(range(n), 2))
        assert abs(energies[s] - (J * nn + g * allpairs)) < 1e-12


def test_small_period_approaches_identity():
    u = build_kicked_ising(DriveParams(J=1, b=1, phi=0.4, T=1e-6, N=4)).matrix
    assert np.abs(u - np.eye(16)).max() < 1e-4


def test_kicked_ising_commutes_with_reflection():
    basis = SpinBasis(8)
    u = build_kicked_ising(DriveParams(J=1, b=1, phi=np.pi / 3, N=8)).matrix
    perm = reflection_permutation(basis)
    assert np.abs(u[np.ix_(perm, perm)] - u).max() < 1e-10


def test_all_up_is_eigenstate_without_transverse_field():
    p = DriveParams(J=0.7, b=1.2, phi=0.0, N=5)
    u = build_kicked_ising(p).matrix
    psi = all_up(SpinBasis(5))
    out = u @ psi
    overlap = np.vdot(psi, out)
    assert abs(abs(overlap) - 1) < 1e-12
    assert np.abs(out - overlap * psi).max() < 1e-12


def test_nonlocal_coupling_changes_only_diagonal_factor():
    base = DriveParams(J=1, b=1, phi=0.9, N=5)
    u0 = build_kicked_ising(base).matrix
    u1 = build_kicked_ising(DriveParams(J=1, b=1, phi=0.9, gamma=0.3, N=5)).matrix
    ratio = u1 @ u0.conj().T
    assert np.abs(ratio - np.diag(np.diag(ratio))).max() < 1e-12
    np.testing.assert_allclose(np.abs(np.diag(ratio)), 1.0, atol=1e-12)


@pytest.mark.parametrize("phi", [np.pi / 30, np.pi / 3, np.pi / 2])
def test_sector_floquet_is_unitary(phi):
    sector = parity_sector(SpinBasis(7))
    f = build_kicked_ising(DriveParams(phi=phi, N=7), sector)
    assert f.space == "positive-parity"
    assert unitarity_error(f.matrix) < 1e-10


def test_sector_mismatch_rejected():
    with pytest.raises(ValueError):
        build_kicked_ising(DriveParams(N=5), parity_sector(SpinBasis(4)))


def test_drive_params_validation():
    with pytest.raises(ValueError):
        DriveParams(T=0.0)
    with pytest.raises(ValueError):
        DriveParams(phi=2.0)


def test_split_operator_error_is_second_order():
    basis = SpinBasis(5)
    h0 = np.diag(ising_energies(basis, 1.0)).astype(complex)
    v = np.sin(1.0) * total_spin_operator(basis, "x").matrix + np.cos(1.0) * total_spin_operator(basis, "z").matrix

    def err(T):
        split = scipy.linalg.expm(-1j * h0 * T) @ scipy.linalg.expm(-1j * v * T)
        return np.abs(split - scipy.linalg.expm(-1j * (h0 + v) * T)).max()

    for T in (1e-2, 4e-3):
        assert 3.5 < err(T) / err(T / 2) < 4.5


def _period_from_spectrum(u, max_power):
    """Smallest p with all eigenphase differences multiples of 2 pi / p."""
    phases = np.angle(np.linalg.eigvals(u))
    diffs = phases - phases[0]
    for p in range(1, max_power + 1):
        x = p * diffs / (2 * np.pi)
        if np.abs(x - np.round(x)).max() < 1e-7:
            return p
    return None


# measured by brute-force powering and confirmed by the eigenphase oracle above
SELF_DUAL_PERIODS = {2: 6, 3: 24, 4: 12, 5: 30, 6: 48, 7: 18, 8: 24}


@pytest.mark.parametrize("n", sorted(SELF_DUAL_PERIODS))
def test_self_dual_period(n):
    u = build_self_dual(n).matrix
    assert unitarity_error(u) < 1e-10
    p = find_period(u, 100)
    assert p == SELF_DUAL_PERIODS[n] == _period_from_spectrum(u, 100)
    power = np.linalg.matrix_power(u, p)
    phase = power[0, 0]
    assert np.abs(power - phase * np.eye(2**n)).max() < 1e-8


def test_find_period_none_for_generic_unitary():
    u = build_kicked_ising(DriveParams(phi=1.0, N=4)).matrix
    assert find_period(u, 50) is None


def test_dimer_free_rotation():
    j = 3
    f = build_dimer_floquet(DimerParams(j=j, k=0.0, mu=0.0, T=1.0))
    jx = angular_momentum_operators(j)[0].matrix
    w, q = np.linalg.eigh(jx)
    expected = (q * np.exp(-2j * w)) @ q.conj().T
    assert np.abs(f.matrix - expected).max() < 1e-12
    assert np.abs(f.matrix - scipy.linalg.expm(-2j * jx)).max() < 1e-10


def test_dimer_unitary_large_spin():
    f = build_dimer_floquet(DimerParams(j=100, k=3.0, mu=3.0))
    assert f.dim == 201
    assert unitarity_error(f.matrix) < 1e-10


def test_dimer_matches_scipy_expm():
    j, k, mu, T = 4, 2.5, 1.3, 0.7
    jx, _, jz = (o.matrix for o in angular_momentum_operators(j))
    oracle = scipy.linalg.expm(-1j * mu * T * jz) @ scipy.linalg.expm(-1j * T * (2 * jx + k / (2 * j) * jz @ jz))
    assert np.abs(build_dimer_floquet(DimerParams(j=j, k=k, mu=mu, T=T)).matrix - oracle).max() < 1e-10


@pytest.mark.parametrize("k", [0.0, 3.0])
def test_dimer_conserves_casimir(k):
    j = 20
    f = build_dimer_floquet(DimerParams(j=j, k=k, mu=3.0))
    jx, jy, jz = (o.matrix for o in angular_momentum_operators(j))
    casimir = jx @ jx + jy @ jy + jz @ jz
    for psi in iter_states(f.matrix, jx_top_state(j), 50):
        assert abs(np.vdot(psi, casimir @ psi).real - j * (j + 1)) < 1e-8


def test_jx_top_state_is_eigenvector():
    j = 7
    jx = angular_momentum_operators(j)[0].matrix
    psi = jx_top_state(j)
    assert np.abs(jx @ psi - j * psi).max() < 1e-10


def test_hermitian_expm_zero_time():
    h = np.random.default_rng(0).standard_normal((6, 6))
    h = h + h.T
    np.testing.assert_allclose(hermitian_expm(h, 0.0).matrix, np.eye(6), atol=1e-13)


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5])
def test_hermitian_expm_pauli_closed_form(theta):
    expected = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * SX
    np.testing.assert_allclose(hermitian_expm(Operator(SX, hermitian=True), theta).matrix, expected, atol=1e-14)


def test_hermitian_expm_inverse_random():
    rng = np.random.default_rng(42)
    a = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    h = (a + a.conj().T) / 2
    fwd = hermitian_expm(h, 1.0).matrix
    back = hermitian_expm(h, -1.0).matrix
    assert np.abs(fwd @ back - np.eye(64)).max() < 1e-10
    assert np.abs(fwd - scipy.linalg.expm(-1j * h)).max() < 1e-10


def test_hermitian_expm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_expm(np.array([[0, 1], [0, 0]]), 1.0)


def test_evolve_zero_steps():
    psi = np.array([1, 0], dtype=complex)
    out = evolve(np.eye(2), psi, 0)
    assert out.shape == (1, 2)
    np.testing.assert_array_equal(out[0], psi)


def test_evolve_identity_constant():
    psi = np.ones(4, dtype=complex) / 2
    out = evolve(np.eye(4), psi, 5)
    np.testing.assert_allclose(out, np.tile(psi, (6, 1)))


def test_evolve_dimension_mismatch():
    with pytest.raises(ValueError):
        evolve(np.eye(4), np.array([1, 0], dtype=complex), 3)


@pytest.mark.slow
def test_norm_drift_long_evolution():
    u = build_kicked_ising(DriveParams(phi=np.pi / 3, N=10)).matrix
    psi0 = all_up(SpinBasis(10))
    last = None
    for last in iter_states(u, psi0, 10_000):
        pass
    assert abs(np.linalg.norm(last) - 1) < 1e-8
