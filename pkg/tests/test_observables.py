import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_krylov.errors import DegenerateInputError
from floquet_krylov.floquet import DriveParams, build_kicked_ising
from floquet_krylov.krylov import ArnoldiData, amplitudes_chain, amplitudes_direct, arnoldi
from floquet_krylov.observables import (
    complexity_series,
    default_saturation_window,
    default_slope_window,
    dispersion,
    magnetization_series,
    rescale,
    saturation_value,
    slope_fit,
    spread_complexity,
    spread_entropy,
)
from floquet_krylov.statespace import SpinBasis, parity_sector, project_operator, total_spin_operator
from floquet_krylov.states import all_up, haar_random


def _shift(dim):
    return np.roll(np.eye(dim, dtype=complex), 1, axis=0)


def test_delta_trajectory_complexity_and_entropy():
    psi = np.eye(7)
    np.testing.assert_allclose(spread_complexity(psi), np.arange(7))
    np.testing.assert_allclose(spread_entropy(psi), 0.0)


def test_single_vector_complexity_zero():
    psi = np.exp(1j * np.arange(5))[None, :]
    np.testing.assert_allclose(spread_complexity(psi), 0.0)
    np.testing.assert_allclose(spread_entropy(psi), 0.0, atol=1e-14)


@pytest.mark.parametrize("d", [2, 5, 40])
def test_uniform_distribution(d):
    col = np.full((d, 1), 1 / np.sqrt(d))
    assert spread_complexity(col)[0] == pytest.approx((d - 1) / 2)
    assert spread_entropy(col)[0] == pytest.approx(np.log(d))


def test_two_equal_amplitudes_entropy():
    col = np.array([[1], [0], [1j]]) / np.sqrt(2)
    assert spread_entropy(col)[0] == pytest.approx(np.log(2))


def test_complexity_series_bundles_both():
    series = complexity_series(np.eye(3))
    assert series.steps == 2
    np.testing.assert_allclose(series.C, [0, 1, 2])


def test_saturation_single_vector():
    assert saturation_value(np.ones((1, 40))) == 0.0


@pytest.mark.parametrize("d", [3, 8])
def test_saturation_full_period_of_shift(d):
    data = ArnoldiData(_shift(d), np.eye(d, dtype=complex), False)
    traj = amplitudes_chain(data, 5 * d)
    assert saturation_value(traj, burn_in=d, window=d) == pytest.approx((d - 1) / 2)
    assert saturation_value(traj, burn_in=0, window=4 * d) == pytest.approx((d - 1) / 2)


def test_saturation_window_is_half_open():
    # a marker at step 3 must be excluded from [1, 3)
    p = np.zeros((2, 5))
    p[0] = 1
    p[:, 3] = [0, 1]
    assert saturation_value(np.sqrt(p), burn_in=1, window=2) == 0.0
    assert saturation_value(np.sqrt(p), burn_in=1, window=3) == pytest.approx(1 / 3)


def test_saturation_defaults_and_short_trajectory():
    assert default_saturation_window(10) == (20, 100)
    with pytest.raises(ValueError):
        saturation_value(np.eye(4)[:, :1].repeat(30, axis=1))
    with pytest.raises(ValueError):
        saturation_value(np.ones((1, 5)), burn_in=0, window=0)


def test_dispersion_constant_subdiagonal():
    data = ArnoldiData(_shift(6), np.eye(6, dtype=complex), False)
    stats = dispersion(data)
    assert stats.sigma_sub == 0.0
    assert stats.sigma_diag_re == 0.0 and stats.sigma_diag_im == 0.0


def test_dispersion_two_point_formula():
    h = np.zeros((3, 3), dtype=complex)
    h[1, 0], h[2, 1] = 0.0, 1.0
    h[0, 0], h[1, 1], h[2, 2] = 1j, 0, 0.5
    stats = dispersion(ArnoldiData(h, np.eye(3, dtype=complex), False))
    assert stats.sigma_sub == pytest.approx(np.sqrt(0.5))
    assert stats.sigma_diag_re == pytest.approx(np.std([0, 0, 0.5], ddof=1))
    assert stats.sigma_diag_im == pytest.approx(np.std([1, 0, 0], ddof=1))


def test_dispersion_requires_two_vectors():
    with pytest.raises(ValueError):
        dispersion(ArnoldiData(np.ones((1, 1), dtype=complex), np.ones((1, 1), dtype=complex), True))


def test_rescale_examples():
    np.testing.assert_allclose(rescale([2, 4, 6]), [0, 0.5, 1])
    np.testing.assert_allclose(rescale([0, 0.3, 1]), [0, 0.3, 1])
    with pytest.raises(DegenerateInputError):
        rescale([3, 3, 3])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30).filter(lambda x: max(x) - min(x) > 1e-6))
@settings(max_examples=60, deadline=None)
def test_rescale_properties(values):
    out = rescale(values)
    assert out.min() == 0.0 and out.max() == pytest.approx(1.0)
    # near-ties may round together, so check the extremes are attained at the raw argmax/argmin
    assert out[np.argmax(values)] == out.max()
    assert out[np.argmin(values)] == 0.0
    order = np.argsort(values, kind="stable")
    assert np.all(np.diff(out[order]) >= -1e-12)


def test_slope_examples():
    assert slope_fit(np.arange(30.0), 10) == pytest.approx(1.0, abs=1e-12)
    assert slope_fit(np.zeros(30), 10) == 0.0
    assert slope_fit(3 + 0.25 * np.arange(8.0), 8) == pytest.approx(0.25)


def test_slope_matches_polyfit():
    rng = np.random.default_rng(0)
    c = np.cumsum(rng.uniform(0, 1, 50))
    assert slope_fit(c, 17) == pytest.approx(np.polyfit(np.arange(17), c[:17], 1)[0], rel=1e-12)


def test_slope_bound_warning():
    with pytest.warns(RuntimeWarning, match="bound"):
        slope_fit(2.0 * np.arange(10.0), 10)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        slope_fit(np.arange(10.0), 10)


def test_slope_errors_and_default_window():
    with pytest.raises(ValueError):
        slope_fit([1.0], 2)
    with pytest.raises(ValueError):
        slope_fit(np.arange(5.0), 6)
    assert default_slope_window(4) == 2
    assert default_slope_window(40) == 10
    assert default_slope_window(528) == 20


def test_shift_chain_slope_is_exactly_one():
    data = ArnoldiData(_shift(12), np.eye(12, dtype=complex), False)
    c = spread_complexity(amplitudes_chain(data, 11))
    assert slope_fit(c, 10) == pytest.approx(1.0, abs=1e-8)


def test_magnetization_identity():
    basis = SpinBasis(4)
    jz = total_spin_operator(basis, "z")
    series, avg = magnetization_series(np.eye(16), all_up(basis), jz, 10)
    np.testing.assert_allclose(series, 4.0)
    assert avg == 4.0


def test_magnetization_window_and_mismatch():
    basis = SpinBasis(3)
    jz = total_spin_operator(basis, "z")
    x = total_spin_operator(basis, "x").matrix
    w, q = np.linalg.eigh(x)
    u = (q * np.exp(-1j * np.pi / 4 * w)) @ q.conj().T
    series, avg = magnetization_series(u, all_up(basis), jz, 8, burn_in=2, window=4)
    assert avg == pytest.approx(series[2:6].mean())
    # exp(-i pi/4 sigma_x) per site rotates z to -y and back: <Jz> = 3 cos(pi j / 2)
    np.testing.assert_allclose(series, 3 * np.cos(np.pi / 2 * np.arange(9)), atol=1e-12)
    with pytest.raises(ValueError):
        magnetization_series(np.eye(4), np.array([1, 0, 0, 0], dtype=complex), jz, 3)
    with pytest.raises(ValueError):
        magnetization_series(u, all_up(basis), jz, 3, burn_in=2, window=5)


@pytest.fixture(scope="module")
def ising8_trajectories():
    basis = SpinBasis(8)
    sector = parity_sector(basis)
    u = build_kicked_ising(DriveParams(phi=np.pi / 3, N=8), sector).matrix
    out = {}
    for name, psi0 in [("eig", all_up(basis, sector)), ("random", haar_random(sector.sector_dim, np.random.default_rng(7)))]:
        data = arnoldi(u, psi0)
        steps = 12 * data.krylov_dim
        out[name] = (data, amplitudes_direct(u, data, psi0, steps), amplitudes_chain(data, steps))
    return out


@pytest.mark.parametrize("name", ["eig", "random"])
def test_growth_bound_and_ranges(ising8_trajectories, name):
    data, direct, _ = ising8_trajectories[name]
    series = complexity_series(direct)
    j = np.arange(len(series.C))
    assert np.all(series.C <= j + 1e-9)
    assert np.all(series.C >= -1e-12) and np.all(series.C <= data.krylov_dim - 1 + 1e-9)
    assert np.all(series.S >= -1e-12) and np.all(series.S <= np.log(data.krylov_dim) + 1e-9)
    assert abs(series.C[0]) < 1e-12 and abs(series.S[0]) < 1e-12


@pytest.mark.parametrize("name", ["eig", "random"])
def test_direct_and_chain_observables_agree(ising8_trajectories, name):
    _, direct, chain = ising8_trajectories[name]
    np.testing.assert_allclose(spread_complexity(chain), spread_complexity(direct), atol=1e-7)
    np.testing.assert_allclose(spread_entropy(chain), spread_entropy(direct), atol=1e-7)


def test_saturation_stationary_under_window_doubling(ising8_trajectories):
    data, direct, _ = ising8_trajectories["eig"]
    d = data.krylov_dim
    a = saturation_value(direct, burn_in=2 * d, window=5 * d)
    b = saturation_value(direct, burn_in=2 * d, window=10 * d)
    assert abs(a - b) / b < 0.02


def test_magnetization_decays_at_strong_coupling():
    basis = SpinBasis(8)
    sector = parity_sector(basis)
    u = build_kicked_ising(DriveParams(phi=np.pi / 3, N=8), sector)
    jz = project_operator(total_spin_operator(basis, "z"), sector)
    series, _ = magnetization_series(u, all_up(basis, sector), jz, 200)
    assert series[0] == pytest.approx(8)
    assert abs(series[50:].mean()) < 1.0
