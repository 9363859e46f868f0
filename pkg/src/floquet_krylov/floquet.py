"""Floquet operators for the kicked Ising chains and the kicked Bose-Hubbard dimer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import NumericalError
from .statespace import (
    Operator,
    SectorBasis,
    SpinBasis,
    spin_value,
    angular_momentum_operators,
    as_matrix,
    hermiticity_error,
    project_operator,
)

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class DriveParams:
    J: float = 1.0
    b: float = 1.0
    phi: float = np.pi / 3
    gamma: float = 0.0
    T: float = 1.0
    N: int = 10

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"drive period T must be positive, got {self.T}")
        if not 0.0 <= self.phi <= np.pi / 2 + 1e-12:
            raise ValueError(f"tilt angle phi must lie in [0, pi/2], got {self.phi}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")


@dataclass(frozen=True)
class DimerParams:
    j: float = 100
    k: float = 1.0
    mu: float = 3.0
    T: float = 1.0

    def __post_init__(self):
        if spin_value(self.j) <= 0:
            raise ValueError(f"2j must be a positive integer, got j={self.j}")
        if not self.T > 0:
            raise ValueError(f"drive period T must be positive, got {self.T}")

    @property
    def num_bosons(self) -> int:
        return int(round(2 * self.j))


@dataclass
class FloquetOperator:
    matrix: np.ndarray
    space: str
    params: object = None
    sector: SectorBasis | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def unitarity_error(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def _check_unitary(u: np.ndarray, what: str) -> np.ndarray:
    err = unitarity_error(u)
    if err > UNITARITY_TOL:
        raise NumericalError(f"{what} is not unitary (max |U^dag U - I| = {err:.3e})")
    return u


def single_site_rotation(theta: float, direction) -> np.ndarray:
    """exp(-i theta n.sigma) for a unit vector n = (nx, ny, nz)."""
    nx, ny, nz = direction
    n_sigma = np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]], dtype=complex)
    return np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * n_sigma


def kick_unitary(basis: SpinBasis, b: float, phi: float, T: float) -> Operator:
    """Tensor product of identical single-site field rotations."""
    site = single_site_rotation(T * b, (np.sin(phi), 0.0, np.cos(phi)))
    out = np.ones((1, 1), dtype=complex)
    for _ in range(basis.num_sites):
        out = np.kron(out, site)
    return Operator(out)


def ising_energies(basis: SpinBasis, J: float, gamma: float = 0.0, hz: float = 0.0) -> np.ndarray:
    """Diagonal of J sum_{i<N} z_i z_{i+1} + gamma sum_{i<j} z_i z_j + hz sum_i z_i (open chain)."""
    z = basis.spins()
    energy = J * (z[:, :-1] * z[:, 1:]).sum(axis=1).astype(float)
    if gamma:
        m = z.sum(axis=1)
        energy = energy + gamma * (m * m - basis.num_sites) / 2
    if hz:
        energy = energy + hz * z.sum(axis=1)
    return energy


def ising_diagonal_unitary(basis: SpinBasis, J: float, gamma: float, T: float) -> Operator:
    return Operator(np.diag(np.exp(-1j * T * ising_energies(basis, J, gamma))))


def build_kicked_ising(params: DriveParams, sector: SectorBasis | None = None) -> FloquetOperator:
    """U_F = exp(-iT H_ising) exp(-iT V_kick), optionally restricted to the parity sector."""
    basis = SpinBasis(params.N)
    if sector is not None and sector.parent != basis:
        raise ValueError("sector was built for a different chain length")
    phases = np.exp(-1j * params.T * ising_energies(basis, params.J, params.gamma))
    kick = kick_unitary(basis, params.b, params.phi, params.T).matrix
    u = phases[:, None] * kick
    space = "full"
    if sector is not None:
        u = project_operator(u, sector).matrix
        space = "positive-parity"
    return FloquetOperator(_check_unitary(u, "kicked Ising Floquet operator"), space, params, sector)


SELF_DUAL_COUPLING = np.pi / 4


def build_self_dual(N: int, sector: SectorBasis | None = None) -> FloquetOperator:
    """Kicked Ising chain at h_x = h_z = J = pi/4, transverse kick applied last."""
    if N < 2:
        raise ValueError(f"self-dual chain needs N >= 2, got {N}")
    basis = SpinBasis(N)
    q = SELF_DUAL_COUPLING
    diag = np.exp(-1j * ising_energies(basis, q, hz=q))
    kick = kick_unitary(basis, q, np.pi / 2, 1.0).matrix
    u = kick * diag[None, :]
    space = "full"
    if sector is not None:
        u = project_operator(u, sector).matrix
        space = "positive-parity"
    return FloquetOperator(_check_unitary(u, "self-dual Floquet operator"), space, {"N": N}, sector)


def build_dimer_floquet(params: DimerParams) -> FloquetOperator:
    """U_F = exp(-i mu T Jz) exp(-i T (2 Jx + (k/N) Jz^2)) on the spin-j space, N = 2j."""
    jx, _, jz = angular_momentum_operators(params.j)
    jz_diag = np.real(np.diag(jz.matrix))
    h_static = 2 * jx.matrix + (params.k / params.num_bosons) * np.diag(jz_diag**2)
    second = hermitian_expm(Operator(h_static, hermitian=True), params.T).matrix
    u = np.exp(-1j * params.mu * params.T * jz_diag)[:, None] * second
    return FloquetOperator(_check_unitary(u, "dimer Floquet operator"), "spin-j", params)


def hermitian_expm(H, t: float) -> Operator:
    """exp(-i t H) through the eigendecomposition of a Hermitian H."""
    m = as_matrix(H)
    err = hermiticity_error(m)
    if err > 1e-10:
        raise ValueError(f"hermitian_expm needs a Hermitian matrix (max |H - H^dag| = {err:.3e})")
    try:
        evals, evecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return Operator((evecs * np.exp(-1j * t * evals)[None, :]) @ evecs.conj().T)


def iter_states(U, psi0: np.ndarray, steps: int) -> Iterator[np.ndarray]:
    """Yield psi0, U psi0, ..., U^steps psi0 without storing the whole orbit."""
    u = as_matrix(U)
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (u.shape[0],):
        raise ValueError(f"state of shape {psi.shape} does not match operator dimension {u.shape[0]}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalised")
    yield psi
    for _ in range(steps):
        psi = u @ psi
        yield psi


def evolve(U, psi0: np.ndarray, steps: int) -> np.ndarray:
    """Stroboscopic orbit as an array of shape (steps + 1, dim)."""
    return np.array(list(iter_states(U, psi0, steps)))


def find_period(U, max_power: int, tol: float = 1e-8) -> int | None:
    """Smallest p <= max_power with U^p equal to a global phase times identity."""
    u = as_matrix(U)
    eye = np.eye(u.shape[0])
    power = np.eye(u.shape[0], dtype=complex)
    for p in range(1, max_power + 1):
        power = u @ power
        phase = np.trace(power) / u.shape[0]
        if abs(abs(phase) - 1.0) < tol and np.abs(power - phase * eye).max() < tol:
            return p
    return None
