"""Spin-chain and spin-j Hilbert spaces, many-body operators, reflection parity.

Basis convention: a basis index is read as an N-bit string whose most
significant bit is site 1, so that ``pauli_site_operator`` equals the Kronecker
product ``I x ... x sigma x ... x I`` with sigma in slot ``site``. A 0 bit is a
spin up (sigma^z = +1), a 1 bit a spin down, hence
``J_z = N - 2 * popcount(s)`` and index 0 is the fully polarised up state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HERMITIAN_TOL = 1e-12
COMMUTATION_TOL = 1e-10


@dataclass(frozen=True)
class SpinBasis:
    num_sites: int

    def __post_init__(self):
        if int(self.num_sites) != self.num_sites or self.num_sites < 1:
            raise ValueError(f"num_sites must be a positive integer, got {self.num_sites!r}")

    @property
    def dim(self) -> int:
        return 2**self.num_sites

    def spins(self) -> np.ndarray:
        """Array of shape (dim, N) with entries +1 (up) / -1 (down), column i = site i+1."""
        n = self.num_sites
        idx = np.arange(self.dim)[:, None]
        shifts = np.arange(n - 1, -1, -1)[None, :]
        return 1 - 2 * ((idx >> shifts) & 1)


@dataclass
class Operator:
    """Dense matrix with an optional hermiticity hint."""

    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {self.matrix.shape}")
        if self.hermitian and hermiticity_error(self.matrix) > HERMITIAN_TOL:
            raise ValueError("operator flagged hermitian but M != M^dagger")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SectorBasis:
    """Positive-parity sector: orthonormal reflection-symmetric columns in the parent space."""

    parent: SpinBasis
    isometry: np.ndarray
    orbits: list[tuple[int, ...]] = field(repr=False)

    @property
    def sector_dim(self) -> int:
        return self.isometry.shape[1]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        return self.isometry @ vec

    def restrict(self, vec: np.ndarray) -> np.ndarray:
        return self.isometry.T.conj() @ vec

    def orbit_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(first, second, weight) per column; singletons repeat their state with weight 1/2."""
        first = np.array([o[0] for o in self.orbits], dtype=np.intp)
        second = np.array([o[-1] for o in self.orbits], dtype=np.intp)
        weight = np.where(first == second, 0.5, 1 / np.sqrt(2))
        return first, second, weight


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def as_matrix(op) -> np.ndarray:
    """Accept an Operator-like object (anything with ``.matrix``) or a plain array."""
    return np.asarray(getattr(op, "matrix", op))


def pauli_site_operator(basis: SpinBasis, site: int, axis: str) -> Operator:
    n = basis.num_sites
    if not 1 <= site <= n:
        raise ValueError(f"site must lie in 1..{n}, got {site}")
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (n - site))
    return Operator(np.kron(np.kron(left, PAULI[axis]), right), hermitian=True)


def total_spin_operator(basis: SpinBasis, axis: str) -> Operator:
    """Sum of the Pauli matrices along ``axis`` over all sites."""
    if axis == "z":
        return Operator(np.diag(basis.spins().sum(axis=1)).astype(complex), hermitian=True)
    total = np.zeros((basis.dim, basis.dim), dtype=complex)
    for site in range(1, basis.num_sites + 1):
        total += pauli_site_operator(basis, site, axis).matrix
    return Operator(total, hermitian=True)


def reflection_permutation(basis: SpinBasis) -> np.ndarray:
    """perm[s] = bit-reversal of s over N bits (site i <-> site N+1-i)."""
    n = basis.num_sites
    s = np.arange(basis.dim)
    out = np.zeros_like(s)
    for bit in range(n):
        out |= ((s >> bit) & 1) << (n - 1 - bit)
    return out


def reflection_operator(basis: SpinBasis) -> Operator:
    perm = reflection_permutation(basis)
    r = np.zeros((basis.dim, basis.dim))
    r[perm, np.arange(basis.dim)] = 1.0
    return Operator(r, hermitian=True)


def parity_sector(basis: SpinBasis) -> SectorBasis:
    """Isometry onto the +1 eigenspace of the site reflection.

    Column order: self-reflective (palindromic) bitstrings first, ascending,
    then the two-element orbits ascending by their smaller member.
    """
    perm = reflection_permutation(basis)
    singles = [(s,) for s in range(basis.dim) if perm[s] == s]
    pairs = [(s, int(perm[s])) for s in range(basis.dim) if s < perm[s]]
    orbits = singles + pairs
    iso = np.zeros((basis.dim, len(orbits)))
    for col, orbit in enumerate(orbits):
        iso[list(orbit), col] = 1.0 / np.sqrt(len(orbit))
    return SectorBasis(parent=basis, isometry=iso, orbits=orbits)


def commutes_with_reflection(m: np.ndarray, basis: SpinBasis) -> float:
    """Max element of [M, R] for the reflection permutation R."""
    perm = reflection_permutation(basis)
    return float(np.abs(m[np.ix_(perm, perm)] - m).max())


def project_operator(op, sector: SectorBasis, waive_check: bool = False) -> Operator:
    m = as_matrix(op)
    if m.shape != (sector.parent.dim, sector.parent.dim):
        raise ValueError(
            f"operator of shape {m.shape} does not act on the parent space of dim {sector.parent.dim}"
        )
    if not waive_check:
        err = commutes_with_reflection(m, sector.parent)
        if err > COMMUTATION_TOL:
            raise ValueError(
                f"operator does not commute with reflection (max |[M,R]| = {err:.3e}); "
                "projection would break the symmetry sector"
            )
    # each isometry column touches at most two basis states, so V^T M V is a gather
    first, second, weight = sector.orbit_arrays()
    cols = (m[:, first] + m[:, second]) * weight
    out = (cols[first] + cols[second]) * weight[:, None]
    return Operator(out, hermitian=getattr(op, "hermitian", False))


def spin_value(j) -> Fraction:
    try:
        twice = Fraction(j) * 2
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid spin {j!r}") from exc
    if twice.denominator != 1 or twice < 0:
        raise ValueError(f"2j must be a non-negative integer, got j={j!r}")
    return twice / 2


def angular_momentum_operators(j) -> tuple[Operator, Operator, Operator]:
    """Spin-j matrices (Jx, Jy, Jz) in the Jz eigenbasis, Jz = diag(j, j-1, ..., -j)."""
    jf = float(spin_value(j))
    m = jf - np.arange(int(round(2 * jf)) + 1)
    # <m+1| J+ |m> sits just above the diagonal since m decreases down the basis
    raise_elems = np.sqrt(jf * (jf + 1) - m[1:] * (m[1:] + 1))
    jplus = np.diag(raise_elems, k=1).astype(complex)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    jz = np.diag(m).astype(complex)
    return Operator(jx, hermitian=True), Operator(jy, hermitian=True), Operator(jz, hermitian=True)
