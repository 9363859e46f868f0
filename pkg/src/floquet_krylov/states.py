"""Initial states used to seed Krylov constructions."""

from __future__ import annotations

import numpy as np

from .statespace import SectorBasis, SpinBasis, angular_momentum_operators


def all_up(basis: SpinBasis, sector: SectorBasis | None = None) -> np.ndarray:
    """Fully polarised |up...up>, an eigenstate of the Ising part of the drive."""
    psi = np.zeros(basis.dim, dtype=complex)
    psi[0] = 1.0
    return psi if sector is None else sector.restrict(psi)


def uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1 / np.sqrt(dim), dtype=complex)


def haar_random(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_draws(dim: int, count: int, seed: int) -> list[np.ndarray]:
    """``count`` independent Haar-random states, one child generator per draw."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [haar_random(dim, np.random.default_rng(child)) for child in children]


def jx_top_state(j) -> np.ndarray:
    """Jx eigenstate with maximal eigenvalue j, in the Jz eigenbasis.

    Built as exp(-i pi/2 Jy)|j, m=j> so the overall phase is fixed.
    """
    from .floquet import hermitian_expm

    _, jy, jz = angular_momentum_operators(j)
    top = np.zeros(jz.dim, dtype=complex)
    top[0] = 1.0
    return hermitian_expm(jy, np.pi / 2).matrix @ top
