"""Lanczos and Arnoldi iterations and the Krylov-space amplitude propagators.

Both iterations orthogonalise every new vector against the full basis twice
(classical Gram-Schmidt plus one re-pass). The basis is stored row-wise
internally; ``.basis`` exposes it column-wise, V of shape (dim, D_K).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statespace import as_matrix, hermiticity_error

NORM_TOL = 1e-10


@dataclass
class LanczosData:
    a: np.ndarray
    b: np.ndarray
    basis: np.ndarray

    @property
    def krylov_dim(self) -> int:
        return len(self.a)

    def tridiagonal(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.b, 1) + np.diag(self.b, -1)


@dataclass
class ArnoldiData:
    h: np.ndarray
    basis: np.ndarray
    halted_early: bool

    @property
    def krylov_dim(self) -> int:
        return self.h.shape[0]

    @property
    def subdiagonal(self) -> np.ndarray:
        """h_{n,n-1} for n = 1..D_K-1 (real, non-negative by construction)."""
        return np.real(np.diag(self.h, -1))

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.h).copy()


@dataclass
class AmplitudeTrajectory:
    """psi[n, j] = amplitude on Krylov vector n after j steps."""

    psi: np.ndarray
    residual: np.ndarray | None = None

    @property
    def krylov_dim(self) -> int:
        return self.psi.shape[0]

    @property
    def steps(self) -> int:
        return self.psi.shape[1] - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


def _check_state(psi0, dim: int) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"state of shape {psi.shape} does not match operator dimension {dim}")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValueError(f"initial state must be normalised, |psi0| = {np.linalg.norm(psi):.12g}")
    return psi


def _orthogonalise(w: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Remove the span of ``rows`` from w (two CGS passes); returns (residual, overlaps)."""
    coeffs = rows.conj() @ w
    w = w - rows.T @ coeffs
    again = rows.conj() @ w
    return w - rows.T @ again, coeffs + again


def lanczos(H, psi0, tol: float = 1e-12, max_dim: int | None = None) -> LanczosData:
    """Tridiagonalise a Hermitian H on the Krylov space of psi0.

    ``tol`` is relative to the infinity norm of H, an upper bound on its
    spectral norm. Iteration stops once b_{n+1} falls below it.
    """
    m = as_matrix(H)
    err = hermiticity_error(m)
    if err > 1e-10:
        raise ValueError(f"lanczos needs a Hermitian operator (max |H - H^dag| = {err:.3e})")
    dim = m.shape[0]
    psi = _check_state(psi0, dim)
    limit = dim if max_dim is None else min(max_dim, dim)
    scale = float(np.abs(m).sum(axis=1).max()) or 1.0

    rows = np.zeros((limit, dim), dtype=complex)
    rows[0] = psi
    a, b = [], []
    for n in range(limit):
        w = m @ rows[n]
        a_n = float(np.real(np.vdot(rows[n], w)))
        a.append(a_n)
        if n + 1 == limit:
            break
        w, _ = _orthogonalise(w, rows[: n + 1])
        b_next = float(np.linalg.norm(w))
        if b_next < tol * scale:
            break
        b.append(b_next)
        rows[n + 1] = w / b_next
    d_k = len(a)
    return LanczosData(np.array(a), np.array(b), rows[:d_k].T)


def arnoldi(U, psi0, tol: float = 1e-12, max_dim: int | None = None) -> ArnoldiData:
    """Upper-Hessenberg form of U on the Krylov space {psi0, U psi0, U^2 psi0, ...}.

    h[j, k] = <K_j|U|K_k>. The subdiagonal is the real positive residual norm,
    which fixes the phase of each new basis vector.
    """
    u = as_matrix(U)
    dim = u.shape[0]
    psi = _check_state(psi0, dim)
    unit_err = float(np.abs(u.conj().T @ u - np.eye(dim)).max())
    if unit_err > 1e-8:
        raise ValueError(f"arnoldi expects a unitary operator (max |U^dag U - I| = {unit_err:.3e})")
    limit = dim if max_dim is None else min(max_dim, dim)

    rows = np.zeros((limit, dim), dtype=complex)
    h = np.zeros((limit, limit), dtype=complex)
    rows[0] = psi
    halted_early = False
    d_k = limit
    for n in range(1, limit + 1):
        w, coeffs = _orthogonalise(u @ rows[n - 1], rows[:n])
        h[:n, n - 1] = coeffs
        if n == limit:
            break
        norm = float(np.linalg.norm(w))
        if norm < tol:
            halted_early = True
            d_k = n
            break
        h[n, n - 1] = norm
        rows[n] = w / norm
    return ArnoldiData(h[:d_k, :d_k].copy(), rows[:d_k].T, halted_early)


def amplitudes_direct(U, data: ArnoldiData, psi0, steps: int) -> AmplitudeTrajectory:
    """Project the Hilbert-space orbit U^j psi0 onto the Krylov basis."""
    u = as_matrix(U)
    psi = _check_state(psi0, u.shape[0])
    if data.basis.shape[0] != u.shape[0]:
        raise ValueError("Krylov basis lives in a different space than U")
    if abs(np.vdot(data.basis[:, 0], psi) - 1.0) > 1e-8:
        raise ValueError("Arnoldi data was not built from this initial state")
    proj = data.basis.conj().T
    amps = np.empty((data.krylov_dim, steps + 1), dtype=complex)
    for j in range(steps + 1):
        amps[:, j] = proj @ psi
        psi = u @ psi
    residual = 1.0 - np.sum(np.abs(amps) ** 2, axis=0)
    return AmplitudeTrajectory(amps, residual)


def amplitudes_chain(data: ArnoldiData, steps: int) -> AmplitudeTrajectory:
    """Solve psi^{j+1} = h psi^j from psi^0 = e_0 on the Krylov chain alone."""
    h = data.h
    amps = np.empty((data.krylov_dim, steps + 1), dtype=complex)
    current = np.zeros(data.krylov_dim, dtype=complex)
    current[0] = 1.0
    amps[:, 0] = current
    for j in range(steps):
        current = h @ current
        amps[:, j + 1] = current
    return AmplitudeTrajectory(amps)


@dataclass
class HighFreqReport:
    """Arnoldi coefficients of exp(-iH0 T) exp(-iV T) against Lanczos of H0 + V."""

    T: float
    arnoldi: ArnoldiData
    lanczos: LanczosData
    sub_deviation: np.ndarray
    diag_deviation: np.ndarray

    @property
    def n_compared(self) -> int:
        return len(self.sub_deviation)

    def median_sub_deviation(self, first: int = 20) -> float:
        vals = self.sub_deviation[:first]
        return float(np.median(vals)) if len(vals) else float("nan")


def highfreq_comparison(H0, V, psi0, T: float, max_index: int = 50) -> HighFreqReport:
    """Compare h_{n,n-1}/T with b_n and (1 - h_{n,n})/(iT) with a_n."""
    from .floquet import hermitian_expm

    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    h0, v = as_matrix(H0), as_matrix(V)
    u = hermitian_expm(h0, T).matrix @ hermitian_expm(v, T).matrix
    arn = arnoldi(u, psi0)
    lan = lanczos(h0 + v, psi0)
    n_sub = min(len(arn.subdiagonal), len(lan.b), max_index)
    sub = arn.subdiagonal[:n_sub]
    sub_dev = np.abs(sub / T - lan.b[:n_sub]) / lan.b[:n_sub]
    n_diag = min(arn.krylov_dim, lan.krylov_dim, max_index)
    diag_dev = np.abs((1.0 - arn.diagonal[:n_diag]) / (1j * T) - lan.a[:n_diag])
    return HighFreqReport(T, arn, lan, sub_dev, diag_dev)
