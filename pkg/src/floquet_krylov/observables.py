"""Diagnostics computed from Krylov amplitudes and stroboscopic orbits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .floquet import iter_states
from .krylov import AmplitudeTrajectory, ArnoldiData
from .statespace import as_matrix

SLOPE_BOUND_TOL = 1e-6


def _probabilities(traj) -> np.ndarray:
    if isinstance(traj, AmplitudeTrajectory):
        return traj.probabilities()
    return np.abs(np.asarray(traj)) ** 2


@dataclass
class ComplexitySeries:
    C: np.ndarray
    S: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.C) - 1


def spread_complexity(traj) -> np.ndarray:
    """C_j = sum_n n |psi_n^j|^2 for each column j."""
    p = _probabilities(traj)
    return np.arange(p.shape[0]) @ p


def spread_entropy(traj) -> np.ndarray:
    """Shannon entropy (natural log) of |psi_n^j|^2 over n, with 0 ln 0 = 0."""
    p = _probabilities(traj)
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(p * np.log(safe), axis=0)


def complexity_series(traj) -> ComplexitySeries:
    return ComplexitySeries(spread_complexity(traj), spread_entropy(traj))


def default_saturation_window(krylov_dim: int) -> tuple[int, int]:
    """(burn_in, window) = (2 D_K, 10 D_K)."""
    return 2 * krylov_dim, 10 * krylov_dim


def saturation_value(traj, burn_in: int | None = None, window: int | None = None) -> float:
    """Long-time spread complexity: sum_n n * mean_j |psi_n^j|^2.

    The average runs over the half-open step range [burn_in, burn_in + window).
    """
    p = _probabilities(traj)
    d_k, n_cols = p.shape
    default_burn, default_window = default_saturation_window(d_k)
    burn_in = default_burn if burn_in is None else burn_in
    window = default_window if window is None else window
    if window < 1:
        raise ValueError("window must contain at least one step")
    if n_cols < burn_in + window:
        raise ValueError(
            f"trajectory has {n_cols} steps, saturation needs burn_in + window = {burn_in + window}"
        )
    mean_p = p[:, burn_in : burn_in + window].mean(axis=1)
    return float(np.arange(d_k) @ mean_p)


@dataclass
class DispersionStats:
    sigma_sub: float
    sigma_diag_re: float
    sigma_diag_im: float


def dispersion(data: ArnoldiData) -> DispersionStats:
    if data.krylov_dim < 2:
        raise ValueError("dispersion needs a Krylov dimension of at least 2")
    diag = data.diagonal
    sub = data.subdiagonal
    # a single subdiagonal entry has no spread
    sigma_sub = float(np.std(sub, ddof=1)) if len(sub) > 1 else 0.0
    return DispersionStats(
        sigma_sub=sigma_sub,
        sigma_diag_re=float(np.std(diag.real, ddof=1)),
        sigma_diag_im=float(np.std(diag.imag, ddof=1)),
    )


def rescale(values) -> np.ndarray:
    """Affine map of a sequence onto [0, 1]: (x - min) / (max - min)."""
    x = np.asarray(values, dtype=float)
    lo, hi = np.min(x), np.max(x)
    if not hi > lo:
        raise DegenerateInputError("cannot rescale a constant sequence")
    return (x - lo) / (hi - lo)


def default_slope_window(krylov_dim: int) -> int:
    return max(2, min(20, krylov_dim // 4))


def slope_fit(C, window: int | None = None) -> float:
    """Least-squares slope of C_j against j over j in [0, window), intercept free."""
    c = np.asarray(C, dtype=float)
    if window is None:
        window = min(20, len(c))
    if window < 2 or len(c) < window:
        raise ValueError(f"slope fit needs at least 2 points inside the series (window={window}, len={len(c)})")
    j = np.arange(window, dtype=float)
    y = c[:window]
    jc = j - j.mean()
    slope = float(jc @ (y - y.mean()) / (jc @ jc))
    if slope > 1 + SLOPE_BOUND_TOL:
        warnings.warn(f"fitted slope {slope:.6f} exceeds the unit growth bound", RuntimeWarning, stacklevel=2)
    return slope


def magnetization_series(
    U, psi0, Jz, steps: int, burn_in: int = 0, window: int | None = None
) -> tuple[np.ndarray, float]:
    """<psi_j|Jz|psi_j> for j = 0..steps and its average over [burn_in, burn_in + window)."""
    jz = as_matrix(Jz)
    u = as_matrix(U)
    if jz.shape != u.shape:
        raise ValueError(f"Jz of shape {jz.shape} does not match U of shape {u.shape}")
    series = np.array([np.real(np.vdot(psi, jz @ psi)) for psi in iter_states(u, psi0, steps)])
    if window is None:
        window = len(series) - burn_in
    if window < 1 or burn_in + window > len(series):
        raise ValueError("averaging window falls outside the series")
    return series, float(series[burn_in : burn_in + window].mean())
