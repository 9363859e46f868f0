"""Quasi-energy spectra and level-spacing statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .statespace import as_matrix

TWO_PI = 2 * np.pi
R_POISSON = 0.38629
R_GOE = 0.53590
DEGENERACY_TOL = 1e-12


@dataclass
class SpectralStats:
    phases: np.ndarray
    spacings: np.ndarray
    r_mean: float
    eta: float
    degeneracies: int

    @property
    def dim(self) -> int:
        return len(self.phases)


def quasienergies(U) -> np.ndarray:
    """Eigenphases of a unitary mapped to [0, 2 pi), sorted ascending."""
    u = as_matrix(U)
    try:
        evals = np.linalg.eigvals(u)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    worst = float(np.abs(np.abs(evals) - 1.0).max())
    if worst > 1e-8:
        raise NumericalError(f"eigenvalues off the unit circle by {worst:.3e}; operator is not unitary")
    phases = np.mod(np.angle(evals), TWO_PI)
    phases[phases >= TWO_PI] = 0.0
    return np.sort(phases)


def circular_spacings(phases) -> np.ndarray:
    """Raw gaps between consecutive phases, including the wrap-around gap; they sum to 2 pi."""
    ph = np.asarray(phases, dtype=float)
    return np.diff(np.append(ph, ph[0] + TWO_PI))


def normalized_spacings(phases) -> np.ndarray:
    s = circular_spacings(phases)
    return s / s.mean()


def _ratios(s: np.ndarray, s_prev: np.ndarray) -> np.ndarray:
    hi = np.maximum(s, s_prev)
    lo = np.minimum(s, s_prev)
    # both gaps exactly zero: count the ratio as 0
    return np.divide(lo, hi, out=np.zeros_like(lo), where=hi > 0)


def r_statistic(phases, circular: bool = True) -> float:
    """Mean of min(s_n, s_{n-1}) / max(s_n, s_{n-1}).

    With ``circular`` the phases live on the unit circle and all D ratios are
    used; otherwise they are treated as points on a line (D - 2 ratios).
    """
    ph = np.asarray(phases, dtype=float)
    if len(ph) < 3:
        raise ValueError("r statistic needs at least 3 levels")
    if circular:
        s = circular_spacings(ph)
        return float(_ratios(s, np.roll(s, 1)).mean())
    s = np.diff(np.sort(ph))
    return float(_ratios(s[1:], s[:-1]).mean())


def eta(r_mean: float) -> float:
    """Affine map sending the Poisson value to 0 and the GOE value to 1 (not clamped)."""
    return (r_mean - R_POISSON) / (R_GOE - R_POISSON)


def spectral_stats(U) -> SpectralStats:
    phases = quasienergies(U)
    raw = circular_spacings(phases)
    r = r_statistic(phases)
    return SpectralStats(
        phases=phases,
        spacings=raw / raw.mean(),
        r_mean=r,
        eta=eta(r),
        degeneracies=int(np.sum(raw < DEGENERACY_TOL)),
    )


def poisson_density(s) -> np.ndarray:
    return np.exp(-np.asarray(s, dtype=float))


def wigner_density(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.pi * s / 2 * np.exp(-np.pi * s**2 / 4)


@dataclass
class SpacingHistogram:
    edges: np.ndarray
    density: np.ndarray
    poisson: np.ndarray
    wigner: np.ndarray
    overflow: float = 0.0

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def l1_to_poisson(self) -> float:
        return float(np.sum(np.abs(self.density - self.poisson) * self.widths))

    def l1_to_wigner(self) -> float:
        return float(np.sum(np.abs(self.density - self.wigner) * self.widths))


def spacing_histogram(phases, bins: int = 30, s_max: float = 4.0) -> SpacingHistogram:
    """Histogram of mean-one spacings on [0, s_max] with reference curves at bin centres.

    Densities are normalised by the total number of spacings, so the in-range
    area plus ``overflow`` (the fraction of spacings above s_max) equals 1.
    """
    if bins < 2:
        raise ValueError("need at least 2 bins")
    if not s_max > 0:
        raise ValueError(f"s_max must be positive, got {s_max}")
    ph = np.asarray(phases, dtype=float)
    if len(ph) < 3:
        raise ValueError("histogram needs at least 3 levels")
    s = normalized_spacings(ph)
    counts, edges = np.histogram(s, bins=bins, range=(0.0, s_max))
    density = counts / (len(s) * np.diff(edges))
    overflow = float(np.mean(s > s_max))
    centers = (edges[:-1] + edges[1:]) / 2
    return SpacingHistogram(edges, density, poisson_density(centers), wigner_density(centers), overflow)


def sample_poisson_r(n_levels: int, rng: np.random.Generator) -> float:
    """r statistic of i.i.d. uniform phases on the circle."""
    return r_statistic(np.sort(rng.uniform(0.0, TWO_PI, size=n_levels)))


def sample_goe_r(dim: int, rng: np.random.Generator, bulk: float = 0.5) -> float:
    """r statistic of the central ``bulk`` fraction of one GOE spectrum."""
    a = rng.standard_normal((dim, dim))
    levels = np.linalg.eigvalsh((a + a.T) / 2)
    cut = int(round(dim * (1 - bulk) / 2))
    return r_statistic(levels[cut : dim - cut], circular=False)
