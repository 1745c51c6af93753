"""Quantitative extraction: spectrum plateaus, EE plateau values, lifetimes,
scaling collapses, and the first-order perturbation-theory map.

Collapse thresholds are numeric stand-ins for by-eye judgement: curves are
called collapsed when their pointwise ratio stays within a factor 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import basis
from .basis import Sector

COLLAPSE_FACTOR = 2.0
DEFAULT_PLATEAU_WINDOW = (10.0, 1e3)  # inside the plateau for V=100, lambda=0.1


class PTDegeneracyError(RuntimeError):
    """Near-degenerate denominator with a nonzero matrix element."""


@dataclass
class EETimeSeries:
    """Entropy-vs-time record with full run metadata."""

    times: np.ndarray
    entropies: np.ndarray
    metadata: dict
    norm_errors: np.ndarray | None = None
    coefficients: np.ndarray | None = None       # (n_times, n_targets) complex
    target_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.times) != len(self.entropies):
            raise ValueError("times and entropies must have equal length")

    @property
    def lam(self) -> float:
        return float(self.metadata["lambda"])

    @property
    def V(self) -> float:
        return float(self.metadata["V"])


@dataclass(frozen=True)
class PlateauStats:
    window: tuple[float, float]
    mean: float
    max_deviation: float
    rescaled: float | None  # mean * (V/lambda)^2


def plateau_stats(
    series: EETimeSeries, window: tuple[float, float] = DEFAULT_PLATEAU_WINDOW
) -> PlateauStats:
    """Mean and max-deviation of entropy over a time window."""
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy t_lo < t_hi")
    mask = (series.times >= lo) & (series.times <= hi)
    if mask.sum() < 10:
        raise ValueError(f"window {window} contains {int(mask.sum())} < 10 points")
    vals = series.entropies[mask]
    mean = float(vals.mean())
    rescaled = None
    if series.lam > 0 and series.V > 0:
        rescaled = mean * (series.V / series.lam) ** 2
    return PlateauStats(
        window=(lo, hi),
        mean=mean,
        max_deviation=float(np.abs(vals - mean).max()),
        rescaled=rescaled,
    )


def lifetime(
    series: EETimeSeries, plateau: PlateauStats, factor: float = 2.0
) -> float | None:
    """Earliest grid time after the plateau window where the entropy has
    grown to factor x plateau mean; None if never crossed."""
    if factor <= 1:
        raise ValueError("factor must exceed 1")
    after = series.times > plateau.window[1]
    crossed = after & (series.entropies >= factor * plateau.mean)
    if not crossed.any():
        return None
    return float(series.times[np.argmax(crossed)])


def rescaled_lifetime(
    series: EETimeSeries,
    plateau: PlateauStats,
    time_exponent: int,
    factor: float = 2.0,
    J: float = 1.0,
) -> float | None:
    """Departure time mapped to the lambda (J/V)^k t axis."""
    t = lifetime(series, plateau, factor)
    if t is None:
        return None
    return series.lam * (J / series.V) ** time_exponent * t


@dataclass(frozen=True)
class CollapseReport:
    value_exponent: int
    time_exponent: int
    grid: np.ndarray           # common rescaled-time grid (log-spaced)
    curves: np.ndarray         # (n_series, n_grid) rescaled entropies
    max_abs_distance: float    # max pairwise L-infinity distance
    max_ratio: float           # max pairwise pointwise ratio (floored values)

    @property
    def collapsed(self) -> bool:
        return self.max_ratio <= COLLAPSE_FACTOR


def rescale_collapse(
    series_set: list[EETimeSeries],
    value_exponent: int,
    time_exponent: int,
    window: tuple[float, float] | None = None,
    n_grid: int = 200,
    J: float = 1.0,
) -> CollapseReport:
    """Overlay curves rescaled by (V/lambda)^a in value and lambda(J/V)^k in
    time, interpolated onto a common log-time grid.

    The ratio metric ignores grid points where any curve sits below 1e-3 of
    the overall maximum (early-time noise floor).
    """
    if len(series_set) < 2:
        raise ValueError("need at least two series")
    keys = {
        (s.metadata.get("sector"), s.metadata.get("perturbation"))
        for s in series_set
    }
    if len(keys) != 1:
        raise ValueError("series must share sector and perturbation kind")
    rescaled = []
    for s in series_set:
        tt = s.lam * (J / s.V) ** time_exponent * s.times
        vv = s.entropies * (s.V / s.lam) ** value_exponent
        rescaled.append((tt, vv))
    lo = max(tt[0] for tt, _ in rescaled)
    hi = min(tt[-1] for tt, _ in rescaled)
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if not lo < hi:
        raise ValueError("rescaled time ranges do not overlap")
    grid = np.geomspace(lo, hi, n_grid)
    curves = np.array(
        [np.interp(np.log(grid), np.log(tt), vv) for tt, vv in rescaled]
    )
    dists = []
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            dists.append(np.abs(curves[i] - curves[j]).max())
    floor = 1e-3 * curves.max()
    usable = (curves > floor).all(axis=0)
    if usable.any():
        hi_c = curves[:, usable].max(axis=0)
        lo_c = curves[:, usable].min(axis=0)
        max_ratio = float((hi_c / lo_c).max())
    else:
        max_ratio = np.inf
    return CollapseReport(
        value_exponent=value_exponent,
        time_exponent=time_exponent,
        grid=grid,
        curves=curves,
        max_abs_distance=float(max(dists)),
        max_ratio=max_ratio,
    )


# -- spectrum --------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    dominant_sector_ids: np.ndarray  # per eigenstate
    dominant_weights: np.ndarray
    L: int

    def sector_string(self, k: int) -> str:
        return basis.sector_to_string(
            basis.sector_from_id(int(self.dominant_sector_ids[k]), self.L)
        )

    def eigenvalues_of(self, sector: Sector) -> np.ndarray:
        sid = basis.sector_id(sector)
        return self.eigenvalues[self.dominant_sector_ids == sid]


def spectrum_report(h: sp.spmatrix, L: int) -> SpectrumReport:
    """Full diagonalization with per-eigenstate dominant-sector tagging.

    Ties in population weight are broken toward the lowest sector id.
    """
    if h.shape[0] > 4096:
        raise ValueError("dense spectrum path is limited to L <= 6")
    from .dynamics import dense_eigh  # local import to avoid a cycle

    evals, evecs = dense_eigh(h)
    sid = basis.sector_id_array(L)
    indicator = sp.csr_matrix(
        (np.ones(4**L), (sid, np.arange(4**L))), shape=(2**L, 4**L)
    )
    weights = indicator @ (np.abs(evecs) ** 2)  # (2^L, 4^L eigenstates)
    dominant = np.argmax(weights, axis=0)  # argmax takes the first (lowest id) on ties
    return SpectrumReport(
        eigenvalues=evals,
        dominant_sector_ids=dominant,
        dominant_weights=weights[dominant, np.arange(weights.shape[1])],
        L=L,
    )


def sector_isolation_gap(report: SpectrumReport, sector: Sector) -> float:
    """Minimum |E_i - E_j| between eigenstates dominated by the sector and
    all other eigenstates."""
    sid = basis.sector_id(sector)
    inside = report.eigenvalues[report.dominant_sector_ids == sid]
    outside = report.eigenvalues[report.dominant_sector_ids != sid]
    if len(inside) == 0 or len(outside) == 0:
        raise ValueError("sector does not split the spectrum")
    return float(np.abs(inside[:, None] - outside[None, :]).min())


# -- first-order perturbation theory ----------------------------------------

@dataclass(frozen=True)
class PTResult:
    """First-order Rayleigh-Schroedinger map around h_diag = H0 + H_V.

    forward[j, i] are the coefficients of unperturbed eigenstate |j> in the
    perturbed state |i'>; inverse is the first-order inverse map.
    """

    energies: np.ndarray
    eigvecs: np.ndarray          # unperturbed eigenvectors (columns)
    forward: np.ndarray          # I + lam * C
    inverse: np.ndarray          # I - lam * C
    lam: float

    def perturbed_states(self) -> np.ndarray:
        """Perturbed eigenstates as columns in the computational basis
        (unnormalized, as written at first order)."""
        return self.eigvecs @ self.forward


def pt_first_order(
    h_diag: sp.spmatrix,
    h1: sp.spmatrix,
    lam: float,
    gap_tol: float | None = None,
) -> PTResult:
    """|i'> = |i> + lam sum_{j != i} <j|h1_unit|i> / (E_i - E_j) |j>.

    h1 must be passed at unit strength.  Near-degenerate denominators with a
    nonzero numerator raise PTDegeneracyError.
    """
    if h_diag.shape[0] > 4096:
        raise ValueError("PT map is dense; limited to L <= 6")
    from .dynamics import dense_eigh

    evals, evecs = dense_eigh(h_diag)
    w = evecs.T @ (h1.tocsr() @ evecs)
    gaps = evals[None, :] - evals[:, None]  # gaps[j, i] = E_i - E_j
    if gap_tol is None:
        gap_tol = 1e-9 * max(1.0, float(np.abs(evals).max()))
    num_tol = 1e-12 * max(1.0, float(np.abs(w).max()))
    off = ~np.eye(len(evals), dtype=bool)
    bad = off & (np.abs(gaps) < gap_tol) & (np.abs(w) > num_tol)
    if bad.any():
        j, i = np.argwhere(bad)[0]
        raise PTDegeneracyError(
            f"|E_{i} - E_{j}| = {abs(gaps[j, i]):.3e} below {gap_tol:.3e} "
            f"with matrix element {abs(w[j, i]):.3e}"
        )
    coeff = np.zeros_like(w)
    ok = off & (np.abs(gaps) >= gap_tol)
    coeff[ok] = w[ok] / gaps[ok]
    eye = np.eye(len(evals))
    return PTResult(
        energies=evals,
        eigvecs=evecs,
        forward=eye + lam * coeff,
        inverse=eye - lam * coeff,
        lam=lam,
    )


def pt_evolve(pt: PTResult, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """(n_times, dim) states evolved with the first-order map: expand psi0 in
    the perturbed basis, rotate phases with the unperturbed energies, map
    back to the computational basis."""
    a0 = pt.inverse @ (pt.eigvecs.T @ np.asarray(psi0, dtype=np.complex128))
    phases = np.exp(-1j * np.outer(np.asarray(times), pt.energies))
    perturbed = pt.perturbed_states()
    return (phases * a0[None, :]) @ perturbed.T
