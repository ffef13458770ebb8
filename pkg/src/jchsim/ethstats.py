"""Eigenbasis matrix-element statistics of local observables.

Diagonal elements are tracked against energy density over a central index
window; off-diagonal elements are collected in a thin window of pair-mean
energy density around mid-spectrum and coarse-grained in the density
difference omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import HermitianOperator
from .spectral import SpectralDecomposition, SpectralWindow, energy_density

__all__ = [
    "MatrixElementTable",
    "BinnedStatistics",
    "OffdiagAccumulator",
    "matrix_elements",
    "diag_fluctuations",
    "binned_offdiag",
    "gamma_ratio",
]

DEGENERATE_OMEGA = 1e-12
DEFAULT_TARGET_HALF_WIDTH = 0.005  # pairs kept when |eps_mean - 0.5| <= this
DEFAULT_DELTA_OMEGA = 0.002
DEFAULT_MIN_COUNT = 10


@dataclass
class MatrixElementTable:
    label: str
    diag_eps: np.ndarray
    diag_values: np.ndarray
    offdiag_eps_mean: np.ndarray
    offdiag_omega: np.ndarray
    offdiag_values: np.ndarray
    n_degenerate_pairs: int = 0


def matrix_elements(O: HermitianOperator, spec: SpectralDecomposition,
                    diag_window: SpectralWindow | None = None,
                    target_half_width: float = DEFAULT_TARGET_HALF_WIDTH
                    ) -> MatrixElementTable:
    """Eigenbasis elements of O.

    Diagonal: O_nn over diag_window (default middle four-fifths).
    Off-diagonal: O_nm for unordered pairs with mean energy density within
    target_half_width of 0.5; omega = eps_n - eps_m > 0 stored once per
    pair, degenerate pairs (omega below floor) dropped and counted.
    """
    if O.basis is not None and spec.basis is not None and O.basis is not spec.basis:
        raise ValueError("observable and decomposition use different bases")
    if O.dim != spec.dim:
        raise ValueError(
            f"dimension mismatch: observable {O.dim}, spectrum {spec.dim}"
        )
    if diag_window is None:
        diag_window = SpectralWindow.middle_four_fifths()
    V = spec.eigenvectors
    Ot = V.T @ (O.matrix @ V)
    eps = energy_density(spec.eigenvalues)

    idx = diag_window.indices(spec.eigenvalues)
    diag = np.diag(Ot)

    # pairs n > m with mean density inside the target window
    mean_eps = 0.5 * (eps[:, None] + eps[None, :])
    omega = eps[:, None] - eps[None, :]
    sel = (omega > 0) & (np.abs(mean_eps - 0.5) <= target_half_width)
    n_deg = int(np.sum(sel & (omega <= DEGENERATE_OMEGA)))
    sel &= omega > DEGENERATE_OMEGA
    rows, cols = np.nonzero(sel)
    return MatrixElementTable(
        label=O.label,
        diag_eps=eps[idx],
        diag_values=diag[idx].copy(),
        offdiag_eps_mean=mean_eps[rows, cols],
        offdiag_omega=omega[rows, cols],
        offdiag_values=Ot[rows, cols],
        n_degenerate_pairs=n_deg,
    )


def diag_fluctuations(table: MatrixElementTable) -> float:
    """Mean eigenstate-to-eigenstate fluctuation of the diagonal:
    average over consecutive window states of ||O_{n+1,n+1}| - |O_nn||."""
    d = np.abs(table.diag_values)
    if len(d) < 2:
        raise ValueError("need at least 2 diagonal entries")
    return float(np.mean(np.abs(np.diff(d))))


@dataclass
class BinnedStatistics:
    """Coarse-grained off-diagonal statistics on an omega grid."""

    label: str
    bin_centers: np.ndarray
    mean_abs2: np.ndarray
    mean_abs: np.ndarray
    mean_value: np.ndarray
    counts: np.ndarray
    delta_omega: float

    def gamma(self) -> np.ndarray:
        return gamma_ratio(self)


class OffdiagAccumulator:
    """Bin-wise sufficient statistics; merging realizations is a commutative
    weighted sum, so aggregation order never matters."""

    def __init__(self, delta_omega: float = DEFAULT_DELTA_OMEGA,
                 label: str = ""):
        self.delta_omega = float(delta_omega)
        self.label = label
        self._sums: dict[int, np.ndarray] = {}

    def add(self, omega: np.ndarray, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        bins = np.floor(np.asarray(omega) / self.delta_omega).astype(np.int64)
        for b in np.unique(bins):
            v = values[bins == b]
            row = self._sums.setdefault(b, np.zeros(4))
            row += (len(v), np.sum(v * v), np.sum(np.abs(v)), np.sum(v))

    def add_table(self, table: MatrixElementTable):
        if not self.label:
            self.label = table.label
        self.add(table.offdiag_omega, table.offdiag_values)

    def merge(self, other: "OffdiagAccumulator"):
        if other.delta_omega != self.delta_omega:
            raise ValueError("bin widths differ")
        for b, row in other._sums.items():
            self._sums.setdefault(b, np.zeros(4))
            self._sums[b] += row

    def result(self, min_count: int = DEFAULT_MIN_COUNT) -> BinnedStatistics:
        items = sorted(
            (b, row) for b, row in self._sums.items() if row[0] >= min_count
        )
        if not items:
            raise ValueError("no bin reaches the minimum count")
        bins = np.array([b for b, _ in items])
        rows = np.array([row for _, row in items])
        counts = rows[:, 0]
        return BinnedStatistics(
            label=self.label,
            bin_centers=(bins + 0.5) * self.delta_omega,
            mean_abs2=rows[:, 1] / counts,
            mean_abs=rows[:, 2] / counts,
            mean_value=rows[:, 3] / counts,
            counts=counts.astype(np.int64),
            delta_omega=self.delta_omega,
        )


def binned_offdiag(table: MatrixElementTable,
                   delta_omega: float = DEFAULT_DELTA_OMEGA,
                   min_count: int = DEFAULT_MIN_COUNT) -> BinnedStatistics:
    """Single-realization coarse-graining of |O_nm| statistics in omega."""
    acc = OffdiagAccumulator(delta_omega=delta_omega, label=table.label)
    acc.add_table(table)
    return acc.result(min_count=min_count)


def gamma_ratio(stats: BinnedStatistics) -> np.ndarray:
    """Normality diagnostic per bin: mean|O|^2 / (mean|O|)^2, equal to pi/2
    for zero-mean Gaussian elements.  Zero-mean-|O| bins yield NaN."""
    with np.errstate(divide="ignore", invalid="ignore"):
        g = stats.mean_abs2 / stats.mean_abs**2
    return g
