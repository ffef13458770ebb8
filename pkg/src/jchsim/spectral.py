"""Dense diagonalization and level statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .operators import HermitianOperator

__all__ = [
    "SpectralDecomposition",
    "SpectralWindow",
    "diagonalize",
    "eigenvalues_only",
    "level_spacing_ratio",
    "energy_density",
]

# Gaps below this fraction of the spectral span count as degenerate and are
# excluded from r-statistics (clean strong coupling produces many).
DEGENERACY_FLOOR = 1e-12


@dataclass
class SpectralDecomposition:
    """Full eigensystem: ascending eigenvalues, orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: object = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass
class SpectralWindow:
    """Index window into an ascending spectrum.

    kinds: 'middle-third' and 'middle-four-fifths' keep the stated fraction
    of eigenstates by index count, centered; 'energy-density' keeps states
    with eps in [lo, hi]; 'all' keeps everything.
    """

    kind: str = "middle-third"
    lo: float = 0.0
    hi: float = 1.0

    @classmethod
    def middle_third(cls):
        return cls("middle-third")

    @classmethod
    def middle_four_fifths(cls):
        return cls("middle-four-fifths")

    @classmethod
    def energy_density_range(cls, lo: float, hi: float):
        return cls("energy-density", lo, hi)

    def indices(self, eigenvalues: np.ndarray) -> np.ndarray:
        d = len(eigenvalues)
        if self.kind == "all":
            idx = np.arange(d)
        elif self.kind == "middle-third":
            keep = max(1, int(round(d / 3)))
            start = (d - keep) // 2
            idx = np.arange(start, start + keep)
        elif self.kind == "middle-four-fifths":
            keep = max(1, int(round(4 * d / 5)))
            start = (d - keep) // 2
            idx = np.arange(start, start + keep)
        elif self.kind == "energy-density":
            eps = energy_density(eigenvalues)
            idx = np.nonzero((eps >= self.lo) & (eps <= self.hi))[0]
        else:
            raise ValueError(f"unknown window kind {self.kind!r}")
        if len(idx) == 0:
            raise ValueError("spectral window resolves to no eigenstates")
        return idx


def _dense_checked(H: HermitianOperator) -> np.ndarray:
    m = H.dense()
    if not np.all(np.isfinite(m)):
        raise ValueError(f"operator {H.label!r} contains non-finite entries")
    return m


def diagonalize(H: HermitianOperator) -> SpectralDecomposition:
    """Full dense eigendecomposition (eigenvectors included)."""
    m = _dense_checked(H)
    try:
        w, v = sla.eigh(m, driver="evd")
    except sla.LinAlgError as err:  # pragma: no cover - LAPACK failure
        raise RuntimeError(
            f"eigensolver failed on operator {H.label!r}: {err}"
        ) from err
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v, basis=H.basis)


def eigenvalues_only(H: HermitianOperator) -> np.ndarray:
    """Eigenvalues without vectors; faster path for spectrum-only tasks."""
    m = _dense_checked(H)
    return sla.eigvalsh(m, driver="evx")


def level_spacing_ratio(eigenvalues: np.ndarray,
                        window: Optional[SpectralWindow] = None,
                        degeneracy_floor: float = DEGENERACY_FLOOR):
    """Consecutive-gap ratios r_n = min(gap_{n+1}/gap_n, gap_n/gap_{n+1}).

    Gaps smaller than degeneracy_floor * spectral span are dropped (and
    counted) before forming ratios.  Returns (mean_r, r_values,
    n_degenerate_gaps).
    """
    ev = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    if window is not None:
        ev = ev[window.indices(ev)]
    if len(ev) < 3:
        raise ValueError(
            f"need at least 3 eigenvalues in the window, got {len(ev)}"
        )
    span = float(eigenvalues.max() - eigenvalues.min())
    gaps = np.diff(ev)
    floor = degeneracy_floor * max(span, 1.0e-300)
    keep = gaps > floor
    n_degenerate = int(np.sum(~keep))
    gaps = gaps[keep]
    if len(gaps) < 2:
        raise ValueError("window too degenerate for r-statistics")
    r = np.minimum(gaps[1:] / gaps[:-1], gaps[:-1] / gaps[1:])
    return float(r.mean()), r, n_degenerate


def energy_density(eigenvalues: np.ndarray) -> np.ndarray:
    """Affine rescale of the spectrum to [0, 1]."""
    ev = np.asarray(eigenvalues, dtype=np.float64)
    emin, emax = float(ev.min()), float(ev.max())
    if emax <= emin:
        raise ValueError("energy density undefined for a fully degenerate "
                         "spectrum")
    return (ev - emin) / (emax - emin)
