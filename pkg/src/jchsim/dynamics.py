"""Exact time evolution in the eigenbasis and derived trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import FockConfiguration, SectorBasis
from .entanglement import bipartition_table, state_entropy
from .spectral import SpectralDecomposition

__all__ = [
    "TimeGrid",
    "InitialStateSpec",
    "make_initial_state",
    "initial_vector",
    "evolve",
    "ee_trajectory",
    "occupation_trajectory",
]


@dataclass
class TimeGrid:
    """Strictly increasing sample times, in units of 1/J."""

    times: np.ndarray
    law: str = "explicit"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        if len(t) == 0:
            raise ValueError("time grid is empty")
        if np.any(t < 0) or np.any(np.diff(t) <= 0):
            raise ValueError("times must be non-negative, strictly increasing")
        self.times = t

    @classmethod
    def logarithmic(cls, t_min=1e-1, t_max=1e6, points_per_decade=40):
        n = int(round(points_per_decade * np.log10(t_max / t_min))) + 1
        return cls(np.geomspace(t_min, t_max, n), law="logarithmic")

    @classmethod
    def linear(cls, t_min, t_max, points):
        return cls(np.linspace(t_min, t_max, points), law="linear")

    @classmethod
    def three_windows(cls, points_per_window=26):
        """Early / intermediate / late 25-unit windows of equal sampling."""
        windows = [(0.0, 25.0), (1000.0, 1025.0), (1e6, 1e6 + 25.0)]
        t = np.concatenate([
            np.linspace(a, b, points_per_window, endpoint=False)
            for a, b in windows
        ])
        return cls(t, law="windowed")


@dataclass
class InitialStateSpec:
    kind: str
    configuration: FockConfiguration
    index: int = field(default=-1)


def make_initial_state(kind: str, L: int, N: int) -> InitialStateSpec:
    """Resolve the named product initial states.

    photon-odd-sites: one photon in each odd cavity, all atoms ground.
    atom-odd-sites:   each odd atom excited, all cavities empty.
    mixed-two-site:   photon plus excited atom at sites 1 and 5 (L=8, N=4).
    """
    sites = range(1, L + 1)
    if kind == "photon-odd-sites":
        photons = tuple(1 if i % 2 == 1 else 0 for i in sites)
        atoms = (0,) * L
    elif kind == "atom-odd-sites":
        photons = (0,) * L
        atoms = tuple(1 if i % 2 == 1 else 0 for i in sites)
    elif kind == "mixed-two-site":
        if L != 8 or N != 4:
            raise ValueError(
                "mixed-two-site needs L=8, N=4 "
                f"(sites 1 and 5 doubly occupied), got L={L}, N={N}"
            )
        photons = tuple(1 if i in (1, 5) else 0 for i in sites)
        atoms = tuple(1 if i in (1, 5) else 0 for i in sites)
    else:
        raise ValueError(f"unknown initial-state kind {kind!r}")
    cfg = FockConfiguration(photons, atoms)
    if cfg.total_excitation != N:
        raise ValueError(
            f"{kind} puts {cfg.total_excitation} excitations in the chain, "
            f"sector requires N={N}"
        )
    return InitialStateSpec(kind=kind, configuration=cfg)


def initial_vector(spec: InitialStateSpec, basis: SectorBasis) -> np.ndarray:
    idx = basis.rank(spec.configuration)
    psi = np.zeros(basis.dim)
    psi[idx] = 1.0
    spec.index = idx
    return psi


def evolve(spec: SpectralDecomposition, psi0: np.ndarray,
           grid: TimeGrid) -> np.ndarray:
    """Propagate psi0 to every grid time; returns (n_times, dim) complex."""
    psi0 = np.asarray(psi0)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    c = spec.eigenvectors.conj().T @ psi0.astype(complex)
    phases = np.exp(-1j * np.outer(grid.times, spec.eigenvalues))
    return (phases * c) @ spec.eigenvectors.T


def ee_trajectory(spec: SpectralDecomposition, psi0: np.ndarray,
                  grid: TimeGrid, L: int, N: int) -> np.ndarray:
    """Half-chain entanglement entropy at every grid time."""
    table = bipartition_table(L, N)
    states = evolve(spec, psi0, grid)
    return np.array([state_entropy(s, table) for s in states])


def occupation_trajectory(spec: SpectralDecomposition, psi0: np.ndarray,
                          grid: TimeGrid, basis: SectorBasis):
    """Per-site photon and atom occupation expectations along the
    trajectory.  Returns (n_c, n_a), each of shape (n_times, L)."""
    states = evolve(spec, psi0, grid)
    weights = np.abs(states) ** 2  # diagonal observables only
    n_c = weights @ basis.photons.astype(np.float64)
    n_a = weights @ basis.atoms.astype(np.float64)
    return n_c, n_a
