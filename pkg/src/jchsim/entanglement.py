"""Half-chain reduced density matrices and von Neumann entropy.

The sector vector is reshaped into a block-diagonal left x right amplitude
map (blocks labeled by the left half's excitation count); singular values
of the blocks give the entanglement spectrum directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import SectorBasis, enumerate_basis
from .spectral import SpectralDecomposition, SpectralWindow

__all__ = [
    "BipartitionTable",
    "ReducedDensityMatrix",
    "EntropyStatistics",
    "bipartition_table",
    "reduced_density_matrix",
    "schmidt_values",
    "entropy",
    "state_entropy",
    "page_value",
    "entropy_statistics",
]

_EIG_FLOOR = 1e-14


def _half_configs(L_half: int, n_max: int):
    """All (photons, atoms) configurations on L_half sites with total
    excitation 0..n_max, grouped by total, each group in enumeration order."""
    groups = []
    for n in range(n_max + 1):
        sub = enumerate_basis(L_half, n)
        groups.append([(s.photons, s.atoms) for s in sub.states])
    return groups


@dataclass
class BipartitionTable:
    """Precomputed index maps sending a sector vector into its left x right
    block structure for the half-chain cut.  Immutable, shared freely."""

    L: int
    N: int
    block_left_dims: list
    block_right_dims: list
    state_block: np.ndarray  # per basis index: left excitation count
    state_row: np.ndarray  # index within the left group
    state_col: np.ndarray  # index within the right group
    left_labels: list  # per block: left configurations (debugging)

    @property
    def left_dim_total(self) -> int:
        return sum(self.block_left_dims)


@lru_cache(maxsize=16)
def bipartition_table(L: int, N: int) -> BipartitionTable:
    if L % 2 != 0:
        raise ValueError(f"half-chain cut needs even L, got L={L}")
    half = L // 2
    left_groups = _half_configs(half, N)
    right_groups = left_groups  # same site count and cutoff
    left_index = [
        {cfg: i for i, cfg in enumerate(group)} for group in left_groups
    ]
    right_index = left_index
    basis = enumerate_basis(L, N)
    d = basis.dim
    state_block = np.zeros(d, dtype=np.int64)
    state_row = np.zeros(d, dtype=np.int64)
    state_col = np.zeros(d, dtype=np.int64)
    for k, s in enumerate(basis.states):
        lp, la = s.photons[:half], s.atoms[:half]
        rp, ra = s.photons[half:], s.atoms[half:]
        nl = sum(lp) + sum(la)
        state_block[k] = nl
        state_row[k] = left_index[nl][(lp, la)]
        state_col[k] = right_index[N - nl][(rp, ra)]
    return BipartitionTable(
        L=L,
        N=N,
        block_left_dims=[len(g) for g in left_groups],
        block_right_dims=[len(g) for g in right_groups[::-1]],
        state_block=state_block,
        state_row=state_row,
        state_col=state_col,
        left_labels=left_groups,
    )


def _blocks(state: np.ndarray, table: BipartitionTable):
    """Reshape the sector vector into its per-block amplitude matrices."""
    out = []
    for nl in range(table.N + 1):
        mask = table.state_block == nl
        rows = table.state_row[mask]
        cols = table.state_col[mask]
        block = np.zeros(
            (table.block_left_dims[nl], table.block_left_dims[table.N - nl]),
            dtype=state.dtype,
        )
        block[rows, cols] = state[mask]
        out.append(block)
    return out


def schmidt_values(state: np.ndarray, table: BipartitionTable) -> np.ndarray:
    """Squared Schmidt coefficients (RDM eigenvalues) of the half-chain cut."""
    lam = []
    for block in _blocks(state, table):
        if min(block.shape) == 0:
            continue
        s = np.linalg.svd(block, compute_uv=False)
        lam.append(s * s)
    return np.concatenate(lam)


@dataclass
class ReducedDensityMatrix:
    """Reduced state of the first L/2 sites, block-diagonal in the left
    excitation count."""

    table: BipartitionTable
    blocks: list  # per left-excitation count: dense Hermitian block

    def full_matrix(self) -> np.ndarray:
        d = self.table.left_dim_total
        out = np.zeros((d, d), dtype=self.blocks[0].dtype)
        off = 0
        for b in self.blocks:
            n = b.shape[0]
            out[off:off + n, off:off + n] = b
            off += n
        return out

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks])

    @property
    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks))


def reduced_density_matrix(state: np.ndarray, L: int, N: int,
                           tol: float = 1e-10) -> ReducedDensityMatrix:
    """Trace out the second half of the chain from a normalized sector
    vector."""
    state = np.asarray(state)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {tol}")
    table = bipartition_table(L, N)
    blocks = [m @ m.conj().T for m in _blocks(state, table)]
    return ReducedDensityMatrix(table=table, blocks=blocks)


def entropy(rho: ReducedDensityMatrix) -> float:
    """Von Neumann entropy in nats."""
    lam = rho.eigenvalues()
    lam = lam[lam > _EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def state_entropy(state: np.ndarray, table: BipartitionTable) -> float:
    """Half-chain entropy straight from Schmidt values (fast path)."""
    lam = schmidt_values(state, table)
    lam = lam[lam > _EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def page_value(basis: SectorBasis, samples: int,
               rng: np.random.Generator):
    """Monte-Carlo mean half-chain entropy of Haar-random unit vectors in
    the fixed-N sector.  Returns (mean, standard_error)."""
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    if basis.dim == 1:
        return 0.0, 0.0
    table = bipartition_table(basis.L, basis.N)
    vals = np.empty(samples)
    for k in range(samples):
        z = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        z /= np.linalg.norm(z)
        vals[k] = state_entropy(z, table)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


@dataclass
class EntropyStatistics:
    per_realization_mean: np.ndarray
    mean: float
    deviation: float  # sample std across realizations
    page: float = np.nan
    page_stderr: float = np.nan


def eigenstate_entropies(spec: SpectralDecomposition,
                         window: SpectralWindow,
                         table: BipartitionTable) -> np.ndarray:
    idx = window.indices(spec.eigenvalues)
    return np.array(
        [state_entropy(spec.eigenvectors[:, n], table) for n in idx]
    )


def entropy_statistics(spectra, window: SpectralWindow, L: int,
                       N: int) -> EntropyStatistics:
    """Window-averaged eigenstate entropy per realization, its ensemble mean
    and the sample-to-sample standard deviation."""
    spectra = list(spectra)
    if len(spectra) < 2:
        raise ValueError("need at least 2 realizations for the deviation")
    table = bipartition_table(L, N)
    means = np.array([
        eigenstate_entropies(spec, window, table).mean() for spec in spectra
    ])
    return EntropyStatistics(
        per_realization_mean=means,
        mean=float(means.mean()),
        deviation=float(means.std(ddof=1)),
    )
