"""Hamiltonians and observables over a fixed-excitation sector basis.

The disordered chain couples photons and atoms on-site with strengths g_i
drawn uniformly from [0, D], and hops photons between neighbors with
strength J (open boundaries).  All matrices are real symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis

__all__ = [
    "CouplingProfile",
    "HermitianOperator",
    "sample_couplings",
    "clean_profile",
    "build_hamiltonian",
    "build_clean_hamiltonian",
    "build_observable",
    "project_operator",
]


@dataclass(frozen=True)
class CouplingProfile:
    """Per-site atom-photon coupling strengths, in units of the hopping J."""

    g: tuple[float, ...]
    J: float = 1.0
    provenance: str = ""

    def __post_init__(self):
        if any(gi < 0 for gi in self.g):
            raise ValueError("coupling strengths must be non-negative")
        if self.J <= 0:
            raise ValueError("hopping strength J must be positive")

    @property
    def L(self) -> int:
        return len(self.g)


@dataclass
class HermitianOperator:
    """Real-symmetric operator over a SectorBasis, stored sparse."""

    basis: SectorBasis
    matrix: sp.csr_matrix
    label: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.matrix.diagonal())

    def dump_coordinates(self) -> str:
        """Text dump `row col value`, one nonzero per line, row-major."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return "\n".join(
            f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}" for k in order
        )


def sample_couplings(D: float, L: int, rng: np.random.Generator,
                     realization: Optional[int] = None) -> CouplingProfile:
    """Draw g_i independently and uniformly from [0, D]."""
    if D < 0:
        raise ValueError(f"disorder strength must be non-negative, got D={D}")
    g = tuple(float(x) for x in rng.uniform(0.0, D, size=L))
    tag = f"disorder D={D}"
    if realization is not None:
        tag += f" realization={realization}"
    return CouplingProfile(g=g, provenance=tag)


def clean_profile(g_cl: float, L: int) -> CouplingProfile:
    if g_cl < 0:
        raise ValueError(f"coupling must be non-negative, got g_cl={g_cl}")
    return CouplingProfile(g=(float(g_cl),) * L, provenance=f"clean g_cl={g_cl}")


def _symmetric_from_triplets(dim, rows, cols, vals) -> sp.csr_matrix:
    """Assemble M + M^T from strictly off-diagonal upper-triangle triplets."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim))
    return (m + m.T).tocsr()


def build_hamiltonian(basis: SectorBasis,
                      profile: CouplingProfile) -> HermitianOperator:
    """Assemble the sector Hamiltonian.

    On-site exchange: g_i sqrt(n_c) between (n_c, g) and (n_c - 1, e).
    Hopping: -J sqrt(n_c_i) sqrt(n_c_{i+1} + 1) moving one photon from
    site i to site i+1, open boundary.
    """
    if profile.L != basis.L:
        raise ValueError(
            f"profile has {profile.L} sites, basis has {basis.L}"
        )
    L, J = basis.L, profile.J
    rows, cols, vals = [], [], []
    ph = basis.photons.astype(np.int64)
    at = basis.atoms.astype(np.int64)
    for k in range(basis.dim):
        nc = ph[k]
        na = at[k]
        for i in range(L):
            # a_i sigma_i^+ : absorb a photon, excite the atom
            if nc[i] >= 1 and na[i] == 0 and profile.g[i] > 0:
                nc2 = nc.copy()
                na2 = na.copy()
                nc2[i] -= 1
                na2[i] = 1
                j = basis.rank_arrays(nc2, na2)
                amp = profile.g[i] * np.sqrt(float(nc[i]))
                if j > k:
                    rows.append(k)
                    cols.append(j)
                    vals.append(amp)
                elif j < k:
                    rows.append(j)
                    cols.append(k)
                    vals.append(amp)
            # a_{i+1}^dag a_i : photon moves from site i to site i+1
            if i < L - 1 and nc[i] >= 1:
                nc2 = nc.copy()
                nc2[i] -= 1
                nc2[i + 1] += 1
                j = basis.rank_arrays(nc2, at[k])
                amp = -J * np.sqrt(float(nc[i])) * np.sqrt(float(nc[i + 1] + 1))
                if j > k:
                    rows.append(k)
                    cols.append(j)
                    vals.append(amp)
                else:
                    rows.append(j)
                    cols.append(k)
                    vals.append(amp)
    mat = _symmetric_from_triplets(basis.dim, rows, cols, vals)
    return HermitianOperator(basis, mat, label=profile.provenance or "H")


def project_operator(op: HermitianOperator, V: np.ndarray,
                     label: Optional[str] = None) -> HermitianOperator:
    """Restrict op to the subspace spanned by the orthonormal columns of V."""
    if V.shape[0] != op.dim:
        raise ValueError(
            f"subspace built over dimension {V.shape[0]}, operator has {op.dim}"
        )
    small = V.T @ (op.matrix @ V)
    small = 0.5 * (small + small.T)  # kill round-off asymmetry
    return HermitianOperator(op.basis, sp.csr_matrix(small),
                             label=label or f"{op.label}|projected")


def build_clean_hamiltonian(basis: SectorBasis, g_cl: float, J: float = 1.0,
                            subspace: Optional[np.ndarray] = None
                            ) -> HermitianOperator:
    """Uniform-coupling Hamiltonian, optionally restricted to the
    reflection-antisymmetric subspace (columns of `subspace`)."""
    profile = CouplingProfile(g=(float(g_cl),) * basis.L, J=J,
                              provenance=f"clean g_cl={g_cl}")
    h = build_hamiltonian(basis, profile)
    if subspace is None:
        return h
    return project_operator(h, subspace, label=f"{h.label}|antisym")


def build_observable(basis: SectorBasis, which: str,
                     site: Optional[int] = None) -> HermitianOperator:
    """Observables used throughout: local occupancies and the kinetic term.

    which:
      'site_occupancy'   diagonal n_c_i + n_a_i  (1-based site)
      'photon_occupancy' diagonal n_c_i
      'atom_occupancy'   diagonal n_a_i
      'kinetic'          (1/L) sum of photon hops, positive sign, so that
                         H = -J*L*kinetic when all g_i = 0
    """
    if which == "kinetic":
        hop = build_hamiltonian(
            basis, CouplingProfile(g=(0.0,) * basis.L, J=1.0)
        )
        mat = (hop.matrix * (-1.0 / basis.L)).tocsr()
        return HermitianOperator(basis, mat, label="H_kin")
    if site is None or not (1 <= site <= basis.L):
        raise ValueError(
            f"site index must be in [1, {basis.L}], got {site}"
        )
    i = site - 1
    if which == "site_occupancy":
        diag = basis.photons[:, i] + basis.atoms[:, i]
        label = f"N_{site}"
    elif which == "photon_occupancy":
        diag = basis.photons[:, i]
        label = f"n_c_{site}"
    elif which == "atom_occupancy":
        diag = basis.atoms[:, i]
        label = f"n_a_{site}"
    else:
        raise ValueError(f"unknown observable kind {which!r}")
    mat = sp.diags(diag.astype(np.float64)).tocsr()
    return HermitianOperator(basis, mat, label=label)
