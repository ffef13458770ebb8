"""Fixed-excitation-number Fock basis for a Jaynes-Cummings-Hubbard chain.

Each site carries a bosonic cavity mode (photon count n_c >= 0) and a
two-level atom (n_a in {0, 1}); the conserved total excitation is
N = sum_i (n_c_i + n_a_i).  The basis is enumerated in lexicographic order
of the flattened tuple (n_c_1, n_a_1, ..., n_c_L, n_a_L).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

__all__ = [
    "FockConfiguration",
    "SectorBasis",
    "SymmetryAction",
    "sector_dimension",
    "enumerate_basis",
    "chiral_action",
    "reflection_action",
    "antisymmetric_projector",
    "commutator_check",
]


@dataclass(frozen=True)
class FockConfiguration:
    """One basis vector: per-site photon counts and atomic excitations."""

    photons: tuple[int, ...]
    atoms: tuple[int, ...]

    def __post_init__(self):
        if len(self.photons) != len(self.atoms):
            raise ValueError("photon and atom lists must have equal length")
        if any(n < 0 for n in self.photons):
            raise ValueError("photon counts must be non-negative")
        if any(a not in (0, 1) for a in self.atoms):
            raise ValueError("atomic excitations must be 0 or 1")

    @property
    def sites(self) -> int:
        return len(self.photons)

    @property
    def total_excitation(self) -> int:
        return sum(self.photons) + sum(self.atoms)

    def flattened(self) -> tuple[int, ...]:
        """Interleaved (n_c_1, n_a_1, ..., n_c_L, n_a_L) ordering key."""
        out = []
        for nc, na in zip(self.photons, self.atoms):
            out.append(nc)
            out.append(na)
        return tuple(out)

    def reflected(self) -> "FockConfiguration":
        return FockConfiguration(self.photons[::-1], self.atoms[::-1])

    def label(self) -> str:
        return " | ".join(
            f"{nc} {'e' if na else 'g'}"
            for nc, na in zip(self.photons, self.atoms)
        )


def sector_dimension(L: int, N: int) -> int:
    """Closed-form sector dimension, summing over the atomic-excitation
    count s from 0 (all-photon configurations included) to min(N, L)."""
    if L < 1:
        raise ValueError(f"need at least one site, got L={L}")
    if N < 0:
        raise ValueError(f"excitation number must be non-negative, got N={N}")
    return sum(
        comb(L, s) * comb(N - s + L - 1, L - 1) for s in range(0, min(N, L) + 1)
    )


def _generate(L: int, N: int):
    """Yield (photons, atoms) with total excitation N, lexicographically
    ordered over the interleaved per-site (n_c, n_a) tuple."""

    def rec(site: int, remaining: int, ph: list, at: list):
        if site == L:
            if remaining == 0:
                yield tuple(ph), tuple(at)
            return
        for nc in range(remaining + 1):
            for na in (0, 1):
                if nc + na > remaining:
                    continue
                ph.append(nc)
                at.append(na)
                yield from rec(site + 1, remaining - nc - na, ph, at)
                ph.pop()
                at.pop()

    yield from rec(0, N, [], [])


@dataclass
class SectorBasis:
    """Ordered fixed-(L, N) sector basis with O(1) rank lookup."""

    L: int
    N: int
    states: list[FockConfiguration]
    photons: np.ndarray = field(repr=False)  # (D, L) int16
    atoms: np.ndarray = field(repr=False)  # (D, L) int8
    _rank: dict = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.states)

    def rank(self, cfg: FockConfiguration) -> int:
        if cfg.sites != self.L:
            raise ValueError(
                f"configuration has {cfg.sites} sites, basis has {self.L}"
            )
        if cfg.total_excitation != self.N:
            raise ValueError(
                f"configuration carries {cfg.total_excitation} excitations, "
                f"sector requires {self.N}"
            )
        return self._rank[cfg.flattened()]

    def rank_arrays(self, photons, atoms) -> int:
        key = []
        for nc, na in zip(photons, atoms):
            key.append(int(nc))
            key.append(int(na))
        return self._rank[tuple(key)]

    def __getitem__(self, i: int) -> FockConfiguration:
        return self.states[i]

    def dump(self) -> str:
        """Debug listing, one line per state: `index: n_c a | ...`."""
        return "\n".join(f"{i}: {s.label()}" for i, s in enumerate(self.states))


def enumerate_basis(L: int, N: int) -> SectorBasis:
    """Enumerate the fixed-excitation sector in lexicographic order."""
    if L < 1:
        raise ValueError(f"need at least one site, got L={L}")
    if N < 0:
        raise ValueError(f"excitation number must be non-negative, got N={N}")
    states = [FockConfiguration(ph, at) for ph, at in _generate(L, N)]
    photons = np.array([s.photons for s in states], dtype=np.int16)
    atoms = np.array([s.atoms for s in states], dtype=np.int8)
    rank = {s.flattened(): i for i, s in enumerate(states)}
    return SectorBasis(L=L, N=N, states=states, photons=photons, atoms=atoms,
                       _rank=rank)


@dataclass
class SymmetryAction:
    """Signed basis permutation: acting on |i> gives signs[i] |permutation[i]>."""

    kind: str
    permutation: np.ndarray
    signs: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.permutation)

    def compose(self, other: "SymmetryAction") -> "SymmetryAction":
        """self applied after other."""
        if self.dim != other.dim:
            raise ValueError("actions act on different basis sizes")
        perm = self.permutation[other.permutation]
        signs = other.signs * self.signs[other.permutation]
        return SymmetryAction(f"{self.kind}∘{other.kind}", perm, signs)

    def is_identity(self) -> bool:
        return bool(
            np.array_equal(self.permutation, np.arange(self.dim))
            and np.all(self.signs == 1)
        )

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        m[self.permutation, np.arange(self.dim)] = self.signs
        return m


def chiral_action(basis: SectorBasis) -> SymmetryAction:
    """Chiral involution: photon-parity phase on even sites (1-based) times
    sigma_z on odd sites, with sigma_z|e> = +|e>, sigma_z|g> = -|g>.
    Diagonal in the Fock basis."""
    even = np.arange(1, basis.L + 1) % 2 == 0
    odd = ~even
    photon_parity = (-1) ** basis.photons[:, even].sum(axis=1)
    ground_odd = np.sum(basis.atoms[:, odd] == 0, axis=1)
    signs = (photon_parity * (-1) ** ground_odd).astype(np.int8)
    return SymmetryAction("chiral", np.arange(basis.dim), signs)


def reflection_action(basis: SectorBasis) -> SymmetryAction:
    """Spatial reflection: site i content moves to site L+1-i."""
    perm = np.array(
        [basis.rank(s.reflected()) for s in basis.states], dtype=np.int64
    )
    return SymmetryAction("reflection", perm,
                          np.ones(basis.dim, dtype=np.int8))


def antisymmetric_projector(basis: SectorBasis, P: SymmetryAction) -> np.ndarray:
    """Orthonormal column basis of the reflection-odd subspace.

    For every orbit pair (i, P(i)) with i < P(i) emit (|i> - |P(i)>)/sqrt(2);
    reflection fixed points carry no antisymmetric weight and are dropped.
    Returns a (dim, n_anti) matrix with n_anti = (dim - #fixed points)/2.
    """
    if P.dim != basis.dim:
        raise ValueError("reflection action built from a different basis")
    pairs = [(i, int(P.permutation[i])) for i in range(basis.dim)
             if i < P.permutation[i]]
    V = np.zeros((basis.dim, len(pairs)))
    inv = 1.0 / np.sqrt(2.0)
    for col, (i, j) in enumerate(pairs):
        V[i, col] = inv
        V[j, col] = -inv
    return V


def commutator_check(a: SymmetryAction, b: SymmetryAction) -> float:
    """Max-abs entry of the matrix commutator [a, b]; zero iff they commute."""
    if a.dim != b.dim:
        raise ValueError(
            f"actions act on different basis sizes ({a.dim} vs {b.dim})"
        )
    ab = a.compose(b)
    ba = b.compose(a)
    comm = ab.matrix() - ba.matrix()
    return float(np.abs(comm).max())
