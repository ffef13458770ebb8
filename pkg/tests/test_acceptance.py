"""End-to-end acceptance suite.

Each test is one published-physics acceptance criterion, run at its stated
tolerance on freshly generated ensembles.  One pass/fail line per criterion
under `pytest -v`.  These are slower than the unit tests (the two
level-statistics criteria each diagonalize 400 dense 2816x2816 matrices);
run them with `pytest tests/test_acceptance.py -v`.
"""

import hashlib
import math
import os

import numpy as np
import pytest
from scipy.stats import linregress

from jchsim import (SpectralWindow, TimeGrid, binned_offdiag, bipartition_table,
                    build_clean_hamiltonian, build_hamiltonian,
                    build_observable, chiral_action, commutator_check,
                    derive_rng, diag_fluctuations, diagonalize, ee_trajectory,
                    eigenstate_entropies, eigenvalues_only, enumerate_basis,
                    gamma_ratio, initial_vector, level_spacing_ratio,
                    make_initial_state, matrix_elements, page_value,
                    reduced_density_matrix, reflection_action,
                    sample_couplings, sector_dimension)
from jchsim.cli import main as cli_main

from oracles import brute_force_sector, oracle_hamiltonian, \
    oracle_reduced_density

SEED = 977

# Ensemble sizes.  The level-statistics criteria state >= 400 realizations
# and the entanglement-growth criterion >= 200; the remaining criteria state
# no count, so sizes there are chosen for stable means at tractable runtime.
N_R_STAT = 400
N_GROWTH = 400
N_ERGODIC_VEC = 10
N_LOCALIZED_VEC = 5
N_SMALL_VEC = 40
N_CHIRAL = 100


def _mean_r(L, D, param_idx, n_realizations):
    basis = enumerate_basis(L, L // 2)
    means = np.empty(n_realizations)
    for k in range(n_realizations):
        profile = sample_couplings(D, L, derive_rng(SEED, param_idx, k))
        ev = eigenvalues_only(build_hamiltonian(basis, profile))
        means[k], _, _ = level_spacing_ratio(ev, SpectralWindow.middle_third())
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(len(means)))


@pytest.fixture(scope="module")
def ergodic_L8():
    """Eigenvector-bearing ergodic ensemble, L=8, D/J=2, reduced to the
    derived per-realization quantities so only one decomposition is held in
    memory at a time."""
    L, D = 8, 2.0
    basis = enumerate_basis(L, L // 2)
    obs = build_observable(basis, "site_occupancy", site=L // 2)
    table = bipartition_table(L, L // 2)
    window = SpectralWindow.middle_third()
    entropy_means, fluctuations, gamma_by_bin = [], [], {}
    for k in range(N_ERGODIC_VEC):
        profile = sample_couplings(D, L, derive_rng(SEED, 0, k))
        spec = diagonalize(build_hamiltonian(basis, profile))
        entropy_means.append(eigenstate_entropies(spec, window, table).mean())
        elements = matrix_elements(obs, spec)
        fluctuations.append(diag_fluctuations(elements))
        stats = binned_offdiag(elements)
        for center, g in zip(stats.bin_centers, gamma_ratio(stats)):
            gamma_by_bin.setdefault(round(center, 9), []).append(g)
    return {
        "L": L,
        "dim": basis.dim,
        "entropy_means": np.array(entropy_means),
        "fluctuations": np.array(fluctuations),
        "gamma_by_bin": gamma_by_bin,
    }


@pytest.fixture(scope="module")
def localized_L8_entropy():
    L, D = 8, 100.0
    basis = enumerate_basis(L, L // 2)
    table = bipartition_table(L, L // 2)
    window = SpectralWindow.middle_third()
    means = []
    for k in range(N_LOCALIZED_VEC):
        profile = sample_couplings(D, L, derive_rng(SEED, 1, k))
        spec = diagonalize(build_hamiltonian(basis, profile))
        means.append(eigenstate_entropies(spec, window, table).mean())
    return np.array(means)


@pytest.fixture(scope="module")
def page_L8():
    basis = enumerate_basis(8, 4)
    return page_value(basis, 300, derive_rng(SEED, 8, 0))


def test_criterion_01_level_statistics_ergodic():
    """L=8, D/J=2, 400 realizations: <r> in the Wigner-Dyson band."""
    mean, stderr = _mean_r(8, 2.0, 2, N_R_STAT)
    print(f"criterion 1: <r> = {mean:.4f} +- {stderr:.4f}, band 0.536 +- 0.02")
    assert abs(mean - 0.536) <= 0.02


def test_criterion_02_level_statistics_localized():
    """L=8, D/J=100, 400 realizations: <r> in the Poisson band."""
    mean, stderr = _mean_r(8, 100.0, 3, N_R_STAT)
    print(f"criterion 2: <r> = {mean:.4f} +- {stderr:.4f}, band 0.386 +- 0.02")
    assert abs(mean - 0.386) <= 0.02


def test_criterion_03_entanglement_normalization(ergodic_L8,
                                                 localized_L8_entropy,
                                                 page_L8):
    """Middle-third eigenstate entropy over the random-state baseline:
    near 1 in the ergodic phase, small in the localized phase."""
    s_page, _ = page_L8
    ergodic_ratio = ergodic_L8["entropy_means"].mean() / s_page
    localized_ratio = localized_L8_entropy.mean() / s_page
    print(f"criterion 3: S/S_P ergodic = {ergodic_ratio:.4f} (band [0.9, 1]), "
          f"localized = {localized_ratio:.4f} (<= 0.4), S_P = {s_page:.4f}")
    assert 0.9 <= ergodic_ratio <= 1.0
    assert localized_ratio <= 0.4


def test_criterion_04_logarithmic_entanglement_growth():
    """Strong disorder, L=6, 200 realizations: mean half-chain entropy after
    a photon-on-odd-sites quench grows linearly in log t over [10, 1e4]."""
    L, N, D = 6, 3, 100.0
    basis = enumerate_basis(L, N)
    psi0 = initial_vector(make_initial_state("photon-odd-sites", L, N), basis)
    grid = TimeGrid.logarithmic(t_min=0.1, t_max=1.0e4)
    total = np.zeros(len(grid.times))
    for k in range(N_GROWTH):
        profile = sample_couplings(D, L, derive_rng(SEED, 5, k))
        spec = diagonalize(build_hamiltonian(basis, profile))
        total += ee_trajectory(spec, psi0, grid, L, N)
    mean_S = total / N_GROWTH
    mask = (grid.times >= 10.0) & (grid.times <= 1.0e4)
    fit = linregress(np.log(grid.times[mask]), mean_S[mask])
    r2 = fit.rvalue**2
    print(f"criterion 4: slope = {fit.slope:.4f} per ln t, r^2 = {r2:.4f}")
    assert fit.slope > 0
    assert r2 >= 0.9


def test_criterion_05_chiral_spectrum_symmetry():
    """Spectra are mirror-symmetric about zero for every realization, and
    the reflection/chiral actions commute iff the excitation number is even."""
    basis = enumerate_basis(6, 3)
    worst = 0.0
    for k in range(N_CHIRAL):
        profile = sample_couplings(2.0, 6, derive_rng(SEED, 6, k))
        ev = np.sort(eigenvalues_only(build_hamiltonian(basis, profile)))
        worst = max(worst, float(np.abs(ev + ev[::-1]).max()))
    even = enumerate_basis(4, 2)
    odd = enumerate_basis(2, 1)
    comm_even = commutator_check(reflection_action(even), chiral_action(even))
    comm_odd = commutator_check(reflection_action(odd), chiral_action(odd))
    print(f"criterion 5: worst mirror residual = {worst:.2e}, "
          f"[P,Gamma] even-N = {comm_even}, odd-N = {comm_odd}")
    assert worst <= 1e-10
    assert comm_even == 0.0
    assert comm_odd > 0.0


def test_criterion_06_oracle_equivalence():
    """Fast paths match independent brute-force constructions."""
    # Hamiltonian entries against term-by-term second quantization.
    for L in (1, 2, 3):
        for N in range(1, L + 1):
            basis = enumerate_basis(L, N)
            profile = sample_couplings(1.9, L, derive_rng(SEED, 7, 10 * L + N))
            H = build_hamiltonian(basis, profile).dense()
            assert np.allclose(
                H, oracle_hamiltonian(basis, profile.g, profile.J), atol=1e-14
            ), f"Hamiltonian mismatch at L={L}, N={N}"
    # Basis enumeration against exhaustive occupation scan.
    for L in range(1, 7):
        for N in range(0, L + 1):
            basis = enumerate_basis(L, N)
            expected = brute_force_sector(L, N)
            assert basis.dim == len(expected) == sector_dimension(L, N), \
                f"dimension mismatch at L={L}, N={N}"
            interleaved = lambda pa: tuple(
                x for pair in zip(pa[0], pa[1]) for x in pair
            )
            assert [(s.photons, s.atoms) for s in basis.states] \
                == sorted(expected, key=interleaved)
    # Reduced-density spectra against direct pairwise partial trace.
    basis = enumerate_basis(6, 3)
    rng = derive_rng(SEED, 7, 0)
    worst = 0.0
    for _ in range(100):
        z = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        z /= np.linalg.norm(z)
        fast = np.sort(reduced_density_matrix(z, 6, 3).eigenvalues())
        slow = np.sort(np.linalg.eigvalsh(oracle_reduced_density(z, basis)))
        worst = max(worst, float(np.abs(fast - slow).max()))
    print(f"criterion 6: worst reduced-density eigenvalue residual = {worst:.2e}")
    assert worst <= 1e-10


def test_criterion_07_eth_diagonal_scaling(ergodic_L8):
    """Eigenstate-to-eigenstate fluctuations of the central-site occupancy
    at D/J=2 shrink from L=6 to L=8, consistently with the (L*dim)^(-1/2)
    law: both points within a factor of 2 of the best-fit power law."""
    basis6 = enumerate_basis(6, 3)
    obs6 = build_observable(basis6, "site_occupancy", site=3)
    f6 = np.empty(N_SMALL_VEC)
    for k in range(N_SMALL_VEC):
        profile = sample_couplings(2.0, 6, derive_rng(SEED, 4, k))
        spec = diagonalize(build_hamiltonian(basis6, profile))
        f6[k] = diag_fluctuations(matrix_elements(obs6, spec))
    fluct6 = float(f6.mean())
    fluct8 = float(ergodic_L8["fluctuations"].mean())
    # Best single-constant fit of C*(L*dim)^(-1/2) through both points: each
    # point is within factor `deviation` of the fitted line.
    n6 = fluct6 * math.sqrt(6 * basis6.dim)
    n8 = fluct8 * math.sqrt(8 * ergodic_L8["dim"])
    deviation = math.sqrt(max(n6, n8) / min(n6, n8))
    print(f"criterion 7: fluct L6 = {fluct6:.5f}, L8 = {fluct8:.5f}, "
          f"ratio = {fluct8 / fluct6:.4f} "
          f"(pure power law would give "
          f"{math.sqrt(6 * basis6.dim / (8 * ergodic_L8['dim'])):.4f}); "
          f"power-law deviation factor = {deviation:.3f}")
    assert fluct8 < fluct6
    assert deviation <= 2.0


def test_criterion_08_normality_ratio(ergodic_L8):
    """Off-diagonal normality ratio of the central-site occupancy at L=8,
    D/J=2: the disorder-averaged ratio sits within 10% of pi/2 in the lowest
    populated frequency bins."""
    by_bin = ergodic_L8["gamma_by_bin"]
    populated = sorted(c for c, v in by_bin.items()
                       if len(v) >= N_ERGODIC_VEC // 2)
    lowest = populated[:5]
    assert lowest, "no populated frequency bins"
    target = math.pi / 2
    values = {8 * c: float(np.mean(by_bin[c])) for c in lowest}
    print("criterion 8: " + ", ".join(
        f"L*omega={lw:.3f} gamma={g:.4f}" for lw, g in values.items()
    ) + f"; target pi/2 = {target:.4f} +- 10%")
    for g in values.values():
        assert abs(g - target) <= 0.1 * target


def test_criterion_09_zero_coupling_identity():
    """With all couplings zero the Hamiltonian is -J*L times the kinetic
    observable, so kinetic diagonal elements are -E_n/(J*L) exactly."""
    L, N, J = 6, 3, 1.0
    basis = enumerate_basis(L, N)
    spec = diagonalize(build_clean_hamiltonian(basis, 0.0, J=J))
    kinetic = build_observable(basis, "kinetic")
    table = matrix_elements(kinetic, spec, diag_window=SpectralWindow("all"))
    residual = float(np.abs(table.diag_values
                            + spec.eigenvalues / (J * L)).max())
    print(f"criterion 9: worst diagonal residual = {residual:.2e}")
    assert residual <= 1e-12


def _csv_digests(root):
    out = {}
    for dirpath, _, names in os.walk(root):
        for name in names:
            if name.endswith(".csv"):
                path = os.path.join(dirpath, name)
                with open(path, "rb") as f:
                    digest = hashlib.sha256(f.read()).hexdigest()
                out[os.path.relpath(path, root)] = digest
    return out


def test_criterion_10_preset_determinism(tmp_path):
    """Two runs of a preset with equal seeds produce byte-identical CSV
    bodies regardless of worker count."""
    roots = []
    for tag, workers in (("a", "1"), ("b", "2")):
        root = tmp_path / tag
        assert cli_main(["--out", str(root), "--seed", "123",
                         "--samples", "2", "--workers", workers,
                         "preset", "fig7-scaling"]) == 0
        roots.append(root)
    first, second = (_csv_digests(r) for r in roots)
    print(f"criterion 10: {len(first)} CSV files compared across "
          f"worker counts 1 and 2")
    assert first
    assert first == second
