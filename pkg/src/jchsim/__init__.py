"""Exact-diagonalization toolkit for disordered and clean
Jaynes-Cummings-Hubbard chains: spectra, entanglement, dynamics, and
eigenbasis matrix-element statistics under disorder averaging."""

__version__ = "0.1.0"

from .basis import (FockConfiguration, SectorBasis, SymmetryAction,
                    antisymmetric_projector, chiral_action, commutator_check,
                    enumerate_basis, reflection_action, sector_dimension)
from .operators import (CouplingProfile, HermitianOperator,
                        build_clean_hamiltonian, build_hamiltonian,
                        build_observable, clean_profile, project_operator,
                        sample_couplings)
from .spectral import (SpectralDecomposition, SpectralWindow, diagonalize,
                       eigenvalues_only, energy_density, level_spacing_ratio)
from .entanglement import (EntropyStatistics, ReducedDensityMatrix,
                           bipartition_table, eigenstate_entropies, entropy,
                           entropy_statistics, page_value,
                           reduced_density_matrix, schmidt_values,
                           state_entropy)
from .dynamics import (InitialStateSpec, TimeGrid, ee_trajectory, evolve,
                       initial_vector, make_initial_state,
                       occupation_trajectory)
from .ethstats import (BinnedStatistics, MatrixElementTable,
                       OffdiagAccumulator, binned_offdiag, diag_fluctuations,
                       gamma_ratio, matrix_elements)
from .ensemble import (EnsembleResult, ExperimentConfig, convergence_sweep,
                       derive_rng, parse_config_text, run_experiment)
