"""Numerical toolkit for multi-spike solutions of nonlinear Schrodinger
equations with slowly decaying potentials: ground-state profiles, projected
correction solves, reduced-energy maximization, the energy ledger, and the
coupled cubic system."""

from .ansatz import (Configuration, Potential, WeightedNormParams,
                     algebraic_potential, build_ansatz, check_hypotheses,
                     discrete_ansatz, kernel_functions,
                     signed_compact_potential, sub_exponential_potential,
                     validate_configuration, weighted_norm, zero_potential)
from .energy import (full_energy, predicted_energy, reduced_energy,
                     single_bump_grid_energy, two_bump_interaction_study)
from .grid import (ConvergenceError, Field, Grid, GridError, dirichlet_form,
                   inner, integrate, load_field, save_field,
                   solve_bordered_system)
from .groundstate import (GroundState, Nonlinearity, ShootingError,
                          SpectrumError, compute_ground_state,
                          interaction_constant, linearized_spectrum)
from .maximize import (EnergyLedger, MaximizerRecord, build_ledger,
                       interior_check, maximize_reduced_energy,
                       multiplier_check, packing_check, pattern_search,
                       polish_solution)
from .reduction import (CorrectionResult, correction_decay_study,
                        increment_bound_check, orthogonality_defect,
                        solve_projected)
from .system import (CouplingParams, PairField, coupled_reduce_and_maximize,
                     coupled_residual, coupled_spectrum, estimate_beta_star,
                     synchronized_amplitudes)
from .verify import run_suite

__version__ = "0.1.0"
