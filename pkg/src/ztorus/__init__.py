"""Desk-scale spectral laboratory for a coupled Schrodinger/wave system on
the two-dimensional torus: pseudospectral dynamics, smoothed and resonant
energies, randomized space-time estimate checks, lattice geometry sweeps,
and the bookkeeping arithmetic of the global iteration scheme.
"""

from .errors import (ZtorusError, ConfigurationError, BudgetError,
                     IntegratorError, HypothesisViolation, EmptyShellError)
from .grid import (TorusSpec, PhysicalField, SpectralField, make_grid, dft,
                   idft, dealiased_product, exact_product, quadrature_triple,
                   apply_radial_symbol, save_field, load_field, eta_bump,
                   eta_shell, dyadic_range)
from .spacetime import (DyadicBlock, SpaceTimeField, hann_taper,
                        lp_block_project, xsbp_norm)
from .multipliers import (IMultiplierSpec, m_value, apply_I_schrodinger,
                          apply_I_wave, sigma, sigma_pairs, sigma_bound_audit)
from .dynamics import (ZakharovState, SolverConfig, Trajectory,
                       to_first_order, from_first_order, strang_step,
                       rk4_step, evolve, default_dt, ground_state_mass,
                       ground_state_profile, make_profile)
from .energies import (EnergyBreakdown, DHdtBreakdown, mass, hamiltonian,
                       modified_energy, resonant_energy, dHdt_resonant,
                       fixed_time_gap_ratio)
from .planner import (RegularityPoint, IterationPlan, admissible,
                      growth_exponent, alpha_exponents, corner_points,
                      iteration_plan)

__version__ = "0.1.0"
