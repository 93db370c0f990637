"""Directed transport of a driven condensate in a 1D lattice.

Floquet states of the periodically rocked Gross-Pitaevskii equation,
nonlinear continuation in the interaction strength, asymptotic currents,
a two-mode (dimer) reduction, and Husimi phase-space maps.
"""

from .model import (DrivingField, ModelParams, PhysicalParams, eval_field,
                    eval_vector_potential, is_shift_symmetric,
                    is_time_reversal_symmetric, params_for, rescale_physical)
from .spectral import (WaveFunction, load_state, mean_momentum,
                       plane_wave_state, position_values, random_state,
                       save_state)
from .propagator import PropagationBlowup, SplitStepEngine, propagate, step
from .floquet import (BandSet, FloquetSpectrum, asymptotic_current_linear,
                      build_floquet_operator, compute_floquet_spectrum,
                      codiagonal_transpose, current_vs_t0, diagonalize_unitary,
                      find_resonant_pair, t0_average_current, track_bands,
                      track_pair)
from .nonlinear import (Branch, NewtonError, NonlinearFloquetState,
                        continue_in_g, critical_g, locate_crossover,
                        newton_solve, period_map, project_two_state,
                        quasienergy_perturbative, quasienergy_two_state,
                        residual, state_to_y)
from .dimer import (DimerContinuation, DimerOrbit, DimerParams, dimer_continue,
                    dimer_orbit_solve, dimer_propagate, dimer_rhs, imbalance,
                    linear_modes)
from .transport import CurrentEstimate, running_average_momentum, scan, t0_scan
from .husimi import ClassifyThresholds, HusimiGrid, classify_state, husimi
from .tables import RunManifest, emit_table, read_table

__version__ = "0.1.0"
