"""Entanglement dynamics of a trapped three-level atom under EIT laser cooling."""
from .atom_model import (DressedBasis, ModelParams, ResonanceWarning,
                         TwoStateBreakdownError, dressed_states,
                         dressed_width_gamma1, effective_hamiltonian,
                         first_order_interaction, hamiltonian_total, lz_gap,
                         cooling_params, stationary_negativity)
from .fockspace import (TruncatedSpace, annihilation_op, displacement_op,
                        embed, partial_transpose)
from .lindblad import (IntegrationError, IntegratorConfig, Schedule,
                       TraceDriftError, TruncationError, dissipator,
                       initial_state, integrate, liouvillian, rhs,
                       steady_state)
from .lz_analytic import (FitError, LZFit, damping_transition_gamma, fit_lz,
                          negativity_lz, negativity_lz_damped)
from .observables import (TimeSeries, emission_rate, fidelity_dark,
                          heatmap_export, mean_n, negativity, photon_count,
                          read_heatmap)

__version__ = "0.1.0"
