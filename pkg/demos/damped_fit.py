"""Fit the damped two-state model to a simulated negativity trace.

Spontaneous emission gives |phi_1> a width gamma1; the fitted gap stays near
the undamped one while the oscillation decays.
"""
import numpy as np

from eitent import (IntegratorConfig, cooling_params, dressed_width_gamma1,
                    fit_lz, initial_state, integrate, lz_gap)
from eitent.lz_analytic import damping_transition_gamma

n_in = 3
for gamma_mhz in (0.1, 0.2, 0.6, 6.0):
    p = cooling_params(gamma_mhz)
    series = integrate(initial_state(p, n_in), 1100.0, p,
                       config=IntegratorConfig.for_interval(p, 1.0))
    fit = fit_lz(series.t, series.negativity)
    print(f"Gamma = {gamma_mhz:4.1f} x 2pi MHz: dE_fit {fit.delta_e_fit:.4f}, "
          f"gamma1_fit {fit.gamma1_fit:.4f} (formula {dressed_width_gamma1(p):.4f}), "
          f"{fit.classification}")

p = cooling_params()
print(f"first-order gap {lz_gap(p, n_in):.4f} rad/us")
print(f"overdamped above Gamma* = {damping_transition_gamma(p, n_in) / (2 * np.pi):.2f} x 2pi MHz")
