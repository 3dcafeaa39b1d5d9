"""Undamped entanglement oscillation of one Landau-Zener pair.

Without spontaneous emission the state |phi_2, 3> only talks to |phi_1, 2>, so
the negativity swings between 0 and 1/2 with period pi / dE.
"""
import numpy as np

from eitent import IntegratorConfig, cooling_params, initial_state, integrate, lz_gap

n_in = 3
p = cooling_params(gamma_mhz=0.0, n_max=15)

gap_exact = lz_gap(p, n_in, "exact")
gap_pert = lz_gap(p, n_in)
print(f"gap: exact {gap_exact:.5f} rad/us, first order {gap_pert:.5f} rad/us")
print(f"expected period pi/dE = {np.pi / gap_exact:.1f} us")

series = integrate(initial_state(p, n_in), 600.0, p, config=IntegratorConfig.for_interval(p, 1.0))

# Compare against the two-state prediction at a few times
for t in (0, 64, 128, 192, 256, 384):
    i = int(np.searchsorted(series.t, t))
    pred = 0.5 * abs(np.sin(gap_exact * t))
    print(f"t={t:4d} us  N={series.negativity[i]:.4f}  two-state {pred:.4f}")

series.to_csv("lz_oscillation.csv")
