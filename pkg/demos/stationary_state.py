"""Long-time state of the cooled atom: residual entanglement and dark-state fidelity.

The master equation is integrated until d rho/dt is negligible and compared
with a direct null-space solve and with the first-order estimate of N.
"""
from eitent import (IntegratorConfig, cooling_params, initial_state, integrate,
                    negativity, stationary_negativity, steady_state)
from eitent.observables import fidelity_dark

for ratio in (10.0, 5.0):
    for gamma_mhz in (0.2, 0.6, 6.0):
        p = cooling_params(gamma_mhz, g1_over_g2=ratio)
        s = integrate(initial_state(p, 0), 60000.0, p,
                      config=IntegratorConfig.for_interval(p, 25.0), stationary_tol=1e-9)
        rho = steady_state(p)
        print(f"g1/g2={ratio:4.1f} Gamma={gamma_mhz:3.1f}: t_stat={s.t[-1]:7.0f} us "
              f"N={s.negativity[-1]:.5f} (direct {negativity(rho):.5f}, "
              f"estimate {stationary_negativity(p):.5f}) F={fidelity_dark(rho, p):.4f}")
