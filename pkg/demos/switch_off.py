"""Freeze the atom-motion entanglement by switching both lasers off.

The ramp starts at the first negativity maximum.  A sudden ramp keeps the
peak value; a slow ramp lets the state follow the dressed basis and loses
entanglement before the lasers are gone.
"""
import numpy as np

from eitent import (IntegratorConfig, Schedule, cooling_params, initial_state,
                    integrate, lz_gap)

n_in = 3
p = cooling_params(gamma_mhz=0.2)
cfg = IntegratorConfig.for_interval(p, 1.0)
rho0 = initial_state(p, n_in)

ref = integrate(rho0, 300.0, p, config=cfg)
half = ref.t <= np.pi / lz_gap(p, n_in, "exact")
t_max = float(ref.t[half][np.argmax(ref.negativity[half])])
print(f"first maximum N={ref.negativity[half].max():.4f} at t={t_max:.0f} us")

for delta_t in (1.0, 50.0):
    sched = Schedule.ramp(t_max, delta_t)
    s = integrate(rho0, sched.t_done + 100.0, p, schedule=sched, config=cfg)
    after = s.negativity[s.t >= sched.t_done]
    print(f"ramp {delta_t:4.0f} us: frozen N={after[0]:.4f}, 100 us later {after[-1]:.4f}")
