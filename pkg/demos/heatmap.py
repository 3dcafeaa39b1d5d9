"""Density-matrix snapshots during cooling, written as |rho_ij| heatmap CSVs.

Rows and columns run over vibrational levels with the three electronic
states nested inside, so each 3x3 diagonal block belongs to one phonon number.
"""
import numpy as np

from eitent import IntegratorConfig, cooling_params, initial_state, integrate
from eitent.observables import heatmap_export, read_heatmap

p = cooling_params(gamma_mhz=0.6, n_max=16)
times = (0.0, 500.0, 3000.0)
s = integrate(initial_state(p, 4), 3000.0, p, config=IntegratorConfig.for_interval(p, 2.0),
              snapshot_times=times)

for t, rho in s.snapshots.items():
    path = heatmap_export(rho, f"heatmap_t{t:g}.csv", p.space)
    mags = read_heatmap(path)
    diag = np.diag(mags).reshape(3, -1).sum(axis=0)
    print(f"t={t:6.0f} us  <n>={np.arange(diag.size) @ diag:.3f}  "
          f"P(n=0..4)={np.round(diag[:5], 3)}  -> {path}")

i = int(np.argmax(s.mean_n < 0.5))
print(f"<n> below 0.5 at t={s.t[i]:.0f} us after {s.photon_count[i]:.2f} emitted photons")
