"""From a harmonic table to a derated transformer.

Eddy losses grow with the square of harmonic order, so a few percent of 11th
harmonic costs more than a lot of 3rd. F_HL captures that weighting and sets
how far the transformer must be backed off.
"""

import numpy as np

from harmonic_derating import HarmonicSpectrum, ThermalSpec, TransformerSpec, assess, derating, theta_rise

t = TransformerSpec()
cases = {
    "sinusoid": {1: 1.0},
    "rectifier": {1: 1.0, 3: 0.3, 5: 0.4},
    "high-order": {1: 1.0, 11: 0.1, 13: 0.1},
}
print(f"{'load':>11} {'THD %':>7} {'F_HL':>7} {'eddy pu':>8} {'derate %':>9}")
for name, mags in cases.items():
    r = assess(HarmonicSpectrum.from_magnitudes(mags), t)
    print(f"{name:>11} {100 * r.thd:>7.2f} {r.f_hl:>7.3f} {r.eddy_loss_pu:>8.4f} {100 * r.derating:>9.2f}")

# Derating against F_HL for a few winding designs
for p in (0.02, 0.05, 0.10):
    row = " ".join(f"{100 * derating(f, p):6.2f}" for f in (1, 2, 5, 10, 20))
    print(f"P_EC-R {p:.2f}: {row}")

th = ThermalSpec()
loss = 500.0
print(f"\ntau = {th.time_constant:.0f} s; final rise at {loss:.0f} W is {theta_rise(loss, th):.2f} K")
for t_s in np.array([0.25, 0.5, 1, 2, 4]) * th.time_constant:
    print(f"  t = {t_s:7.0f} s  rise {theta_rise(loss, th, t_s):6.2f} K")
