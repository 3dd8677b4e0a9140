"""A diode bridge from first principles.

The DC-link capacitor only takes current near the voltage peaks, so the line
current comes in short pulses. With the capacitor removed the bridge feeds a
resistor and the line current is a clean sine.
"""

import time

from harmonic_derating import RectifierParams, analyze, run_rectifier, thd

for label, params in (
    ("470 uF link", RectifierParams()),
    ("no capacitor", RectifierParams(dc_capacitance=1e-9)),
):
    start = time.perf_counter()
    res = run_rectifier(params)
    elapsed = time.perf_counter() - start
    spec = analyze(res.waveform)
    i1 = spec.magnitude(1)
    print(f"{label}: THD {100 * thd(spec):.1f} %, I1 {i1:.2f} A, V_dc {res.dc_voltage.mean():.1f} V, {elapsed:.2f} s")
    print("   " + " ".join(f"h{h}:{100 * spec.magnitude(h) / i1:5.1f}%" for h in range(2, 12)))

# Halving the timestep barely moves the answer.
for dt in (50e-6, 25e-6, 12.5e-6):
    print(f"dt = {dt * 1e6:5.1f} us: THD {100 * thd(analyze(run_rectifier(RectifierParams(timestep=dt)).waveform)):.3f} %")
