"""Signal and idler gain of the reference amplifier.

Run with ``python demos/gain_curves.py``.  Shows the peak parametric gain
for several pump levels, and the gain spectrum at 0.8 of the critical pump.
"""

import math

import numpy as np

from kerrjpa import DeviceParams, PumpDrive, critical_pump, gain_sweep, peak_gain, validate

device = DeviceParams(omega0=1e11, kerr=-9.99e6, gamma1=3.2e8)
b_c = math.sqrt(critical_pump(device))
model = validate(device, PumpDrive(device.omega0, b_c))

print("fraction  y_peak     G_S      dB")
for f in (0.3, 0.5, 0.8, 0.9, 0.95, 0.99):
    y, g = peak_gain(model.with_b_in1(f * b_c))
    print(f"  {f:4.2f}   {y:.6f}  {g:8.3f}  {10 * math.log10(g):5.2f}")

# %% spectrum at the optimal detuning; G_S - G_I = 1 without extra losses
m = model.with_b_in1(0.8 * b_c)
y, _ = peak_gain(m)
oms = np.linspace(0, 2, 9) * device.gamma
spectrum = gain_sweep(m.with_detuning_ratio(y), "sideband", oms)
print("\nomega/gamma   G_S      G_I")
for om, gs, gi in zip(oms, spectrum.g_s, spectrum.g_i):
    print(f"   {om / device.gamma:4.2f}    {gs:7.4f}  {gi:7.4f}")
