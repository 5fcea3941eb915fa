"""Pump response of the reference amplifier below and above the critical pump.

Run with ``python demos/response_curve.py``.  Prints a coarse table of the
intracavity energy E against the detuning ratio y = (omega0 - omega_p) / omega0.
"""

import math

import numpy as np

from kerrjpa import DeviceParams, PumpDrive, critical_pump, detuning_sweep, validate
from kerrjpa.steadystate import sweep_peak

device = DeviceParams(omega0=1e11, kerr=-9.99e6, gamma1=3.2e8)
b_c = math.sqrt(critical_pump(device))
ys = np.linspace(-0.01, 0.01, 2001)
omega_p = device.omega0 * (1 - ys)

# %% half the critical pump: a single-valued, tilted Lorentzian
half = validate(device, PumpDrive(device.omega0, 0.5 * b_c))
sweep = detuning_sweep(half, omega_p, "down")
print("y          E")
for y, e in zip(ys[::200], sweep.followed_energy[::200]):
    print(f"{y:+.4f}   {e:8.3f}")

# the peak sits where the pump meets the Kerr-shifted resonance, Delta = -K E
w_peak, e_peak = sweep_peak(half, sweep)
print(f"\npeak E = {e_peak:.4f} at y = {1 - w_peak / device.omega0:.6f}")
print(f"Delta + K E at the peak: {(device.omega0 - w_peak) + device.kerr * e_peak:.3e} rad/s")

# %% above the critical pump the curve folds over; sweeping up and down differ
strong = half.with_b_in1(1.2 * b_c)
up = detuning_sweep(strong, omega_p, "up")
down = detuning_sweep(strong, omega_p, "down")
e_up = dict(zip(up.omega_p, up.followed_energy))
e_down = dict(zip(down.omega_p, down.followed_energy))
jump = [w for w in omega_p if abs(e_up[w] - e_down[w]) > 1e-9 * e_up[w]]
print(f"\n1.2 b_c: {sum(up.root_counts == 3)} of {len(ys)} points have three roots")
print(f"hysteresis loop spans y = {1 - max(jump) / device.omega0:.5f} .. {1 - min(jump) / device.omega0:.5f}")
