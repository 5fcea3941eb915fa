"""Cross-check of the closed-form results against direct time integration.

Run with ``python demos/oracle_check.py``.  The first call compiles the
integrator, later runs reuse the cache.
"""

import math

from kerrjpa import (DeviceParams, PumpDrive, TimeDomainConfig, critical_pump,
                     intermodulation_gain, linearize, ode_steady_energy, parametric_gain,
                     peak_gain, probe_gain_measurement, solve_energy, validate)

device = DeviceParams(omega0=1e11, kerr=-9.99e6, gamma1=3.2e8)
b_c = math.sqrt(critical_pump(device))

for f in (0.5, 0.8):
    m = validate(device, PumpDrive(device.omega0, f * b_c))
    y, _ = peak_gain(m)
    m = m.with_detuning_ratio(y)
    (branch,) = solve_energy(m)

    e_ode = ode_steady_energy(m)
    omega = 0.05 * device.gamma
    cfg = TimeDomainConfig(probe_amp=1e-4 * m.drive.b_in1, probe_offset=omega)
    g_s_t, g_i_t = probe_gain_measurement(m, cfg)
    resp = linearize(m, branch)
    g_s, g_i = parametric_gain(resp, omega), intermodulation_gain(resp, omega)

    print(f"pump {f} b_c at y = {y:.6f}")
    print(f"  E       cubic {branch.energy:.10f}   ODE {e_ode:.10f}")
    print(f"  G_S     theory {g_s:.8f}   probe {g_s_t:.8f}")
    print(f"  G_I     theory {g_i:.8f}   probe {g_i_t:.8f}")
