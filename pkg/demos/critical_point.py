"""Where the two folds merge: closed forms against a numeric search.

Run with ``python demos/critical_point.py``.
"""

import math

from kerrjpa import (DeviceParams, bistability_possible, closed_form_critical_point,
                     locate_critical_numeric)

kerr = -9.99e6
for ratio in (0.0, 0.2, 0.5, 0.9, 1.0):
    # two-photon loss as a fraction of the bistability limit |K| / sqrt(3)
    device = DeviceParams(1e11, kerr, 3.2e8, 0.0, ratio * abs(kerr) / math.sqrt(3))
    if not bistability_possible(device):
        print(f"gamma3 = {ratio:.1f} |K|/sqrt(3): monostable, no critical point")
        continue
    closed = closed_form_critical_point(device)
    numeric = locate_critical_numeric(device)
    print(f"gamma3 = {ratio:.1f} |K|/sqrt(3): E_c = {closed.e_c:9.3f}  "
          f"Delta_c/gamma = {closed.detuning_c / device.gamma:7.3f}  b_c^2 = {closed.pump_sq_c:.4e}")
    print(f"    numeric rel diff: E_c {abs(numeric.e_c / closed.e_c - 1):.1e}, "
          f"Delta_c {abs(numeric.detuning_c / closed.detuning_c - 1):.1e}, "
          f"b_c^2 {abs(numeric.pump_sq_c / closed.pump_sq_c - 1):.1e}")
