"""Critical point of the bistable response.

The two folds of the response curve merge where the steady-state cubic has
a triple root.  Closed forms exist for the critical energy, pump and
detuning; :func:`locate_critical_numeric` recovers the same point by
bisection on the pump, using nothing but the fold finder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConvergenceError, DomainError
from .model import DeviceParams, PumpDrive, validate
from .steadystate import turning_points

SQRT3 = math.sqrt(3.0)

BISECTION_RTOL = 1e-8
BISECTION_MAXITER = 200


@dataclass(frozen=True)
class CriticalPoint:
    e_c: float
    detuning_c: float
    pump_sq_c: float
    source: str  # "closed_form" or "numeric"

    @property
    def b_in1_c(self) -> float:
        return math.sqrt(self.pump_sq_c)


def bistability_possible(params: DeviceParams) -> bool:
    """True when the Kerr shift beats two-photon loss, ``|K| > sqrt(3) gamma3``."""
    return abs(params.kerr) > SQRT3 * params.gamma3


def _require_bistable(params):
    if not bistability_possible(params):
        raise DomainError("monostable: |K| <= sqrt(3) gamma3, no critical point", "gamma3")


def critical_energy(params: DeviceParams) -> float:
    _require_bistable(params)
    return 2.0 * params.gamma / (SQRT3 * (abs(params.kerr) - SQRT3 * params.gamma3))


def critical_pump(params: DeviceParams) -> float:
    """Critical pump ``b_in1c**2`` (1/s); the onset of bistability."""
    _require_bistable(params)
    k, g3, g = abs(params.kerr), params.gamma3, params.gamma
    return 4.0 / (3.0 * SQRT3) * g**3 * (k * k + g3 * g3) / (params.gamma1 * (k - SQRT3 * g3) ** 3)


def critical_detuning_closed_form(params: DeviceParams) -> float:
    """Detuning ``omega0 - omega_p`` at the critical point.

    Requiring a triple root gives the quadratic
    ``(K**2 - 3 gamma3**2) D**2 + 8 K gamma gamma3 D + gamma**2 (gamma3**2 - 3 K**2) = 0``
    whose root with positive critical energy is

        D_c = -sign(K) gamma (4 gamma3 |K| + sqrt(3) (K**2 + gamma3**2)) / (K**2 - 3 gamma3**2)

    which reduces to ``-sign(K) sqrt(3) gamma`` without two-photon loss.
    """
    _require_bistable(params)
    k, g3, g = params.kerr, params.gamma3, params.gamma
    ak = abs(k)
    return -math.copysign(1.0, k) * g * (4.0 * g3 * ak + SQRT3 * (k * k + g3 * g3)) / (k * k - 3.0 * g3 * g3)


def closed_form_critical_point(params: DeviceParams) -> CriticalPoint:
    return CriticalPoint(critical_energy(params), critical_detuning_closed_form(params),
                         critical_pump(params), "closed_form")


def locate_critical_numeric(params: DeviceParams, rtol: float = BISECTION_RTOL,
                            maxiter: int = BISECTION_MAXITER) -> CriticalPoint:
    """Find the fold-merge point by bisection on the pump ``b_in1**2``.

    Below the critical pump :func:`~kerrjpa.steadystate.turning_points` is
    empty, above it returns two folds.  The closed-form pump only sets the
    initial search scale.  Energy and detuning are the midpoint of the
    two folds at the upper end of the final bracket.
    """
    _require_bistable(params)
    # pump frequency is irrelevant for the fold finder; any valid value works
    base = validate(params, PumpDrive(omega_p=params.omega0, b_in1=0.0))

    def folds(b2):
        return turning_points(base.with_b_in1(math.sqrt(b2)))

    scale = critical_pump(params)
    lo, hi = 0.0, 2.0 * scale
    while len(folds(hi)) < 2:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6 * scale:
            raise ConvergenceError("no bistable pump found up to 1e6 times the estimate")

    for _ in range(maxiter):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if len(folds(mid)) >= 2:
            hi = mid
        else:
            lo = mid
    else:
        raise ConvergenceError(f"pump bracket did not shrink below {rtol} in {maxiter} steps")

    pts = folds(hi)
    e_c = 0.5 * (pts[0][0] + pts[1][0])
    d_c = params.omega0 - 0.5 * (pts[0][1] + pts[1][1])
    return CriticalPoint(e_c, d_c, 0.5 * (lo + hi), "numeric")
