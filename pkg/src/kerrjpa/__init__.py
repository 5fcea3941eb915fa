"""Steady state, stability and small-signal gain of a Kerr parametric amplifier.

The cavity has a Kerr shift ``K``, coupling ``gamma1`` to the pump/signal
port, linear loss ``gamma2`` and two-photon loss ``gamma3``.  Energies
``E = |B|**2`` are in units where the pump enters as ``2 gamma1 b_in1**2``.
"""

from .critical import (CriticalPoint, bistability_possible, closed_form_critical_point,
                       critical_detuning_closed_form, critical_energy, critical_pump,
                       locate_critical_numeric)
from .errors import (ConflictError, ConvergenceError, DivergenceError, DomainError,
                     KerrJPAError, LinearityError, NoSettleError, ParseError, SingularityError)
from .model import (DeviceParams, JunctionParams, PortPhases, PumpDrive, ValidatedModel,
                    idler_frequency, josephson_inductance, josephson_inductance_smallsignal,
                    squid_inductance, validate)
from .oracle import (TimeDomainConfig, TimeDomainState, integrate_mean_field,
                     ode_steady_energy, ode_steady_state, probe_gain_measurement)
from .response import (GainPoint, GainSweep, LinearResponse, gain_point, gain_sweep,
                       intermodulation_gain, linearize, parametric_gain, peak_gain,
                       pump_for_fraction)
from .steadystate import (CubicCoeffs, SteadyStateBranch, SweepResult, classify_stability,
                          cubic_coefficients, dE_domega_p, detuning_sweep, pump_phase,
                          real_cubic_roots, solve_energy, turning_points)

__version__ = "0.1.0"
