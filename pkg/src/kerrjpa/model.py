"""Physical parameters of the Kerr cavity and the junction background formulas.

Conventions
-----------
All frequencies and rates are angular (rad/s).  The intracavity energy
``E = |B|**2`` is dimensionless (photon-number like), so ``kerr`` and
``gamma3`` are rates per unit ``E`` and ``b_in1**2`` is a quanta flux (1/s).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field, replace

from .errors import DomainError, SingularityError

FLUX_QUANTUM = 2.067833848e-15  # Wb, h / 2e


@dataclass(frozen=True)
class DeviceParams:
    """Resonator frequency, Kerr coefficient and bath coupling rates."""

    omega0: float
    kerr: float
    gamma1: float
    gamma2: float = 0.0
    gamma3: float = 0.0

    @property
    def gamma(self) -> float:
        """Total linear damping rate ``gamma1 + gamma2``."""
        return self.gamma1 + self.gamma2


@dataclass(frozen=True)
class PumpDrive:
    """Classical pump tone incident on port 1."""

    omega_p: float
    b_in1: float
    psi1: float = 0.0


@dataclass(frozen=True)
class PortPhases:
    """Coupling phases of the three ports."""

    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0


@dataclass(frozen=True)
class JunctionParams:
    """Junction critical current and SQUID flux-bias current scale (ampere)."""

    critical_current: float
    i0: float
    flux_quantum: float = FLUX_QUANTUM

    def __post_init__(self):
        for name in ("critical_current", "i0", "flux_quantum"):
            _check_finite(name, getattr(self, name))
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive", name)

    @property
    def linear_inductance(self) -> float:
        """Zero-current Josephson inductance ``Phi0 / (2 pi Ic)``."""
        return self.flux_quantum / (2.0 * math.pi * self.critical_current)


@dataclass(frozen=True)
class ValidatedModel:
    """A checked (device, drive, phases) triple.

    Everything downstream takes one of these; build it with :func:`validate`.
    """

    params: DeviceParams
    drive: PumpDrive
    phases: PortPhases = field(default_factory=PortPhases)

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def detuning(self) -> float:
        """Pump detuning ``omega0 - omega_p``."""
        return self.params.omega0 - self.drive.omega_p

    @property
    def detuning_ratio(self) -> float:
        return self.detuning / self.params.omega0

    def with_omega_p(self, omega_p: float) -> "ValidatedModel":
        return validate(self.params, replace(self.drive, omega_p=omega_p), self.phases)

    def with_detuning_ratio(self, y: float) -> "ValidatedModel":
        """Same model pumped at ``omega_p = omega0 * (1 - y)``."""
        return self.with_omega_p(self.params.omega0 * (1.0 - y))

    def with_b_in1(self, b_in1: float) -> "ValidatedModel":
        return validate(self.params, replace(self.drive, b_in1=b_in1), self.phases)


def _check_finite(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise DomainError(f"{name} must be a real number, got {value!r}", name)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}", name)


def validate(params: DeviceParams, drive: PumpDrive,
             phases: PortPhases | None = None) -> ValidatedModel:
    """Check signs and finiteness of every field and bundle them.

    Raises
    ------
    DomainError
        With ``field`` set to the first offending attribute.
    """
    for name in ("omega0", "kerr", "gamma1", "gamma2", "gamma3"):
        _check_finite(name, getattr(params, name))
    for name in ("omega_p", "b_in1", "psi1"):
        _check_finite(name, getattr(drive, name))
    phases = PortPhases() if phases is None else phases
    for name in ("phi1", "phi2", "phi3"):
        _check_finite(name, getattr(phases, name))

    if params.omega0 <= 0:
        raise DomainError("omega0 must be positive", "omega0")
    if params.gamma1 <= 0:
        raise DomainError("gamma1 must be positive", "gamma1")
    if params.gamma2 < 0:
        raise DomainError("gamma2 must be non-negative", "gamma2")
    if params.gamma3 < 0:
        raise DomainError("gamma3 must be non-negative", "gamma3")
    if drive.omega_p <= 0:
        raise DomainError("omega_p must be positive", "omega_p")
    if drive.b_in1 < 0:
        raise DomainError("b_in1 must be non-negative", "b_in1")
    return ValidatedModel(params, drive, phases)


def josephson_inductance(phase: float, junction: JunctionParams) -> float:
    """Josephson inductance ``Phi0 / (2 pi Ic cos(phase))`` in henry."""
    c = math.cos(phase)
    if abs(c) < 1e-12:
        raise SingularityError(f"cos(phase) = {c:.3e}: junction at its critical phase")
    return junction.linear_inductance / c


def josephson_inductance_smallsignal(current: float, junction: JunctionParams) -> float:
    """Leading-order nonlinear inductance ``L_J (1 + (I/Ic)**2 / 2)``.

    The neglected term is ``3/8 (I/Ic)**4``.
    """
    x = current / junction.critical_current
    if abs(x) >= 1.0:
        raise DomainError("|current| must stay below the critical current", "current")
    return junction.linear_inductance * (1.0 + 0.5 * x * x)


def squid_inductance(current: float, junction: JunctionParams) -> float:
    """Flux-biased SQUID inductance, linear in the drive current."""
    return junction.linear_inductance * (1.0 + current / junction.i0)


def idler_frequency(pump: float, signal: float) -> float:
    """Idler frequency fixed by four-wave mixing: ``2 pump - signal``."""
    return 2.0 * pump - signal
