"""Time-domain mean-field integrator used as an independent oracle.

Integrates, in the frame rotating at the pump frequency,

    db/dt = -[i Delta + gamma + (i K + gamma3) |b|**2] b
            - i sqrt(2 gamma1) exp(i phi1) [b_in1 exp(-i psi1) + p exp(-i (w t + theta))]

with classic fixed-step RK4, and reads the reflected field
``b_out = b_in - i sqrt(2 gamma1) exp(-i phi1) b``.  Nothing here touches
the cubic, the linearisation or the gain formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .errors import DivergenceError, DomainError, LinearityError, NoSettleError
from .model import ValidatedModel

DT_FACTOR = 1e-3
DEFAULT_HORIZON = 1e4  # in units of 1/gamma
DEFAULT_WINDOW = 10.0  # in units of 1/gamma
PERIOD_TOL = 1e-8
LINEARITY_RTOL = 0.01


@dataclass(frozen=True)
class TimeDomainConfig:
    """Integration settings; ``None`` fields are derived from the model.

    Times are in seconds, ``probe_amp`` in sqrt(1/s), ``probe_offset`` and
    ``probe_phase`` in rad/s and rad.
    """

    dt: float | None = None
    t_max: float | None = None
    settle_window: float | None = None
    settle_tol: float = 1e-9
    probe_amp: float = 0.0
    probe_offset: float = 0.0
    probe_phase: float = 0.0

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be positive", "dt")
        if self.t_max is not None and not self.t_max > 0:
            raise DomainError("t_max must be positive", "t_max")
        if self.settle_window is not None and not self.settle_window > 0:
            raise DomainError("settle_window must be positive", "settle_window")
        if not 0.0 < self.settle_tol <= 1e-2:
            raise DomainError("settle_tol must lie in (0, 1e-2]", "settle_tol")
        if not self.probe_amp >= 0:
            raise DomainError("probe_amp must be non-negative", "probe_amp")


@dataclass(frozen=True)
class TimeDomainState:
    b_rot: complex
    t: float

    @property
    def energy(self) -> float:
        return abs(self.b_rot) ** 2


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    b_rot: np.ndarray

    @property
    def energy(self) -> np.ndarray:
        return np.abs(self.b_rot) ** 2

    @property
    def final(self) -> TimeDomainState:
        return TimeDomainState(complex(self.b_rot[-1]), float(self.t[-1]))


@njit(cache=True)
def _rhs(b, t, delta, gamma, kerr, gamma3, drive, probe_drive, omega):
    e = b.real * b.real + b.imag * b.imag
    lin = complex(gamma + gamma3 * e, delta + kerr * e)
    return -lin * b + drive + probe_drive * cmath.exp(complex(0.0, -omega * t))


@njit(cache=True)
def _rk4_run(b, t0, n, dt, delta, gamma, kerr, gamma3, drive, probe_drive, omega,
             limit, out_const, out_probe, out_coupling):
    """Advance ``n`` steps; also sum b_out - out_const against exp(+-i w t).

    Returns (b, t_end, diverged, sum_plus, sum_minus).
    """
    s_plus = 0j
    s_minus = 0j
    for k in range(n):
        t = t0 + k * dt
        rot = cmath.exp(complex(0.0, omega * t))
        out = out_coupling * b + out_probe / rot - out_const
        s_plus += out * rot
        s_minus += out / rot
        h = 0.5 * dt
        k1 = _rhs(b, t, delta, gamma, kerr, gamma3, drive, probe_drive, omega)
        k2 = _rhs(b + h * k1, t + h, delta, gamma, kerr, gamma3, drive, probe_drive, omega)
        k3 = _rhs(b + h * k2, t + h, delta, gamma, kerr, gamma3, drive, probe_drive, omega)
        k4 = _rhs(b + dt * k3, t + dt, delta, gamma, kerr, gamma3, drive, probe_drive, omega)
        b = b + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if b.real * b.real + b.imag * b.imag > limit:
            return b, t0 + (k + 1) * dt, True, s_plus, s_minus
    return b, t0 + n * dt, False, s_plus, s_minus


class _Integrator:
    """Model constants laid out for the compiled kernel."""

    def __init__(self, model: ValidatedModel, cfg: TimeDomainConfig, initial: complex = 0j,
                 probe_amp: float | None = None):
        p, d, ph = model.params, model.drive, model.phases
        self.gamma = p.gamma
        self.args = (model.detuning, p.gamma, p.kerr, p.gamma3)
        root = math.sqrt(2.0 * p.gamma1)
        into = -1j * root * cmath.exp(1j * ph.phi1)
        amp = cfg.probe_amp if probe_amp is None else probe_amp
        self.pump_in = d.b_in1 * cmath.exp(-1j * d.psi1)
        self.probe_in = amp * cmath.exp(-1j * cfg.probe_phase)
        self.drive = into * self.pump_in
        self.probe_drive = into * self.probe_in
        self.omega = cfg.probe_offset if amp > 0 else 0.0
        self.out_coupling = -1j * root * cmath.exp(-1j * ph.phi1)

        # no steady state exceeds 2 gamma1 b**2 / gamma**2
        e_est = 2.0 * p.gamma1 * (d.b_in1 + amp) ** 2 / p.gamma**2
        self.limit = 1e6 * max(1.0, e_est, abs(initial) ** 2)
        e_scale = max(e_est, abs(initial) ** 2)
        rate = max(p.gamma, abs(model.detuning), abs(p.kerr) * e_scale, p.gamma3 * e_scale,
                   self.omega)
        self.dt = cfg.dt if cfg.dt is not None else DT_FACTOR / rate
        self.t_max = cfg.t_max if cfg.t_max is not None else DEFAULT_HORIZON / p.gamma
        self.window = cfg.settle_window if cfg.settle_window is not None else DEFAULT_WINDOW / p.gamma

    def run(self, b, t, n, dt=None, out_const=0j):
        dt = self.dt if dt is None else dt
        b, t, diverged, s_plus, s_minus = _rk4_run(
            complex(b), float(t), int(n), float(dt), *self.args, self.drive, self.probe_drive,
            self.omega, self.limit, complex(out_const), self.probe_in, self.out_coupling)
        if diverged:
            raise DivergenceError(f"|b|**2 exceeded {self.limit:.3e} at t = {t:.3e} s")
        return complex(b), float(t), s_plus, s_minus


def integrate_mean_field(model: ValidatedModel, cfg: TimeDomainConfig | None = None,
                         initial: complex = 0j, samples: int = 1001) -> Trajectory:
    """Integrate from ``initial`` at t = 0 up to ``t_max``.

    The state is recorded at ``samples`` evenly spaced instants (rounded to
    whole steps), including both ends.
    """
    cfg = TimeDomainConfig() if cfg is None else cfg
    integ = _Integrator(model, cfg, initial)
    n_total = max(1, int(round(integ.t_max / integ.dt)))
    marks = np.unique(np.linspace(0, n_total, max(samples, 2)).round().astype(int))
    ts, bs = [0.0], [complex(initial)]
    b, t = complex(initial), 0.0
    for k0, k1 in zip(marks[:-1], marks[1:]):
        b, _, _, _ = integ.run(b, k0 * integ.dt, k1 - k0)
        ts.append(k1 * integ.dt)
        bs.append(b)
    return Trajectory(np.array(ts), np.array(bs))


def _settle(integ, b, t, tol):
    """Integrate window by window until |b|**2 stops changing."""
    n = max(1, int(round(integ.window / integ.dt)))
    e_prev = abs(b) ** 2
    quiet = 0
    while t < integ.t_max:
        b, t, _, _ = integ.run(b, t, n)
        e = abs(b) ** 2
        change = abs(e - e_prev)
        if change <= tol * max(e, e_prev) or (e == 0.0 and e_prev == 0.0):
            quiet += 1
            if quiet >= 2:
                return b, t
        else:
            quiet = 0
        e_prev = e
    raise NoSettleError(f"no steady state within t_max = {integ.t_max:.3e} s")


def ode_steady_state(model: ValidatedModel, cfg: TimeDomainConfig | None = None,
                     initial: complex = 0j) -> TimeDomainState:
    """Pump-only steady state reached from ``initial``.

    Settled means the relative change of ``|b|**2`` across two consecutive
    windows of ``settle_window`` both stay below ``settle_tol``.
    """
    cfg = TimeDomainConfig() if cfg is None else cfg
    if cfg.probe_amp != 0.0:
        raise DomainError("steady state detection needs probe_amp = 0", "probe_amp")
    integ = _Integrator(model, cfg, initial)
    b, t = _settle(integ, complex(initial), 0.0, cfg.settle_tol)
    return TimeDomainState(b, t)


def ode_steady_energy(model: ValidatedModel, cfg: TimeDomainConfig | None = None,
                      initial: complex = 0j) -> float:
    return ode_steady_state(model, cfg, initial).energy


def _measure(model, cfg, state, amp):
    integ = _Integrator(model, cfg, state.b_rot, probe_amp=amp)
    period = 2.0 * math.pi / cfg.probe_offset
    n = max(8, int(math.ceil(period / integ.dt)))
    dt = period / n
    out_const = integ.out_coupling * state.b_rot
    b, t = state.b_rot, state.t
    prev = None
    while t - state.t < integ.t_max:
        b, t, s_plus, s_minus = integ.run(b, t, n, dt, out_const)
        # s_plus picks the exp(-i w t) (signal) part, s_minus the exp(+i w t) (idler) part
        c_s, c_i = s_plus / n, s_minus / n
        if prev is not None:
            change = max(abs(c_s - prev[0]), abs(c_i - prev[1]))
            if change <= PERIOD_TOL * (abs(c_s) + abs(c_i)):
                return abs(c_s) ** 2 / amp**2, abs(c_i) ** 2 / amp**2
        prev = (c_s, c_i)
    raise NoSettleError("probe response did not become periodic within t_max")


def probe_gain_measurement(model: ValidatedModel, cfg: TimeDomainConfig,
                           initial: complex = 0j, check_linearity: bool = True):
    """Measure signal and idler gain with a weak probe tone.

    The pump-only state is settled first, then a probe at ``omega_p +
    probe_offset`` is switched on.  Once consecutive probe periods give the
    same projections, ``b_out`` is projected onto ``exp(-i w t)`` (signal)
    and ``exp(+i w t)`` (idler) over one whole probe period.

    Returns ``(g_s, g_i)``.

    Raises
    ------
    LinearityError
        If doubling the probe amplitude moves either gain by more than 1%.
    """
    if not cfg.probe_amp > 0 or not cfg.probe_offset > 0:
        raise DomainError("probe measurement needs probe_amp > 0 and probe_offset > 0", "probe_amp")
    b_in = model.drive.b_in1
    if b_in > 0 and cfg.probe_amp > 1e-3 * b_in:
        raise DomainError("probe_amp must not exceed 1e-3 b_in1", "probe_amp")
    state = ode_steady_state(model, replace(cfg, probe_amp=0.0), initial)
    g_s, g_i = _measure(model, cfg, state, cfg.probe_amp)
    if check_linearity:
        g_s2, g_i2 = _measure(model, cfg, state, 2.0 * cfg.probe_amp)
        floor = 1e-6 * g_s
        if (abs(g_s2 - g_s) > LINEARITY_RTOL * g_s
                or abs(g_i2 - g_i) > LINEARITY_RTOL * max(g_i, floor)):
            raise LinearityError(f"gains moved from ({g_s:.6g}, {g_i:.6g}) to "
                                 f"({g_s2:.6g}, {g_i2:.6g}) when doubling the probe")
    return g_s, g_i
