"""Small-signal response around a steady pump state.

Linearising the mean-field equation about ``b0 = B exp(-i phi_B)`` gives

    da/dt = -W a - V a*,
    W = i Delta + gamma + 2 (i K + gamma3) E,   V = (i K + gamma3) E exp(-2 i phi_B)

and, with ``D(w) = (-i w + lambda0)(-i w + lambda1)``, the reflected
sidebands of port 1 give

    G_S(w) = |D(w) - 2 gamma1 (-i w + W*)|**2 / |D(w)|**2
    G_I(w) = 4 gamma1**2 |V|**2 / |D(w)|**2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .critical import critical_detuning_closed_form, critical_pump
from .errors import ConvergenceError, DomainError
from .model import ValidatedModel
from .steadystate import (SteadyStateBranch, classify_stability, detuning_sweep,
                          follow_stable, solve_energy)

AXES = ("detuning_ratio", "pump_fraction", "sideband")


@dataclass(frozen=True)
class LinearResponse:
    w: complex
    v: complex
    lambda0: complex
    lambda1: complex
    branch: SteadyStateBranch
    gamma1: float

    @property
    def stable(self) -> bool:
        return self.branch.stable

    def denominator(self, omega):
        """``D(omega) = (-i omega + lambda0)(-i omega + lambda1)``."""
        s = -1j * np.asarray(omega, dtype=float)
        return (s + self.lambda0) * (s + self.lambda1)


@dataclass(frozen=True)
class GainPoint:
    omega: float
    g_s: float
    g_i: float


@dataclass(frozen=True)
class GainSweep:
    """Gains along one axis; ``points[i]`` is None where ``status[i] != "ok"``."""

    axis: str
    values: np.ndarray
    points: tuple
    status: tuple
    energies: tuple = ()

    @property
    def g_s(self) -> np.ndarray:
        return np.array([np.nan if p is None else p.g_s for p in self.points])

    @property
    def g_i(self) -> np.ndarray:
        return np.array([np.nan if p is None else p.g_i for p in self.points])


def linearize(model: ValidatedModel, branch: SteadyStateBranch,
              check_residual: bool = True) -> LinearResponse:
    """Damping and squeezing parameters ``W``, ``V`` and the relaxation rates.

    ``check_residual=False`` skips the test that ``branch`` solves the
    steady-state equation of ``model``.
    """
    p = model.params
    e = branch.energy
    force = 2.0 * p.gamma1 * model.drive.b_in1**2
    residual = e * abs(complex(p.gamma + p.gamma3 * e, model.detuning + p.kerr * e)) ** 2 - force
    if check_residual and abs(residual) > 1e-7 * max(force, 1e-300) and not (force == 0.0 and e == 0.0):
        raise DomainError(f"E = {e!r} is not a steady state of this model", "branch")

    c = complex(p.gamma3, p.kerr)
    w = complex(p.gamma, model.detuning) + 2.0 * c * e
    v = c * e * complex(math.cos(2.0 * branch.phase), -math.sin(2.0 * branch.phase))
    lam0, lam1, _ = classify_stability(model, e)
    return LinearResponse(w, v, lam0, lam1, branch, p.gamma1)


def _require_stable(resp):
    if not resp.stable:
        raise DomainError("gain of an unstable steady state is undefined", "branch")


def parametric_gain(resp: LinearResponse, omega):
    """Reflected power gain at the signal frequency ``omega_p + omega``."""
    _require_stable(resp)
    s = -1j * np.asarray(omega, dtype=float)
    d = resp.denominator(omega)
    g = np.abs(d - 2.0 * resp.gamma1 * (s + np.conj(resp.w))) ** 2 / np.abs(d) ** 2
    return float(g) if np.ndim(g) == 0 else g


def intermodulation_gain(resp: LinearResponse, omega):
    """Power converted to ``omega_p + omega`` per input power at ``omega_p - omega``."""
    _require_stable(resp)
    d = resp.denominator(omega)
    g = 4.0 * resp.gamma1**2 * abs(resp.v) ** 2 / np.abs(d) ** 2
    return float(g) if np.ndim(g) == 0 else g


def gain_point(model: ValidatedModel, branch: SteadyStateBranch, omega: float) -> GainPoint:
    resp = linearize(model, branch)
    return GainPoint(float(omega), parametric_gain(resp, omega), intermodulation_gain(resp, omega))


def pump_for_fraction(model: ValidatedModel, fraction: float) -> float:
    """Absolute ``b_in1`` for a pump amplitude given as a fraction of critical."""
    return fraction * math.sqrt(critical_pump(model.params))


def gain_sweep(model: ValidatedModel, axis: str, values: Sequence[float], omega: float = 0.0) -> GainSweep:
    """Parametric and intermodulation gain along one axis.

    ``axis`` is ``"detuning_ratio"`` (vary ``omega_p = omega0 (1 - y)``),
    ``"pump_fraction"`` (vary ``b_in1`` as a fraction of the critical pump,
    ``model.drive.omega_p`` fixed) or ``"sideband"`` (vary ``omega`` at the
    model's own pump).  Where several stable branches coexist the
    hysteresis-followed one is used.  Points without a stable branch get
    ``status = "no_stable_branch"`` and the sweep continues.
    """
    vals = np.asarray(values, dtype=float)
    steps = np.diff(vals)
    if vals.ndim != 1 or vals.size < 1 or not (np.all(steps > 0) or np.all(steps < 0)):
        raise DomainError("sweep values must be strictly monotone", "values")
    if axis not in AXES:
        raise DomainError(f"unknown axis {axis!r}; expected one of {AXES}", "axis")

    if axis == "detuning_ratio":
        omega_p = model.params.omega0 * (1.0 - vals)
        up = vals.size == 1 or omega_p[1] > omega_p[0]
        sweep = detuning_sweep(model, omega_p, "up" if up else "down")
        states = [(model.with_omega_p(pt.omega_p), pt.followed) for pt in sweep.points]
        omegas = [omega] * vals.size
    elif axis == "pump_fraction":
        states, prev = [], None
        for f in vals:
            m = model.with_b_in1(pump_for_fraction(model, float(f)))
            br = follow_stable(solve_energy(m), prev)
            prev = None if br is None else br.energy
            states.append((m, br))
        omegas = [omega] * vals.size
    else:
        br = follow_stable(solve_energy(model), None)
        states = [(model, br)] * vals.size
        omegas = list(vals)

    points, status = [], []
    for (m, br), om in zip(states, omegas):
        if br is None or not br.stable:
            points.append(None)
            status.append("no_stable_branch")
        else:
            points.append(gain_point(m, br, float(om)))
            status.append("ok")
    energies = tuple(float("nan") if br is None else br.energy for _, br in states)
    return GainSweep(axis, vals, tuple(points), tuple(status), energies)


def _gain_at_ratio(model, y, omega, near):
    m = model.with_detuning_ratio(y)
    br = follow_stable(solve_energy(m), near)
    if br is None:
        return float("nan")
    return parametric_gain(linearize(m, br), omega)


def peak_gain(model: ValidatedModel, omega: float = 0.0, ratios: Sequence[float] | None = None):
    """Detuning ratio and value of the parametric-gain maximum.

    The best point of a grid sweep (default ``y`` in [-0.01, 0.01], 2001
    points) is refined by golden-section search on its neighbours.

    Raises
    ------
    ConvergenceError
        If the best grid point lies on the grid edge, so that no bracket
        around the maximum exists.
    """
    ys = np.linspace(-0.01, 0.01, 2001) if ratios is None else np.asarray(ratios, dtype=float)
    sweep = gain_sweep(model, "detuning_ratio", ys, omega)
    g = sweep.g_s
    if np.all(np.isnan(g)):
        raise ConvergenceError("no stable branch anywhere on the sweep")
    i = int(np.nanargmax(g))
    if np.nanmax(g) - np.nanmin(g) <= 1e-12 * np.nanmax(g):
        return float(ys[i]), float(g[i])
    if i == 0 or i == len(ys) - 1 or np.isnan(g[i - 1]) or np.isnan(g[i + 1]):
        raise ConvergenceError("gain maximum at the edge of the sweep; widen the grid")
    e_near = sweep.energies[i]
    y0 = float(ys[i])
    a, c = float(ys[i - 1]) - y0, float(ys[i + 1]) - y0

    res = minimize_scalar(lambda dy: -_gain_at_ratio(model, y0 + dy, omega, e_near),
                          bracket=(a, 0.0, c), method="golden", tol=1e-10)
    if not res.success or -res.fun < g[i]:
        return y0, float(g[i])
    return y0 + float(res.x), float(-res.fun)


def critical_detuning_ratio(model: ValidatedModel) -> float:
    """Detuning ratio of the critical point (where gain diverges with pump)."""
    return critical_detuning_closed_form(model.params) / model.params.omega0
