"""Classical pump steady state: the cubic energy equation and its branches.

With ``Delta = omega0 - omega_p`` the intracavity field ``B exp(-i phi_B)``
in the frame rotating at the pump satisfies

    [i Delta + gamma + (i K + gamma3) E] sqrt(E) = -i sqrt(2 gamma1) b_in1 exp(i(phi1 + phi_B - psi1))

and taking the modulus squared leaves a cubic in ``E`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, SingularityError
from .model import ValidatedModel

__all__ = [
    "CubicCoeffs",
    "SteadyStateBranch",
    "SweepPoint",
    "SweepResult",
    "real_cubic_roots",
    "drive_power",
    "cubic_coefficients",
    "solve_energy",
    "pump_phase",
    "classify_stability",
    "dE_domega_p",
    "fold_curve",
    "turning_points",
    "detuning_sweep",
    "follow_stable",
    "sweep_peak",
]

# Relative distance below which two cubic roots are reported as one.
ROOT_MERGE_RTOL = 1e-9
# Discriminant, relative to the size of its two terms, treated as an exact multiple root.
DISCRIMINANT_RTOL = 1e-12
# Relative gap between the fold-curve minimum and the drive treated as tangency.
TANGENCY_RTOL = 1e-13

DRIVE_CONVENTIONS = ("langevin", "squared")


@dataclass(frozen=True)
class CubicCoeffs:
    """Monic cubic ``E**3 + c2 E**2 + c1 E + c0``."""

    c2: float
    c1: float
    c0: float

    def __call__(self, e):
        return ((e + self.c2) * e + self.c1) * e + self.c0

    def derivative(self, e):
        return (3.0 * e + 2.0 * self.c2) * e + self.c1


@dataclass(frozen=True)
class SteadyStateBranch:
    energy: float
    amplitude: float
    phase: float
    stable: bool
    lambda0: complex
    lambda1: complex


@dataclass(frozen=True)
class SweepPoint:
    index: int
    omega_p: float
    branches: tuple
    followed_energy: float
    followed: SteadyStateBranch


@dataclass(frozen=True)
class SweepResult:
    points: tuple
    direction: str

    @property
    def omega_p(self) -> np.ndarray:
        return np.array([p.omega_p for p in self.points])

    @property
    def followed_energy(self) -> np.ndarray:
        return np.array([p.followed_energy for p in self.points])

    @property
    def root_counts(self) -> np.ndarray:
        return np.array([len(p.branches) for p in self.points])


def _polish(t, a, b, c):
    """Two guarded Newton steps on t**3 + a t**2 + b t + c."""
    for _ in range(2):
        f = ((t + a) * t + b) * t + c
        df = (3.0 * t + 2.0 * a) * t + b
        if df == 0.0:
            break
        t_new = t - f / df
        f_new = ((t_new + a) * t_new + b) * t_new + c
        if abs(f_new) >= abs(f):
            break
        t = t_new
    return t


def real_cubic_roots(c2: float, c1: float, c0: float) -> tuple:
    """Distinct real roots of ``x**3 + c2 x**2 + c1 x + c0``, ascending.

    Closed form (trigonometric for three roots, hyperbolic for one) on the
    cubic rescaled to unit-size coefficients.  A discriminant smaller than
    ``DISCRIMINANT_RTOL`` times ``4 |p|**3 + 27 q**2`` is treated as an exact double or triple
    root, and roots closer than ``ROOT_MERGE_RTOL`` are merged.
    """
    s = max(abs(c2), math.sqrt(abs(c1)), abs(c0) ** (1.0 / 3.0))
    if s == 0.0:
        return (0.0,)
    a, b, c = c2 / s, c1 / s**2, c0 / s**3

    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    disc = -(4.0 * p**3 + 27.0 * q * q)

    if abs(disc) <= DISCRIMINANT_RTOL * (4.0 * abs(p) ** 3 + 27.0 * q * q):
        if abs(p) <= DISCRIMINANT_RTOL:
            ts = [0.0]
        else:
            ts = [3.0 * q / p, -1.5 * q / p]
    elif disc > 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    elif p < 0.0:
        r = math.sqrt(-p / 3.0)
        arg = abs(q) / (2.0 * r**3)
        ts = [-math.copysign(2.0 * r * math.cosh(math.acosh(max(arg, 1.0)) / 3.0), q)]
    elif p > 0.0:
        r = math.sqrt(p / 3.0)
        ts = [-2.0 * r * math.sinh(math.asinh(q / (2.0 * r**3)) / 3.0)]
    else:
        ts = [-math.copysign(abs(q) ** (1.0 / 3.0), q)]

    xs = sorted(_polish(t - a / 3.0, a, b, c) for t in ts)
    merged = [xs[0]]
    for x in xs[1:]:
        if abs(x - merged[-1]) <= ROOT_MERGE_RTOL * max(abs(x), abs(merged[-1]), 1e-300):
            continue
        merged.append(x)
    return tuple(s * x for x in merged)


def drive_power(model: ValidatedModel, drive: str = "langevin") -> float:
    """Squared modulus of the steady-state drive term.

    ``"langevin"`` is ``2 gamma1 b_in1**2``, the value implied by the input
    term of the equation of motion.  ``"squared"`` is the alternative
    ``4 gamma1**2 b_in1**2``; it is dimensionally inconsistent and only
    kept so that verification can show it being rejected by the oracle.
    """
    g1, b = model.params.gamma1, model.drive.b_in1
    if drive == "langevin":
        return 2.0 * g1 * b * b
    if drive == "squared":
        return 4.0 * g1 * g1 * b * b
    raise DomainError(f"unknown drive convention {drive!r}", "drive")


def cubic_coefficients(model: ValidatedModel, drive: str = "langevin") -> CubicCoeffs:
    p = model.params
    beta = p.kerr**2 + p.gamma3**2
    if beta == 0.0:
        raise DomainError("kerr = gamma3 = 0: a linear cavity has no cubic", "kerr")
    d, g = model.detuning, p.gamma
    return CubicCoeffs(
        c2=2.0 * (d * p.kerr + g * p.gamma3) / beta,
        c1=(d * d + g * g) / beta,
        c0=-drive_power(model, drive) / beta,
    )


def _field_factor(model: ValidatedModel, energy: float) -> complex:
    """``i Delta + gamma + (i K + gamma3) E``."""
    p = model.params
    return complex(p.gamma + p.gamma3 * energy, model.detuning + p.kerr * energy)


def pump_phase(model: ValidatedModel, energy: float) -> float:
    """Phase ``phi_B`` of the intracavity field for a steady-state energy.

    Raises
    ------
    DomainError
        If ``b_in1`` is zero (phase undefined) or ``energy`` does not solve
        the steady-state equation.
    """
    b = model.drive.b_in1
    if b <= 0.0:
        raise DomainError("pump phase is undefined without a pump", "b_in1")
    lhs = _field_factor(model, energy) * math.sqrt(max(energy, 0.0))
    rhs_mod = math.sqrt(2.0 * model.params.gamma1) * b
    if abs(abs(lhs) ** 2 - rhs_mod**2) > 1e-7 * rhs_mod**2:
        raise DomainError(f"E = {energy!r} is not a steady-state energy", "energy")
    ph = model.phases
    phi_b = np.angle(lhs) + 0.5 * math.pi - ph.phi1 + model.drive.psi1
    return float(math.remainder(phi_b, 2.0 * math.pi))


def classify_stability(model: ValidatedModel, energy: float):
    """Relaxation rates of small deviations around a steady state.

    Returns ``(lambda0, lambda1, stable)`` with
    ``lambda = Re W -/+ sqrt(|V|**2 - Im(W)**2)``; the square root is the
    principal complex one, so the pair is complex conjugate when the
    radicand is negative.  Stable means both real parts are positive.
    """
    p = model.params
    re_w = p.gamma + 2.0 * p.gamma3 * energy
    im_w = model.detuning + 2.0 * p.kerr * energy
    radicand = (p.kerr**2 + p.gamma3**2) * energy**2 - im_w**2
    root = complex(math.sqrt(radicand), 0.0) if radicand >= 0 else complex(0.0, math.sqrt(-radicand))
    lam0, lam1 = re_w - root, re_w + root
    return lam0, lam1, bool(min(lam0.real, lam1.real) > 0.0)


def _branch(model: ValidatedModel, energy: float, with_phase: bool = True) -> SteadyStateBranch:
    lam0, lam1, stable = classify_stability(model, energy)
    phase = pump_phase(model, energy) if with_phase and model.drive.b_in1 > 0 else 0.0
    return SteadyStateBranch(energy, math.sqrt(energy), phase, stable, lam0, lam1)


def solve_energy(model: ValidatedModel, drive: str = "langevin") -> list:
    """All non-negative steady-state energies, ascending, with stability.

    A linear cavity (``kerr = gamma3 = 0``) has the single Lorentzian
    solution ``E = 2 gamma1 b**2 / (Delta**2 + gamma**2)``.  For a drive
    convention other than ``"langevin"`` the energies do not solve the
    phase equation and the branch phase is left at zero.
    """
    p = model.params
    force = drive_power(model, drive)
    if force == 0.0:
        return [_branch(model, 0.0)]
    if p.kerr == 0.0 and p.gamma3 == 0.0:
        roots = (force / (model.detuning**2 + p.gamma**2),)
    else:
        cc = cubic_coefficients(model, drive)
        roots = real_cubic_roots(cc.c2, cc.c1, cc.c0)
    return [_branch(model, e, drive == "langevin") for e in roots if e >= 0.0]


def dE_domega_p(model: ValidatedModel, energy: float) -> float:
    """Slope of the response curve ``dE/d omega_p`` at a steady state.

    Implicit differentiation of the cubic:
    ``2 E (K E + Delta) / (3 beta E**2 + 4 (Delta K + gamma gamma3) E + Delta**2 + gamma**2)``.

    Raises
    ------
    SingularityError
        At a turning point, where the slope is infinite.
    """
    p = model.params
    d, g = model.detuning, p.gamma
    beta = p.kerr**2 + p.gamma3**2
    mix = d * p.kerr + g * p.gamma3
    den = 3.0 * beta * energy**2 + 4.0 * mix * energy + d * d + g * g
    scale = 3.0 * beta * energy**2 + 4.0 * abs(mix) * energy + d * d + g * g
    if abs(den) < 1e-14 * scale:
        raise SingularityError("turning point: dE/d omega_p is infinite")
    return 2.0 * energy * (p.kerr * energy + d) / den


def fold_curve(params, energy):
    """Pump level and detuning of the double-root locus at a given energy.

    Along ``dF/dE = 0`` the detuning is ``-2 K E +/- sqrt(R(E))`` with
    ``R = (K**2 - 3 gamma3**2) E**2 - 4 gamma gamma3 E - gamma**2``.
    Returns ``(force_inner, delta_inner, force_outer, delta_outer)`` where
    ``force`` is the value of ``2 gamma1 b**2`` placing that double root on
    the response curve; the inner branch is the one carrying the critical
    point.  Entries are NaN where ``R < 0``.
    """
    e = np.asarray(energy, dtype=float)
    k, g3, g = params.kerr, params.gamma3, params.gamma
    r = (k * k - 3.0 * g3 * g3) * e * e - 4.0 * g * g3 * e - g * g
    sq = np.sqrt(np.where(r >= 0.0, r, np.nan))
    sk = math.copysign(1.0, k)
    out = []
    for sign in (1.0, -1.0):
        delta = -2.0 * k * e + sign * sk * sq
        force = e * ((g + g3 * e) ** 2 + (delta + k * e) ** 2)
        out.extend([force, delta])
    return tuple(out)


def _fold_energy_window(params, force):
    k, g3, g = params.kerr, params.gamma3, params.gamma
    denom = k * k - 3.0 * g3 * g3
    if denom <= 0.0:
        return None
    e_min = g * (2.0 * g3 + math.sqrt(k * k + g3 * g3)) / denom
    # along the locus force >= E gamma**2, so no solution beyond force / gamma**2
    e_max = force / (g * g)
    if e_max <= e_min:
        return None
    return e_min, e_max


def _roots_on(fun, grid, target):
    vals = fun(grid) - target
    found = []
    for i in range(len(grid) - 1):
        lo, hi = vals[i], vals[i + 1]
        if lo == 0.0:
            found.append(grid[i])
        elif lo * hi < 0.0:
            found.append(brentq(lambda x: float(fun(x)) - target, grid[i], grid[i + 1],
                                xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200))
    if vals[-1] == 0.0:
        found.append(grid[-1])
    return found


def turning_points(model: ValidatedModel, drive: str = "langevin", n_grid: int = 257) -> list:
    """Fold points ``(E, omega_p)`` of the response curve at fixed pump.

    Empty below the critical pump, where the curve is single valued.  At
    tangency (the critical pump itself) the two folds are returned as a
    coincident pair.
    """
    p = model.params
    force = drive_power(model, drive)
    window = _fold_energy_window(p, force) if force > 0 else None
    if window is None:
        return []
    e_min, e_max = window
    inner = lambda e: fold_curve(p, e)[0]
    outer = lambda e: fold_curve(p, e)[2]

    grid = np.geomspace(e_min, e_max, n_grid)
    vals = inner(grid)
    i = int(np.nanargmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    res = minimize_scalar(lambda e: float(inner(e)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14 * hi, "maxiter": 500})
    e_star = float(res.x) if res.fun <= vals[i] else float(grid[i])
    f_star = float(inner(e_star))

    points = []
    if abs(f_star - force) <= TANGENCY_RTOL * force:
        points = [(e_star, 0), (e_star, 0)]
    elif f_star < force:
        left = np.append(grid[grid < e_star], e_star)
        right = np.insert(grid[grid > e_star], 0, e_star)
        points = [(e, 0) for e in _roots_on(inner, left, force)]
        points += [(e, 0) for e in _roots_on(inner, right, force)]
    points += [(e, 1) for e in _roots_on(outer, grid, force)]

    result = []
    for e, which in points:
        c = fold_curve(p, e)
        delta = c[1] if which == 0 else c[3]
        result.append((float(e), float(p.omega0 - delta)))
    result.sort()
    return result


def follow_stable(branches: Sequence[SteadyStateBranch], previous: float | None):
    """Stable branch nearest in energy to ``previous`` (lowest one to start).

    Returns ``None`` if no branch is stable.
    """
    stable = [b for b in branches if b.stable]
    if not stable:
        return None
    if previous is None:
        return stable[0]
    return min(stable, key=lambda b: abs(b.energy - previous))


def detuning_sweep(model: ValidatedModel, omega_p: Sequence[float], direction: str = "up",
                   executor=None) -> SweepResult:
    """Steady states along a pump-frequency grid with hysteresis.

    The grid must be strictly monotone.  ``direction="up"`` traverses it in
    order of increasing ``omega_p``, ``"down"`` in decreasing order; points
    are returned in traversal order.  The followed energy stays on the
    occupied stable branch until that branch ends at a fold and then jumps
    to the nearest remaining stable branch.  ``executor`` (anything with a
    ``map`` method) may parallelise the per-point root solving; the result
    does not depend on it.
    """
    grid = np.asarray(omega_p, dtype=float)
    steps = np.diff(grid)
    if grid.ndim != 1 or grid.size < 1 or not (np.all(steps > 0) or np.all(steps < 0)):
        raise DomainError("omega_p grid must be strictly monotone", "omega_p")
    if direction not in ("up", "down"):
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}", "direction")
    ascending = grid.size == 1 or steps[0] > 0
    if ascending != (direction == "up"):
        grid = grid[::-1]

    solve = lambda w: tuple(solve_energy(model.with_omega_p(float(w))))
    all_branches = list(executor.map(solve, grid)) if executor is not None else [solve(w) for w in grid]

    points, prev = [], None
    for i, (w, branches) in enumerate(zip(grid, all_branches)):
        chosen = follow_stable(branches, prev)
        if chosen is None:
            chosen = branches[0]
        prev = chosen.energy
        points.append(SweepPoint(i, float(w), branches, chosen.energy, chosen))
    return SweepResult(tuple(points), direction)


def sweep_peak(model: ValidatedModel, sweep: SweepResult):
    """Refine the maximum of the followed energy of a single-valued sweep.

    Bounded scalar maximisation of ``E(omega_p)`` between the neighbours of
    the best grid point.  Returns ``(omega_p_peak, E_peak)``.
    """
    w = sweep.omega_p
    e = sweep.followed_energy
    i = int(np.argmax(e))
    if i == 0 or i == len(w) - 1:
        return float(w[i]), float(e[i])
    w0 = w[i]
    a, b = sorted((w[i - 1] - w0, w[i + 1] - w0))

    def neg_energy(dw):
        branches = solve_energy(model.with_omega_p(w0 + dw))
        return -max(br.energy for br in branches)

    res = minimize_scalar(neg_energy, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * (b - a)})
    if -res.fun < e[i]:
        return float(w0), float(e[i])
    return float(w0 + res.x), float(-res.fun)
