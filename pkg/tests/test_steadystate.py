import cmath
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import P0, p0_model
from kerrjpa import (DeviceParams, DomainError, PortPhases, PumpDrive, SingularityError,
                     classify_stability, critical_pump, cubic_coefficients, dE_domega_p,
                     detuning_sweep, pump_phase, real_cubic_roots, solve_energy,
                     turning_points, validate)
from kerrjpa.steadystate import follow_stable, sweep_peak


def steady_residual(model, energy, phase):
    """Relative residual of the complex steady-state equation for b0 = sqrt(E) e^{-i phase}."""
    p, d, ph = model.params, model.drive, model.phases
    b0 = math.sqrt(energy) * cmath.exp(-1j * phase)
    drive = -1j * math.sqrt(2 * p.gamma1) * cmath.exp(1j * ph.phi1) * d.b_in1 * cmath.exp(-1j * d.psi1)
    r = -complex(p.gamma + p.gamma3 * energy, model.detuning + p.kerr * energy) * b0 + drive
    return abs(r) / abs(drive)


def jacobian_rates(model, energy, phase, h=1e-7):
    """Eigenvalues of minus the finite-difference Jacobian of the real 2D flow."""
    p, d, ph = model.params, model.drive, model.phases
    drive = -1j * math.sqrt(2 * p.gamma1) * cmath.exp(1j * ph.phi1) * d.b_in1 * cmath.exp(-1j * d.psi1)

    def f(b):
        e = abs(b) ** 2
        return -complex(p.gamma + p.gamma3 * e, model.detuning + p.kerr * e) * b + drive

    b0 = math.sqrt(energy) * cmath.exp(-1j * phase)
    step = h * max(abs(b0), 1.0)
    cols = []
    for db in (step, 1j * step):
        df = (f(b0 + db) - f(b0 - db)) / (2 * step)
        cols.append([df.real, df.imag])
    jac = np.array(cols).T
    return np.sort_complex(-np.linalg.eigvals(jac))


# ---------------------------------------------------------------- cubic roots

def test_cubic_three_simple_roots():
    assert np.allclose(real_cubic_roots(-6.0, 11.0, -6.0), (1.0, 2.0, 3.0), rtol=1e-14)


def test_cubic_one_real_root():
    roots = real_cubic_roots(0.0, 1.0, -2.0)  # x^3 + x - 2 = (x-1)(x^2+x+2)
    assert len(roots) == 1 and roots[0] == pytest.approx(1.0, rel=1e-15)


def test_cubic_double_and_triple_roots():
    assert np.allclose(real_cubic_roots(-4.0, 5.0, -2.0), (1.0, 2.0), rtol=1e-12)  # (x-1)^2 (x-2)
    assert np.allclose(real_cubic_roots(-6.0, 12.0, -8.0), (2.0,), rtol=1e-12)  # (x-2)^3
    assert real_cubic_roots(0.0, 0.0, 0.0) == (0.0,)


def test_cubic_widely_spread_roots():
    c = np.poly([1.0, 1e3, 1e6])
    roots = real_cubic_roots(c[1], c[2], c[3])
    assert np.allclose(roots, (1.0, 1e3, 1e6), rtol=1e-9)


def test_cubic_near_double_root_resolved():
    # separation 1e-4 relative: distinct, not merged
    c = np.poly([1.0, 1.0001, 3.0])
    assert np.allclose(real_cubic_roots(c[1], c[2], c[3]), (1.0, 1.0001, 3.0), rtol=1e-9)


@settings(max_examples=300)
@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_cubic_matches_companion_matrix(rs):
    rs = sorted(rs)
    assume(min(np.diff(rs)) > 1e-3 * max(1.0, max(map(abs, rs))))
    c = np.poly(rs)
    got = real_cubic_roots(c[1], c[2], c[3])
    ref = np.sort(np.roots(c).real)
    assert len(got) == 3
    assert np.allclose(got, ref, rtol=1e-8, atol=1e-9 * max(1.0, max(map(abs, rs))))


@settings(max_examples=300)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_cubic_single_real_root_with_complex_pair(r, re, im):
    scale = max(1.0, abs(r), abs(re), im)
    assume(im > 1e-4 * scale)  # closer pairs are numerically a double root
    c = np.poly([r, complex(re, im), complex(re, -im)]).real
    got = real_cubic_roots(c[1], c[2], c[3])
    assert len(got) == 1
    assert abs(got[0] - r) <= 1e-7 * scale


# ---------------------------------------------------------------- steady state

def test_cubic_coefficients_reference_device():
    m = p0_model(0.5, 0.002)
    cc = cubic_coefficients(m)
    p = m.params
    beta = p.kerr**2
    d = m.detuning
    assert cc.c2 == pytest.approx(2 * d * p.kerr / beta, rel=1e-14)
    assert cc.c1 == pytest.approx((d * d + p.gamma**2) / beta, rel=1e-14)
    assert cc.c0 == pytest.approx(-2 * p.gamma1 * m.drive.b_in1**2 / beta, rel=1e-14)
    for br in solve_energy(m):
        assert abs(cc(br.energy)) <= 1e-12 * cc.c1 * br.energy


def test_cubic_coefficients_need_nonlinearity():
    with pytest.raises(DomainError):
        cubic_coefficients(validate(DeviceParams(1.0, 0.0, 0.1), PumpDrive(1.0, 1.0)))


def test_cubic_derivative_matches_finite_difference():
    cc = cubic_coefficients(p0_model(1.2, 0.006))
    x, h = 40.0, 1e-4
    assert cc.derivative(x) == pytest.approx((cc(x + h) - cc(x - h)) / (2 * h), rel=1e-7)


@pytest.mark.parametrize("fraction, y", [(0.3, 0.0), (0.5, 0.002), (1.2, 0.007), (2.0, 0.009)])
def test_solve_energy_solves_complex_equation(fraction, y):
    m = validate(P0, PumpDrive(P0.omega0 * (1 - y), fraction * math.sqrt(critical_pump(P0)), 0.4),
                 PortPhases(phi1=-1.1))
    branches = solve_energy(m)
    assert branches and [b.energy for b in branches] == sorted(b.energy for b in branches)
    for br in branches:
        assert br.energy > 0
        assert br.amplitude == pytest.approx(math.sqrt(br.energy), rel=1e-15)
        assert steady_residual(m, br.energy, br.phase) < 1e-10


def test_three_roots_middle_unstable():
    branches = solve_energy(p0_model(1.2, 0.007))
    assert len(branches) == 3
    assert [b.stable for b in branches] == [True, False, True]


def test_zero_pump_gives_empty_cavity():
    m = p0_model(0.0, 0.001)
    (br,) = solve_energy(m)
    assert br.energy == 0.0 and br.stable and br.phase == 0.0


def test_linear_cavity_is_lorentzian():
    p = DeviceParams(1e9, 0.0, 3e6, 1e6)
    for d in (-5e6, 0.0, 2e6):
        m = validate(p, PumpDrive(p.omega0 - d, 10.0))
        (br,) = solve_energy(m)
        assert br.energy == pytest.approx(2 * 3e6 * 100.0 / (d * d + 4e6**2), rel=1e-14)


def test_pump_phase_requires_steady_state():
    m = p0_model(0.5)
    with pytest.raises(DomainError):
        pump_phase(m, 2 * solve_energy(m)[0].energy)
    with pytest.raises(DomainError):
        pump_phase(p0_model(0.0), 1.0)


def test_pump_phase_moves_with_pump_phase():
    a = p0_model(0.5, 0.001)
    b = validate(a.params, PumpDrive(a.drive.omega_p, a.drive.b_in1, 0.25))
    pa, pb = solve_energy(a)[0].phase, solve_energy(b)[0].phase
    assert math.remainder(pb - pa - 0.25, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("gamma3", [0.0, 1e6])
@pytest.mark.parametrize("fraction, y", [(0.5, 0.003), (1.2, 0.007), (1.5, -0.002)])
def test_stability_rates_match_jacobian(gamma3, fraction, y):
    params = DeviceParams(1e11, -9.99e6, 3.2e8, 0.0, gamma3)
    m = validate(params, PumpDrive(1e11 * (1 - y), fraction * math.sqrt(critical_pump(params))))
    for br in solve_energy(m):
        ref = jacobian_rates(m, br.energy, br.phase)
        got = np.sort_complex(np.array([br.lambda0, br.lambda1]))
        assert np.allclose(got, ref, rtol=1e-5, atol=1e-6 * params.gamma)
        assert br.stable == bool(np.all(ref.real > 0))


def test_rate_product_is_cubic_slope():
    m = p0_model(1.2, 0.007)
    cc = cubic_coefficients(m)
    beta = m.params.kerr**2
    for br in solve_energy(m):
        lam0, lam1, _ = classify_stability(m, br.energy)
        assert (lam0 * lam1).real == pytest.approx(beta * cc.derivative(br.energy), rel=1e-9)
        assert abs((lam0 * lam1).imag) < 1e-9 * abs(lam0 * lam1)


def test_dE_domega_p_singular_at_fold():
    m = p0_model(1.2)
    e, w = turning_points(m)[0]
    with pytest.raises(SingularityError):
        dE_domega_p(m.with_omega_p(w), e)


def test_turning_points_below_and_above_critical():
    assert turning_points(p0_model(0.9)) == []
    folds = turning_points(p0_model(1.2))
    assert len(folds) == 2
    for e, w in folds:
        cc = cubic_coefficients(p0_model(1.2).with_omega_p(w))
        scale = cc.c1
        assert abs(cc(e)) < 1e-9 * scale * e
        assert abs(cc.derivative(e)) < 1e-6 * scale
    # three roots strictly between the folds, one outside
    w_lo, w_hi = sorted(w for _, w in folds)
    assert len(solve_energy(p0_model(1.2).with_omega_p(0.5 * (w_lo + w_hi)))) == 3
    assert len(solve_energy(p0_model(1.2).with_omega_p(w_hi + 0.01 * (w_hi - w_lo) + 1e3))) == 1


def test_turning_points_at_critical_pump_coincide():
    folds = turning_points(p0_model(1.0 + 1e-12))
    assert len(folds) in (0, 2)
    if folds:
        assert folds[0][0] == pytest.approx(folds[1][0], rel=1e-3)


def test_follow_stable():
    branches = solve_energy(p0_model(1.2, 0.007))
    assert follow_stable(branches, None) is branches[0]
    assert follow_stable(branches, 1e9) is branches[2]
    assert follow_stable([branches[1]], None) is None


def test_sweep_hysteresis():
    m = p0_model(1.5)
    ys = np.linspace(0.003, 0.012, 301)
    omega_p = m.params.omega0 * (1 - ys)
    up = detuning_sweep(m, omega_p, "up")
    down = detuning_sweep(m, omega_p, "down")
    assert np.all(np.diff(up.omega_p) > 0) and np.all(np.diff(down.omega_p) < 0)
    e_up = dict(zip(up.omega_p, up.followed_energy))
    e_down = dict(zip(down.omega_p, down.followed_energy))
    split = [w for w in omega_p if not math.isclose(e_up[w], e_down[w], rel_tol=1e-9)]
    assert split, "no hysteresis inside the bistable window"
    assert all(len(solve_energy(m.with_omega_p(w))) == 3 for w in split)
    for pt in up.points:
        assert pt.followed.stable
        assert pt.followed_energy in [b.energy for b in pt.branches]
    assert set(up.root_counts) == {1, 3}


def test_sweep_same_with_executor():
    m = p0_model(1.2)
    omega_p = m.params.omega0 * (1 - np.linspace(0.0, 0.01, 101))
    with ThreadPoolExecutor(4) as pool:
        par = detuning_sweep(m, omega_p, "down", executor=pool)
    ser = detuning_sweep(m, omega_p, "down")
    assert np.array_equal(par.followed_energy, ser.followed_energy)


def test_sweep_rejects_bad_grid():
    m = p0_model(0.5)
    with pytest.raises(DomainError):
        detuning_sweep(m, [1e11, 1e11, 1.1e11])
    with pytest.raises(DomainError):
        detuning_sweep(m, [1e11, 1.1e11], "sideways")


def test_sweep_peak_on_shifted_resonance():
    m = p0_model(0.5)
    sweep = detuning_sweep(m, m.params.omega0 * (1 - np.linspace(-0.01, 0.01, 201)))
    w, e = sweep_peak(m, sweep)
    assert abs((m.params.omega0 - w) + m.params.kerr * e) < 1e-6 * m.params.gamma
    # the Lorentzian peak height is reached at the shifted resonance
    assert e == pytest.approx(2 * m.params.gamma1 * m.drive.b_in1**2 / m.params.gamma**2, rel=1e-10)
