import cmath
import math

import numpy as np
import pytest

from conftest import P0, p0_model
from kerrjpa import (DeviceParams, DivergenceError, DomainError, NoSettleError, PortPhases,
                     PumpDrive, TimeDomainConfig, integrate_mean_field, intermodulation_gain,
                     linearize, ode_steady_energy, ode_steady_state, parametric_gain,
                     probe_gain_measurement, solve_energy, validate)


def test_linear_cavity_transient_is_exact():
    p = DeviceParams(1e9, 0.0, 2e6, 1e6)
    d = 3e6
    m = validate(p, PumpDrive(p.omega0 - d, 5.0, 0.3), PortPhases(0.2))
    traj = integrate_mean_field(m, TimeDomainConfig(t_max=3e-6), samples=51)
    rate = complex(p.gamma, d)
    drive = -1j * math.sqrt(2 * p.gamma1) * cmath.exp(0.2j) * 5.0 * cmath.exp(-0.3j)
    exact = drive / rate * (1 - np.exp(-rate * traj.t))
    assert len(traj.t) == 51 and traj.t[0] == 0.0
    assert np.allclose(traj.b_rot, exact, rtol=0, atol=1e-9 * abs(drive / rate))
    assert traj.final.energy == pytest.approx(abs(exact[-1]) ** 2, rel=1e-8)


@pytest.mark.parametrize("fraction, y", [(0.3, 0.0), (0.5, 0.002), (0.8, -0.003), (0.8, 0.004)])
def test_ode_steady_state_matches_cubic(fraction, y):
    m = p0_model(fraction, y)
    (br,) = solve_energy(m)
    st = ode_steady_state(m)
    assert st.energy == pytest.approx(br.energy, rel=1e-6)
    # the field itself, not only its modulus, lands on the steady state
    assert st.b_rot == pytest.approx(math.sqrt(br.energy) * cmath.exp(-1j * br.phase), rel=1e-5)


def test_ode_reaches_either_stable_branch():
    m = p0_model(1.2, 0.007)
    low, mid, high = solve_energy(m)
    assert ode_steady_energy(m) == pytest.approx(low.energy, rel=1e-6)
    start = math.sqrt(high.energy) * cmath.exp(-1j * high.phase)
    assert ode_steady_energy(m, initial=start) == pytest.approx(high.energy, rel=1e-6)


def test_ode_with_two_photon_loss():
    p = DeviceParams(1e11, -9.99e6, 2.4e8, 0.8e8, 3e6)
    m = validate(p, PumpDrive(1e11 * (1 - 0.003), 6e4))
    energies = [b.energy for b in solve_energy(m) if b.stable]
    e = ode_steady_energy(m)
    assert min(abs(e - x) / x for x in energies) < 1e-6


@pytest.mark.parametrize("fraction, y", [(0.5, 0.0018), (0.8, 0.004)])
def test_probe_gain_matches_linear_response(fraction, y):
    m = p0_model(fraction, y)
    omega = 0.05 * m.params.gamma
    cfg = TimeDomainConfig(probe_amp=1e-4 * m.drive.b_in1, probe_offset=omega, probe_phase=0.4)
    g_s, g_i = probe_gain_measurement(m, cfg)
    resp = linearize(m, solve_energy(m)[0])
    assert g_s == pytest.approx(parametric_gain(resp, omega), rel=1e-4)
    assert g_i == pytest.approx(intermodulation_gain(resp, omega), rel=1e-4)


def test_probe_on_empty_cavity_reflects_unity():
    m = p0_model(0.0, 0.001)
    cfg = TimeDomainConfig(probe_amp=1.0, probe_offset=0.3 * P0.gamma)
    g_s, g_i = probe_gain_measurement(m, cfg)
    assert g_s == pytest.approx(1.0, abs=1e-6)
    assert g_i < 1e-12


def test_probe_settings_validated():
    m = p0_model(0.5)
    with pytest.raises(DomainError):
        probe_gain_measurement(m, TimeDomainConfig(probe_amp=0.0, probe_offset=1e7))
    with pytest.raises(DomainError):
        probe_gain_measurement(m, TimeDomainConfig(probe_amp=1.0, probe_offset=0.0))
    with pytest.raises(DomainError):
        probe_gain_measurement(m, TimeDomainConfig(probe_amp=0.01 * m.drive.b_in1, probe_offset=1e7))
    with pytest.raises(DomainError):
        ode_steady_state(m, TimeDomainConfig(probe_amp=1.0, probe_offset=1e7))


@pytest.mark.parametrize("kwargs", [dict(dt=0.0), dict(t_max=-1.0), dict(settle_window=0.0),
                                    dict(settle_tol=0.0), dict(settle_tol=0.5), dict(probe_amp=-1.0)])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        TimeDomainConfig(**kwargs)


def test_no_settle_within_horizon():
    m = p0_model(0.5)
    with pytest.raises(NoSettleError):
        ode_steady_state(m, TimeDomainConfig(t_max=5.0 / m.params.gamma))


def test_divergence_detected():
    # a step far beyond the RK4 stability limit blows up
    m = p0_model(0.5)
    with pytest.raises(DivergenceError):
        integrate_mean_field(m, TimeDomainConfig(dt=50.0 / m.params.gamma, t_max=1e4 / m.params.gamma))
