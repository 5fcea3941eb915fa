"""Command-line front end: ``kerrjpa {steady,gain,critical,verify}``.

Parameters come from a flat ``key = value`` file (``--config``) and/or
flags of the same names; flags win.  Sweeps are written as CSV with
17 significant digits so that doubles round-trip exactly.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import critical, oracle, response, steadystate
from .errors import ConflictError, KerrJPAError, ParseError
from .model import DeviceParams, PumpDrive, validate

EXIT_OK, EXIT_ERROR, EXIT_VERIFY_FAILED = 0, 1, 2

FLOAT_KEYS = ("omega0", "kerr", "gamma1", "gamma2", "gamma3", "pump_fraction", "b_in1",
              "psi1", "sweep_start", "sweep_stop", "omega", "detuning_ratio")
KEYS = FLOAT_KEYS + ("sweep_axis", "sweep_count", "out")
REQUIRED = ("omega0", "kerr", "gamma1")
SWEEP_AXES = ("detuning_ratio", "omega_p", "pump_fraction", "sideband")

# verification grid, as detunings in units of gamma
VERIFY_DETUNINGS = (-2.0, 0.0, 1.0, 2.0, 4.0)
VERIFY_STEADY_RTOL = 1e-3
VERIFY_GAIN_RTOL = 1e-2


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    pump_fraction: float | None = None
    b_in1: float | None = None
    psi1: float = 0.0
    sweep_axis: str = "detuning_ratio"
    sweep_start: float = -0.01
    sweep_stop: float = 0.01
    sweep_count: int = 2001
    omega: float = 0.0
    detuning_ratio: float | None = None
    out: str | None = None

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.sweep_start, self.sweep_stop, self.sweep_count)


def _convert(key, raw, line=None):
    if key in FLOAT_KEYS:
        try:
            value = float(raw)
        except ValueError:
            raise ParseError(f"{key}: not a number: {raw!r}", key, line) from None
        if not math.isfinite(value):
            raise ParseError(f"{key}: must be finite", key, line)
        return value
    if key == "sweep_count":
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"sweep_count: not an integer: {raw!r}", key, line) from None
    if key == "sweep_axis" and raw not in SWEEP_AXES:
        raise ParseError(f"sweep_axis must be one of {', '.join(SWEEP_AXES)}", key, line)
    return raw


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    ``overrides`` maps keys to raw string values (as typed on the command
    line) that replace the file's.  A pump given in ``overrides`` replaces
    the file's pump whichever of the two forms either uses.
    """
    values, lines = {}, {}
    for n, raw_line in enumerate(text.splitlines(), start=1):
        body = raw_line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"expected 'key = value', got {body!r}", None, n)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", key, n)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", key, n)
        values[key] = _convert(key, raw, n)
        lines[key] = n

    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if {"pump_fraction", "b_in1"} & overrides.keys():
        values.pop("pump_fraction", None)
        values.pop("b_in1", None)
    for key, raw in overrides.items():
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", key)
        values[key] = _convert(key, str(raw))

    for key in REQUIRED:
        if key not in values:
            raise ParseError(f"missing required key {key}", key)
    if "pump_fraction" in values and "b_in1" in values:
        raise ConflictError("give the pump either as pump_fraction or as b_in1, not both",
                            "b_in1", lines.get("b_in1"))

    device = DeviceParams(values.pop("omega0"), values.pop("kerr"), values.pop("gamma1"),
                          values.pop("gamma2", 0.0), values.pop("gamma3", 0.0))
    cfg = RunConfig(device, **values)
    if cfg.sweep_count < 2:
        raise ParseError("sweep_count must be at least 2", "sweep_count", lines.get("sweep_count"))
    if cfg.sweep_start == cfg.sweep_stop:
        raise ParseError("sweep_start and sweep_stop must differ", "sweep_stop", lines.get("sweep_stop"))
    return cfg


def _base_model(cfg: RunConfig, need_pump: bool = True):
    """Validated model at zero detuning with the configured pump."""
    if cfg.b_in1 is not None:
        b = cfg.b_in1
    elif cfg.pump_fraction is not None:
        b = cfg.pump_fraction * math.sqrt(critical.critical_pump(cfg.device))
    elif need_pump:
        raise ParseError("no pump given: set pump_fraction or b_in1", "pump_fraction")
    else:
        b = 0.0
    return validate(cfg.device, PumpDrive(cfg.device.omega0, b, cfg.psi1))


def _fmt(x) -> str:
    return "" if x is None else f"{x:.16e}"


def _grid_as_ratios(cfg):
    g = cfg.grid
    return 1.0 - g / cfg.device.omega0 if cfg.sweep_axis == "omega_p" else g


def cmd_steady(cfg: RunConfig, jobs: int = 1) -> str:
    """CSV of all steady-state roots and the hysteresis-followed energy."""
    if cfg.sweep_axis not in ("detuning_ratio", "omega_p"):
        raise ParseError("steady needs sweep_axis = detuning_ratio or omega_p", "sweep_axis")
    model = _base_model(cfg)
    ys = _grid_as_ratios(cfg)
    omega_p = cfg.device.omega0 * (1.0 - ys) if cfg.sweep_axis == "detuning_ratio" else cfg.grid
    direction = "up" if omega_p[1] > omega_p[0] else "down"
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            sweep = steadystate.detuning_sweep(model, omega_p, direction, executor=pool)
    else:
        sweep = steadystate.detuning_sweep(model, omega_p, direction)

    buf = io.StringIO()
    buf.write("index,omega_p,detuning_ratio,E_low,E_mid,E_high,followed_E,"
              "stable_low,stable_mid,stable_high\n")
    for pt, y in zip(sweep.points, ys):
        brs = list(pt.branches)
        slots = {1: (brs[0], None, None), 2: (brs[0], None, brs[-1]),
                 3: tuple(brs)}[len(brs)]
        energies = [_fmt(b.energy if b else None) for b in slots]
        flags = ["" if b is None else str(int(b.stable)) for b in slots]
        buf.write(",".join([str(pt.index), _fmt(pt.omega_p), _fmt(y), *energies,
                            _fmt(pt.followed_energy), *flags]) + "\n")
    return buf.getvalue()


def _db(x):
    return 10.0 * math.log10(x) if x is not None and x > 0 else None


def cmd_gain(cfg: RunConfig) -> str:
    """CSV of parametric and intermodulation gain along the sweep axis."""
    axis = cfg.sweep_axis
    if axis in ("detuning_ratio", "omega_p"):
        model = _base_model(cfg)
        sweep = response.gain_sweep(model, "detuning_ratio", _grid_as_ratios(cfg), cfg.omega)
    elif axis == "pump_fraction":
        model = _base_model(cfg, need_pump=False)
        y = cfg.detuning_ratio if cfg.detuning_ratio is not None else response.critical_detuning_ratio(model)
        sweep = response.gain_sweep(model.with_detuning_ratio(y), "pump_fraction", cfg.grid, cfg.omega)
    else:
        model = _base_model(cfg)
        y = cfg.detuning_ratio if cfg.detuning_ratio is not None else response.peak_gain(model)[0]
        sweep = response.gain_sweep(model.with_detuning_ratio(y), "sideband", cfg.grid)

    buf = io.StringIO()
    buf.write(f"index,{axis},G_S,G_I,G_S_dB,G_I_dB,flag\n")
    for i, (x, pt, status) in enumerate(zip(cfg.grid, sweep.points, sweep.status)):
        g_s = None if pt is None else pt.g_s
        g_i = None if pt is None else pt.g_i
        buf.write(",".join([str(i), _fmt(x), _fmt(g_s), _fmt(g_i), _fmt(_db(g_s)),
                            _fmt(_db(g_i)), status]) + "\n")
    return buf.getvalue()


def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else (0.0 if a == 0 else math.inf)


def cmd_critical(cfg: RunConfig) -> str:
    """Closed-form and numeric critical point with their relative differences."""
    p = cfg.device
    if not critical.bistability_possible(p):
        return ("bistability_possible: false\n"
                "monostable: |K| <= sqrt(3) gamma3\n"
                "status: monostable\n")
    closed = critical.closed_form_critical_point(p)
    numeric = critical.locate_critical_numeric(p)
    rows = [("E_c", closed.e_c, numeric.e_c),
            ("detuning_c", closed.detuning_c, numeric.detuning_c),
            ("b_in1c_sq", closed.pump_sq_c, numeric.pump_sq_c)]
    out = ["bistability_possible: true"]
    for name, c, n in rows:
        out.append(f"{name}: closed_form={_fmt(c)} numeric={_fmt(n)} rel_diff={_rel(n, c):.3e}")
    out.append(f"detuning_ratio_c: {_fmt(closed.detuning_c / p.omega0)}")
    out.append("status: bistable")
    return "\n".join(out) + "\n"


def cmd_verify(cfg: RunConfig, drive: str = "langevin"):
    """Cross-check steady states and gains against the time-domain oracle.

    Returns ``(report, exit_status)``.  ``drive`` selects the drive
    convention of the frequency-domain side; anything but ``"langevin"``
    is expected to fail.
    """
    base = _base_model(cfg)
    p = base.params
    omega = 0.05 * p.gamma
    b = base.drive.b_in1
    cfg_probe = oracle.TimeDomainConfig(probe_amp=1e-4 * b if b > 0 else 1.0, probe_offset=omega)
    lines, ok = [], True
    for d in VERIFY_DETUNINGS:
        model = base.with_omega_p(p.omega0 - d * p.gamma)
        stable = [br for br in steadystate.solve_energy(model, drive) if br.stable]
        e_ode = oracle.ode_steady_energy(model)
        if not stable:
            lines.append(f"detuning={d:+.1f}gamma steady: no stable root  FAIL")
            ok = False
            continue
        br = min(stable, key=lambda s: abs(s.energy - e_ode))
        err_e = _rel(e_ode, br.energy) if br.energy > 0 else abs(e_ode)
        g_s_m, g_i_m = oracle.probe_gain_measurement(model, cfg_probe)
        resp = response.linearize(model, br, check_residual=(drive == "langevin"))
        g_s = response.parametric_gain(resp, omega)
        g_i = response.intermodulation_gain(resp, omega)
        err_s = _rel(g_s_m, g_s)
        err_i = abs(g_i_m - g_i) / max(g_i, 1e-9 * g_s)
        passed = (err_e <= VERIFY_STEADY_RTOL and err_s <= VERIFY_GAIN_RTOL
                  and err_i <= VERIFY_GAIN_RTOL)
        ok &= passed
        lines.append(f"detuning={d:+.1f}gamma steady_rel_err={err_e:.3e} "
                     f"G_S_rel_err={err_s:.3e} G_I_rel_err={err_i:.3e}  "
                     f"{'ok' if passed else 'FAIL'}")
    lines.append(f"verify: {'passed' if ok else 'FAILED'} "
                 f"(tolerances: steady {VERIFY_STEADY_RTOL:g}, gain {VERIFY_GAIN_RTOL:g})")
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrjpa", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value parameter file")
    for key in KEYS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, metavar="VALUE")
    sub = parser.add_subparsers(dest="command", required=True)
    steady = sub.add_parser("steady", parents=[common], help="steady-state roots along a detuning sweep")
    steady.add_argument("--jobs", type=int, default=1, help="threads used for root solving")
    sub.add_parser("gain", parents=[common], help="parametric and intermodulation gain sweep")
    sub.add_parser("critical", parents=[common], help="critical point, closed form vs numeric")
    verify = sub.add_parser("verify", parents=[common], help="cross-check against the time-domain oracle")
    verify.add_argument("--corrupt-drive", action="store_true",
                        help="use the 4 gamma1**2 b**2 drive term (expected to fail)")
    return parser


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text, {k: getattr(args, k) for k in KEYS})
        status = EXIT_OK
        if args.command == "steady":
            out = cmd_steady(cfg, jobs=args.jobs)
        elif args.command == "gain":
            out = cmd_gain(cfg)
        elif args.command == "critical":
            out = cmd_critical(cfg)
        else:
            out, status = cmd_verify(cfg, "squared" if args.corrupt_drive else "langevin")
        _emit(out, cfg.out)
        return status
    except (KerrJPAError, OSError) as exc:
        print(f"kerrjpa {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
