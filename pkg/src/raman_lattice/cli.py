"""Command-line front end.

Units at this boundary: frequencies and detunings in kHz (always the
cyclic value, omega/2pi), powers in uW, times in us, temperatures in uK,
angles in mrad. Sideband areas are in kHz (probability x kHz).

Every subcommand writes one CSV file (comma separated, header row, LF line
endings, '%.12g' floats) and a JSON sidecar with the same stem that records
the tool version, the resolved configuration and the seed. Output goes to
``--output`` if given, otherwise to ``<dir>/<subcommand>.csv`` where
``<dir>`` is ``--out-dir``, then ``$RAMAN_LATTICE_OUT``, then the working
directory.

Parameters can also come from ``--config file.json``, a flat object whose
keys are option names (``omega1_khz`` or ``omega1-khz``). Explicit flags win
over the config file, which wins over the built-in defaults.

On failure a single JSON error record is written to stderr and the exit
status is 2 for usage or configuration errors, 1 for everything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    fit_area_model,
    fit_avoided_crossing,
    fit_lorentzian_doublet,
    peak_list,
    thermometry_from_spectrum,
)
from .constants import TWO_PI
from .cooling import CoolingProtocol, cooling_omega0, simulate_cooling
from .lattice import LatticeConfig, eigensystem, minimum_splitting
from .raman import RamanDrive, ThermalState, mode_lamb_dicke
from .specfun import chi, chi_quadrature
from .spectrum import DetuningGrid, Spectrum, add_noise, crossing_scan, synthesize_spectrum

ENV_OUT = "RAMAN_LATTICE_OUT"
TOOL = "raman-lattice"

KHZ = TWO_PI * 1e3  # rad/s per kHz of cyclic frequency
UW = 1e-6
US = 1e-6
UK = 1e-6
MRAD = 1e-3


class CliError(Exception):
    """Bad usage or configuration (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ---------------------------------------------------------------- file I/O

def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.12g" % float(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path, required):
    """Numeric columns of a CSV written by this tool, keyed by header name."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader)
            rows = [r for r in reader if r]
    except FileNotFoundError:
        raise CliError(f"input file not found: {path}") from None
    except StopIteration:
        raise CliError(f"input file is empty: {path}") from None
    missing = [c for c in required if c not in header]
    if missing:
        raise CliError(f"{path}: missing columns {missing} (found {header})")
    cols = {}
    for name in required:
        i = header.index(name)
        try:
            cols[name] = np.array([float(r[i]) for r in rows])
        except (ValueError, IndexError):
            raise CliError(f"{path}: column {name!r} is not numeric") from None
    return cols


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats so the sidecar stays strict JSON."""
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, (float, np.floating)):
        f = float(o)
        return f if math.isfinite(f) else str(f)
    return o


def write_sidecar(path, subcommand, config, seed, results):
    doc = {
        "tool": TOOL,
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "results": results,
    }
    text = json.dumps(_clean(json.loads(json.dumps(doc, default=_jsonable))), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


# ---------------------------------------------------------------- arguments

def _lattice_args(p, omega1=528.0, omega2=528.0, phi=16.0):
    g = p.add_argument_group("lattice")
    g.add_argument("--omega1-khz", type=float, default=omega1, help="omega1/2pi of the 1064-nm lattice")
    g.add_argument("--omega2-khz", type=float, default=omega2, help="omega2/2pi of the 772-nm lattice")
    g.add_argument("--phi-mrad", type=float, default=phi, help="deviation from orthogonality")


def _thermal_args(p, nbar=3.3):
    g = p.add_argument_group("thermal state")
    g.add_argument("--nbar", type=float, default=nbar, help="mean occupation of both modes")
    g.add_argument("--nbar-plus", type=float, default=None)
    g.add_argument("--nbar-minus", type=float, default=None)
    g.add_argument("--temperature-uk", type=float, default=None,
                   help="common temperature; overrides the occupations")


def _lattice(a) -> LatticeConfig:
    return LatticeConfig.from_frequencies(a.omega1_khz * KHZ, a.omega2_khz * KHZ, a.phi_mrad * MRAD)


def _thermal(a, cfg):
    es = eigensystem(cfg)
    out = {}
    for m, override in (("+", a.nbar_plus), ("-", a.nbar_minus)):
        w = es.omega(m)
        if a.temperature_uk is not None:
            out[m] = ThermalState.from_temperature(w, a.temperature_uk * UK)
        else:
            out[m] = ThermalState.from_nbar(w, a.nbar if override is None else override)
    return out


def _spectrum_csv(path, spec):
    write_csv(path, ["detuning_khz", "transfer"], zip(spec.detunings / 1e3, spec.transfer))


def _read_spectrum(path):
    c = read_csv(path, ["detuning_khz", "transfer"])
    return Spectrum(c["detuning_khz"] * 1e3, c["transfer"])


# ---------------------------------------------------------------- commands

def cmd_eigen(a):
    cfg = _lattice(a)
    es = eigensystem(cfg)
    split = (es.omega_plus - es.omega_minus) / KHZ
    rows = [(m, es.omega(m) / KHZ, es.projection(m), mode_lamb_dicke(cfg, m)) for m in ("+", "-")]
    res = {
        "omega_plus_khz": es.omega_plus / KHZ,
        "omega_minus_khz": es.omega_minus / KHZ,
        "beta_deg": math.degrees(es.beta),
        "splitting_khz": split,
        "omega1_phi_khz": minimum_splitting(cfg.omega1, cfg.phi)[0] / KHZ,
        "projection_plus": es.proj_plus,
        "projection_minus": es.proj_minus,
    }
    text = (f"omega_+/2pi = {res['omega_plus_khz']:.4f} kHz  (projection {es.proj_plus:.4f})\n"
            f"omega_-/2pi = {res['omega_minus_khz']:.4f} kHz  (projection {es.proj_minus:.4f})\n"
            f"beta = {res['beta_deg']:.4f} deg\n"
            f"splitting/2pi = {split:.4f} kHz  (omega1*phi/2pi = {res['omega1_phi_khz']:.4f} kHz)")
    return ["mode", "frequency_khz", "projection", "lamb_dicke"], rows, res, text


def cmd_scan_crossing(a):
    cfg = _lattice(a)
    if a.points < 2:
        raise CliError("--points must be at least 2")
    powers = np.linspace(a.power_start_uw, a.power_stop_uw, a.points) * UW
    scan = crossing_scan(cfg, powers, a.p0_uw * UW, a.p1_uw * UW, a.t_us * US)
    fp, fm = scan.frequencies_plus / 1e3, scan.frequencies_minus / 1e3
    ap, am = scan.areas_plus / 1e3, scan.areas_minus / 1e3
    if a.freq_noise_khz > 0 or a.area_noise_rel > 0:
        rng = np.random.default_rng(a.seed)
        fp = fp + rng.normal(0.0, a.freq_noise_khz, fp.size)
        fm = fm + rng.normal(0.0, a.freq_noise_khz, fm.size)
        ap = ap * (1.0 + rng.normal(0.0, a.area_noise_rel, ap.size))
        am = am * (1.0 + rng.normal(0.0, a.area_noise_rel, am.size))
    rows = zip(powers / UW, fp, fm, ap, am)
    header = ["power_uw", "freq_plus_khz", "freq_minus_khz", "area_plus_khz", "area_minus_khz"]
    gap = float(np.min(fp - fm))
    return header, rows, {"min_gap_khz": gap}, f"{a.points} scan points, smallest gap {gap:.4f} kHz"


def _param_rows(r, units):
    rows = []
    for name, (unit, scale) in units.items():
        rows.append((name, r.params[name] * scale, r.stderr[name] * scale, unit))
    return rows


def _fit_summary(r, units):
    return {
        "params": {k: r.params[k] * s for k, (_, s) in units.items()},
        "stderr": {k: r.stderr[k] * s for k, (_, s) in units.items()},
        "converged": r.converged,
        "singular": r.singular,
        "iterations": r.iterations,
        "residual_norm": r.residual_norm,
        "message": r.message,
        "flags": r.flags,
    }


def _fit_text(rows):
    return "\n".join(f"{n} = {v:.8g} +- {e:.2g} {u}" for n, v, e, u in rows)


def cmd_fit_crossing(a):
    c = read_csv(a.input, ["power_uw", "freq_plus_khz", "freq_minus_khz"])
    r = fit_avoided_crossing(c["power_uw"] * UW, c["freq_plus_khz"] * 1e3, c["freq_minus_khz"] * 1e3)
    units = {"phi": ("mrad", 1 / MRAD), "omega1": ("kHz", 1 / KHZ), "P0": ("uW", 1 / UW)}
    rows = _param_rows(r, units)
    return ["parameter", "value", "stderr", "unit"], rows, _fit_summary(r, units), _fit_text(rows)


def cmd_fit_areas(a):
    c = read_csv(a.input, ["power_uw", "area_plus_khz", "area_minus_khz"])
    r = fit_area_model(c["power_uw"] * UW, c["area_plus_khz"] * 1e3, c["area_minus_khz"] * 1e3,
                       a.t_us * US, a.omega1_khz * KHZ)
    units = {"phi": ("mrad", 1 / MRAD), "P0": ("uW", 1 / UW), "P1": ("uW", 1 / UW)}
    rows = _param_rows(r, units)
    return ["parameter", "value", "stderr", "unit"], rows, _fit_summary(r, units), _fit_text(rows)


def cmd_synth_spectrum(a):
    cfg = _lattice(a)
    drive = RamanDrive(a.omega0_khz * KHZ, a.t_us * US, a.delta_khz * KHZ)
    grid = DetuningGrid(a.start_khz * 1e3, a.stop_khz * 1e3, a.step_khz * 1e3)
    spec = synthesize_spectrum(cfg, drive, _thermal(a, cfg), grid, a.background)
    if a.noise_sigma > 0:
        spec = add_noise(spec, a.noise_sigma, a.seed)
    res = {"clipped": spec.clipped, "points": int(spec.detunings.size), "metadata": spec.metadata}
    return None, spec, res, f"{spec.detunings.size} points, clipped={spec.clipped}"


def cmd_add_noise(a):
    spec = add_noise(_read_spectrum(a.input), a.sigma, a.seed)
    return None, spec, {"clipped": spec.clipped}, f"noise sigma {a.sigma} added, clipped={spec.clipped}"


def cmd_fit_spectrum(a):
    spec = _read_spectrum(a.input)
    window = None if a.window_khz is None else tuple(v * 1e3 for v in a.window_khz)
    centers = None if a.centers_khz is None else [v * 1e3 for v in a.centers_khz]
    fwhm = None if a.fwhm_khz is None else a.fwhm_khz * 1e3
    r = fit_lorentzian_doublet(spec, a.peaks, offset=a.offset, fwhm=fwhm, centers=centers, window=window)
    rows = []
    for j, (c, w, ar) in enumerate(peak_list(r), start=1):
        rows.append((j, c / 1e3, w / 1e3, ar / 1e3, r.stderr[f"center{j}"] / 1e3,
                     r.stderr[f"fwhm{j}"] / 1e3, r.stderr[f"area{j}"] / 1e3))
    header = ["peak", "center_khz", "fwhm_khz", "area_khz", "center_err_khz", "fwhm_err_khz", "area_err_khz"]
    res = {"offset": r.params["offset"], "offset_err": r.stderr["offset"], "converged": r.converged,
           "singular": r.singular, "flags": r.flags, "message": r.message}
    text = "\n".join(f"peak {p[0]}: center {p[1]:.4f} kHz, FWHM {p[2]:.4f} kHz, area {p[3]:.6g} kHz"
                     for p in rows)
    return header, rows, res, text + f"\noffset {r.params['offset']:.6g}"


def cmd_thermometry(a):
    spec = _read_spectrum(a.input)
    omegas = [f * KHZ for f in a.mode_khz]
    rep = thermometry_from_spectrum(spec, omegas, a.half_window_khz * 1e3, a.method, a.offset)
    rows = []
    for i, f in enumerate(a.mode_khz):
        ar = rep.area_red[i] / 1e3 if a.method == "fit" else float("nan")
        rows.append((str(i + 1), f, rep.area_blue[i] / 1e3, ar, rep.nbar[i], rep.temperature[i] / UK))
    rows.append(("combined", float(np.mean(a.mode_khz)), sum(rep.area_blue) / 1e3, sum(rep.area_red) / 1e3,
                 rep.nbar_combined, rep.temperature_combined / UK))
    header = ["mode", "omega_khz", "area_blue_khz", "area_red_khz", "nbar", "temperature_uk"]
    res = {"method": rep.method, "offset": rep.offset, "nbar_combined": rep.nbar_combined,
           "temperature_combined_uk": rep.temperature_combined / UK}
    text = "\n".join(f"mode {r[0]}: nbar = {r[4]:.4f}, T = {r[5]:.3f} uK" for r in rows)
    return header, rows, res, text


def cmd_cool(a):
    cfg = _lattice(a)
    omega0 = cooling_omega0() if a.omega0_khz is None else a.omega0_khz * KHZ
    proto = CoolingProtocol(
        t_raman=a.t_raman_us * US, t_repump=a.t_repump_us * US, cycle_period=a.period_us * US,
        n_cycles=a.cycles, omega0=omega0,
        detuning=None if a.detuning_khz is None else a.detuning_khz * KHZ,
        recoil_heating_prob=a.heating_prob, heating_on=a.heating_on,
        ensemble=a.ensemble, seed=a.seed,
    )
    tr = simulate_cooling(proto, cfg, _thermal(a, cfg), a.scheme)
    rows = zip(tr.cycles, tr.nbar_plus, tr.nbar_minus, tr.ground_fraction)
    res = {"protocol": proto.to_dict(), "detuning_khz": tr.detuning / KHZ,
           "final_nbar_plus": tr.nbar_plus[-1], "final_nbar_minus": tr.nbar_minus[-1],
           "final_ground_fraction": tr.ground_fraction[-1]}
    text = (f"after {a.cycles} cycles: nbar_+ = {tr.nbar_plus[-1]:.4f}, nbar_- = {tr.nbar_minus[-1]:.4f}, "
            f"ground fraction {tr.ground_fraction[-1]:.4f}")
    return ["cycle", "nbar_plus", "nbar_minus", "ground_fraction"], rows, res, text


def cmd_chi_table(a):
    if a.points < 2 or not a.theta_max > a.theta_min >= 0:
        raise CliError("need points >= 2 and 0 <= theta_min < theta_max")
    theta = np.linspace(a.theta_min, a.theta_max, a.points)
    c = chi(theta)
    area = theta**2 * c
    header = ["theta", "chi", "theta2_chi"]
    res = {
        "chi_decreasing": bool(np.all(np.diff(c) < 0)),
        "theta2_chi_increasing": bool(np.all(np.diff(area) > 0)),
    }
    if a.quadrature:
        q = np.array([1.0 if t == 0 else chi_quadrature(t) for t in theta])
        res["max_abs_diff_quadrature"] = float(np.max(np.abs(q - c)))
        header.append("chi_quadrature")
        rows = zip(theta, c, area, q)
    else:
        rows = zip(theta, c, area)
    text = ", ".join(f"{k}={v}" for k, v in res.items())
    return header, rows, res, text


# ---------------------------------------------------------------- parser

def _global_args(p, default):
    # given on the main parser with real defaults and on every subcommand
    # with SUPPRESS, so they may appear before or after the subcommand name
    d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
    p.add_argument("--config", type=Path, default=d(None), help="JSON file of option values")
    p.add_argument("--out-dir", type=Path, default=d(None), help=f"output directory (default ${ENV_OUT} or .)")
    p.add_argument("-o", "--output", type=Path, default=d(None), help="CSV path; the sidecar is <stem>.json")
    p.add_argument("-q", "--quiet", action="store_true", default=d(False))


def build_parser():
    p = _Parser(prog=TOOL, description="Raman sideband spectroscopy, cooling and fits in a 2D lattice.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    _global_args(p, True)
    common = _Parser(add_help=False)
    _global_args(common, False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    def add(name, func, help_):
        s = sub.add_parser(name, help=help_, description=help_, parents=[common])
        s.set_defaults(func=func)
        subs[name] = s
        return s

    s = add("eigen", cmd_eigen, "Normal modes of the lattice.")
    _lattice_args(s)

    s = add("scan-crossing", cmd_scan_crossing, "Mode frequencies and blue-sideband areas versus cavity power.")
    _lattice_args(s)
    s.add_argument("--p0-uw", type=float, default=9.5)
    s.add_argument("--p1-uw", type=float, default=0.9)
    s.add_argument("--t-us", type=float, default=300.0)
    s.add_argument("--power-start-uw", type=float, default=5.0)
    s.add_argument("--power-stop-uw", type=float, default=14.0)
    s.add_argument("--points", type=int, default=19)
    s.add_argument("--freq-noise-khz", type=float, default=0.0)
    s.add_argument("--area-noise-rel", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)

    s = add("fit-crossing", cmd_fit_crossing, "Fit (phi, omega1, P0) to a crossing scan.")
    s.add_argument("--input", type=Path, required=True)

    s = add("fit-areas", cmd_fit_areas, "Fit (phi, P0, P1) to the sideband areas of a crossing scan.")
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--t-us", type=float, default=300.0)
    s.add_argument("--omega1-khz", type=float, default=528.0)

    s = add("synth-spectrum", cmd_synth_spectrum, "Synthetic Raman spectrum of a thermal atom.")
    _lattice_args(s, 530.0, 430.0)
    _thermal_args(s)
    s.add_argument("--omega0-khz", type=float, default=5.0, help="free-space two-photon Rabi frequency /2pi")
    s.add_argument("--t-us", type=float, default=300.0)
    s.add_argument("--delta-khz", type=float, default=0.0, help="offset of the drive detuning")
    s.add_argument("--start-khz", type=float, default=-600.0)
    s.add_argument("--stop-khz", type=float, default=600.0)
    s.add_argument("--step-khz", type=float, default=1.0)
    s.add_argument("--background", type=float, default=0.06)
    s.add_argument("--noise-sigma", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)

    s = add("add-noise", cmd_add_noise, "Add Gaussian noise to a spectrum CSV.")
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)

    s = add("fit-spectrum", cmd_fit_spectrum, "Fit one or two Lorentzians plus offset.")
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--peaks", type=int, default=2, choices=(1, 2))
    s.add_argument("--window-khz", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    s.add_argument("--centers-khz", type=float, nargs="+", default=None)
    s.add_argument("--offset", type=float, default=None, help="hold the offset at this value")
    s.add_argument("--fwhm-khz", type=float, default=None, help="hold every width at this value")

    s = add("thermometry", cmd_thermometry, "Mean occupation and temperature from sideband areas.")
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--mode-khz", type=float, nargs="+", required=True, help="one or two mode frequencies")
    s.add_argument("--half-window-khz", type=float, default=150.0)
    s.add_argument("--method", choices=("fit", "raw"), default="fit")
    s.add_argument("--offset", type=float, default=None)

    s = add("cool", cmd_cool, "Monte Carlo Raman sideband cooling.")
    _lattice_args(s, 530.0, 430.0)
    _thermal_args(s)
    s.add_argument("--scheme", choices=("1D", "2D-halfway"), default="1D")
    s.add_argument("--t-raman-us", type=float, default=5.5)
    s.add_argument("--t-repump-us", type=float, default=9.5)
    s.add_argument("--period-us", type=float, default=15.0)
    s.add_argument("--cycles", type=int, default=21)
    s.add_argument("--omega0-khz", type=float, default=None,
                   help="cooling Rabi frequency /2pi (default: spectroscopy value scaled to cooling power)")
    s.add_argument("--detuning-khz", type=float, default=None)
    s.add_argument("--heating-prob", type=float, default=None,
                   help="per-repump probability of n -> n+-1 (default 2 eta^2 per mode)")
    s.add_argument("--heating-on", choices=("transfer", "every"), default="transfer")
    s.add_argument("--ensemble", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)

    s = add("chi-table", cmd_chi_table, "Tabulate the saturation kernel chi(theta).")
    s.add_argument("--theta-min", type=float, default=0.0)
    s.add_argument("--theta-max", type=float, default=10.0)
    s.add_argument("--points", type=int, default=101)
    s.add_argument("--quadrature", action="store_true", help="add the quadrature oracle column")

    return p, subs


_GLOBAL = ("config", "out_dir", "output", "quiet", "func", "command")


def parse(argv):
    parser, subs = build_parser()
    # required options may come from the config file, so check them afterwards
    required = {}
    for name, sp in subs.items():
        required[name] = [a for a in sp._actions if a.required]
        for a in required[name]:
            a.required = False
    ns = parser.parse_args(argv)
    sp = subs[ns.command]
    if ns.config is not None:
        values = _load_config(ns.config, sp, ns.command)
        sp.set_defaults(**values)
        ns = parser.parse_args(argv)
        # values from JSON bypass argparse type conversion
        if isinstance(getattr(ns, "input", None), str):
            ns.input = Path(ns.input)
    missing = [a.option_strings[-1] for a in required[ns.command] if getattr(ns, a.dest, None) is None]
    if missing:
        raise CliError(f"the following arguments are required: {', '.join(missing)}")
    return ns


def _load_config(path, sp, command):
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise CliError(f"config file {path}: {e}") from None
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    known = {a.dest for a in sp._actions} - {"help"} - set(_GLOBAL)
    values = {}
    for k, v in cfg.items():
        key = k.replace("-", "_")
        if key not in known:
            raise CliError(f"config key {k!r} is not an option of {command}")
        values[key] = v
    return values


def resolved_config(ns):
    return {k: v for k, v in sorted(vars(ns).items()) if k not in _GLOBAL}


def output_path(ns):
    if ns.output is not None:
        return Path(ns.output)
    base = ns.out_dir if ns.out_dir is not None else Path(os.environ.get(ENV_OUT, "."))
    return Path(base) / f"{ns.command}.csv"


def _provenance(exc):
    mod = None
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith("raman_lattice"):
            mod = name
    return mod


def run(argv=None):
    """Execute one subcommand; returns the exit status."""
    command = None
    try:
        ns = parse(argv)
        command = ns.command
        header, body, results, text = ns.func(ns)
        path = output_path(ns)
        if isinstance(body, Spectrum):
            _spectrum_csv(path, body)
        else:
            write_csv(path, header, body)
        write_sidecar(path.with_suffix(".json"), ns.command, resolved_config(ns),
                      getattr(ns, "seed", None), results)
        if not ns.quiet:
            print(text)
            print(f"wrote {path}")
        return 0
    except CliError as e:
        status, exc = 2, e
    except Exception as e:  # noqa: BLE001 -- reported as a machine-readable record
        status, exc = 1, e
    record = {"error": {"type": type(exc).__name__, "message": str(exc),
                        "module": _provenance(exc), "subcommand": command}}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
