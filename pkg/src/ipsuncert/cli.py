"""Command-line front end.

Exit codes: 0 success, 1 validation or parse error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import NumericalError, ValidationError
from .fitting import FitOptions, FitResult, fit_samples
from .fleet import compose_all_sources, compose_ips, ips_contour
from .mixture import contour_tau0, equivalent_tau, max_deviation
from .synth import DEFAULT_ADVANCES, SynthSpec, generate
from .profile import ExpDecayProfile

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def fmt(x: float) -> str:
    """Fixed notation, 6 significant digits, locale independent."""
    return np.format_float_positional(float(x), precision=6, unique=False,
                                      fractional=False, trim="-")


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


# -- commands (importable; return data, print a summary) ---------------------

def cmd_fit(samples_path, opts: FitOptions | None = None, source: str | None = None,
            quiet: bool = False) -> dict[str, FitResult]:
    """Fit one profile per source id found in the sample file."""
    opts = opts or FitOptions()
    table = io.read_sample_table(samples_path)
    if len(table) == 0:
        raise ValidationError("sample file has no data rows")
    ids = np.asarray(table.source_id)
    names = [source] if source is not None else sorted(set(table.source_id))
    results = {}
    for name in names:
        sub = table.select(ids == name)
        if len(sub) == 0:
            raise ValidationError(f"no samples for source {name!r}")
        results[name] = fit_samples(sub, opts)
    if not quiet:
        for name, r in results.items():
            p = r.profile
            _out(f"source {name}: A = {fmt(p.amplitude)} percent, tau = "
                 f"{fmt(p.time_coefficient)} hours ({r.options.fit_mode} fit)")
            _out(f"  advances: {len(r.sequence) - 1}, excluded samples: {r.excluded}")
            if r.violations:
                _out(f"  coverage: {len(r.violations)} point(s) above the curve")
                for t, v, a in r.violations:
                    _out(f"    t = {fmt(t)} h: rmse {fmt(v)} > alpha {fmt(a)}")
            else:
                _out("  coverage: all points on or below the curve")
    return results


def cmd_compose(config_path, out_dir=None, t_grid=None, quiet: bool = False) -> dict:
    """Full report for a fleet config; with ``out_dir`` also writes report.json and curves.csv."""
    cfg = io.read_fleet_config(config_path)
    curves_name = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        t = io.default_t_grid() if t_grid is None else t_grid
        io.write_curve_table(out_dir / "curves.csv", t, io.fleet_curves(cfg.spec, t))
        curves_name = "curves.csv"
    report = io.build_report(cfg, curves_name)
    if out_dir is not None:
        io.write_report(out_dir / "report.json", report)
    if not quiet:
        _print_report(report)
    return report


def _print_report(rep: dict) -> None:
    v = lambda q: fmt(q["value"])
    for name, entry in rep["fitted_profiles"].items():
        if entry:
            _out(f"{name}: A = {v(entry['amplitude'])} percent, tau = "
                 f"{v(entry['time_coefficient'])} hours ({entry['fit_mode']})")
    ips = rep["ips"]
    dev = ips["max_deviation"]
    _out(f"IPS: A_ips = {v(ips['amplitude'])} percent, gamma = {v(ips['gamma'])}, "
         f"tau0 = {v(ips['tau0'])} hours")
    _out(f"  max deviation: t* = {v(dev['t_star'])} hours, "
         f"delta_alpha* = {v(dev['delta_alpha_star'])} percent")
    g = rep["all_sources"]
    _out(f"all sources: beta_ips = {v(g['beta_ips'])}, A_g = {v(g['amplitude'])} percent, "
         f"tau0 = {v(g['contour_time_coefficient'])} hours")
    if "note" in g:
        _out(f"  {g['note']}")
    if rep["curves"]["table"]:
        _out(f"curves: {rep['curves']['table']}")


def cmd_equiv_tau(config_path, t_grid=None, out=None, quiet: bool = False):
    """Table of ``(t, tau(t))`` for the IPS sum profile."""
    cfg = io.read_fleet_config(config_path)
    m, _ = compose_ips(cfg.spec)
    t = io.check_t_grid(io.default_t_grid() if t_grid is None else t_grid)
    tau = equivalent_tau(m, t)
    if out is not None:
        io.write_curve_table(out, t, {"tau_equiv": tau})
    elif not quiet:
        _out("t_h,tau_equiv_h")
        for ti, x in zip(t, tau):
            _out(f"{fmt(ti)},{fmt(x)}")
    return t, tau


def cmd_contour(config_path, quiet: bool = False) -> dict:
    cfg = io.read_fleet_config(config_path)
    m, gamma = compose_ips(cfg.spec)
    g = compose_all_sources(m, cfg.spec.beta_ips)
    ips = ips_contour(m)
    result = {"ips": ips, "gamma": gamma, "all_sources_amplitude": g.total_amplitude,
              "tau0": contour_tau0(g)}
    if not quiet:
        _out(f"IPS contour: {fmt(ips.amplitude)} * (1 - exp(-t / {fmt(ips.time_coefficient)})) percent")
        _out(f"all-sources contour: {fmt(g.total_amplitude)} * (1 - exp(-t / "
             f"{fmt(contour_tau0(g))})) percent")
    return result


def cmd_maxdev(config_path, quiet: bool = False):
    cfg = io.read_fleet_config(config_path)
    m, _ = compose_ips(cfg.spec)
    dev = max_deviation(m)
    if not quiet:
        if dev.degenerate:
            _out("single time coefficient: contour equals sum, deviation 0")
        _out(f"t* = {fmt(dev.t_star)} hours")
        _out(f"delta_lambda* = {fmt(dev.delta_lambda_star)}")
        _out(f"delta_alpha* = {fmt(dev.delta_alpha_star)} percent")
    return dev


def cmd_curves(config_path, out, t_grid=None) -> None:
    cfg = io.read_fleet_config(config_path)
    t = io.default_t_grid() if t_grid is None else t_grid
    io.write_curve_table(out, t, io.fleet_curves(cfg.spec, t))


def cmd_synth(spec: SynthSpec, out_path) -> None:
    io.write_samples(out_path, generate(spec))


def cmd_report(config_path, out, t_grid=None) -> dict:
    """Write the JSON report to ``out`` and the curve table beside it."""
    out = Path(out)
    cfg = io.read_fleet_config(config_path)
    curves = out.with_name(out.stem + "_curves.csv")
    t = io.default_t_grid() if t_grid is None else t_grid
    io.write_curve_table(curves, t, io.fleet_curves(cfg.spec, t))
    report = io.build_report(cfg, curves.name)
    io.write_report(out, report)
    return report


# -- argument parsing ------------------------------------------------------

def _advances(text: str) -> tuple[float, ...]:
    """``"1,2,6"`` or ``"1-24"`` (hourly inclusive range)."""
    try:
        if "-" in text and "," not in text:
            lo, hi = (int(x) for x in text.split("-"))
            return tuple(float(h) for h in range(lo, hi + 1))
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad advance list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ipsuncert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def grid(sp):
        sp.add_argument("--t-max", type=float, default=io.DEFAULT_T_MAX, help="hours")
        sp.add_argument("--t-step", type=float, default=io.DEFAULT_T_STEP, help="hours")

    def config(sp):
        sp.add_argument("--config", required=True, help="fleet config (YAML)")

    sp = sub.add_parser("fit", help="fit profiles from a sample CSV")
    sp.add_argument("--samples", required=True)
    sp.add_argument("--source", help="only this source id")
    sp.add_argument("--fit-mode", choices=["paper", "lsq"], default="paper")
    sp.add_argument("--amplitude", choices=["max", "at24"], default="max")
    sp.add_argument("--floor", type=float, default=0.0, help="actual-power floor, MW")

    sp = sub.add_parser("compose", help="IPS and all-sources report")
    config(sp)
    sp.add_argument("--out", help="directory for report.json and curves.csv")
    grid(sp)

    sp = sub.add_parser("equiv-tau", help="equivalent time coefficient over t")
    config(sp)
    sp.add_argument("--out", help="CSV path (default: print)")
    grid(sp)

    sp = sub.add_parser("contour", help="contour profiles")
    config(sp)

    sp = sub.add_parser("maxdev", help="maximum contour-sum deviation")
    config(sp)

    sp = sub.add_parser("curves", help="write the curve table")
    config(sp)
    sp.add_argument("--out", required=True)
    grid(sp)

    sp = sub.add_parser("synth", help="generate synthetic samples")
    sp.add_argument("--amp", type=float, required=True, help="true amplitude, percent")
    sp.add_argument("--tau", type=float, required=True, help="true time coefficient, hours")
    sp.add_argument("--m", type=int, default=1000, help="samples per advance")
    sp.add_argument("--advances", type=_advances, default=DEFAULT_ADVANCES)
    sp.add_argument("--base-mw", type=float, default=100.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--source-id", default="synth")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("report", help="write JSON report and curve table")
    config(sp)
    sp.add_argument("--out", required=True)
    grid(sp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        t_grid = io.default_t_grid(args.t_max, args.t_step) if hasattr(args, "t_max") else None
        if args.command == "fit":
            opts = FitOptions(amplitude_mode=args.amplitude, actual_power_floor=args.floor,
                              fit_mode=args.fit_mode)
            cmd_fit(args.samples, opts, args.source)
        elif args.command == "compose":
            cmd_compose(args.config, args.out, t_grid)
        elif args.command == "equiv-tau":
            cmd_equiv_tau(args.config, t_grid, args.out)
        elif args.command == "contour":
            cmd_contour(args.config)
        elif args.command == "maxdev":
            cmd_maxdev(args.config)
        elif args.command == "curves":
            cmd_curves(args.config, args.out, t_grid)
        elif args.command == "synth":
            spec = SynthSpec(ExpDecayProfile(args.amp, args.tau), args.m, args.advances,
                             args.base_mw, args.seed, args.source_id)
            cmd_synth(spec, args.out)
        elif args.command == "report":
            cmd_report(args.config, args.out, t_grid)
    except (ValidationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
