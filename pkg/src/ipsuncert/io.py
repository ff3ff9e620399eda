"""On-disk formats: sample CSV, fleet config (YAML), curve table CSV, JSON report.

All text is UTF-8 with LF line endings and '.' as decimal separator.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import yaml

from .errors import ValidationError
from .fitting import FitOptions, FitResult, ForecastSample, SampleTable, fit_samples
from .fleet import FleetSpec, compose_all_sources, compose_ips, ips_coefficients
from .mixture import (
    MixtureProfile,
    contour_tau0,
    equivalent_tau,
    eval_contour,
    eval_sum,
    max_deviation,
)
from .profile import ExpDecayProfile, eval_alpha

SAMPLE_COLUMNS = ["source_id", "time_advance_h", "forecast_mw", "actual_mw"]
OPTIONAL_COLUMNS = ["timestamp"]
CURVE_COLUMNS = ["alpha_w", "alpha_s", "alpha_ips_sum", "alpha_ips_contour",
                 "alpha_g_contour", "tau_equiv"]
DEFAULT_T_MAX = 24.0
DEFAULT_T_STEP = 0.05


class SampleParseError(ValidationError):
    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        shown = "; ".join(f"row {n}: {msg}" for n, msg in problems[:10])
        more = f" (+{len(problems) - 10} more)" if len(problems) > 10 else ""
        super().__init__(shown + more)


# -- samples ---------------------------------------------------------------

def _to_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def _read_sample_columns(path):
    """Row numbers, source ids and the three numeric columns of a sample CSV.

    Every malformed row is collected into one ``SampleParseError``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != SAMPLE_COLUMNS or \
                header[4:] not in ([], OPTIONAL_COLUMNS):
            raise SampleParseError([(1, "missing or malformed header, expected "
                                     + ",".join(SAMPLE_COLUMNS) + "[,timestamp]")])
        ncol = len(header)
        problems, nums, ids, fields = [], [], [], []
        for n, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) not in (4, ncol):
                problems.append((n, f"expected {ncol} fields, got {len(row)}"))
                continue
            nums.append(n)
            ids.append(row[0])
            fields.append(row[1:4])

    if not fields:
        if problems:
            raise SampleParseError(problems)
        empty = np.empty(0)
        return np.empty(0, dtype=int), [], empty, empty, empty
    try:
        values = np.array(fields, dtype=float)
    except ValueError:
        values = np.array([[_to_float(x) for x in f] for f in fields], dtype=object)
        bad = np.array([any(x is None for x in row) for row in values])
        values = np.where(values == None, np.nan, values).astype(float)  # noqa: E711
        problems += [(nums[i], "non-numeric field") for i in np.flatnonzero(bad)]
        values[bad] = 0.0
    rownums = np.asarray(nums)
    checks = (
        (~np.isfinite(values).all(axis=1), "non-finite field"),
        (values[:, 0] < 0, "negative time advance"),
        ((values[:, 1] < 0) | (values[:, 2] < 0), "negative power"),
    )
    flagged = np.zeros(len(values), dtype=bool)
    for mask, msg in checks:
        mask = mask & ~flagged
        problems += [(int(rownums[i]), msg) for i in np.flatnonzero(mask)]
        flagged |= mask
    if problems:
        raise SampleParseError(sorted(problems))
    return rownums, ids, values[:, 0].copy(), values[:, 1].copy(), values[:, 2].copy()


def parse_samples(path) -> list[ForecastSample]:
    """One ``ForecastSample`` per data row, in file order."""
    rows, ids, t, pf, pa = _read_sample_columns(path)
    return [ForecastSample(*vals, source_id=sid, sample_id=int(n))
            for n, sid, *vals in zip(rows, ids, t.tolist(), pf.tolist(), pa.tolist())]


def read_sample_table(path) -> SampleTable:
    """Same validation as ``parse_samples`` but returns columns."""
    _, ids, t, pf, pa = _read_sample_columns(path)
    return SampleTable(t, pf, pa, ids)


def write_samples(path, table: SampleTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_COLUMNS)
        ids = table.source_id or [""] * len(table)
        for sid, t, pf, pa in zip(ids, table.time_advance.tolist(),
                                  table.forecast_power.tolist(), table.actual_power.tolist()):
            w.writerow((sid, repr(t), repr(pf), repr(pa)))


# -- fleet config ----------------------------------------------------------

@dataclass
class FleetConfig:
    spec: FleetSpec
    options: FitOptions
    raw: dict
    fits: dict[str, FitResult] = field(default_factory=dict)
    source: str | None = None


def _number(section: Mapping, key: str, where: str) -> float:
    if key not in section:
        raise ValidationError(f"missing required key {where}.{key}")
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def _profile_from(section, where: str, opts: FitOptions, base: Path):
    """Returns ``(profile, fit_result_or_None)``."""
    if not isinstance(section, Mapping):
        raise ValidationError(f"{where} must be a mapping")
    if "samples" in section:
        fit = fit_samples(read_sample_table(base / section["samples"]), opts)
        return fit.profile, fit
    amp = _number(section, "amplitude", where)
    tau = _number(section, "time_coefficient", where)
    if amp <= 0:
        raise ValidationError(f"{where}.amplitude must be > 0")
    if tau <= 0:
        raise ValidationError(f"{where}.time_coefficient must be > 0")
    return ExpDecayProfile(amp, tau), None


def load_fleet_config(data: Mapping, base_dir=".") -> FleetConfig:
    """Validate a config mapping with sections wind, solar, fleet and (optional) fit.

    A wind/solar section holds either ``amplitude`` and ``time_coefficient``
    or ``samples`` (a sample CSV path, relative to ``base_dir``) to fit from.
    """
    if not isinstance(data, Mapping):
        raise ValidationError("config must be a mapping")
    base = Path(base_dir)
    fit_sec = data.get("fit") or {}
    try:
        opts = FitOptions(
            amplitude_mode=fit_sec.get("amplitude_mode", "max"),
            actual_power_floor=float(fit_sec.get("actual_power_floor", 0.0)),
            fit_mode=fit_sec.get("fit_mode", "paper"),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"fit: {exc}") from None
    if "fleet" not in data:
        raise ValidationError("missing required section fleet")
    fleet = data["fleet"]
    beta_w = _number(fleet, "beta_w", "fleet")
    beta_ips = _number(fleet, "beta_ips", "fleet")
    for key, v in (("beta_w", beta_w), ("beta_ips", beta_ips)):
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"fleet.{key} must lie in [0, 1], got {v!r}")

    fits, profiles = {}, {}
    for name, needed in (("wind", beta_w > 0), ("solar", beta_w < 1)):
        if name in data and data[name] is not None:
            profiles[name], fit = _profile_from(data[name], name, opts, base)
            if fit is not None:
                fits[name] = fit
        elif needed:
            raise ValidationError(f"missing required section {name}")
        else:
            profiles[name] = None
    spec = FleetSpec(profiles["wind"], profiles["solar"], beta_w, beta_ips)
    return FleetConfig(spec, opts, dict(data), fits)


def read_fleet_config(path) -> FleetConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    cfg = load_fleet_config(data, path.parent)
    cfg.source = str(path)
    return cfg


def parse_fleet_config(path) -> tuple[FleetSpec, FitOptions]:
    cfg = read_fleet_config(path)
    return cfg.spec, cfg.options


def _g12(x: float) -> float:
    return float(f"{x:.12g}")


def fleet_config_dict(spec: FleetSpec, opts: FitOptions | None = None) -> dict:
    opts = opts or FitOptions()
    out = {}
    for name, p in (("wind", spec.wind_profile), ("solar", spec.solar_profile)):
        if p is not None:
            out[name] = {"amplitude": _g12(p.amplitude),
                         "time_coefficient": _g12(p.time_coefficient)}
    out["fleet"] = {"beta_w": _g12(spec.beta_w), "beta_ips": _g12(spec.beta_ips)}
    out["fit"] = {"amplitude_mode": opts.amplitude_mode, "fit_mode": opts.fit_mode,
                  "actual_power_floor": _g12(opts.actual_power_floor)}
    return out


def write_fleet_config(path, spec: FleetSpec, opts: FitOptions | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(fleet_config_dict(spec, opts), fh, sort_keys=False)


# -- curve table -----------------------------------------------------------

def default_t_grid(t_max: float = DEFAULT_T_MAX, t_step: float = DEFAULT_T_STEP) -> np.ndarray:
    if not (t_step > 0 and t_max >= 0):
        raise ValidationError("t_step must be > 0 and t_max >= 0")
    n = int(math.floor(t_max / t_step + 1e-9))
    return np.arange(n + 1) * t_step


def check_t_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("t_grid must be a nonempty 1-d sequence")
    if np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValidationError("t_grid must be non-negative and increasing")
    return t


def fleet_curves(spec: FleetSpec, t_grid) -> dict[str, np.ndarray]:
    """Standard curve columns for a fleet scenario."""
    t = check_t_grid(t_grid)
    ips, _ = compose_ips(spec)
    g = compose_all_sources(ips, spec.beta_ips)
    zeros = np.zeros_like(t)
    return {
        "alpha_w": eval_alpha(spec.wind_profile, t) if spec.wind_profile else zeros,
        "alpha_s": eval_alpha(spec.solar_profile, t) if spec.solar_profile else zeros,
        "alpha_ips_sum": eval_sum(ips, t),
        "alpha_ips_contour": eval_contour(ips, t),
        "alpha_g_contour": eval_contour(g, t),
        "tau_equiv": equivalent_tau(ips, t),
    }


def mixture_curves(m: MixtureProfile, t_grid) -> dict[str, np.ndarray]:
    t = check_t_grid(t_grid)
    return {"alpha_sum": eval_sum(m, t), "alpha_contour": eval_contour(m, t),
            "tau_equiv": equivalent_tau(m, t)}


def write_curve_table(path_or_file, t_grid, curves: Mapping[str, Sequence[float]]) -> None:
    """CSV with ``t_h`` then one column per curve, at full float precision."""
    t = check_t_grid(t_grid)
    cols = {k: np.asarray(v, dtype=float) for k, v in curves.items()}
    for k, v in cols.items():
        if v.shape != t.shape:
            raise ValidationError(f"curve {k} has {v.size} values for {t.size} grid points")

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_h", *cols])
        for i, ti in enumerate(t.tolist()):
            w.writerow([repr(ti), *(repr(float(v[i])) for v in cols.values())])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


def read_curve_table(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


# -- report ----------------------------------------------------------------

def _q(value: float, unit: str) -> dict:
    return {"value": float(value), "unit": unit}


def _profile_entry(profile: ExpDecayProfile | None, fit: FitResult | None) -> dict | None:
    if profile is None:
        return None
    entry = {
        "amplitude": _q(profile.amplitude, "percent"),
        "time_coefficient": _q(profile.time_coefficient, "hours"),
        "fit_mode": fit.options.fit_mode if fit else "given",
        "excluded_samples": fit.excluded if fit else 0,
        "coverage_violations": [
            {"t": _q(t, "hours"), "rmse": _q(v, "percent"), "alpha": _q(a, "percent")}
            for t, v, a in (fit.violations if fit else [])
        ],
    }
    if fit:
        entry["amplitude_mode"] = fit.options.amplitude_mode
    return entry


def build_report(cfg: FleetConfig, curves_file: str | None = None) -> dict:
    spec = cfg.spec
    ips, gamma = compose_ips(spec)
    tau0 = contour_tau0(ips)
    dev = max_deviation(ips)
    g = compose_all_sources(ips, spec.beta_ips)
    wind_coef, solar_coef = ips_coefficients(spec)
    all_sources = {
        "beta_ips": _q(spec.beta_ips, "dimensionless"),
        "amplitude": _q(g.total_amplitude, "percent"),
        "contour_time_coefficient": _q(contour_tau0(g), "hours"),
    }
    if g.is_zero:
        all_sources["note"] = "no intermittent generation: zero forecast uncertainty"
    return {
        "inputs": cfg.raw,
        "fitted_profiles": {
            "wind": _profile_entry(spec.wind_profile, cfg.fits.get("wind")),
            "solar": _profile_entry(spec.solar_profile, cfg.fits.get("solar")),
        },
        "ips": {
            "beta_w": _q(spec.beta_w, "dimensionless"),
            "wind_coefficient": _q(wind_coef, "percent"),
            "solar_coefficient": _q(solar_coef, "percent"),
            "amplitude": _q(ips.total_amplitude, "percent"),
            "gamma": _q(gamma, "dimensionless"),
            "tau0": _q(tau0, "hours"),
            "max_deviation": {
                "t_star": _q(dev.t_star, "hours"),
                "delta_lambda_star": _q(dev.delta_lambda_star, "dimensionless"),
                "delta_alpha_star": _q(dev.delta_alpha_star, "percent"),
                "degenerate": dev.degenerate,
            },
        },
        "all_sources": all_sources,
        "curves": {"table": curves_file},
    }


def write_report(path, report: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")
