"""RMSE-versus-time-advance sequences and profile fitting.

Relative forecast errors ``(P_f - P_a) / P_a`` are reported in percent.
Samples whose actual power does not exceed ``actual_power_floor`` cannot be
normalized and are excluded (counted, never fatal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import NumericalError, ValidationError
from .profile import ExpDecayProfile, eval_alpha

AMPLITUDE_MODES = {"max": "max", "at_24h": "at_24h", "at24": "at_24h"}
FIT_MODES = {"paper": "paper", "least_squares": "least_squares", "lsq": "least_squares"}
DAY_AHEAD_H = 24.0
# time advances closer than this are the same bin
ADVANCE_DECIMALS = 9
COVERAGE_TOL = 1e-9


@dataclass(frozen=True)
class ForecastSample:
    time_advance: float
    forecast_power: float
    actual_power: float
    source_id: str = ""
    sample_id: object = None

    def __post_init__(self):
        if not (math.isfinite(self.time_advance) and self.time_advance >= 0):
            raise ValidationError(f"bad time advance {self.time_advance!r}")
        for name in ("forecast_power", "actual_power"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"bad {name} {v!r}")


@dataclass(frozen=True)
class FitOptions:
    amplitude_mode: str = "max"
    actual_power_floor: float = 0.0
    fit_mode: str = "paper"

    def __post_init__(self):
        try:
            object.__setattr__(self, "amplitude_mode", AMPLITUDE_MODES[self.amplitude_mode])
        except KeyError:
            raise ValidationError(f"unknown amplitude_mode {self.amplitude_mode!r}") from None
        try:
            object.__setattr__(self, "fit_mode", FIT_MODES[self.fit_mode])
        except KeyError:
            raise ValidationError(f"unknown fit_mode {self.fit_mode!r}") from None
        if not (math.isfinite(self.actual_power_floor) and self.actual_power_floor >= 0):
            raise ValidationError("actual_power_floor must be >= 0")


@dataclass(frozen=True)
class RmseSequence:
    """Ordered ``(t, rmse)`` points, starting at the pinned origin ``(0, 0)``."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    counts: tuple[int, ...] = ()
    excluded: int = 0

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(x) for x in self.times))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.times) != len(self.values) or not self.times:
            raise ValidationError("times and values must be nonempty and equally long")
        if self.times[0] != 0.0 or self.values[0] != 0.0:
            raise ValidationError("sequence must start at (0, 0)")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValidationError("time advances must be strictly increasing")
        if any(not (v >= 0) for v in self.values):
            raise ValidationError("rmse values must be non-negative")

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "RmseSequence":
        """Build from ``(t, rmse)`` pairs; ``(0, 0)`` is prepended if absent."""
        pts = sorted((float(t), float(v)) for t, v in points)
        if not pts or pts[0][0] != 0.0:
            pts.insert(0, (0.0, 0.0))
        t, v = zip(*pts)
        return cls(t, v)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.times, self.values))

    def __len__(self):
        return len(self.times)


@dataclass
class SampleTable:
    """Column-oriented samples, for bulk RMSE work without per-row objects."""

    time_advance: np.ndarray
    forecast_power: np.ndarray
    actual_power: np.ndarray
    source_id: list = field(default_factory=list)

    @classmethod
    def from_samples(cls, samples: Sequence[ForecastSample]) -> "SampleTable":
        return cls(
            np.array([s.time_advance for s in samples], dtype=float),
            np.array([s.forecast_power for s in samples], dtype=float),
            np.array([s.actual_power for s in samples], dtype=float),
            [s.source_id for s in samples],
        )

    def select(self, mask) -> "SampleTable":
        ids = [s for s, keep in zip(self.source_id, mask) if keep] if self.source_id else []
        return SampleTable(self.time_advance[mask], self.forecast_power[mask],
                           self.actual_power[mask], ids)

    def __len__(self):
        return len(self.time_advance)


def relative_error(s: ForecastSample, floor: float = 0.0):
    """Signed relative error in percent, or ``None`` if the sample is excluded."""
    if s.actual_power <= floor:
        return None
    return 100.0 * (s.forecast_power - s.actual_power) / s.actual_power


def _fmt_t(t: float) -> str:
    return f"{t:g}"


def rmse_sequence(samples, advances: Sequence[float] | None = None,
                  floor: float = 0.0) -> RmseSequence:
    """Root mean square relative error (percent) per time advance.

    ``samples`` is a list of ``ForecastSample`` or a ``SampleTable``.
    Without ``advances`` every distinct nonzero advance in the data is used.
    Per-bin sums are exactly rounded, so the result does not depend on
    sample order.
    """
    table = samples if isinstance(samples, SampleTable) else SampleTable.from_samples(list(samples))
    keep = table.actual_power > floor
    excluded = int(np.count_nonzero(~keep))
    t = np.round(table.time_advance[keep], ADVANCE_DECIMALS)
    err = 100.0 * (table.forecast_power[keep] - table.actual_power[keep]) / table.actual_power[keep]

    if advances is None:
        wanted = np.unique(t)
    else:
        wanted = np.unique(np.round(np.asarray(advances, dtype=float), ADVANCE_DECIMALS))
        if np.any(wanted < 0):
            raise ValidationError("requested time advances must be non-negative")
    wanted = wanted[wanted > 0]

    order = np.argsort(t, kind="stable")
    t_sorted, sq_sorted = t[order], (err * err)[order]
    left = np.searchsorted(t_sorted, wanted, side="left")
    right = np.searchsorted(t_sorted, wanted, side="right")

    times, values, counts = [0.0], [0.0], [0]
    for ti, lo, hi in zip(wanted, left, right):
        n = int(hi - lo)
        if n == 0:
            raise ValidationError(f"empty bin t={_fmt_t(ti)}")
        times.append(float(ti))
        values.append(math.sqrt(math.fsum(sq_sorted[lo:hi]) / n))
        counts.append(n)
    return RmseSequence(tuple(times), tuple(values), tuple(counts), excluded)


def _paper_fit(seq: RmseSequence, amplitude_mode: str) -> ExpDecayProfile:
    t = np.asarray(seq.times)
    v = np.asarray(seq.values)
    if amplitude_mode == "at_24h":
        hit = np.flatnonzero(np.isclose(t, DAY_AHEAD_H, rtol=0, atol=10.0 ** -ADVANCE_DECIMALS))
        if hit.size == 0:
            raise ValidationError("amplitude mode at_24h needs a point at t=24")
        amplitude = float(v[hit[0]])
    else:
        amplitude = float(v.max())
    slope = float(np.max(np.diff(v) / np.diff(t)))
    if not slope > 0:
        raise NumericalError("sequence not increasing anywhere")
    if not amplitude > 0:
        raise NumericalError("sequence amplitude is zero")
    return ExpDecayProfile(amplitude, amplitude / slope)


def _lsq_fit(seq: RmseSequence, start: ExpDecayProfile) -> ExpDecayProfile:
    t = np.asarray(seq.times[1:])
    v = np.asarray(seq.values[1:])
    a_hi = 2.0 * float(v.max())
    tau_hi = 10.0 * float(t.max())
    lo = (1e-12 * a_hi, 1e-12 * tau_hi)
    x0 = np.clip([start.amplitude, start.time_coefficient], lo, (a_hi, tau_hi))

    def resid(x):
        return x[0] * -np.expm1(-t / x[1]) - v

    sol = least_squares(resid, x0, bounds=(lo, (a_hi, tau_hi)),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, x_scale="jac")
    if not sol.success:
        raise NumericalError(f"least-squares fit failed: {sol.message}")
    return ExpDecayProfile(float(sol.x[0]), float(sol.x[1]))


def fit_profile(seq: RmseSequence, opts: FitOptions | None = None) -> ExpDecayProfile:
    """Fit ``(A, tau)`` to an RMSE sequence.

    ``paper`` mode takes ``A`` as the largest RMSE (or the 24 h value) and
    ``tau = A / s`` with ``s`` the steepest forward-difference slope. On
    concave data the secant underestimates the initial slope, so ``tau`` is
    biased high by about half a grid step and the curve can sit below the
    points; ``coverage_check`` reports those. ``least_squares`` mode minimizes the squared residuals over all points
    after the origin.
    """
    opts = opts or FitOptions()
    if len(seq) < 3:
        raise ValidationError("sequence needs >= 2 advances")
    start = _paper_fit(seq, opts.amplitude_mode)
    if opts.fit_mode == "paper":
        return start
    return _lsq_fit(seq, start)


def coverage_check(seq: RmseSequence, p: ExpDecayProfile) -> list[tuple[float, float, float]]:
    """Points lying above the fitted curve, as ``(t, rmse, alpha(t))``."""
    fitted = eval_alpha(p, np.asarray(seq.times))
    return [(t, v, float(a)) for t, v, a in zip(seq.times, seq.values, fitted)
            if v > a + COVERAGE_TOL]


@dataclass(frozen=True)
class FitResult:
    profile: ExpDecayProfile
    sequence: RmseSequence
    options: FitOptions
    violations: list

    @property
    def excluded(self) -> int:
        return self.sequence.excluded


def fit_samples(samples, opts: FitOptions | None = None,
                advances: Sequence[float] | None = None) -> FitResult:
    """RMSE sequence, fitted profile and coverage diagnostics in one go."""
    opts = opts or FitOptions()
    seq = rmse_sequence(samples, advances, floor=opts.actual_power_floor)
    profile = fit_profile(seq, opts)
    return FitResult(profile, seq, opts, coverage_check(seq, profile))
