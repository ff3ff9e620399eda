"""Weighted sums of exponential profiles and their contour upper bound.

A mixture is ``A * sum_i w_i * (1 - exp(-t / tau_i))`` with weights summing
to one. Two single-exponential views of it are provided: the equivalent
profile, whose time coefficient varies with ``t`` so that it matches the sum
exactly, and the contour profile, whose fixed time coefficient is the
weighted harmonic mean of the ``tau_i`` and which lies on or above the sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from .errors import ValidationError
from .profile import ExpDecayProfile, as_time, unwrap

WEIGHT_SUM_TOL = 1e-12
# below this fraction of tau0 the log in equivalent_tau loses all digits
SMALL_T_FRACTION = 1e-9


@dataclass(frozen=True)
class MixtureProfile:
    """Normalized weights, time coefficients (hours) and total amplitude (percent).

    ``total_amplitude == 0`` is accepted and denotes a source-free system
    (no intermittent generation, hence no forecast uncertainty); the weights
    and time coefficients then only carry the normalized shape.
    """

    weights: tuple[float, ...]
    taus: tuple[float, ...]
    total_amplitude: float

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "taus", tuple(float(x) for x in self.taus))
        if not self.weights:
            raise ValidationError("mixture needs at least one component")
        if len(self.weights) != len(self.taus):
            raise ValidationError("weights and taus differ in length")
        if any(not (math.isfinite(w) and w > 0) for w in self.weights):
            raise ValidationError("mixture weights must be positive")
        if any(not (math.isfinite(x) and x > 0) for x in self.taus):
            raise ValidationError("mixture time coefficients must be positive")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError("mixture weights must sum to 1")
        if not (math.isfinite(self.total_amplitude) and self.total_amplitude >= 0):
            raise ValidationError("total amplitude must be non-negative")

    @property
    def is_zero(self) -> bool:
        return self.total_amplitude == 0.0

    @property
    def components(self) -> list[tuple[float, float]]:
        return list(zip(self.weights, self.taus))

    def scaled(self, factor: float) -> "MixtureProfile":
        return MixtureProfile(self.weights, self.taus, self.total_amplitude * factor)


@dataclass(frozen=True)
class DeviationReport:
    t_star: float
    delta_lambda_star: float
    delta_alpha_star: float
    degenerate: bool = False


def mixture_from_profiles(entries: Iterable[tuple[float, ExpDecayProfile]]) -> MixtureProfile:
    """Combine ``(weight, profile)`` pairs into ``sum_i weight_i * alpha_i(t)``.

    Entries with zero effective amplitude ``weight * A`` are dropped.
    """
    amps, taus = [], []
    for weight, profile in entries:
        if weight < 0:
            raise ValidationError(f"negative mixture weight {weight!r}")
        a = weight * profile.amplitude
        if a > 0:
            amps.append(a)
            taus.append(profile.time_coefficient)
    if not amps:
        raise ValidationError("empty mixture")
    total = math.fsum(amps)
    weights = [a / total for a in amps]
    # renormalize so the weights sum to one as closely as floats allow
    s = math.fsum(weights)
    weights = [w / s for w in weights]
    return MixtureProfile(tuple(weights), tuple(taus), total)


def eval_lambda_sum(m: MixtureProfile, t):
    arr, scalar = as_time(t)
    w = np.asarray(m.weights)
    tau = np.asarray(m.taus)
    out = (-np.expm1(-arr[..., None] / tau)) @ w
    return unwrap(out, scalar)


def eval_sum(m: MixtureProfile, t):
    arr, scalar = as_time(t)
    return unwrap(m.total_amplitude * eval_lambda_sum(m, arr), scalar)


def contour_tau0(m: MixtureProfile) -> float:
    """Weight-averaged harmonic mean of the component time coefficients."""
    return 1.0 / math.fsum(w / x for w, x in zip(m.weights, m.taus))


def equivalent_tau(m: MixtureProfile, t):
    """Time coefficient ``tau(t)`` with ``1 - exp(-t/tau(t)) == lambda_sum(t)``.

    Equals ``contour_tau0`` at ``t = 0`` and rises monotonically towards
    ``max(taus)``.
    """
    arr, scalar = as_time(t)
    tau0 = contour_tau0(m)
    flat = np.atleast_1d(arr).ravel()
    lam = np.atleast_1d(eval_lambda_sum(m, flat))
    lw = np.log(np.asarray(m.weights))
    tau = np.asarray(m.taus)
    # log1p is exact for small lambda; the log-domain sum survives exp underflow at huge t
    with np.errstate(divide="ignore", invalid="ignore"):
        log_surv = np.where(lam < 0.5, np.log1p(-np.minimum(lam, 0.5)),
                            logsumexp(lw - flat[:, None] / tau, axis=1))
        out = np.where(flat >= SMALL_T_FRACTION * tau0, -flat / log_surv, tau0)
    return unwrap(out.reshape(arr.shape), scalar)


def eval_contour(m: MixtureProfile, t):
    arr, scalar = as_time(t)
    tau0 = contour_tau0(m)
    return unwrap(m.total_amplitude * -np.expm1(-arr / tau0), scalar)


def contour_profile(m: MixtureProfile) -> ExpDecayProfile:
    return ExpDecayProfile(m.total_amplitude, contour_tau0(m))


def delta_lambda(m: MixtureProfile, t):
    """Normalized gap between contour and sum: ``sum_i w_i e^{-t/tau_i} - e^{-t/tau0}``."""
    arr, scalar = as_time(t)
    tau0 = contour_tau0(m)
    w = np.asarray(m.weights)
    tau = np.asarray(m.taus)
    # e^a - e^b factored around the larger exponent: no cancellation near t=0,
    # no overflow at large t
    a = -arr[..., None] / tau
    b = np.broadcast_to((-arr / tau0)[..., None], a.shape)
    sign = np.where(a >= b, -1.0, 1.0)
    diff = sign * np.exp(np.maximum(a, b)) * np.expm1(-np.abs(a - b))
    return unwrap(diff @ w, scalar)


def deviation_residual(m: MixtureProfile, t: float) -> float:
    """Derivative of ``delta_lambda``: ``e^{-t/tau0}/tau0 - sum_i (w_i/tau_i) e^{-t/tau_i}``."""
    tau0 = contour_tau0(m)
    terms = [-w / x * math.exp(-t / x) for w, x in zip(m.weights, m.taus)]
    terms.append(math.exp(-t / tau0) / tau0)
    return math.fsum(terms)


INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, a: float, b: float, tol: float = 1e-9) -> float:
    """Maximizer of a unimodal ``f`` on ``[a, b]``, to interval width ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _distinct(taus: Sequence[float]) -> bool:
    lo, hi = min(taus), max(taus)
    return hi - lo > 1e-12 * hi


def max_deviation(m: MixtureProfile) -> DeviationReport:
    """Location and size of the largest gap between the contour and the sum."""
    if not _distinct(m.taus):
        return DeviationReport(0.0, 0.0, 0.0, degenerate=True)
    hi = 10.0 * max(m.taus)
    t_gs = golden_section_max(lambda t: float(delta_lambda(m, t)), 0.0, hi)

    # polish on the derivative, which is positive before the peak, negative after
    res = lambda t: deviation_residual(m, t)
    step = 1e-6 * max(m.taus)
    lo, up = max(t_gs - step, 0.0), min(t_gs + step, hi)
    while res(lo) <= 0 and lo > 0:
        lo = max(lo - 2 * (up - lo), 0.0)
    while res(up) >= 0 and up < hi:
        up = min(up + 2 * (up - lo), hi)
    if res(lo) > 0 > res(up):
        t_star = bisect(res, lo, up, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    else:
        t_star = t_gs
    dl = float(delta_lambda(m, t_star))
    return DeviationReport(t_star, dl, m.total_amplitude * dl)
