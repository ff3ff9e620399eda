"""Single-source uncertainty profile and its closed-form derivatives.

Amplitudes are in percent of actual power, time advances in hours.
All evaluators accept a scalar or an array of time advances and return
the same shape (a plain ``float`` for scalar input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")


def as_time(t):
    """Validate time advance(s); return (float array, was_scalar)."""
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValidationError("time advance is NaN")
    if np.any(arr < 0):
        raise ValidationError("time advance must be non-negative")
    return arr, arr.ndim == 0


def unwrap(arr, scalar):
    return float(arr) if scalar else arr


@dataclass(frozen=True)
class ExpDecayProfile:
    """``alpha(t) = amplitude * (1 - exp(-t / time_coefficient))``."""

    amplitude: float
    time_coefficient: float

    def __post_init__(self):
        _check_positive("amplitude", self.amplitude)
        _check_positive("time_coefficient", self.time_coefficient)

    def __call__(self, t):
        return eval_alpha(self, t)


def eval_lambda(tau: float, t):
    """Normalized profile ``1 - exp(-t / tau)``, in [0, 1)."""
    _check_positive("tau", tau)
    arr, scalar = as_time(t)
    # expm1 keeps full relative precision for t << tau
    return unwrap(-np.expm1(-arr / tau), scalar)


def eval_alpha(profile: ExpDecayProfile, t):
    arr, scalar = as_time(t)
    return unwrap(profile.amplitude * eval_lambda(profile.time_coefficient, arr), scalar)


def eval_lambda_derivative(tau: float, t, order: int):
    """Analytic ``order``-th derivative: ``(-1)**(order-1) * tau**-order * exp(-t/tau)``."""
    if int(order) != order or order < 1:
        raise ValidationError(f"derivative order must be a positive integer, got {order!r}; "
                              "use eval_lambda for order 0")
    _check_positive("tau", tau)
    arr, scalar = as_time(t)
    sign = -1.0 if order % 2 == 0 else 1.0
    return unwrap(sign * tau ** (-order) * np.exp(-arr / tau), scalar)


def conservation_residual(tau: float, t, order: int):
    """``tau * lambda^(i) + lambda^(i-1)`` minus its constant (1 for i=1, else 0)."""
    lower = eval_lambda(tau, t) if order == 1 else eval_lambda_derivative(tau, t, order - 1)
    target = 1.0 if order == 1 else 0.0
    return tau * eval_lambda_derivative(tau, t, order) + lower - target


def alpha_derivative(profile: ExpDecayProfile, t, order: int):
    """Derivative of the unnormalized profile, ``A * lambda^(i)``."""
    return profile.amplitude * eval_lambda_derivative(profile.time_coefficient, t, order)
