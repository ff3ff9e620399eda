"""Wind + solar composition and scaling to the whole generation fleet.

Generation shares are taken as constants (their value at zero time
advance). Controllable generation carries no forecast uncertainty, so the
all-sources profile is the intermittent-source profile scaled by the
intermittent share: same normalized shape, smaller amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .mixture import MixtureProfile, contour_profile, mixture_from_profiles
from .profile import ExpDecayProfile


def _check_share(name: str, value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class FleetSpec:
    """Wind and solar profiles with the wind share of IPS output and the IPS share of all output.

    A profile may be ``None`` only when its share is zero.
    """

    wind_profile: ExpDecayProfile | None
    solar_profile: ExpDecayProfile | None
    beta_w: float
    beta_ips: float

    def __post_init__(self):
        _check_share("beta_w", self.beta_w)
        _check_share("beta_ips", self.beta_ips)
        if self.wind_profile is None and self.beta_w > 0:
            raise ValidationError("wind profile required when beta_w > 0")
        if self.solar_profile is None and self.beta_w < 1:
            raise ValidationError("solar profile required when beta_w < 1")


@dataclass(frozen=True)
class PowerSnapshot:
    wind_mw: float
    solar_mw: float
    controllable_mw: float

    def __post_init__(self):
        for name in ("wind_mw", "solar_mw", "controllable_mw"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be >= 0, got {v!r}")


def derive_beta_w(p: PowerSnapshot) -> float:
    ips = p.wind_mw + p.solar_mw
    if ips <= 0:
        raise ValidationError("beta_w undefined: zero intermittent generation")
    return p.wind_mw / ips


def derive_beta_ips(p: PowerSnapshot) -> float:
    total = p.wind_mw + p.solar_mw + p.controllable_mw
    if total <= 0:
        raise ValidationError("beta_ips undefined: zero total generation")
    return (p.wind_mw + p.solar_mw) / total


def derive_proportions(p: PowerSnapshot) -> tuple[float, float]:
    """``(beta_w, beta_ips)`` from a generation snapshot."""
    return derive_beta_w(p), derive_beta_ips(p)


def ips_coefficients(spec: FleetSpec) -> tuple[float, float]:
    """Effective wind and solar amplitudes, ``beta_w*A_w`` and ``(1-beta_w)*A_s``."""
    wind = spec.beta_w * spec.wind_profile.amplitude if spec.wind_profile else 0.0
    solar = (1.0 - spec.beta_w) * spec.solar_profile.amplitude if spec.solar_profile else 0.0
    return wind, solar


def compose_ips(spec: FleetSpec) -> tuple[MixtureProfile, float]:
    """IPS sum profile and gamma, the wind fraction of the IPS amplitude."""
    entries = []
    if spec.wind_profile is not None:
        entries.append((spec.beta_w, spec.wind_profile))
    if spec.solar_profile is not None:
        entries.append((1.0 - spec.beta_w, spec.solar_profile))
    m = mixture_from_profiles(entries)
    wind, _ = ips_coefficients(spec)
    gamma = wind / m.total_amplitude
    return m, gamma


def ips_contour(m: MixtureProfile) -> ExpDecayProfile:
    return contour_profile(m)


def compose_all_sources(m: MixtureProfile, beta_ips: float) -> MixtureProfile:
    """All-sources profile: shape inherited from ``m``, amplitude diluted by ``beta_ips``.

    ``beta_ips == 0`` gives a zero-amplitude mixture (``is_zero`` is true).
    """
    _check_share("beta_ips", beta_ips)
    return m.scaled(beta_ips)
