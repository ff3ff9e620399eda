"""Seeded synthetic forecast samples with a known RMSE-versus-advance curve.

At each advance ``t`` the relative error (percent) is drawn from
``N(0, alpha(t))``, so the expected RMSE at ``t`` is ``alpha(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fitting import SampleTable
from .profile import ExpDecayProfile, eval_alpha

DEFAULT_ADVANCES = tuple(float(h) for h in range(1, 25))


@dataclass(frozen=True)
class SynthSpec:
    profile: ExpDecayProfile
    samples_per_advance: int = 1000
    advances: tuple[float, ...] = DEFAULT_ADVANCES
    base_actual_mw: float = 100.0
    rng_seed: int = 0
    source_id: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "advances", tuple(float(a) for a in self.advances))
        if int(self.samples_per_advance) != self.samples_per_advance or self.samples_per_advance < 1:
            raise ValidationError("samples_per_advance must be a positive integer")
        if not self.advances or any(not a > 0 for a in self.advances):
            raise ValidationError("advances must be nonempty and positive")
        if not self.base_actual_mw > 0:
            raise ValidationError("base_actual_mw must be > 0")


def generate(spec: SynthSpec) -> SampleTable:
    """Samples ordered by advance, ``samples_per_advance`` rows each."""
    rng = np.random.default_rng(spec.rng_seed)
    m = int(spec.samples_per_advance)
    t = np.repeat(np.asarray(spec.advances), m)
    sigma = eval_alpha(spec.profile, t)
    eps = rng.standard_normal(t.size) * sigma
    pa = np.full(t.size, float(spec.base_actual_mw))
    # errors below -100% would mean negative forecast power
    pf = np.maximum(pa * (1.0 + eps / 100.0), 0.0)
    return SampleTable(t, pf, pa, [spec.source_id] * t.size)
