"""Statistical forecast-uncertainty functions for intermittent power sources.

A single source is described by a saturating exponential of the forecast
time advance, ``alpha(t) = A * (1 - exp(-t / tau))``. Sources combine into
weighted sums, which are bounded from above by a single contour exponential.
"""

from .errors import NumericalError, ValidationError
from .profile import (
    ExpDecayProfile,
    conservation_residual,
    eval_alpha,
    eval_lambda,
    eval_lambda_derivative,
)
from .mixture import (
    DeviationReport,
    MixtureProfile,
    contour_tau0,
    delta_lambda,
    equivalent_tau,
    eval_contour,
    eval_lambda_sum,
    eval_sum,
    max_deviation,
    mixture_from_profiles,
)
from .fitting import (
    FitOptions,
    ForecastSample,
    RmseSequence,
    coverage_check,
    fit_profile,
    relative_error,
    rmse_sequence,
)
from .fleet import (
    FleetSpec,
    PowerSnapshot,
    compose_all_sources,
    compose_ips,
    derive_proportions,
    ips_contour,
)

__version__ = "0.1.0"
