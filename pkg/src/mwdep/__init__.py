"""Mann-Whitney U-tests corrected for short-range dependent time series."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .montecarlo import Scenario, estimate_pi, named_scenario, run_scenario, tail_diagnostic
from .processes import ProcessSpec, RngContract
from .testing import (
    KnownDistribution,
    TestReport,
    adjacent_test,
    normal_cdf,
    normal_quantile,
    one_sample_test,
    p_values,
    two_sample_test,
)
from .ustat import compute_u, empirical_cdf_strict, empirical_survival, hoeffding_decompose
from .varest import (
    AutocovarianceProfile,
    BandwidthConfig,
    autocov_hat,
    bandwidth_advisor,
    covariance_profile,
    one_sample_variance,
    variance_estimator,
)

__all__ = [
    "BACKEND",
    "AutocovarianceProfile",
    "BandwidthConfig",
    "KnownDistribution",
    "ProcessSpec",
    "RngContract",
    "Scenario",
    "TestReport",
    "adjacent_test",
    "autocov_hat",
    "bandwidth_advisor",
    "compute_u",
    "covariance_profile",
    "empirical_cdf_strict",
    "empirical_survival",
    "estimate_pi",
    "hoeffding_decompose",
    "named_scenario",
    "normal_cdf",
    "normal_quantile",
    "one_sample_test",
    "one_sample_variance",
    "p_values",
    "run_scenario",
    "tail_diagnostic",
    "two_sample_test",
    "variance_estimator",
]
