"""Lag-window estimation of the long-run variance of the projected sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _kernels
from .ustat import TIE_POLICIES, as_series

Alternative = Literal["greater", "less", "two-sided"]
ALTERNATIVES = ("greater", "less", "two-sided")


@dataclass(frozen=True)
class BandwidthConfig:
    """Lag truncation for the two samples plus test options.

    ``a_lag`` and ``b_lag`` are fixed at a given sample size. The asymptotic
    requirement (growth to infinity with ``a_lag = o(sqrt(n))``, or
    ``o(sqrt(n)/log(n))`` for adjacent samples) is the caller's concern.
    """

    a_lag: int = 0
    b_lag: int = 0
    ties: str = "strict"
    alternative: str = "greater"

    def __post_init__(self):
        if int(self.a_lag) != self.a_lag or self.a_lag < 0:
            raise ValueError("a_lag must be a nonnegative integer")
        if int(self.b_lag) != self.b_lag or self.b_lag < 0:
            raise ValueError("b_lag must be a nonnegative integer")
        if self.ties not in TIE_POLICIES:
            raise ValueError(f"unknown tie policy {self.ties!r}")
        if self.alternative not in ALTERNATIVES:
            raise ValueError(f"unknown alternative {self.alternative!r}")


@dataclass(frozen=True)
class AutocovarianceProfile:
    gamma: np.ndarray = field(repr=False)
    series_length: int

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "gamma", g)
        if g.size == 0:
            raise ValueError("profile needs at least lag 0")
        if self.series_length < 1 or g.size > self.series_length:
            raise ValueError("max lag must be below the series length")

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.gamma.size)

    @property
    def band(self) -> float:
        return 2.0 / math.sqrt(self.series_length)

    def partial_sum(self, lag: int) -> float:
        """``gamma[0] + 2 * sum_{k=1..lag} gamma[k]``."""
        if lag < 0 or lag > self.max_lag:
            raise ValueError(f"lag {lag} not covered by profile (max lag {self.max_lag})")
        g = self.gamma
        return float(g[0] + 2.0 * g[1 : lag + 1].sum())

    def __eq__(self, other):
        if not isinstance(other, AutocovarianceProfile):
            return NotImplemented
        return self.series_length == other.series_length and np.array_equal(self.gamma, other.gamma)

    __hash__ = None


def autocov_hat(z, k: int) -> float:
    """Lag-``k`` empirical autocovariance, centered at the full-sample mean.

    The sum of ``n - k`` products is divided by ``n``, not ``n - k``.
    """
    z = as_series(z, "z")
    if k < 0:
        raise ValueError("lag must be nonnegative")
    if k >= z.size:
        raise ValueError("lag exceeds sample")
    return float(_kernels.autocov(z, int(k))[k])


def covariance_profile(z, max_lag: int) -> AutocovarianceProfile:
    z = as_series(z, "z")
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    if max_lag >= z.size:
        raise ValueError("lag exceeds sample")
    return AutocovarianceProfile(_kernels.autocov(z, int(max_lag)), z.size)


def variance_estimator(
    gx: AutocovarianceProfile,
    gy: AutocovarianceProfile,
    ratio_n_over_m: float,
    bw: BandwidthConfig,
) -> float:
    """Two-sample long-run variance estimate ``V_n``.

    ``V_n = gx(0) + 2 sum_{k<=a} gx(k) + (n/m) (gy(0) + 2 sum_{l<=b} gy(l))``.
    The result may be negative; it is not clamped here.
    """
    if ratio_n_over_m <= 0:
        raise ValueError("ratio n/m must be positive")
    return gx.partial_sum(bw.a_lag) + ratio_n_over_m * gy.partial_sum(bw.b_lag)


def one_sample_variance(gh: AutocovarianceProfile, a_lag: int) -> float:
    return gh.partial_sum(a_lag)


def bandwidth_advisor(profile: AutocovarianceProfile, window: int = 5) -> int:
    """Suggest a lag truncation from a covariance profile.

    Returns the smallest ``k`` such that every ``|gamma[j]|`` for
    ``k < j <= min(k + window, max_lag)`` lies inside the ``2/sqrt(n)`` band,
    or ``max_lag`` when no such ``k`` exists. This is a reading aid for the
    covariance plot, not a bandwidth selection rule with any guarantee.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    inside = np.abs(profile.gamma) < profile.band
    top = profile.max_lag
    for k in range(top + 1):
        hi = min(k + window, top)
        if inside[k + 1 : hi + 1].all():
            return k
    return top  # pragma: no cover - k == top always satisfies the vacuous check
