"""Dependence-corrected Mann-Whitney tests.

Three designs share one pipeline: the U-statistic (or its one-sample
analogue), a lag-window estimate ``V_n`` of the long-run variance of the
projected sequences, and the standardized statistic

    T = sqrt(n) * (U - center) / sqrt(max(V_n, 0))

which is asymptotically N(0, 1) under ``pi = center`` (``center = 1/2`` for
the null of no weak domination). When ``V_n <= 0`` the statistic is reported
as undefined instead of infinite.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from .ustat import CrossCounts, as_series, cross_counts
from .varest import ALTERNATIVES, BandwidthConfig, covariance_profile

NONPOSITIVE_VARIANCE = "nonpositive-variance"
TIES = "ties"


def normal_cdf(z):
    """Standard normal distribution function (scalar or array)."""
    out = special.ndtr(np.asarray(z, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def normal_quantile(p):
    """Inverse of :func:`normal_cdf` on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~(arr > 0.0) | ~(arr < 1.0)):
        raise ValueError("normal_quantile requires 0 < p < 1")
    out = special.ndtri(arr)
    return float(out) if out.ndim == 0 else out


def p_values(t: float, alternative: str = "greater") -> tuple[float, float]:
    """Return ``(p_one_sided, p_two_sided)`` under the N(0, 1) limit.

    ``greater`` tests ``pi > 1/2`` (large ``t`` is evidence), ``less`` tests
    ``pi < 1/2``. For ``two-sided`` the one-sided slot carries the two-sided
    value as well.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    # ndtr(-|t|) keeps precision in the far tail
    two = 2.0 * float(special.ndtr(-abs(t)))
    if alternative == "greater":
        one = float(special.ndtr(-t))
    elif alternative == "less":
        one = float(special.ndtr(t))
    else:
        one = two
    return one, two


@dataclass
class TestReport:
    """Outcome of one corrected test.

    ``u_stat`` carries ``U_n`` for the two-sample designs and the mean
    ``H_bar_n`` for the one-sample design (where ``m`` is 0). ``t_stat`` and
    the p-values are ``None`` when the variance estimate is not positive.
    """

    __test__ = False  # not a pytest class

    design: str
    u_stat: float
    v_n: float
    t_stat: float | None
    p_one_sided: float | None
    p_two_sided: float | None
    n: int
    m: int
    a_lag: int
    b_lag: int
    alternative: str = "greater"
    center: float = 0.5
    warnings: list[str] = field(default_factory=list)

    @property
    def defined(self) -> bool:
        return self.t_stat is not None

    def reject(self, level: float = 0.05) -> bool | None:
        if not self.defined:
            return None
        p = self.p_two_sided if self.alternative == "two-sided" else self.p_one_sided
        return p < level

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TestReport":
        return cls(**d)


def _standardize(stat: float, v_n: float, n: int, center: float):
    if v_n > 0.0:
        return math.sqrt(n) * (stat - center) / math.sqrt(v_n)
    return None


def _finish(design, stat, v_n, n, m, a_lag, b_lag, alternative, center, warns) -> TestReport:
    t = _standardize(stat, v_n, n, center)
    if t is None:
        warns.append(NONPOSITIVE_VARIANCE)
        p1 = p2 = None
    else:
        p1, p2 = p_values(t, alternative)
    return TestReport(
        design=design,
        u_stat=stat,
        v_n=v_n,
        t_stat=t,
        p_one_sided=p1,
        p_two_sided=p2,
        n=n,
        m=m,
        a_lag=a_lag,
        b_lag=b_lag,
        alternative=alternative,
        center=center,
        warnings=warns,
    )


def _check_lags(bw: BandwidthConfig, n: int, m: int) -> None:
    if bw.a_lag >= n:
        raise ValueError(f"a_lag={bw.a_lag} must be smaller than n={n}")
    if bw.b_lag >= m:
        raise ValueError(f"b_lag={bw.b_lag} must be smaller than m={m}")


def projections(x, y, ties: str = "strict") -> tuple[np.ndarray, np.ndarray, CrossCounts]:
    """The sequences ``H_m(X_i)`` and ``G_n(Y_j)`` that enter ``V_n``.

    ``H_m`` is the empirical survival function of ``y`` and ``G_n`` the strict
    empirical distribution function of ``x``; each sample is pushed through
    the other sample's function.
    """
    counts = cross_counts(x, y)
    return counts.survival_of_x(ties), counts.cdf_of_y(ties), counts


def u_and_variance(x, y, bw: BandwidthConfig) -> tuple[float, float, bool]:
    """``(U_n, V_n, ties_present)`` for two samples; the numeric core of the test."""
    x = as_series(x, "x")
    y = as_series(y, "y")
    n, m = x.size, y.size
    _check_lags(bw, n, m)
    hx, gy, counts = projections(x, y, bw.ties)
    gx = covariance_profile(hx, bw.a_lag)
    gyp = covariance_profile(gy, bw.b_lag)
    v_n = gx.partial_sum(bw.a_lag) + (n / m) * gyp.partial_sum(bw.b_lag)
    return counts.u_stat(bw.ties), v_n, counts.has_ties


def two_sample_test(x, y, bw: BandwidthConfig | None = None, center: float = 0.5) -> TestReport:
    """Corrected Mann-Whitney test for two independent stationary series.

    Parameters
    ----------
    x, y : array_like
        The two samples, in observation order.
    bw : BandwidthConfig, optional
        Lags ``a_lag < n`` and ``b_lag < m``, tie policy and alternative.
        Defaults to no correction (``a = b = 0``).
    center : float
        Hypothesized value of ``pi = P(X < Y)``; 1/2 for the usual null.

    Returns
    -------
    TestReport
    """
    bw = bw or BandwidthConfig()
    x = as_series(x, "x")
    y = as_series(y, "y")
    u, v_n, tied = u_and_variance(x, y, bw)
    warns = [TIES] if tied and bw.ties == "strict" else []
    return _finish("two-sample", u, v_n, x.size, y.size, bw.a_lag, bw.b_lag, bw.alternative, center, warns)


def adjacent_test(series, split_n: int, bw: BandwidthConfig | None = None, center: float = 0.5) -> TestReport:
    """Corrected test comparing the first ``split_n`` observations with the rest.

    The second block is expected to be ``f(X_j)`` for a monotone ``f`` applied
    to the same underlying series (apply ``f`` before calling). Consistency
    of ``V_n`` in this design needs the stronger growth rule
    ``a_lag = o(sqrt(n)/log(n))``; nothing here can check it.
    """
    bw = bw or BandwidthConfig()
    s = as_series(series, "series")
    if not 1 <= split_n < s.size:
        raise ValueError(f"split must satisfy 1 <= split < {s.size}, got {split_n}")
    x, y = s[:split_n], s[split_n:]
    u, v_n, tied = u_and_variance(x, y, bw)
    warns = [TIES] if tied and bw.ties == "strict" else []
    return _finish("adjacent", u, v_n, x.size, y.size, bw.a_lag, bw.b_lag, bw.alternative, center, warns)


@dataclass(frozen=True)
class KnownDistribution:
    """Reference law for the one-sample test; normal or uniform.

    Other families only need a survival function ``H(t) = mu((t, inf))``.
    """

    kind: str
    a: float
    b: float

    def __post_init__(self):
        if self.kind == "normal":
            if not self.b > 0:
                raise ValueError("normal sigma must be positive")
        elif self.kind == "uniform":
            if not self.b > self.a:
                raise ValueError("uniform needs lo < hi")
        else:
            raise ValueError(f"unknown distribution {self.kind!r}")

    @classmethod
    def normal(cls, mu: float = 0.0, sigma: float = 1.0) -> "KnownDistribution":
        return cls("normal", float(mu), float(sigma))

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "KnownDistribution":
        return cls("uniform", float(lo), float(hi))

    @classmethod
    def parse(cls, text: str) -> "KnownDistribution":
        """Parse ``normal:mu,sigma`` or ``uniform:lo,hi``."""
        try:
            kind, _, rest = text.partition(":")
            a, b = (float(v) for v in rest.split(","))
        except ValueError:
            raise ValueError(f"bad distribution token {text!r}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"bad distribution token {text!r}")
        return cls(kind.strip(), a, b)

    def to_text(self) -> str:
        return f"{self.kind}:{self.a!r},{self.b!r}"

    def survival(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "normal":
            out = special.ndtr((self.a - t) / self.b)
        else:
            out = np.clip((self.b - t) / (self.b - self.a), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out


def one_sample_test(
    x,
    dist: KnownDistribution,
    a_lag: int = 0,
    alternative: str = "greater",
    center: float = 0.5,
) -> TestReport:
    """Corrected test of weak domination between a series and a known law.

    With ``H`` the survival function of ``dist``, the statistic is the mean
    of ``H(X_i)``; ``alternative="greater"`` means the reference law weakly
    dominates the series.
    """
    x = as_series(x, "x")
    n = x.size
    if a_lag < 0 or a_lag >= n:
        raise ValueError(f"a_lag={a_lag} must satisfy 0 <= a_lag < n={n}")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    h = np.asarray(dist.survival(x), dtype=np.float64)
    profile = covariance_profile(h, a_lag)
    h_bar = float(h.mean())
    v_n = profile.partial_sum(a_lag)
    return _finish("one-sample", h_bar, v_n, n, 0, a_lag, 0, alternative, center, [])
