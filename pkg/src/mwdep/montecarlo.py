"""Seeded, thread-parallel Monte-Carlo studies of the corrected tests.

Trial ``t`` draws its first sample from stream ``2t`` and its second sample
(two-sample design) from stream ``2t + 1`` of the master seed. The same
streams are reused for every size in a scenario's ladder, so rows share
common random numbers. Per-trial statistics are written into preallocated
arrays and reduced in trial order afterwards, which makes every report
independent of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .processes import RNG_ALGORITHM, ProcessSpec, RngContract
from .testing import KnownDistribution, normal_cdf, u_and_variance
from .ustat import compute_u
from .varest import BandwidthConfig, covariance_profile

DESIGNS = ("two-sample", "one-sample", "adjacent")
SIZE_LADDER = [(150, 100), (300, 200), (450, 300), (600, 400), (750, 500)]
THRESHOLD_ONE = 1.645
THRESHOLD_TWO = 1.96
LEVEL_FLAG = "level-off-nominal"


@dataclass(frozen=True)
class PostTransform:
    """Monotone map applied to the second block of an adjacent design."""

    kind: str = "identity"
    p: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "PostTransform":
        text = text.strip()
        if text in ("identity", "id"):
            return cls()
        kind, _, rest = text.partition(":")
        key, _, value = rest.partition("=")
        if kind != "power" or key.strip() != "p":
            raise ValueError(f"unknown transform {text!r}; expected 'identity' or 'power:p=<value>'")
        p = float(value)
        if not p > 0:
            raise ValueError("power transform needs p > 0")
        return cls("power", p)

    def to_text(self) -> str:
        return "identity" if self.kind == "identity" else f"power:p={self.p!r}"

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return z
        if np.any(z < 0):
            raise ValueError("power transform needs nonnegative values")
        return z**self.p


@dataclass
class Scenario:
    design: str
    x: ProcessSpec
    y: ProcessSpec | None = None
    dist: KnownDistribution | None = None
    transform: PostTransform = field(default_factory=PostTransform)
    sizes: list = field(default_factory=lambda: list(SIZE_LADDER))
    bw: BandwidthConfig = field(default_factory=BandwidthConfig)
    trials: int = 2000
    center: float = 0.5
    expect_null: bool = False
    name: str = ""

    def __post_init__(self):
        self.sizes = [(int(n), int(m)) for n, m in self.sizes]
        self.validate()

    def validate(self) -> None:
        if self.design not in DESIGNS:
            raise ValueError(f"unknown design {self.design!r}")
        if self.design == "two-sample" and self.y is None:
            raise ValueError("two-sample design needs a y process")
        if self.design == "one-sample" and self.dist is None:
            raise ValueError("one-sample design needs a reference distribution")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not 0.0 < self.center < 1.0:
            raise ValueError("center must lie in (0, 1)")
        if not self.sizes:
            raise ValueError("scenario needs at least one size")
        for n, m in self.sizes:
            if n < 1 or (self.design != "one-sample" and m < 1):
                raise ValueError(f"invalid size ({n}, {m})")
            if self.bw.a_lag >= n or (self.design != "one-sample" and self.bw.b_lag >= m):
                raise ValueError(f"lags ({self.bw.a_lag}, {self.bw.b_lag}) too large for size ({n}, {m})")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "design": self.design,
            "x": self.x.to_text(),
            "y": self.y.to_text() if self.y is not None else None,
            "dist": self.dist.to_text() if self.dist is not None else None,
            "transform": self.transform.to_text(),
            "sizes": [[n, m] for n, m in self.sizes],
            "a_lag": self.bw.a_lag,
            "b_lag": self.bw.b_lag,
            "ties": self.bw.ties,
            "alternative": self.bw.alternative,
            "trials": self.trials,
            "center": self.center,
            "expect_null": self.expect_null,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        known = {
            "name", "design", "x", "y", "dist", "transform", "sizes", "a_lag",
            "b_lag", "ties", "alternative", "trials", "center", "expect_null",
        }
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown scenario keys {sorted(extra)}")
        if "design" not in d or "x" not in d:
            raise ValueError("scenario needs 'design' and 'x'")
        return cls(
            design=d["design"],
            x=ProcessSpec.parse(d["x"]),
            y=ProcessSpec.parse(d["y"]) if d.get("y") else None,
            dist=KnownDistribution.parse(d["dist"]) if d.get("dist") else None,
            transform=PostTransform.parse(d.get("transform") or "identity"),
            sizes=d.get("sizes", SIZE_LADDER),
            bw=BandwidthConfig(
                a_lag=int(d.get("a_lag", 0)),
                b_lag=int(d.get("b_lag", 0)),
                ties=d.get("ties", "strict"),
                alternative=d.get("alternative", "greater"),
            ),
            trials=d.get("trials", 2000),
            center=float(d.get("center", 0.5)),
            expect_null=bool(d.get("expect_null", False)),
            name=d.get("name", ""),
        )


@dataclass
class SizeRow:
    n: int
    m: int
    trials: int
    undefined_count: int
    est_variance: float | None
    rate_1645: float | None
    rate_196: float | None
    mean_t: float | None
    flags: list = field(default_factory=list)


@dataclass
class MonteCarloReport:
    scenario: dict
    master_seed: int
    rows: list
    rng_algorithm: str = RNG_ALGORITHM

    def row(self, n: int, m: int) -> SizeRow:
        for r in self.rows:
            if (r.n, r.m) == (n, m):
                return r
        raise KeyError((n, m))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MonteCarloReport":
        return cls(
            scenario=d["scenario"],
            master_seed=d["master_seed"],
            rows=[SizeRow(**r) for r in d["rows"]],
            rng_algorithm=d.get("rng_algorithm", RNG_ALGORITHM),
        )


def trial_statistic(s: Scenario, n: int, m: int, master_seed: int, t: int) -> tuple[float, float]:
    """Return ``(U, V_n)`` (or ``(H_bar, V_1n)``) for trial ``t`` at size ``(n, m)``."""
    first = RngContract(master_seed, 2 * t)
    if s.design == "two-sample":
        x = s.x.sample(n, first)
        y = s.y.sample(m, RngContract(master_seed, 2 * t + 1))
        u, v, _ = u_and_variance(x, y, s.bw)
        return u, v
    if s.design == "adjacent":
        z = s.x.sample(n + m, first)
        u, v, _ = u_and_variance(z[:n], s.transform(z[n:]), s.bw)
        return u, v
    x = s.x.sample(n, first)
    h = np.asarray(s.dist.survival(x), dtype=np.float64)
    v = covariance_profile(h, s.bw.a_lag).partial_sum(s.bw.a_lag)
    return float(h.mean()), v


def simulate_statistics(s: Scenario, n: int, m: int, master_seed: int, threads: int = 1) -> np.ndarray:
    """Standardized statistics of every trial; NaN marks an undefined trial."""
    trials = int(s.trials)
    stats = np.empty(trials)
    variances = np.empty(trials)

    def work(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            stats[t], variances[t] = trial_statistic(s, n, m, master_seed, t)

    threads = max(1, int(threads))
    if threads == 1 or trials == 1:
        work(0, trials)
    else:
        bounds = np.linspace(0, trials, min(threads, trials) * 4 + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(work, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
            for f in futures:
                f.result()

    out = np.full(trials, np.nan)
    ok = variances > 0
    out[ok] = math.sqrt(n) * (stats[ok] - s.center) / np.sqrt(variances[ok])
    return out


def summarize(t_values: np.ndarray, n: int, m: int, expect_null: bool = False) -> SizeRow:
    defined = t_values[np.isfinite(t_values)]
    k = defined.size
    est_var = float(np.var(defined, ddof=1)) if k >= 2 else None
    r1 = float(np.count_nonzero(defined > THRESHOLD_ONE) / k) if k else None
    r2 = float(np.count_nonzero(np.abs(defined) > THRESHOLD_TWO) / k) if k else None
    flags = []
    if expect_null and min(n, m) >= 500 and k:
        if abs(r1 - 0.05) > 0.03 or abs(r2 - 0.05) > 0.03:
            flags.append(LEVEL_FLAG)
    return SizeRow(
        n=n,
        m=m,
        trials=int(t_values.size),
        undefined_count=int(t_values.size - k),
        est_variance=est_var,
        rate_1645=r1,
        rate_196=r2,
        mean_t=float(defined.mean()) if k else None,
        flags=flags,
    )


def run_scenario(s: Scenario, master_seed: int, threads: int = 1) -> MonteCarloReport:
    """Estimate Var(T), P(T > 1.645) and P(|T| > 1.96) for each size of ``s``.

    Undefined trials (``V_n <= 0``) are counted in ``undefined_count`` and left
    out of every rate and of the variance.
    """
    s.validate()
    RngContract(master_seed)  # range check
    rows = []
    for n, m in s.sizes:
        m_eff = 0 if s.design == "one-sample" else m
        t_values = simulate_statistics(s, n, m_eff, master_seed, threads)
        rows.append(summarize(t_values, n, m_eff, s.expect_null))
    return MonteCarloReport(scenario=s.to_dict(), master_seed=int(master_seed), rows=rows)


def estimate_pi(x_spec: ProcessSpec, y_spec: ProcessSpec, n: int, m: int, seed: int) -> float:
    """One large-sample realization of ``U_n`` as an estimate of ``P(X < Y)``."""
    x = x_spec.sample(n, RngContract(seed, 0))
    y = y_spec.sample(m, RngContract(seed, 1))
    return compute_u(x, y)


# -- tail diagnostic ---------------------------------------------------------

NORMALIZATIONS = ("sqrt_n", "sqrt_n_over_log_n")


@dataclass
class TailTable:
    thresholds: list
    normalization: str
    pi: float
    trials: int
    master_seed: int
    rows: list  # [{"n": .., "m": .., "freq": [...]}]

    def to_dict(self) -> dict:
        return asdict(self)


def tail_diagnostic(
    x_spec: ProcessSpec,
    y_spec: ProcessSpec,
    n_grid,
    thresholds,
    trials: int,
    normalization: str = "sqrt_n",
    pi: float = 0.5,
    master_seed: int = 0,
    m_ratio: float = 1.0,
    threads: int = 1,
) -> TailTable:
    """Empirical exceedance frequencies ``P(c_n (U_n - pi) > x)``.

    ``c_n`` is ``sqrt(n)`` or ``sqrt(n / log n)``. Exploratory output for
    slowly mixing inputs (e.g. LSV maps with ``gamma >= 1/2``) where the
    normal limit fails; there is no pass/fail criterion.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if trials < 1:
        raise ValueError("trials must be positive")
    xs = np.asarray(thresholds, dtype=np.float64)
    rows = []
    for n in n_grid:
        n = int(n)
        m = max(1, int(round(m_ratio * n)))
        if normalization == "sqrt_n_over_log_n" and n < 2:
            raise ValueError("sqrt_n_over_log_n needs n >= 2")
        scale = math.sqrt(n) if normalization == "sqrt_n" else math.sqrt(n / math.log(n))
        u = np.empty(trials)

        def work(lo, hi):
            for t in range(lo, hi):
                x = x_spec.sample(n, RngContract(master_seed, 2 * t))
                y = y_spec.sample(m, RngContract(master_seed, 2 * t + 1))
                u[t] = compute_u(x, y)

        if threads <= 1:
            work(0, trials)
        else:
            bounds = np.linspace(0, trials, threads * 4 + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for f in [pool.submit(work, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]:
                    f.result()
        z = scale * (u - pi)
        freq = [float(np.count_nonzero(z > thr) / trials) for thr in xs]
        rows.append({"n": n, "m": m, "freq": freq})
    return TailTable(
        thresholds=[float(v) for v in xs],
        normalization=normalization,
        pi=float(pi),
        trials=int(trials),
        master_seed=int(master_seed),
        rows=rows,
    )


def normal_tail(thresholds, variance: float) -> np.ndarray:
    """``1 - Phi(x / sqrt(variance))``; the limit of the tail frequencies under the CLT."""
    return 1.0 - normal_cdf(np.asarray(thresholds, dtype=np.float64) / math.sqrt(variance))


# -- named scenarios ---------------------------------------------------------

_AR1 = "ar1-gauss:mu=0,sigma=2"
_N01 = "iid-normal:mu=0,sigma=1"
_LSV25 = "lsv:gamma=0.25"

_NAMED = {
    "example1": dict(design="two-sample", x=_AR1, y=_N01, a_lag=4, b_lag=0, expect_null=True),
    "example1-nocorr": dict(design="two-sample", x=_AR1, y=_N01, a_lag=0, b_lag=0, expect_null=True),
    "example1-a3": dict(design="two-sample", x=_AR1, y=_N01, a_lag=3, b_lag=0, expect_null=True),
    "example1-power": dict(design="two-sample", x=_AR1, y="iid-normal:mu=0.2,sigma=1", a_lag=4, b_lag=0),
    "example2": dict(design="two-sample", x=_LSV25, y=_LSV25, a_lag=5, b_lag=5, expect_null=True),
    "example2-nocorr": dict(design="two-sample", x=_LSV25, y=_LSV25, a_lag=0, b_lag=0, expect_null=True),
    "example2-a4": dict(design="two-sample", x=_LSV25, y=_LSV25, a_lag=4, b_lag=4, expect_null=True),
    "example2-power": dict(design="two-sample", x=_LSV25, y="lsv:gamma=0.1", a_lag=5, b_lag=4),
    "example2-recentered": dict(
        design="two-sample", x=_LSV25, y="lsv:gamma=0.1", a_lag=5, b_lag=4, center=0.529, expect_null=True
    ),
    "adjacent-null": dict(design="adjacent", x=_LSV25, transform="identity", a_lag=5, b_lag=5, expect_null=True),
    "adjacent-nocorr": dict(design="adjacent", x=_LSV25, transform="identity", a_lag=0, b_lag=0, expect_null=True),
    "adjacent-power": dict(design="adjacent", x=_LSV25, transform="power:p=0.8", a_lag=5, b_lag=5),
}

SCENARIO_NAMES = tuple(_NAMED)


def named_scenario(name: str, **overrides) -> Scenario:
    """Build one of the built-in scenarios; keyword overrides use the JSON keys."""
    if name not in _NAMED:
        raise ValueError(f"unknown scenario {name!r}; known: {', '.join(SCENARIO_NAMES)}")
    d = dict(_NAMED[name], name=name, sizes=[list(s) for s in SIZE_LADDER], trials=2000)
    d.update({k: v for k, v in overrides.items() if v is not None})
    return Scenario.from_dict(d)
