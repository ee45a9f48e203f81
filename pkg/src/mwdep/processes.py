"""Generators for the stationary (and nearly stationary) test processes.

All randomness comes from 64-bit raw words of a Philox4x64 counter-based
generator keyed through ``numpy.random.SeedSequence(seed, spawn_key=(stream_id,))``.
Raw words are turned into uniforms and coin flips by fixed integer
arithmetic, so a ``(seed, stream_id)`` pair pins every output bit-for-bit on
any platform. Normal variates use the quantile transform of open-interval
uniforms rather than a rejection sampler.

Text form of a process (used by the CLI and scenario files)::

    ar1-gauss:mu=0,sigma=2
    lsv:gamma=0.25[,init_hi=0.05][,burn_in=0]
    iid-normal:mu=0.2,sigma=1
    iid-uniform:lo=0,hi=1
    linear-binary:k=40
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import _kernels

RNG_ALGORITHM = "philox4x64-10/seedsequence-spawnkey"

_TWO53 = float(2**53)
QUANTILE_GUARD = 1e-15


@dataclass(frozen=True)
class RngContract:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")

    def bit_generator(self) -> np.random.Philox:
        return np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))

    def raw(self, size: int) -> np.ndarray:
        """``size`` raw uint64 words from this stream (always from its start)."""
        return self.bit_generator().random_raw(size)


def _open_uniform(raw: np.ndarray) -> np.ndarray:
    # 53-bit midpoint grid: strictly inside (0, 1)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO53


def _half_open_uniform(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) / _TWO53


def _coin(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(63)).astype(np.float64)


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    return n


def gen_ar1_uniform(n: int, rng: RngContract) -> np.ndarray:
    """Chain ``Z_{k+1} = (Z_k + eps_{k+1}) / 2`` with ``Z_1 ~ U(0,1)``, ``eps ~ B(1/2)``.

    The uniform law is invariant for this kernel, so the chain is stationary
    from the first step; it is not strongly mixing.
    """
    n = _check_n(n)
    raw = rng.raw(n)
    z1 = float(_open_uniform(raw[:1])[0])
    return _kernels.ar1_chain(z1, _coin(raw[1:]))


def gen_ar1_gauss(n: int, mu: float, sigma: float, rng: RngContract) -> np.ndarray:
    """Gaussian-marginal transform ``mu + sigma * Phi^{-1}(Z_i)`` of the AR(1) chain."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    z = gen_ar1_uniform(n, rng)
    bad = (z <= QUANTILE_GUARD) | (z >= 1.0 - QUANTILE_GUARD)
    if bad.any():
        warnings.warn(
            f"{int(bad.sum())} chain values clamped away from 0/1 before the normal quantile",
            RuntimeWarning,
            stacklevel=2,
        )
        z = np.clip(z, QUANTILE_GUARD, 1.0 - QUANTILE_GUARD)
    return mu + sigma * special.ndtri(z)


def lsv_step(x: float, gamma: float) -> float:
    """One step of the Liverani-Saussol-Vaienti map.

    ``x (1 + 2^gamma x^gamma)`` on [0, 1/2) and ``2x - 1`` on [1/2, 1]. The map
    jumps at 1/2: the left limit is 1 while the value at 1/2 is 0.
    """
    if x < 0.5:
        return x * (1.0 + 2.0**gamma * x**gamma)
    return 2.0 * x - 1.0


def gen_lsv(
    n: int,
    gamma: float,
    rng: RngContract,
    init_hi: float = 0.05,
    burn_in: int = 0,
    x1: float | None = None,
) -> np.ndarray:
    """Forward orbit of the LSV map started uniformly on ``(0, init_hi)``.

    The invariant law has no closed form, so the orbit starts near the
    neutral fixed point at 0 and is not exactly stationary. ``x1`` forces the
    starting point (the random stream is then unused).
    """
    n = _check_n(n)
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if not 0.0 < init_hi <= 1.0:
        raise ValueError("init_hi must lie in (0, 1]")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    if x1 is None:
        x1 = init_hi * float(_open_uniform(rng.raw(1))[0])
    elif not 0.0 <= x1 <= 1.0:
        raise ValueError("x1 must lie in [0, 1]")
    return _kernels.lsv_orbit(float(x1), float(gamma), n, int(burn_in))


def linear_binary_weights(k: int) -> np.ndarray:
    return 0.5 ** np.arange(1, k + 1, dtype=np.float64)


def gen_linear_binary(n: int, k: int, rng: RngContract) -> np.ndarray:
    """Truncated linear process ``X_i = sum_{j<k} eps_{i-j} / 2^{j+1}``, ``eps = +-1/2``.

    Dropping the tail moves each value by at most ``2^{-k-1}``.
    """
    n = _check_n(n)
    if k < 1:
        raise ValueError("k must be at least 1")
    eps = _coin(rng.raw(n + k - 1)) - 0.5
    return np.convolve(eps, linear_binary_weights(k), mode="valid")


def gen_iid_normal(n: int, mu: float, sigma: float, rng: RngContract) -> np.ndarray:
    n = _check_n(n)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return mu + sigma * special.ndtri(_open_uniform(rng.raw(n)))


def gen_iid_uniform(n: int, lo: float, hi: float, rng: RngContract) -> np.ndarray:
    n = _check_n(n)
    if not hi > lo:
        raise ValueError("uniform needs lo < hi")
    return lo + (hi - lo) * _half_open_uniform(rng.raw(n))


# -- text specs --------------------------------------------------------------

_KINDS = {
    "ar1-gauss": {"mu": 0.0, "sigma": 1.0},
    "lsv": {"gamma": None, "init_hi": 0.05, "burn_in": 0},
    "iid-normal": {"mu": 0.0, "sigma": 1.0},
    "iid-uniform": {"lo": 0.0, "hi": 1.0},
    "linear-binary": {"k": 40},
}
_INT_PARAMS = {"burn_in", "k"}


@dataclass(frozen=True)
class ProcessSpec:
    """A named generator with its parameters; see the module docstring."""

    kind: str
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown process {self.kind!r}; expected one of {sorted(_KINDS)}")
        defaults = _KINDS[self.kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"unknown parameter(s) {sorted(unknown)} for {self.kind}")
        merged = {}
        for key, default in defaults.items():
            value = self.params.get(key, default)
            if value is None:
                raise ValueError(f"{self.kind} requires parameter {key!r}")
            merged[key] = int(value) if key in _INT_PARAMS else float(value)
        object.__setattr__(self, "params", merged)
        p = merged
        if self.kind in ("ar1-gauss", "iid-normal") and not p["sigma"] > 0:
            raise ValueError("sigma must be positive")
        if self.kind == "lsv":
            if not 0 < p["gamma"] < 1:
                raise ValueError("gamma must lie in (0, 1)")
            if not 0 < p["init_hi"] <= 1:
                raise ValueError("init_hi must lie in (0, 1]")
            if p["burn_in"] < 0:
                raise ValueError("burn_in must be nonnegative")
        if self.kind == "iid-uniform" and not p["hi"] > p["lo"]:
            raise ValueError("uniform needs lo < hi")
        if self.kind == "linear-binary" and p["k"] < 1:
            raise ValueError("k must be at least 1")

    @classmethod
    def parse(cls, text: str) -> "ProcessSpec":
        kind, _, rest = text.strip().partition(":")
        params = {}
        if rest.strip():
            for item in rest.split(","):
                key, eq, value = item.partition("=")
                if not eq:
                    raise ValueError(f"bad parameter {item!r} in process spec {text!r}")
                try:
                    params[key.strip()] = float(value)
                except ValueError:
                    raise ValueError(f"non-numeric value in process spec {text!r}") from None
        return cls(kind.strip(), params)

    def to_text(self) -> str:
        body = ",".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}:{body}"

    def sample(self, n: int, rng: RngContract) -> np.ndarray:
        p = self.params
        if self.kind == "ar1-gauss":
            return gen_ar1_gauss(n, p["mu"], p["sigma"], rng)
        if self.kind == "lsv":
            return gen_lsv(n, p["gamma"], rng, init_hi=p["init_hi"], burn_in=p["burn_in"])
        if self.kind == "iid-normal":
            return gen_iid_normal(n, p["mu"], p["sigma"], rng)
        if self.kind == "iid-uniform":
            return gen_iid_uniform(n, p["lo"], p["hi"], rng)
        return gen_linear_binary(n, p["k"], rng)
