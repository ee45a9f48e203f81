"""Hot numeric kernels.

Each kernel exists twice: a loop formulation compiled with numba and a
pure-numpy formulation. The active implementation is chosen once at import
time from the ``MWDEP_NUMBA`` environment variable (``0``/``false``/``off``
disables numba). If numba cannot be imported the numpy path is used.

Both implementations are importable by name (``*_numba`` / ``*_numpy``) so
that tests and the benchmark script can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_FLAG = os.environ.get("MWDEP_NUMBA", "1").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in {"0", "false", "no", "off"}

BACKEND = "numba" if USE_NUMBA else "numpy"


def _jit(func):
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# Cross-sample rank counts
# ---------------------------------------------------------------------------
#
# For samples x (n) and y (m) the test pipeline needs, for every x_i,
#     above[i] = #{j : y_j > x_i},   eq_x[i] = #{j : y_j == x_i}
# and for every y_j,
#     below[j] = #{i : x_i < y_j},   eq_y[j] = #{i : x_i == y_j}.
# Everything else (U, H_m, G_n, ties) is derived from these integer counts.


def _rank_counts_loop(x, y):
    n = x.shape[0]
    m = y.shape[0]
    ox = np.argsort(x, kind="mergesort")
    oy = np.argsort(y, kind="mergesort")
    above = np.empty(n, dtype=np.int64)
    eq_x = np.empty(n, dtype=np.int64)
    below = np.empty(m, dtype=np.int64)
    eq_y = np.empty(m, dtype=np.int64)

    # walk x ascending: lt = #y < v, le = #y <= v
    lt = 0
    le = 0
    for r in range(n):
        i = ox[r]
        v = x[i]
        while lt < m and y[oy[lt]] < v:
            lt += 1
        if le < lt:
            le = lt
        while le < m and y[oy[le]] <= v:
            le += 1
        above[i] = m - le
        eq_x[i] = le - lt

    lt = 0
    le = 0
    for r in range(m):
        j = oy[r]
        v = y[j]
        while lt < n and x[ox[lt]] < v:
            lt += 1
        if le < lt:
            le = lt
        while le < n and x[ox[le]] <= v:
            le += 1
        below[j] = lt
        eq_y[j] = le - lt
    return above, eq_x, below, eq_y


def rank_counts_numpy(x, y):
    m = y.shape[0]
    ys = np.sort(y, kind="mergesort")
    xs = np.sort(x, kind="mergesort")
    y_lt = np.searchsorted(ys, x, side="left")
    y_le = np.searchsorted(ys, x, side="right")
    x_lt = np.searchsorted(xs, y, side="left")
    x_le = np.searchsorted(xs, y, side="right")
    return (
        (m - y_le).astype(np.int64),
        (y_le - y_lt).astype(np.int64),
        x_lt.astype(np.int64),
        (x_le - x_lt).astype(np.int64),
    )


rank_counts_python = _rank_counts_loop
rank_counts_numba = _jit(_rank_counts_loop)


# ---------------------------------------------------------------------------
# Lag autocovariances with 1/n normalization
# ---------------------------------------------------------------------------


# Subtracting z[0] before averaging makes a constant series center to exact
# zeros and keeps large offsets from eating precision.


def _autocov_loop(z, max_lag):
    n = z.shape[0]
    z0 = z[0]
    mean = 0.0
    for i in range(n):
        mean += z[i] - z0
    mean /= n
    zc = np.empty(n)
    for i in range(n):
        zc[i] = (z[i] - z0) - mean
    out = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        acc = 0.0
        for i in range(n - k):
            acc += zc[i] * zc[i + k]
        out[k] = acc / n
    return out


def autocov_numpy(z, max_lag):
    n = z.shape[0]
    d = z - z[0]
    zc = d - d.mean()
    out = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        out[k] = np.dot(zc[: n - k], zc[k:]) / n
    return out


autocov_numba = _jit(_autocov_loop)


# ---------------------------------------------------------------------------
# Sequential recursions (no vectorized form; the numpy path is the plain loop)
# ---------------------------------------------------------------------------


def _ar1_chain_loop(z1, bits):
    # Z_{k+1} = (Z_k + eps_{k+1}) / 2, eps in {0, 1}
    n = bits.shape[0] + 1
    out = np.empty(n)
    out[0] = z1
    z = z1
    for k in range(n - 1):
        z = 0.5 * (z + bits[k])
        out[k + 1] = z
    return out


def _lsv_orbit_loop(x1, gamma, n, burn_in):
    c = 2.0**gamma
    x = x1
    for _ in range(burn_in):
        if x < 0.5:
            x = x * (1.0 + c * x**gamma)
        else:
            x = 2.0 * x - 1.0
    out = np.empty(n)
    for i in range(n):
        out[i] = x
        if x < 0.5:
            x = x * (1.0 + c * x**gamma)
        else:
            x = 2.0 * x - 1.0
    return out


ar1_chain_numpy = _ar1_chain_loop
ar1_chain_numba = _jit(_ar1_chain_loop)
lsv_orbit_numpy = _lsv_orbit_loop
lsv_orbit_numba = _jit(_lsv_orbit_loop)


if USE_NUMBA:
    rank_counts = rank_counts_numba
    autocov = autocov_numba
    ar1_chain = ar1_chain_numba
    lsv_orbit = lsv_orbit_numba
else:
    rank_counts = rank_counts_numpy
    autocov = autocov_numpy
    ar1_chain = ar1_chain_numpy
    lsv_orbit = lsv_orbit_numpy
