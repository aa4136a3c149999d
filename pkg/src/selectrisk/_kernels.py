"""Hot numeric kernels: log-space binomial tail evaluation and its inversion.

Two interchangeable backends compute the same three functions:

* ``numba`` -- scalar loops jitted with ``@njit`` (default when numba imports),
* ``numpy`` -- vectorized fallback on numpy + scipy.special.

Select one explicitly with the ``SELECTRISK_BACKEND`` environment variable
("numba" or "numpy"); the flag is read once at import time. The active choice
is exposed as ``BACKEND``. Both backends stay importable (when available) so
tests and benchmarks can compare them directly.

The tail P(X <= k) for X ~ Binomial(m, b) is summed in log space: binomial
log-coefficients come from log-gamma, and the terms are accumulated with a
max-shifted exponential sum, so m up to 1e6 evaluates without underflow.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln

ENV_VAR = "SELECTRISK_BACKEND"


def _backend_request() -> str:
    raw = os.environ.get(ENV_VAR, "auto").strip().lower()
    if raw in ("", "auto"):
        return "auto"
    if raw in ("numba", "jit"):
        return "numba"
    if raw in ("numpy", "nojit"):
        return "numpy"
    raise RuntimeError(
        f"unrecognized {ENV_VAR}={raw!r}; expected 'numba' or 'numpy'"
    )


_request = _backend_request()

HAS_NUMBA = False
if _request in ("auto", "numba"):
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        if _request == "numba":
            raise
        HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def log_binom_coeffs_numpy(m: int, k: int) -> np.ndarray:
    """log C(m, j) for j = 0..k, via log-gamma."""
    j = np.arange(k + 1, dtype=np.float64)
    return gammaln(m + 1.0) - gammaln(j + 1.0) - gammaln(m - j + 1.0)


def binom_tail_numpy(lc: np.ndarray, m: int, b: float) -> float:
    """P(X <= k) for X ~ Binomial(m, b) with 0 < b < 1, k = len(lc) - 1."""
    j = np.arange(lc.shape[0], dtype=np.float64)
    lt = lc + j * math.log(b) + (m - j) * math.log1p(-b)
    hi = float(lt.max())
    s = float(np.exp(lt - hi).sum())
    t = math.exp(hi + math.log(s))
    return min(1.0, max(0.0, t))


def solve_bisect_numpy(
    lc: np.ndarray, m: int, delta: float, tol: float, max_iter: int
) -> tuple[float, float, int]:
    """Bisect for the b with tail(b) = delta; tail is strictly decreasing.

    Runs until the bracket is narrower than ``tol`` (or ``max_iter``), then
    returns (midpoint, achieved residual, iteration count).
    """
    lo, hi = 0.0, 1.0
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        it += 1
        if binom_tail_numpy(lc, m, mid) > delta:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    return mid, abs(binom_tail_numpy(lc, m, mid) - delta), it


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def log_binom_coeffs_numba(m: int, k: int) -> np.ndarray:
        lc = np.empty(k + 1, dtype=np.float64)
        lgm = math.lgamma(m + 1.0)
        for j in range(k + 1):
            lc[j] = lgm - math.lgamma(j + 1.0) - math.lgamma(m - j + 1.0)
        return lc

    @njit(cache=True)
    def binom_tail_numba(lc: np.ndarray, m: int, b: float) -> float:
        # streaming max-shifted log-sum-exp; single pass, no temporaries
        lb = math.log(b)
        l1mb = math.log1p(-b)
        run_max = -math.inf
        acc = 0.0
        for j in range(lc.shape[0]):
            lt = lc[j] + j * lb + (m - j) * l1mb
            if lt <= run_max:
                acc += math.exp(lt - run_max)
            else:
                acc = acc * math.exp(run_max - lt) + 1.0
                run_max = lt
        t = math.exp(run_max + math.log(acc))
        if t > 1.0:
            return 1.0
        if t < 0.0:
            return 0.0
        return t

    @njit(cache=True)
    def solve_bisect_numba(
        lc: np.ndarray, m: int, delta: float, tol: float, max_iter: int
    ) -> tuple[float, float, int]:
        lo = 0.0
        hi = 1.0
        it = 0
        while hi - lo > tol and it < max_iter:
            mid = 0.5 * (lo + hi)
            it += 1
            if binom_tail_numba(lc, m, mid) > delta:
                lo = mid
            else:
                hi = mid
        mid = 0.5 * (lo + hi)
        return mid, abs(binom_tail_numba(lc, m, mid) - delta), it

else:
    log_binom_coeffs_numba = None
    binom_tail_numba = None
    solve_bisect_numba = None


if BACKEND == "numba":
    log_binom_coeffs = log_binom_coeffs_numba
    binom_tail_from_coeffs = binom_tail_numba
    solve_bisect = solve_bisect_numba
else:
    log_binom_coeffs = log_binom_coeffs_numpy
    binom_tail_from_coeffs = binom_tail_numpy
    solve_bisect = solve_bisect_numpy
