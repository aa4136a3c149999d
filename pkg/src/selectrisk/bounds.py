"""Exact binomial tail bound on true risk, and its numerical inversion.

Given k observed errors out of m held-out trials and a confidence parameter
delta, the certified upper bound b* is the unique b in (0, 1) solving

    P(X <= k) = delta,   X ~ Binomial(m, b).

The true error rate exceeds b* with probability below delta. The tail is
continuous and strictly decreasing in b for k < m, so bisection always
converges; for k = m the tail is identically 1 and the vacuous bound b* = 1
is returned. An analytic Hoeffding-style bound is provided for slack
comparison only; it never certifies anything here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError

BISECT_TOL = 1e-12
MAX_BISECT_ITER = 200


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of a bound inversion: m trials, k errors, confidence delta."""

    m: int
    k: int
    delta: float

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or isinstance(self.m, bool) or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool):
            raise DomainError(f"k must be an integer, got {self.k!r}")
        if not 0 <= self.k <= self.m:
            raise DomainError(f"k must satisfy 0 <= k <= m, got k={self.k}, m={self.m}")
        if not (isinstance(self.delta, (int, float)) and 0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class BoundResult:
    """Solved bound b*, the residual |tail(b*) - delta|, and iteration count."""

    b_star: float
    residual: float
    iterations: int


def binomial_tail(m: int, k: int, b: float) -> float:
    """P(X <= k) for X ~ Binomial(m, b), evaluated in log space.

    Log-binomial coefficients come from log-gamma and the k + 1 terms are
    accumulated with a max-shifted exponential sum, so m up to 1e6 evaluates
    without underflow. The result is clamped to [0, 1].
    """
    q = BoundQuery(m, k, 0.5)  # reuses the m/k validation; delta unused
    if not (isinstance(b, (int, float)) and math.isfinite(b) and 0.0 <= b <= 1.0):
        raise DomainError(f"b must lie in [0, 1], got {b!r}")
    if q.k == q.m:
        return 1.0
    if b == 0.0:
        return 1.0
    if b == 1.0:
        return 0.0
    lc = _kernels.log_binom_coeffs(q.m, q.k)
    return float(_kernels.binom_tail_from_coeffs(lc, q.m, float(b)))


def solve_b_star(q: BoundQuery) -> BoundResult:
    """Invert the binomial tail: the b in (0, 1) with tail(m, k, b) = delta.

    Bisection on the bracket [0, 1] until its width is below 1e-12; the
    bracket never loses the root because the tail is strictly decreasing in
    b for k < m. For k = m no solution exists (the tail is identically 1)
    and the vacuous bound 1.0 is returned.
    """
    if q.k == q.m:
        return BoundResult(b_star=1.0, residual=0.0, iterations=0)
    lc = _kernels.log_binom_coeffs(q.m, q.k)
    b, residual, iterations = _kernels.solve_bisect(
        lc, q.m, float(q.delta), BISECT_TOL, MAX_BISECT_ITER
    )
    return BoundResult(b_star=float(b), residual=float(residual), iterations=int(iterations))


def hoeffding_b(q: BoundQuery) -> float:
    """Analytic comparison bound k/m + sqrt(ln(1/delta) / (2m)).

    Reported only to quantify the slack of concentration-inequality bounds
    relative to the exact inversion; never used for certification.
    """
    return q.k / q.m + math.sqrt(math.log(1.0 / q.delta) / (2.0 * q.m))
