"""Selection with guaranteed risk (SGR): certified threshold calibration.

Given scored calibration data, a target risk r* and a confidence delta, the
procedure sorts the examples by confidence (nondecreasing) and binary
searches the sorted index range for the lowest threshold whose certified
risk bound beats r*. Each of the ceil(log2 m) probes evaluates the exact
binomial bound on its accepted set at confidence delta / ceil(log2 m), the
union-bound split that makes every probed bound hold simultaneously with
probability at least 1 - delta. The returned iterate is the feasible probe
with the largest coverage; the full probe trace is part of the report, so
the final-iterate output of the plain bisection remains available as
``trace[-1]``.

Infeasibility (no probe certifies below r*) is a first-class outcome, not
an error: the report flags it and carries the most conservative probed
iterate (the highest threshold).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import BoundQuery, solve_b_star
from .errors import DomainError
from .selective import ScoredDataset, SelectiveMetrics, selective_metrics


@dataclass(frozen=True)
class SgrRequest:
    """Calibration inputs: scored data, target risk r*, confidence delta."""

    data: ScoredDataset
    r_star: float
    delta: float

    def __post_init__(self):
        if len(self.data) == 0:
            raise DomainError("calibration data must be nonempty")
        if not (isinstance(self.r_star, (int, float)) and 0.0 < self.r_star < 1.0):
            raise DomainError(f"r_star must lie in (0, 1), got {self.r_star!r}")
        if not (isinstance(self.delta, (int, float)) and 0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")


@dataclass(frozen=True)
class SgrIteration:
    """One probe of the search: index, threshold, metrics, certified bound."""

    i: int
    z: int
    theta: float
    train_risk: float
    train_coverage: float
    accepted: int
    errors: int
    bound: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "z": self.z,
            "theta": self.theta,
            "train_risk": self.train_risk,
            "train_coverage": self.train_coverage,
            "accepted": self.accepted,
            "errors": self.errors,
            "bound": self.bound,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class CalibrationReport:
    """Chosen threshold, its certified bound, and the full probe trace."""

    theta: float
    bound: float
    train_risk: float
    train_coverage: float
    feasible: bool
    delta: float
    r_star: float
    k_iterations: int
    trace: tuple[SgrIteration, ...]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "bound": self.bound,
            "train_risk": self.train_risk,
            "train_coverage": self.train_coverage,
            "feasible": self.feasible,
            "delta": self.delta,
            "r_star": self.r_star,
            "k_iterations": self.k_iterations,
            "trace": [it.to_dict() for it in self.trace],
        }


def _ceil_log2(m: int) -> int:
    # exact ceil(log2 m) for m >= 1, no float round-off
    return (m - 1).bit_length()


def sgr_calibrate(req: SgrRequest) -> CalibrationReport:
    """Run the guaranteed-risk threshold search and report the result.

    The search keeps a bracket [z_min, z_max] over sorted indices,
    initialized to [1, m], and runs exactly ceil(log2 m) probes at
    z = ceil((z_min + z_max) / 2): a feasible bound moves z_max down to z
    (lower thresholds, more coverage), an infeasible one moves z_min up.
    Probe metrics always come from the true accepted set {kappa >= theta},
    so tied scores are never split. With probability at least 1 - delta
    over the calibration sample, the true selective risk at the returned
    threshold is at most the returned bound.
    """
    data = req.data if req.data.sorted_flag else req.data.sorted()
    kappas = data.kappas
    losses = data.losses
    m = len(data)
    k_iter = _ceil_log2(m)

    if k_iter == 0:
        # single example: no probes are possible; report the vacuous bound
        return CalibrationReport(
            theta=float(kappas[0]),
            bound=1.0,
            train_risk=float(losses[0]),
            train_coverage=1.0,
            feasible=False,
            delta=req.delta,
            r_star=req.r_star,
            k_iterations=0,
            trace=(),
        )

    suffix_errors = np.zeros(m + 1, dtype=np.int64)
    suffix_errors[:m] = np.cumsum(losses[::-1])[::-1]
    delta_i = req.delta / k_iter

    trace: list[SgrIteration] = []
    z_min, z_max = 1, m
    for i in range(1, k_iter + 1):
        z = (z_min + z_max + 1) // 2
        theta = float(kappas[z - 1])
        lo = int(np.searchsorted(kappas, theta, side="left"))
        accepted = m - lo
        errors = int(suffix_errors[lo])
        result = solve_b_star(BoundQuery(accepted, errors, delta_i))
        feasible = result.b_star < req.r_star
        trace.append(
            SgrIteration(
                i=i,
                z=z,
                theta=theta,
                train_risk=errors / accepted,
                train_coverage=accepted / m,
                accepted=accepted,
                errors=errors,
                bound=result.b_star,
                feasible=feasible,
            )
        )
        if feasible:
            z_max = z
        else:
            z_min = z

    feasible_iters = [it for it in trace if it.feasible]
    if feasible_iters:
        chosen = max(feasible_iters, key=lambda it: it.train_coverage)
        overall_feasible = True
    else:
        chosen = max(trace, key=lambda it: it.theta)
        overall_feasible = False

    return CalibrationReport(
        theta=chosen.theta,
        bound=chosen.bound,
        train_risk=chosen.train_risk,
        train_coverage=chosen.train_coverage,
        feasible=overall_feasible,
        delta=req.delta,
        r_star=req.r_star,
        k_iterations=k_iter,
        trace=tuple(trace),
    )


def evaluate(report: CalibrationReport, test: ScoredDataset) -> SelectiveMetrics:
    """Apply a calibrated threshold to held-out data; read-only."""
    if len(test) == 0:
        raise DomainError("test data must be nonempty")
    return selective_metrics(test, report.theta)
