"""Synthetic scored data with known ground truth, and Monte-Carlo validation
of the calibration guarantee.

Each synthetic family draws kappa ~ Uniform(0, 1) and loss ~ Bernoulli(e(kappa))
with a nonincreasing error-probability curve e : [0, 1] -> [0, 1], so the
true selective risk at any threshold has a closed form (or a cheap
quadrature) and the guarantee can be checked against exact values instead
of a second noisy sample. Sampling uses numpy's PCG64 generator, seeded and
documented, so runs replicate bit for bit; kappas are drawn first, then the
loss uniforms. Trial t of a validation run derives its stream from
``seed XOR t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateSelectionError, DomainError
from .selective import ScoredDataset
from .sgr import CalibrationReport, SgrRequest, sgr_calibrate

KINDS = ("linear-error", "logistic-error", "constant-error")

LOGISTIC_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class SyntheticDistribution:
    """A sampleable (kappa, loss) population with known error curve.

    kinds and params:
      * ``linear-error``   (a,):        e(kappa) = a * (1 - kappa), 0 <= a <= 1
      * ``logistic-error`` (level, steepness, midpoint):
                            e(kappa) = level / (1 + exp(steepness * (kappa - midpoint)))
      * ``constant-error`` (c,):        e(kappa) = c, 0 <= c <= 1
    """

    kind: str
    params: tuple[float, ...]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "linear-error":
            if len(self.params) != 1 or not 0.0 <= self.params[0] <= 1.0:
                raise DomainError("linear-error takes one parameter a in [0, 1]")
        elif self.kind == "constant-error":
            if len(self.params) != 1 or not 0.0 <= self.params[0] <= 1.0:
                raise DomainError("constant-error takes one parameter c in [0, 1]")
        else:
            if len(self.params) != 3:
                raise DomainError(
                    "logistic-error takes (level, steepness, midpoint)"
                )
            level, steepness, _ = self.params
            if not 0.0 <= level <= 1.0:
                raise DomainError("logistic level must lie in [0, 1]")
            if steepness < 0.0:
                raise DomainError(
                    "logistic steepness must be >= 0 so the error curve is nonincreasing"
                )
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise DomainError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def error_probability(self, kappa):
        """e(kappa), vectorized; nonincreasing in kappa by construction."""
        kappa = np.asarray(kappa, dtype=np.float64)
        if self.kind == "linear-error":
            return self.params[0] * (1.0 - kappa)
        if self.kind == "constant-error":
            return np.full_like(kappa, self.params[0])
        level, steepness, midpoint = self.params
        return level / (1.0 + np.exp(steepness * (kappa - midpoint)))


@dataclass(frozen=True)
class GuaranteeTrial:
    """One calibration trial checked against the analytic true risk."""

    trial: int
    report: CalibrationReport
    true_selective_risk: float
    violated: bool


@dataclass(frozen=True)
class GuaranteeSummary:
    """Aggregate of a validation run; rate counts feasible trials only."""

    violation_rate: float
    feasible_trials: int
    infeasible_trials: int
    delta: float
    trials: int
    seed: int
    trial_log: tuple[GuaranteeTrial, ...]

    def to_dict(self) -> dict:
        return {
            "violation_rate": self.violation_rate,
            "feasible_trials": self.feasible_trials,
            "infeasible_trials": self.infeasible_trials,
            "delta": self.delta,
            "trials": self.trials,
            "seed": self.seed,
        }


def sample_dataset(dist: SyntheticDistribution, m: int) -> ScoredDataset:
    """Draw m i.i.d. scored examples; deterministic given dist.seed."""
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    rng = np.random.Generator(np.random.PCG64(dist.seed))
    kappas = rng.random(int(m))
    losses = (rng.random(int(m)) < dist.error_probability(kappas)).astype(np.int64)
    return ScoredDataset(kappas, losses)


def true_selective_risk(dist: SyntheticDistribution, theta: float) -> float:
    """E[e(kappa) | kappa >= theta] under kappa ~ Uniform(0, 1).

    Closed form for the linear and constant families; adaptive quadrature
    (absolute tolerance 1e-10) for the logistic family. Raises when the
    acceptance region has zero mass (theta >= 1).
    """
    if not (isinstance(theta, (int, float)) and math.isfinite(theta)):
        raise DomainError(f"theta must be finite, got {theta!r}")
    if theta >= 1.0:
        raise DegenerateSelectionError(
            f"P(kappa >= {theta}) = 0 under Uniform(0, 1); selective risk undefined"
        )
    t = max(float(theta), 0.0)
    if dist.kind == "constant-error":
        return dist.params[0]
    if dist.kind == "linear-error":
        # integral of a(1 - x) over [t, 1] is a(1 - t)^2 / 2; divide by mass 1 - t
        return dist.params[0] * (1.0 - t) / 2.0
    integral, _ = quad(
        lambda x: float(dist.error_probability(x)),
        t,
        1.0,
        epsabs=LOGISTIC_QUAD_TOL,
        epsrel=1e-12,
        limit=200,
    )
    return integral / (1.0 - t)


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial stream seed: seed XOR trial index."""
    return int(seed) ^ int(trial)


def validate_guarantee(
    dist: SyntheticDistribution,
    m: int,
    r_star: float,
    delta: float,
    trials: int,
) -> GuaranteeSummary:
    """Calibrate on `trials` fresh samples and count bound violations.

    Each feasible report's threshold is scored against the analytic true
    selective risk; a violation means that risk exceeds the certified
    bound. The violation rate is the violating fraction of feasible trials
    (0.0 when none were feasible); infeasible trials are counted
    separately, never as violations.
    """
    if not isinstance(trials, (int, np.integer)) or isinstance(trials, bool) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    log: list[GuaranteeTrial] = []
    feasible = 0
    violations = 0
    for t in range(int(trials)):
        trial_dist = replace(dist, seed=trial_seed(dist.seed, t))
        data = sample_dataset(trial_dist, m)
        report = sgr_calibrate(SgrRequest(data, r_star, delta))
        risk = true_selective_risk(dist, report.theta)
        violated = risk > report.bound
        if report.feasible:
            feasible += 1
            violations += int(violated)
        log.append(GuaranteeTrial(t, report, risk, violated))
    rate = violations / feasible if feasible else 0.0
    return GuaranteeSummary(
        violation_rate=rate,
        feasible_trials=feasible,
        infeasible_trials=int(trials) - feasible,
        delta=delta,
        trials=int(trials),
        seed=dist.seed,
        trial_log=tuple(log),
    )
