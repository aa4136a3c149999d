"""Selective-classification data model: scored examples, threshold selection,
empirical selective risk / coverage, and risk-coverage curves.

A scored example pairs a confidence score kappa (higher = more confident)
with a 0/1 loss. A threshold theta induces the selection rule "accept iff
kappa >= theta"; ties at equality are accepted. Selective risk is the error
rate among accepted examples, coverage the accepted fraction. Only the
ordering of kappa matters: any strictly increasing transform of the scores
induces the same family of accepted sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError

# Thresholds are plain floats; the alias keeps signatures self-describing.
Threshold = float


@dataclass(frozen=True)
class ScoredExample:
    """One calibration/test point: confidence score and 0/1 loss."""

    kappa: float
    loss: int
    id: str | None = None

    def __post_init__(self):
        if not (isinstance(self.kappa, (int, float)) and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be finite, got {self.kappa!r}")
        if self.loss not in (0, 1):
            raise DomainError(f"loss must be 0 or 1, got {self.loss!r}")
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "loss", int(self.loss))


class ScoredDataset:
    """An ordered collection of scored examples, array-backed.

    ``sorted_flag`` certifies the kappa values are nondecreasing; it is
    verified at construction. Datasets may be empty (projections can empty
    out); calibration rejects empty data at its own entry point.
    """

    __slots__ = ("kappas", "losses", "ids", "sorted_flag")

    def __init__(
        self,
        kappas,
        losses,
        ids: Sequence[str | None] | None = None,
        sorted_flag: bool = False,
    ):
        kappas = np.asarray(kappas, dtype=np.float64)
        losses = np.asarray(losses, dtype=np.int64)
        if kappas.ndim != 1 or losses.ndim != 1 or kappas.shape != losses.shape:
            raise DomainError("kappas and losses must be 1-d arrays of equal length")
        if kappas.size and not np.isfinite(kappas).all():
            raise DomainError("kappa values must all be finite")
        if losses.size and not np.isin(losses, (0, 1)).all():
            raise DomainError("loss values must all be 0 or 1")
        if ids is not None:
            ids = tuple(ids)
            if len(ids) != kappas.size:
                raise DomainError("ids length must match the number of examples")
        if sorted_flag and kappas.size > 1 and not (np.diff(kappas) >= 0).all():
            raise DomainError("sorted_flag set but kappa values are not nondecreasing")
        kappas.setflags(write=False)
        losses.setflags(write=False)
        self.kappas = kappas
        self.losses = losses
        self.ids = ids
        self.sorted_flag = bool(sorted_flag)

    @classmethod
    def from_examples(cls, examples, sorted_flag: bool = False) -> "ScoredDataset":
        examples = list(examples)
        ids = [ex.id for ex in examples]
        return cls(
            [ex.kappa for ex in examples],
            [ex.loss for ex in examples],
            ids=ids if any(i is not None for i in ids) else None,
            sorted_flag=sorted_flag,
        )

    def __len__(self) -> int:
        return int(self.kappas.size)

    def __iter__(self) -> Iterator[ScoredExample]:
        for i in range(len(self)):
            yield ScoredExample(
                float(self.kappas[i]),
                int(self.losses[i]),
                self.ids[i] if self.ids is not None else None,
            )

    @property
    def examples(self) -> tuple[ScoredExample, ...]:
        return tuple(self)

    def sorted(self) -> "ScoredDataset":
        """Copy with examples in nondecreasing kappa order (stable)."""
        order = np.argsort(self.kappas, kind="stable")
        ids = tuple(self.ids[i] for i in order) if self.ids is not None else None
        return ScoredDataset(self.kappas[order], self.losses[order], ids, sorted_flag=True)


@dataclass(frozen=True)
class SelectiveMetrics:
    """Empirical selective risk/coverage at one threshold.

    ``degenerate`` marks an empty accepted set, where risk is reported as
    0 by convention and carries no information.
    """

    risk: float
    coverage: float
    accepted: int
    errors_accepted: int
    degenerate: bool = False


@dataclass(frozen=True)
class RiskCoveragePoint:
    """One (theta, coverage, risk) sample of the risk-coverage curve."""

    theta: float
    coverage: float
    risk: float


def _check_theta(theta: float) -> float:
    if not (isinstance(theta, (int, float)) and math.isfinite(theta)):
        raise DomainError(f"theta must be finite, got {theta!r}")
    return float(theta)


def select(theta: Threshold, x_kappa: float) -> int:
    """Accept (1) iff x_kappa >= theta, else reject (0)."""
    _check_theta(theta)
    if not (isinstance(x_kappa, (int, float)) and math.isfinite(x_kappa)):
        raise DomainError(f"kappa must be finite, got {x_kappa!r}")
    return 1 if x_kappa >= theta else 0


def selective_metrics(data: ScoredDataset, theta: Threshold) -> SelectiveMetrics:
    """Risk and coverage of the accepted set {kappa >= theta}.

    Identity: risk * accepted == errors_accepted (risk is the exact float
    quotient errors_accepted / accepted).
    """
    theta = _check_theta(theta)
    if len(data) == 0:
        raise DomainError("dataset must be nonempty")
    mask = data.kappas >= theta
    accepted = int(mask.sum())
    errors = int(data.losses[mask].sum())
    coverage = accepted / len(data)
    if accepted == 0:
        return SelectiveMetrics(0.0, 0.0, 0, 0, degenerate=True)
    return SelectiveMetrics(errors / accepted, coverage, accepted, errors)


def g_projection(data: ScoredDataset, theta: Threshold) -> ScoredDataset:
    """The accepted subset {kappa >= theta}, preserving input order."""
    theta = _check_theta(theta)
    if len(data) == 0:
        raise DomainError("dataset must be nonempty")
    mask = data.kappas >= theta
    ids = (
        tuple(i for i, keep in zip(data.ids, mask) if keep)
        if data.ids is not None
        else None
    )
    return ScoredDataset(
        data.kappas[mask], data.losses[mask], ids, sorted_flag=data.sorted_flag
    )


def risk_coverage_curve(data: ScoredDataset) -> list[RiskCoveragePoint]:
    """Exact risk-coverage curve, one point per distinct kappa value.

    Thresholds sweep the distinct kappas in descending order, so coverage is
    strictly increasing along the output; the last point (theta = min kappa)
    is the full-coverage point. Each point's risk/coverage equals
    ``selective_metrics`` at that theta.
    """
    if len(data) == 0:
        raise DomainError("dataset must be nonempty")
    order = np.argsort(data.kappas, kind="stable")
    kappas = data.kappas[order]
    losses = data.losses[order]
    m = kappas.size
    # errors among examples with kappa >= kappas[i]
    suffix_errors = np.zeros(m + 1, dtype=np.int64)
    suffix_errors[:m] = np.cumsum(losses[::-1])[::-1]
    distinct, first_idx = np.unique(kappas, return_index=True)
    points = []
    for value, lo in zip(distinct[::-1], first_idx[::-1]):
        accepted = m - int(lo)
        errors = int(suffix_errors[lo])
        points.append(
            RiskCoveragePoint(float(value), accepted / m, errors / accepted)
        )
    return points
