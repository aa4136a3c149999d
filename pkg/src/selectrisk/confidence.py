"""Confidence-rate functions computed from raw prediction dumps.

Two rates are supported. Softmax response takes the maximum of the
(possibly softmax-normalized) class-score vector. The MC-dropout rate takes
the per-example matrix of T stochastic forward-pass response vectors, finds
the most probable class by the mean response across passes, and returns
minus the sample variance of that class's responses: zero variance means
maximal confidence, so higher (closer to 0) is still more confident.

Top-k 0/1 losses are computed here as well, with score ties broken toward
the lower class index so results are reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ProbabilityError
from .selective import ScoredDataset, ScoredExample

PROBABILITY_SUM_TOL = 1e-6

KAPPA_KINDS = ("softmax-response", "mc-dropout", "precomputed")
_KAPPA_ALIASES = {"sr": "softmax-response", "softmax-response": "softmax-response",
                  "mc-dropout": "mc-dropout", "precomputed": "precomputed"}


@dataclass(frozen=True)
class PredictionRecord:
    """Raw per-example class scores (logits or probabilities) plus label."""

    scores: np.ndarray
    label: int
    id: str | None = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1 or scores.size < 2:
            raise DomainError("scores must be a 1-d vector with at least 2 classes")
        if not np.isfinite(scores).all():
            raise DomainError("scores must be finite")
        if not (isinstance(self.label, (int, np.integer)) and not isinstance(self.label, bool)):
            raise DomainError(f"label must be an integer, got {self.label!r}")
        if not 0 <= self.label < scores.size:
            raise DomainError(
                f"label {self.label} out of range for {scores.size} classes"
            )
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "label", int(self.label))

    @property
    def num_classes(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class McDropoutRecord:
    """T x C matrix of per-pass softmax response vectors plus label."""

    passes: np.ndarray
    label: int
    id: str | None = None

    def __post_init__(self):
        passes = np.asarray(self.passes, dtype=np.float64)
        if passes.ndim != 2:
            raise DomainError("passes must be a T x C matrix")
        t, c = passes.shape
        if t < 2:
            raise DomainError(f"mc-dropout needs at least 2 passes (T >= 2), got T={t}")
        if c < 2:
            raise DomainError(f"passes rows need at least 2 classes, got C={c}")
        if not np.isfinite(passes).all():
            raise DomainError("passes must be finite")
        if not (isinstance(self.label, (int, np.integer)) and not isinstance(self.label, bool)):
            raise DomainError(f"label must be an integer, got {self.label!r}")
        if not 0 <= self.label < c:
            raise DomainError(f"label {self.label} out of range for {c} classes")
        passes.setflags(write=False)
        object.__setattr__(self, "passes", passes)
        object.__setattr__(self, "label", int(self.label))

    @property
    def num_classes(self) -> int:
        return int(self.passes.shape[1])


def softmax(scores) -> np.ndarray:
    """Max-shifted softmax; positive, sums to 1, shift-invariant."""
    x = np.asarray(scores, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("softmax expects a 1-d vector with at least 2 entries")
    if not np.isfinite(x).all():
        raise DomainError("softmax input must be finite")
    e = np.exp(x - x.max())
    return e / e.sum()


def softmax_response(rec: PredictionRecord, already_probabilities: bool = False) -> float:
    """Maximum softmax output across classes; lies in [1/C, 1].

    With ``already_probabilities`` the scores are validated as a
    distribution (nonnegative, summing to 1 within 1e-6) and used as-is;
    otherwise they are treated as logits and normalized first.
    """
    if already_probabilities:
        if (rec.scores < 0).any():
            raise ProbabilityError("scores flagged as probabilities but contain negatives")
        total = float(rec.scores.sum())
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ProbabilityError(
                f"scores flagged as probabilities but sum to {total!r}"
            )
        p = rec.scores
    else:
        p = softmax(rec.scores)
    return float(p.max())


def mc_dropout_kappa(rec: McDropoutRecord) -> float:
    """Minus the unbiased variance of the most-probable-class responses.

    The class is the argmax of the mean response across passes (ties go to
    the lowest index). Always <= 0; equals 0 iff that column is constant.
    """
    means = rec.passes.mean(axis=0)
    j_star = int(np.argmax(means))
    col = rec.passes[:, j_star]
    if (col == col[0]).all():
        return 0.0
    dev = col - col.mean()
    # sum of squares keeps the estimate nonnegative by construction
    variance = float(dev @ dev) / (col.size - 1)
    return -variance


def _topk_hit(scores: np.ndarray, label: int, k: int) -> bool:
    # total order: score descending, class index ascending on ties
    order = np.argsort(-scores, kind="stable")
    return label in order[:k]


def topk_loss(rec: PredictionRecord, k: int) -> int:
    """0 iff the label is among the k highest scores, else 1.

    Ties are broken deterministically by (score descending, index
    ascending).
    """
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= rec.num_classes):
        raise DomainError(
            f"k must satisfy 1 <= k <= C={rec.num_classes}, got {k!r}"
        )
    return 0 if _topk_hit(rec.scores, rec.label, int(k)) else 1


def parse_loss_kind(loss_kind: str) -> int | None:
    """Resolve a loss-kind token to its k, or None for 'precomputed'.

    Accepted tokens: ``top1``, ``top5``, ``topk:K`` (K a positive integer)
    and ``precomputed``.
    """
    token = loss_kind.strip().lower()
    if token == "precomputed":
        return None
    if token == "top1":
        return 1
    if token == "top5":
        return 5
    if token.startswith("topk:"):
        try:
            k = int(token.split(":", 1)[1])
        except ValueError:
            raise DomainError(f"bad top-k loss kind {loss_kind!r}") from None
        if k < 1:
            raise DomainError(f"top-k needs k >= 1, got {k}")
        return k
    raise DomainError(
        f"unknown loss kind {loss_kind!r}; expected top1, top5, topk:K or precomputed"
    )


def normalize_kappa_kind(kappa_kind: str) -> str:
    try:
        return _KAPPA_ALIASES[kappa_kind.strip().lower()]
    except KeyError:
        raise DomainError(
            f"unknown kappa kind {kappa_kind!r}; expected sr, mc-dropout or precomputed"
        ) from None


def score_dataset(
    records: Sequence,
    kappa_kind: str,
    loss_kind: str,
    already_probabilities: bool = False,
) -> ScoredDataset:
    """Turn raw records into a ScoredDataset, preserving ids and order.

    Record kinds must be homogeneous and consistent with ``kappa_kind``:
    prediction records with softmax-response, mc-dropout records with
    mc-dropout, scored examples with precomputed. For mc-dropout records
    the top-k loss is computed on the mean response vector across passes.
    Per-record failures are re-raised with the record index attached.
    """
    records = list(records)
    kind = normalize_kappa_kind(kappa_kind)
    k = parse_loss_kind(loss_kind)

    expected_type = {
        "softmax-response": PredictionRecord,
        "mc-dropout": McDropoutRecord,
        "precomputed": ScoredExample,
    }[kind]
    for i, rec in enumerate(records):
        if not isinstance(rec, expected_type):
            raise DomainError(
                f"record {i}: expected {expected_type.__name__} for "
                f"kappa kind {kind!r}, got {type(rec).__name__}"
            )

    if kind == "precomputed":
        if k is not None:
            raise DomainError("precomputed kappa requires precomputed loss")
        return ScoredDataset.from_examples(records)
    if k is None:
        raise DomainError(f"kappa kind {kind!r} requires a top-k loss kind")

    kappas = np.empty(len(records), dtype=np.float64)
    losses = np.empty(len(records), dtype=np.int64)
    ids = []
    for i, rec in enumerate(records):
        try:
            if kind == "softmax-response":
                kappas[i] = softmax_response(rec, already_probabilities)
                losses[i] = topk_loss(rec, k)
            else:
                kappas[i] = mc_dropout_kappa(rec)
                mean_scores = rec.passes.mean(axis=0)
                if not 1 <= k <= rec.num_classes:
                    raise DomainError(
                        f"k must satisfy 1 <= k <= C={rec.num_classes}, got {k}"
                    )
                losses[i] = 0 if _topk_hit(mean_scores, rec.label, k) else 1
        except Exception as exc:
            ident = f" (id={rec.id!r})" if rec.id is not None else ""
            raise type(exc)(f"record {i}{ident}: {exc}") from exc
        ids.append(rec.id)
    return ScoredDataset(
        kappas, losses, ids=ids if any(i is not None for i in ids) else None
    )
