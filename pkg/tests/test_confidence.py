import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import selectrisk as sr
from selectrisk import (
    DomainError,
    McDropoutRecord,
    PredictionRecord,
    ProbabilityError,
    ScoredExample,
)

# e^i / (e^1 + e^2 + e^3), frozen from a 40-digit evaluation
SOFTMAX_123 = (0.09003057317038046, 0.24472847105479764, 0.6652409557748219)


class TestSoftmax:
    def test_uniform_on_zeros(self):
        np.testing.assert_allclose(sr.softmax([0, 0, 0, 0]), 0.25, atol=1e-15)

    def test_constant_vector_is_uniform(self):
        np.testing.assert_allclose(sr.softmax([7.3] * 5), 0.2, atol=1e-15)

    def test_frozen_high_precision_values(self):
        np.testing.assert_allclose(sr.softmax([1, 2, 3]), SOFTMAX_123, atol=1e-12)

    @given(
        st.lists(st.floats(-50, 50), min_size=2, max_size=20),
        st.floats(-100, 100),
    )
    @settings(max_examples=100, deadline=None)
    def test_sums_to_one_and_shift_invariant(self, xs, c):
        p = sr.softmax(xs)
        assert abs(p.sum() - 1.0) <= 1e-12
        shifted = sr.softmax(np.asarray(xs) + c)
        np.testing.assert_allclose(p, shifted, atol=1e-12)

    def test_rejects_short_or_nonfinite(self):
        with pytest.raises(DomainError):
            sr.softmax([1.0])
        with pytest.raises(DomainError):
            sr.softmax([1.0, float("inf")])


class TestSoftmaxResponse:
    def test_uniform_probability_lower_bound(self):
        rec = PredictionRecord([0.25, 0.25, 0.25, 0.25], 0)
        assert sr.softmax_response(rec, already_probabilities=True) == 0.25

    def test_certain_probability(self):
        rec = PredictionRecord([0, 0, 1, 0], 2)
        assert sr.softmax_response(rec, already_probabilities=True) == 1.0

    def test_logits_use_softmax(self):
        rec = PredictionRecord([1, 2, 3], 2)
        assert sr.softmax_response(rec) == pytest.approx(SOFTMAX_123[2], abs=1e-12)

    def test_invalid_probability_vector(self):
        rec = PredictionRecord([0.5, 0.2, 0.2], 0)
        with pytest.raises(ProbabilityError):
            sr.softmax_response(rec, already_probabilities=True)
        rec = PredictionRecord([-0.1, 0.6, 0.5], 0)
        with pytest.raises(ProbabilityError):
            sr.softmax_response(rec, already_probabilities=True)

    @given(st.lists(st.floats(-30, 30), min_size=2, max_size=12), st.integers(0, 11))
    @settings(max_examples=100, deadline=None)
    def test_range(self, scores, label):
        label = min(label, len(scores) - 1)
        rec = PredictionRecord(scores, label)
        kappa = sr.softmax_response(rec)
        c = len(scores)
        assert 1 / c - 1e-12 <= kappa <= 1.0 + 1e-12


class TestMcDropoutKappa:
    def test_identical_rows_give_zero(self):
        rec = McDropoutRecord([[0.2, 0.8], [0.2, 0.8], [0.2, 0.8]], 1)
        assert sr.mc_dropout_kappa(rec) == 0.0

    def test_two_pass_hand_computed_variance(self):
        # j* is column 1 (mean 0.5 > 0.3); its values {0.4, 0.6} have
        # unbiased variance ((0.1)^2 + (0.1)^2) / 1 = 0.02
        rec = McDropoutRecord([[0.3, 0.4], [0.3, 0.6]], 1)
        assert sr.mc_dropout_kappa(rec) == pytest.approx(-0.02, abs=1e-15)

    def test_column_permutation_moves_jstar(self):
        passes = np.array([[0.7, 0.1, 0.2], [0.5, 0.3, 0.2]])
        rec = McDropoutRecord(passes, 0)
        permuted = McDropoutRecord(passes[:, [2, 0, 1]], 0)
        assert sr.mc_dropout_kappa(rec) == sr.mc_dropout_kappa(permuted)

    def test_always_nonpositive(self, rng):
        for _ in range(50):
            passes = rng.random((int(rng.integers(2, 10)), int(rng.integers(2, 6))))
            rec = McDropoutRecord(passes, 0)
            assert sr.mc_dropout_kappa(rec) <= 0.0

    def test_single_pass_rejected(self):
        with pytest.raises(DomainError):
            McDropoutRecord([[0.2, 0.8]], 0)


class TestTopkLoss:
    def test_k_equals_c_never_loses(self, rng):
        for _ in range(20):
            c = int(rng.integers(2, 8))
            rec = PredictionRecord(rng.normal(size=c), int(rng.integers(0, c)))
            assert sr.topk_loss(rec, c) == 0

    def test_argmax_correct(self):
        rec = PredictionRecord([0.1, 0.7, 0.2], 1)
        assert sr.topk_loss(rec, 1) == 0

    def test_tie_broken_to_lower_index(self):
        rec = PredictionRecord([0.5, 0.5, 0.0], 1)
        assert sr.topk_loss(rec, 1) == 1
        rec = PredictionRecord([0.5, 0.5, 0.0], 0)
        assert sr.topk_loss(rec, 1) == 0

    def test_monotone_in_k(self, rng):
        for _ in range(50):
            c = int(rng.integers(2, 10))
            rec = PredictionRecord(rng.normal(size=c), int(rng.integers(0, c)))
            losses = [sr.topk_loss(rec, k) for k in range(1, c + 1)]
            assert all(a >= b for a, b in zip(losses, losses[1:]))

    def test_k_out_of_range(self):
        rec = PredictionRecord([0.1, 0.9], 0)
        with pytest.raises(DomainError):
            sr.topk_loss(rec, 0)
        with pytest.raises(DomainError):
            sr.topk_loss(rec, 3)


class TestScoreDataset:
    def test_single_correct_record(self):
        ds = sr.score_dataset([PredictionRecord([0.1, 2.0], 1)], "sr", "top1")
        assert list(ds.losses) == [0]
        assert len(ds) == 1

    def test_empty_input_gives_empty_dataset(self):
        ds = sr.score_dataset([], "sr", "top1")
        assert len(ds) == 0

    def test_mixed_fixture_hand_enumerated(self):
        records = [
            PredictionRecord([0.7, 0.2, 0.1], 0, id="a"),  # correct, kappa 0.7
            PredictionRecord([0.6, 0.3, 0.1], 1, id="b"),  # wrong at top-1
            PredictionRecord([0.2, 0.5, 0.3], 1, id="c"),  # correct
            PredictionRecord([0.2, 0.3, 0.5], 0, id="d"),  # wrong at top-1 and top-2
        ]
        ds = sr.score_dataset(records, "sr", "top1", already_probabilities=True)
        assert list(ds.kappas) == [0.7, 0.6, 0.5, 0.5]
        assert list(ds.losses) == [0, 1, 0, 1]
        assert ds.ids == ("a", "b", "c", "d")
        top2 = sr.score_dataset(records, "sr", "topk:2", already_probabilities=True)
        assert list(top2.losses) == [0, 0, 0, 1]

    def test_mc_dropout_records(self):
        records = [
            McDropoutRecord([[0.8, 0.2], [0.8, 0.2]], 0),  # zero variance, correct
            McDropoutRecord([[0.3, 0.7], [0.5, 0.5]], 0),  # mean favors class 1, wrong
        ]
        ds = sr.score_dataset(records, "mc-dropout", "top1")
        assert ds.kappas[0] == 0.0
        assert ds.kappas[1] < 0.0
        assert list(ds.losses) == [0, 1]

    def test_precomputed_passthrough(self):
        examples = [ScoredExample(0.4, 1), ScoredExample(0.9, 0)]
        ds = sr.score_dataset(examples, "precomputed", "precomputed")
        assert list(ds.kappas) == [0.4, 0.9]

    def test_heterogeneous_records_rejected(self):
        with pytest.raises(DomainError):
            sr.score_dataset(
                [PredictionRecord([0.1, 0.9], 0), ScoredExample(0.5, 0)], "sr", "top1"
            )

    def test_error_carries_record_index(self):
        records = [
            PredictionRecord([0.4, 0.3, 0.3], 0, id="ok"),
            PredictionRecord([0.5, 0.5], 1, id="bad"),  # only 2 classes
        ]
        with pytest.raises(DomainError, match=r"record 1 \(id='bad'\)"):
            sr.score_dataset(records, "sr", "topk:3")

    def test_kind_mismatch_rejected(self):
        with pytest.raises(DomainError):
            sr.score_dataset([PredictionRecord([0.1, 0.9], 0)], "mc-dropout", "top1")


class TestRankingSemantics:
    def test_accepted_set_family_invariant_under_monotone_transform(self, rng):
        kappas = rng.normal(size=40)
        losses = rng.integers(0, 2, size=40)
        ds = sr.ScoredDataset(kappas, losses)

        def family(dataset):
            out = set()
            for theta in np.unique(dataset.kappas):
                mask = dataset.kappas >= theta
                out.add(frozenset(np.flatnonzero(mask).tolist()))
            return out

        for transform in (lambda x: 3 * x + 1, np.tanh, lambda x: x**3, np.exp):
            transformed = sr.ScoredDataset(transform(kappas), losses)
            assert family(ds) == family(transformed)
