import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llmdetect.ensemble import (EnsembleSpec, ExternalScores, Voter,
                                dump_scores, parse_external_scores,
                                rank_average, soft_vote, tune_weights,
                                weight_grid)
from llmdetect.errors import EnsembleError


class TestSoftVote:
    def test_single_voter_identity(self):
        scores = [0.1, 0.9, 0.4]
        out = soft_vote([scores], [2.5])
        np.testing.assert_array_equal(out, scores)

    def test_equal_weights_mean(self):
        out = soft_vote([[0.2], [0.8]], [1.0, 1.0])
        assert out[0] == 0.5

    def test_weighted_mean_hand_computed(self):
        out = soft_vote([[0.0], [1.0]], [1.0, 3.0])
        assert out[0] == 0.75

    def test_scale_invariance_is_bit_exact(self):
        # weights are chosen so that c * w is itself exact in binary
        # floating point; combination happens in exact rationals, so only
        # the (projective) weight vector matters
        rng = np.random.default_rng(3)
        scores = [rng.random(50).tolist() for _ in range(3)]
        weights = [1.0, 2.5, 0.25]
        base = soft_vote(scores, weights)
        for c in (0.5, 3.0, 100.0):
            scaled = soft_vote(scores, [c * w for w in weights])
            np.testing.assert_array_equal(scaled, base)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        scores = [rng.random(20).tolist() for _ in range(3)]
        weights = [1.0, 2.0, 3.0]
        base = soft_vote(scores, weights)
        permuted = soft_vote([scores[2], scores[0], scores[1]],
                             [weights[2], weights[0], weights[1]])
        np.testing.assert_allclose(permuted, base, atol=1e-12)

    @given(st.lists(st.lists(st.floats(0, 1, allow_nan=False), min_size=4,
                             max_size=4), min_size=1, max_size=4),
           st.lists(st.floats(0.01, 10, allow_nan=False), min_size=4,
                    max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_convexity_property(self, score_lists, raw_weights):
        weights = raw_weights[:len(score_lists)]
        out = soft_vote(score_lists, weights)
        per_doc = np.array(score_lists)
        assert np.all(out >= per_doc.min(axis=0))
        assert np.all(out <= per_doc.max(axis=0))

    def test_four_voters_hand_computed_on_five_documents(self):
        # three "internal" probability lists and one "external" list,
        # weights (1,1,1,3); expectations computed by scalar arithmetic
        from fractions import Fraction
        voters = [[0.1, 0.5, 0.9, 0.3, 0.7],
                  [0.2, 0.4, 0.8, 0.2, 0.6],
                  [0.0, 0.5, 1.0, 0.5, 0.5],
                  [1.0, 0.0, 1.0, 0.0, 1.0]]
        weights = [1.0, 1.0, 1.0, 3.0]
        out = soft_vote(voters, weights)
        for d in range(5):
            expected = sum(Fraction(w) * Fraction(voters[v][d])
                           for v, w in enumerate(weights)) / Fraction(6)
            assert out[d] == float(expected)

    def test_all_zero_weights_rejected(self):
        with pytest.raises(EnsembleError):
            soft_vote([[0.5]], [0.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(EnsembleError):
            soft_vote([[0.5], [0.1, 0.2]], [1.0, 1.0])


class TestRankAverage:
    def test_single_voter_preserves_order(self):
        scores = [0.3, 0.1, 0.9, 0.5]
        out = rank_average([scores], [1.0])
        assert list(np.argsort(out)) == list(np.argsort(scores))

    def test_opposite_rankings_tie_at_half(self):
        out = rank_average([[0.1, 0.2, 0.3], [0.9, 0.8, 0.7]], [1.0, 1.0])
        np.testing.assert_array_equal(out, [0.5, 0.5, 0.5])

    def test_identical_voters_reproduce_ranking(self):
        scores = [0.4, 0.8, 0.1]
        out = rank_average([scores, scores], [1.0, 2.0])
        np.testing.assert_array_equal(out, [0.5, 1.0, 0.0])

    def test_ties_get_mid_rank(self):
        out = rank_average([[0.5, 0.5, 0.1]], [1.0])
        np.testing.assert_array_equal(out, [0.75, 0.75, 0.0])

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(8)
        a = rng.random(15).tolist()
        b = rng.random(15).tolist()
        base = rank_average([a, b], [1.0, 2.0])
        squashed = rank_average([list(np.tanh(np.array(a) * 4)), b], [1.0, 2.0])
        np.testing.assert_array_equal(squashed, base)

    def test_needs_two_documents(self):
        with pytest.raises(EnsembleError):
            rank_average([[0.5]], [1.0])


class TestExternalScores:
    def test_parse_and_align(self):
        ext = parse_external_scores("id,score\nd1,0.9\nd2,0.1\n")
        assert ext.scores == {"d1": 0.9, "d2": 0.1}
        np.testing.assert_array_equal(ext.aligned(["d2", "d1"]), [0.1, 0.9])

    def test_out_of_range_rejected(self):
        with pytest.raises(EnsembleError, match="outside"):
            parse_external_scores("id,score\nd1,1.5\n")

    def test_duplicate_id_rejected(self):
        with pytest.raises(EnsembleError, match="duplicate id 'd1'"):
            parse_external_scores("id,score\nd1,0.5\nd1,0.6\n")

    def test_missing_ids_listed(self):
        ext = parse_external_scores("id,score\nd1,0.5\n")
        with pytest.raises(EnsembleError, match="d2"):
            ext.aligned(["d1", "d2"])

    def test_dump_round_trips(self):
        ids = ["a", "b,with comma", "c"]
        scores = [0.125, 1 / 3, 0.999999999999]
        text = dump_scores(ids, scores)
        ext = parse_external_scores(text)
        assert ext.scores == dict(zip(ids, scores))


class TestSpecValidation:
    def test_voter_needs_exactly_one_source(self):
        with pytest.raises(EnsembleError):
            Voter(weight=1.0)
        with pytest.raises(EnsembleError):
            Voter(weight=1.0, bundle=object(),
                  external=ExternalScores(scores={}))

    def test_negative_weight_rejected(self):
        with pytest.raises(EnsembleError):
            Voter(weight=-1.0, external=ExternalScores(scores={}))

    def test_spec_needs_positive_weight(self):
        voter = Voter(weight=0.0, external=ExternalScores(scores={}))
        with pytest.raises(EnsembleError):
            EnsembleSpec(voters=[voter])

    def test_unknown_combiner_rejected(self):
        voter = Voter(weight=1.0, external=ExternalScores(scores={}))
        with pytest.raises(EnsembleError):
            EnsembleSpec(voters=[voter], combine="median")


class TestRunEnsemble:
    def test_inconsistent_vocab_hashes_rejected(self):
        from llmdetect.corpus import synth_corpus
        from llmdetect.ensemble import run_ensemble
        from llmdetect.models import ModelBundle

        corpus = synth_corpus(3, seed=1, divergence=0.5)
        spec = EnsembleSpec(voters=[
            Voter(weight=1.0, bundle=ModelBundle(
                kind="naive_bayes", model=None, tfidf=None, vocab_ref="aaa")),
            Voter(weight=1.0, bundle=ModelBundle(
                kind="naive_bayes", model=None, tfidf=None, vocab_ref="bbb")),
        ])
        with pytest.raises(EnsembleError, match="disagree"):
            run_ensemble(spec, corpus)


class TestWeightTuning:
    def test_grid_sums_to_one(self):
        grid = weight_grid(3, step=0.5)
        assert all(abs(sum(w) - 1.0) < 1e-9 for w in grid)
        assert (1.0, 0.0, 0.0) in grid

    def test_too_many_voters_rejected(self):
        with pytest.raises(EnsembleError):
            weight_grid(5)

    def test_tuning_finds_the_good_voter(self):
        labels = [1, 1, 1, 0, 0, 0]
        perfect = [0.9, 0.8, 0.7, 0.2, 0.1, 0.3]
        inverted = [0.1, 0.2, 0.3, 0.9, 0.8, 0.7]
        weights, auc = tune_weights([perfect, inverted], labels, step=0.5)
        assert auc == 1.0
        assert weights == (1.0, 0.0)
