import math

import numpy as np
import pytest

from app.core.exceptions import EmptyInputError, ZeroLikelihoodError
from app.services.corpus_service import parse_tagged, train_model
from app.services.hmm_model import HmmModel, Tagset
from app.services.hmm_service import baum_welch, baum_welch_trace, sample_corpus, sequence_likelihood
from tests.utils import random_model


@pytest.mark.slow
def test_log_likelihood_is_monotone(rng):
    for _ in range(10):
        model = random_model(rng, int(rng.integers(2, 5)), 12)
        source = random_model(rng, model.n_tags, 12)
        raw = [[w for w, _ in s] for s in sample_corpus(source, 40, 8, rng).sentences]

        result = baum_welch_trace(model, raw, max_iters=20, tol=-math.inf)
        trace = result.log_likelihoods
        assert len(trace) == 21
        assert all(b >= a - 1e-8 for a, b in zip(trace, trace[1:]))

        refined = result.model
        assert np.allclose(refined.initial.sum(), 1.0, atol=1e-9)
        assert np.all(np.abs(refined.transitions.sum(axis=1) - 1.0) <= 1e-9)


def test_trace_matches_sequence_likelihood(rng):
    model = random_model(rng, 3, 10)
    raw = [[w for w, _ in s] for s in sample_corpus(model, 20, 6, rng).sentences]
    result = baum_welch_trace(model, raw, max_iters=3, tol=-math.inf)
    assert result.log_likelihoods[0] == pytest.approx(sum(sequence_likelihood(model, s) for s in raw), abs=1e-9)
    assert result.log_likelihoods[-1] == pytest.approx(
        sum(sequence_likelihood(result.model, s) for s in raw), abs=1e-9
    )


def test_fixed_point_on_unambiguous_training_data():
    corpus = parse_tagged("a/X b/Y c/X\nb/Y a/X\nc/X c/X b/Y\n")
    model = train_model(corpus)
    result = baum_welch_trace(model, corpus.words(), max_iters=5, tol=1e-12)
    changes = np.diff(result.log_likelihoods)
    assert np.all(changes >= -1e-8)
    assert np.all(np.abs(changes) < 1e-9)
    assert result.converged
    assert np.allclose(result.model.transitions, model.transitions, atol=1e-12)
    assert np.allclose(result.model.emission_matrix, model.emission_matrix, atol=1e-12)


def test_input_model_is_not_mutated(rng):
    model = random_model(rng, 3, 8)
    before = (model.initial.copy(), model.transitions.copy(), model.emission_matrix.copy())
    raw = [[w for w, _ in s] for s in sample_corpus(model, 10, 5, rng).sentences]
    refined = baum_welch(model, raw, max_iters=3, tol=0.0)
    assert isinstance(refined, HmmModel)
    assert np.array_equal(model.initial, before[0])
    assert np.array_equal(model.transitions, before[1])
    assert np.array_equal(model.emission_matrix, before[2])


def test_stops_when_improvement_below_tolerance(rng):
    model = random_model(rng, 3, 8)
    raw = [[w for w, _ in s] for s in sample_corpus(model, 10, 5, rng).sentences]
    result = baum_welch_trace(model, raw, max_iters=50, tol=1e6)
    assert result.iterations == 1
    assert result.converged


def test_zero_likelihood_sentence_is_reported():
    tagset = Tagset.from_names(["A", "B"])
    model = HmmModel.from_mapping(
        tagset,
        initial=[1.0, 0.0],
        transitions=[[1.0, 0.0], [0.0, 1.0]],
        emissions={"a": {"A": 1.0}, "b": {"B": 1.0}},
    )
    with pytest.raises(ZeroLikelihoodError, match="sentence 1") as info:
        baum_welch(model, [["a"], ["a", "b"]], max_iters=2, tol=0.0)
    assert info.value.sentence_index == 1


def test_empty_raw_corpus_rejected(two_tag_model):
    with pytest.raises(EmptyInputError):
        baum_welch(two_tag_model, [], max_iters=2, tol=0.0)


def test_unknown_words_keep_constant_emission():
    corpus = parse_tagged("the/DT dog/NN\nthe/DT cat/NN\n")
    model = train_model(corpus, closed_tags=["DT"])
    refined = baum_welch(model, [["the", "dog"], ["the", "zebra"]], max_iters=2, tol=0.0)
    assert not refined.knows("zebra")
    assert refined.lexicon_tags("zebra") == ["NN"]
