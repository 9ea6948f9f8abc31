import math

import numpy as np
import pytest

from app.core.exceptions import DeadEndTokenError, EmptyInputError, ModelFormatError
from app.schemas.hmm import TagRecord
from app.services.hmm_model import HmmModel, Tagset
from app.services.hmm_service import (
    emission_posteriors,
    forward_backward,
    path_log_probability,
    sequence_likelihood,
    viterbi,
)
from tests.utils import enumerate_paths, enumerated_marginals, path_weight, random_model, random_sentence


def test_one_word_posterior(two_tag_model):
    (posterior,) = forward_backward(two_tag_model, ["x"])
    assert posterior.hypotheses[0][0] == "A"
    assert posterior.hypotheses[0][1] == pytest.approx(2 / 3, abs=1e-12)
    assert posterior.hypotheses[1][1] == pytest.approx(1 / 3, abs=1e-12)
    assert posterior.chosen_tag == "A"


def test_single_tag_words_are_certain(two_tag_model):
    posteriors = forward_backward(two_tag_model, ["y", "z", "y"])
    assert [p.chosen_tag for p in posteriors] == ["A", "B", "A"]
    assert all(p.chosen_score == 1.0 for p in posteriors)
    assert not any(p.ambiguous for p in posteriors)


def test_viterbi_one_word(two_tag_model):
    assert viterbi(two_tag_model, ["x"]) == ["A"]
    assert viterbi(two_tag_model, ["y", "z"]) == ["A", "B"]


def test_sequence_likelihood_one_word(two_tag_model):
    assert sequence_likelihood(two_tag_model, ["x"]) == pytest.approx(math.log(0.15), abs=1e-12)


def test_sequence_likelihood_single_path(two_tag_model):
    expected = math.log(0.5 * 0.8) + math.log(0.5 * 0.9)
    assert sequence_likelihood(two_tag_model, ["y", "z"]) == pytest.approx(expected, abs=1e-12)


def test_tie_breaks_to_lowest_tag_index(tie_model):
    (posterior,) = forward_backward(tie_model, ["x"])
    assert posterior.chosen_tag == "A"
    assert viterbi(tie_model, ["x"]) == ["A"]


def test_empty_sentence_rejected(two_tag_model):
    for decode in (forward_backward, viterbi, sequence_likelihood):
        with pytest.raises(EmptyInputError, match="empty input"):
            decode(two_tag_model, [])


def test_dead_end_token():
    tagset = Tagset.from_names(["A", "B"])
    # A luôn chuyển sang A, nhưng 'b' chỉ có nhãn B
    model = HmmModel.from_mapping(
        tagset,
        initial=[1.0, 0.0],
        transitions=[[1.0, 0.0], [0.0, 1.0]],
        emissions={"a": {"A": 1.0}, "b": {"B": 1.0}},
    )
    with pytest.raises(DeadEndTokenError, match="dead-end token") as info:
        forward_backward(model, ["a", "b"])
    assert info.value.position == 1
    assert info.value.word == "b"
    with pytest.raises(DeadEndTokenError):
        viterbi(model, ["a", "b"])
    # Dự phòng theo phát xạ vẫn cho kết quả
    assert [p.chosen_tag for p in emission_posteriors(model, ["a", "b"])] == ["A", "B"]


def test_unknown_word_gets_open_class_tags():
    tagset = Tagset.from_names(["DT", "NN", "VB"], closed=["DT"])
    model = HmmModel.from_mapping(
        tagset,
        initial=[0.6, 0.2, 0.2],
        transitions=[[0.0, 0.9, 0.1], [0.1, 0.3, 0.6], [0.5, 0.4, 0.1]],
        emissions={"the": {"DT": 1.0}, "dog": {"NN": 1.0}},
    )
    posteriors = forward_backward(model, ["the", "blorp"])
    assert [t for t, _ in posteriors[1].hypotheses] == ["NN", "VB"]
    assert posteriors[1].unknown
    assert posteriors[1].ambiguous
    assert posteriors[1].chosen_tag == "NN"
    assert sum(s for _, s in posteriors[1].hypotheses) == pytest.approx(1.0, abs=1e-12)


def test_unknown_word_single_open_tag_is_still_ambiguous():
    tagset = Tagset.from_names(["DT", "NN"], closed=["DT"])
    model = HmmModel.from_mapping(
        tagset, [0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]], {"the": {"DT": 1.0}}
    )
    (posterior,) = forward_backward(model, ["cat"])
    assert posterior.hypotheses == [("NN", 1.0)]
    assert posterior.ambiguous


@pytest.mark.slow
def test_forward_backward_matches_enumeration(rng):
    for _ in range(50):
        model = random_model(rng, int(rng.integers(2, 5)), 6)
        sentence = random_sentence(rng, model, int(rng.integers(1, 9)))
        marginals = enumerated_marginals(model, sentence)
        posteriors = forward_backward(model, sentence)
        assert len(posteriors) == len(sentence)
        for t, posterior in enumerate(posteriors):
            assert sum(s for _, s in posterior.hypotheses) == pytest.approx(1.0, abs=1e-9)
            for tag, score in posterior.hypotheses:
                assert abs(score - marginals[t, model.tagset.index(tag)]) <= 1e-9
            hypothesis_tags = {tag for tag, _ in posterior.hypotheses}
            assert hypothesis_tags == set(model.lexicon_tags(sentence[t]))


@pytest.mark.slow
def test_viterbi_matches_enumeration(rng):
    for _ in range(50):
        model = random_model(rng, int(rng.integers(2, 5)), 6)
        sentence = random_sentence(rng, model, int(rng.integers(1, 9)))
        _, weights = enumerate_paths(model, sentence)
        best = weights.max()
        path = [model.tagset.index(t) for t in viterbi(model, sentence)]
        assert path_weight(model, sentence, path) == pytest.approx(best, rel=1e-12)
        assert path_log_probability(model, sentence, viterbi(model, sentence)) == pytest.approx(
            math.log(best), rel=1e-12
        )


@pytest.mark.slow
def test_sequence_likelihood_matches_enumeration(rng):
    for _ in range(50):
        model = random_model(rng, int(rng.integers(2, 5)), 6)
        sentence = random_sentence(rng, model, int(rng.integers(1, 9)))
        _, weights = enumerate_paths(model, sentence)
        assert sequence_likelihood(model, sentence) == pytest.approx(math.log(weights.sum()), abs=1e-9)


def test_long_sentence_does_not_underflow(rng):
    model = random_model(rng, 4, 20)
    sentence = random_sentence(rng, model, 2000)
    posteriors = forward_backward(model, sentence)
    assert len(posteriors) == 2000
    assert all(abs(sum(s for _, s in p.hypotheses) - 1.0) <= 1e-9 for p in posteriors)
    assert np.isfinite(sequence_likelihood(model, sentence))
    assert len(viterbi(model, sentence)) == 2000


def test_emission_scaling_leaves_posteriors_unchanged(rng):
    model = random_model(rng, 3, 8)
    sentence = random_sentence(rng, model, 6)
    scaled = HmmModel(
        model.tagset, model.initial, model.transitions, model.vocabulary, model.emission_matrix * 0.25
    )
    original = forward_backward(model, sentence)
    rescaled = forward_backward(scaled, sentence)
    for p, q in zip(original, rescaled):
        assert p.chosen == q.chosen
        for (_, a), (_, b) in zip(p.hypotheses, q.hypotheses):
            assert a == pytest.approx(b, abs=1e-12)


def test_decoding_is_deterministic(rng):
    model = random_model(rng, 4, 10)
    sentence = random_sentence(rng, model, 12)
    assert forward_backward(model, sentence) == forward_backward(model, sentence)
    assert viterbi(model, sentence) == viterbi(model, sentence)


def test_tagset_invariants():
    with pytest.raises(ModelFormatError, match="unique"):
        Tagset([TagRecord(name="A"), TagRecord(name="A")])
    with pytest.raises(ModelFormatError, match="open-class"):
        Tagset.from_names(["A", "B"], closed=["A", "B"])
    with pytest.raises(ModelFormatError, match="empty"):
        Tagset([])


@pytest.mark.parametrize(
    "initial, transitions, emissions, message",
    [
        ([0.5, 0.4], [[0.5, 0.5], [0.5, 0.5]], {"x": {"A": 1.0}}, "initial"),
        ([0.5, 0.5], [[0.6, 0.5], [0.5, 0.5]], {"x": {"A": 1.0}}, "transition row"),
        ([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]], {"x": {"A": 1.5}}, r"\[0, 1\]"),
        ([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]], {"x": {"A": 0.0}}, "no tag with positive"),
        ([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]], {"x": {"C": 1.0}}, "unknown tag"),
    ],
)
def test_model_invariants(initial, transitions, emissions, message):
    with pytest.raises(ModelFormatError, match=message):
        HmmModel.from_mapping(Tagset.from_names(["A", "B"]), initial, transitions, emissions)


def test_model_arrays_are_read_only(two_tag_model):
    with pytest.raises(ValueError):
        two_tag_model.transitions[0, 0] = 1.0
