import math

import pytest

from app.core.exceptions import DegenerateHypothesisError, UsageError
from app.schemas.confidence import MAX_ENTROPY_CONTRIBUTION, ConfidenceMeasure, ThresholdPolicy
from app.schemas.hmm import TokenPosterior
from app.services.confidence_service import (
    apply_policy,
    make_policy,
    margin_to_prob_threshold,
    measure_value,
    ratio_to_prob_threshold,
)

PROB = ConfidenceMeasure.PROBABILITY
SURPRISAL = ConfidenceMeasure.SURPRISAL
PENTROPY = ConfidenceMeasure.ENTROPY_CONTRIBUTION
MARGIN = ConfidenceMeasure.MARGIN
RATIO = ConfidenceMeasure.RATIO


def posterior(*scores, word="w", unknown=False):
    hypotheses = [(f"T{k}", s) for k, s in enumerate(scores)]
    chosen = max(range(len(scores)), key=lambda k: (scores[k], -k))
    return TokenPosterior(word=word, hypotheses=hypotheses, chosen=chosen, unknown=unknown)


def two_hypotheses(p):
    return posterior(p, 1.0 - p) if p >= 0.5 else posterior(1.0 - p, p)


def test_certain_token():
    certain = posterior(1.0)
    assert measure_value(certain, PROB) == 1.0
    assert measure_value(certain, SURPRISAL) == 0.0
    assert measure_value(certain, PENTROPY) == 0.0
    assert measure_value(certain, MARGIN) == 1.0
    assert measure_value(certain, RATIO) == 0.0


def test_paired_table_thresholds():
    token = posterior(0.629, 0.371)
    assert measure_value(token, PENTROPY) == pytest.approx(0.4207, abs=5e-5)
    assert measure_value(token, SURPRISAL) == pytest.approx(0.6689, abs=5e-5)


@pytest.mark.parametrize("p, tabulated", [(0.629, 0.420), (0.577, 0.455), (0.710, 0.349)])
def test_entropy_contribution_matches_tabulated_thresholds(p, tabulated):
    value = -p * math.log2(p)
    assert abs(value - tabulated) < 0.004


def test_margin_and_ratio():
    token = posterior(0.7, 0.3)
    assert measure_value(token, MARGIN) == pytest.approx(0.4)
    assert measure_value(token, RATIO) == pytest.approx(0.3 / 0.7)
    three = posterior(0.2, 0.5, 0.3)
    assert measure_value(three, MARGIN) == pytest.approx(0.2)


def test_degenerate_chosen_hypothesis():
    token = TokenPosterior(word="odd", hypotheses=[("A", 0.0), ("B", 0.0)], chosen=0)
    assert measure_value(token, PROB) == 0.0
    for measure in (SURPRISAL, PENTROPY):
        with pytest.raises(DegenerateHypothesisError, match="degenerate chosen hypothesis"):
            measure_value(token, measure)


def test_threshold_zero_accepts_everything():
    tokens = [posterior(0.5, 0.5), posterior(0.9, 0.1), posterior(1.0)]
    decisions = apply_policy(tokens, ThresholdPolicy(measure=PROB, threshold=0.0))
    assert all(d.accepted for d in decisions)
    assert [d.index for d in decisions] == [0, 1, 2]


def test_boundary_is_inclusive():
    (decision,) = apply_policy([posterior(0.629, 0.371)], ThresholdPolicy(measure=PROB, threshold=0.629))
    assert decision.accepted
    assert decision.tag == "T0"


def test_single_hypothesis_never_rejected():
    tokens = [posterior(1.0, word="unknown", unknown=True)]
    for measure, threshold in ((PROB, 1.0), (MARGIN, 1.0), (SURPRISAL, 0.0), (PENTROPY, 0.0), (RATIO, 0.0)):
        (decision,) = apply_policy(tokens, ThresholdPolicy(measure=measure, threshold=threshold))
        assert decision.accepted


def test_rejects_low_confidence():
    decisions = apply_policy(
        [posterior(0.55, 0.45), posterior(0.95, 0.05)], ThresholdPolicy(measure=PROB, threshold=0.9)
    )
    assert [d.accepted for d in decisions] == [False, True]


def test_threshold_conversions():
    assert margin_to_prob_threshold(0.0) == 0.5
    assert margin_to_prob_threshold(1.0) == 1.0
    assert margin_to_prob_threshold(0.258) == pytest.approx(0.629)
    assert ratio_to_prob_threshold(1.0) == 0.5
    assert ratio_to_prob_threshold(0.0) == 1.0


@pytest.mark.slow
def test_margin_equivalent_to_probability_on_two_hypotheses(rng):
    for _ in range(10000):
        token = two_hypotheses(float(rng.uniform(0.0, 1.0)))
        n = float(rng.uniform(0.0, 1.0))
        by_margin = apply_policy([token], ThresholdPolicy(measure=MARGIN, threshold=n))
        by_prob = apply_policy([token], ThresholdPolicy(measure=PROB, threshold=margin_to_prob_threshold(n)))
        assert by_margin[0].accepted == by_prob[0].accepted


@pytest.mark.slow
def test_ratio_equivalent_to_probability_on_two_hypotheses(rng):
    for _ in range(10000):
        token = two_hypotheses(float(rng.uniform(0.0, 1.0)))
        r = float(rng.uniform(0.0, 1.0))
        by_ratio = apply_policy([token], ThresholdPolicy(measure=RATIO, threshold=r))
        by_prob = apply_policy([token], ThresholdPolicy(measure=PROB, threshold=ratio_to_prob_threshold(r)))
        assert by_ratio[0].accepted == by_prob[0].accepted


@pytest.mark.slow
def test_surprisal_equivalent_to_probability(rng):
    for _ in range(10000):
        scores = rng.dirichlet([1.0] * int(rng.integers(2, 5)))
        token = posterior(*[float(s) for s in scores])
        t = float(rng.uniform(0.05, 1.0))
        by_surprisal = apply_policy([token], ThresholdPolicy(measure=SURPRISAL, threshold=-math.log2(t)))
        by_prob = apply_policy([token], ThresholdPolicy(measure=PROB, threshold=t))
        assert by_surprisal[0].accepted == by_prob[0].accepted


def test_entropy_contribution_equivalent_above_one_half(rng):
    for _ in range(2000):
        token = two_hypotheses(float(rng.uniform(0.5, 1.0)))
        t = float(rng.uniform(0.5, 1.0))
        by_entropy = apply_policy([token], ThresholdPolicy(measure=PENTROPY, threshold=-t * math.log2(t)))
        by_prob = apply_policy([token], ThresholdPolicy(measure=PROB, threshold=t))
        assert by_entropy[0].accepted == by_prob[0].accepted


def test_rejection_sets_are_nested(rng):
    tokens = [two_hypotheses(float(p)) for p in rng.uniform(0.0, 1.0, size=300)]
    previous = None
    for threshold in sorted(rng.uniform(0.0, 1.0, size=20)):
        rejected = {d.index for d in apply_policy(tokens, ThresholdPolicy(measure=PROB, threshold=float(threshold))) if not d.accepted}
        if previous is not None:
            assert previous <= rejected
        previous = rejected


@pytest.mark.parametrize(
    "measure, threshold",
    [("prob", 1.5), ("prob", -0.1), ("margin", 2.0), ("surprisal", -1.0), ("pentropy", 0.6), ("ratio", 1.1)],
)
def test_out_of_range_threshold_is_usage_error(measure, threshold):
    with pytest.raises(UsageError, match="out of range"):
        make_policy(measure, threshold)


def test_nan_threshold_rejected():
    with pytest.raises(UsageError):
        make_policy("prob", float("nan"))


def test_accept_all_thresholds():
    assert ThresholdPolicy.accept_all(PROB).threshold == -math.inf
    assert ThresholdPolicy.accept_all(SURPRISAL).threshold == math.inf
    assert ThresholdPolicy.accept_all(PENTROPY).accepts(MAX_ENTROPY_CONTRIBUTION)
    assert make_policy("surprisal", math.inf).accepts(1e300)
    assert ThresholdPolicy.accept_all(PROB).model_dump(mode="json")["threshold"] == "-inf"
