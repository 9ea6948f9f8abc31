import logging
import math
from typing import List, Sequence, Union

from pydantic import ValidationError

from app.core.exceptions import DegenerateHypothesisError, UsageError
from app.schemas.confidence import ConfidenceMeasure, Decision, ThresholdPolicy
from app.schemas.hmm import TokenPosterior

logger = logging.getLogger(__name__)


def score_value(score: float, measure: ConfidenceMeasure, word: str = "") -> float:
    """
    Giá trị của đại lượng đo tính từ điểm của một giả thuyết

    Chỉ áp dụng cho các đại lượng đo được trên từng giả thuyết (prob, surprisal, pentropy).
    """
    if measure is ConfidenceMeasure.PROBABILITY:
        return score
    if score <= 0.0:
        raise DegenerateHypothesisError(word)
    if measure is ConfidenceMeasure.SURPRISAL:
        return -math.log2(score) + 0.0
    if measure is ConfidenceMeasure.ENTROPY_CONTRIBUTION:
        return -score * math.log2(score) + 0.0
    raise UsageError(f"measure {measure.value} is not defined per hypothesis")


def measure_value(posterior: TokenPosterior, measure: ConfidenceMeasure) -> float:
    """
    Giá trị đại lượng đo của nhãn được chọn

    Args:
        posterior: Hậu nghiệm đã chuẩn hóa của token
        measure: Đại lượng đo

    Returns:
        prob -> p; surprisal -> -log2(p); pentropy -> -p*log2(p);
        margin -> p trừ điểm lớn thứ hai (1 nếu chỉ có một giả thuyết);
        ratio -> điểm lớn thứ hai chia p (0 nếu chỉ có một giả thuyết)
    """
    p = posterior.chosen_score
    if measure.per_hypothesis:
        return score_value(p, measure, posterior.word)

    if p <= 0.0:
        raise DegenerateHypothesisError(posterior.word)
    if len(posterior.hypotheses) < 2:
        return 1.0 if measure is ConfidenceMeasure.MARGIN else 0.0
    runner_up = sorted(score for _, score in posterior.hypotheses)[-2]
    if measure is ConfidenceMeasure.MARGIN:
        return p - runner_up
    return runner_up / p


def apply_policy(posteriors: Sequence[TokenPosterior], policy: ThresholdPolicy) -> List[Decision]:
    """Quyết định chấp nhận/loại bỏ cho từng token; token chỉ có một giả thuyết luôn được chấp nhận"""
    decisions = []
    for index, posterior in enumerate(posteriors):
        value = measure_value(posterior, policy.measure)
        accepted = len(posterior.hypotheses) < 2 or policy.accepts(value)
        decisions.append(Decision(index=index, tag=posterior.chosen_tag, value=value, accepted=accepted))
    return decisions


def margin_to_prob_threshold(n: float) -> float:
    """Ngưỡng xác suất tương đương với ngưỡng hiệu n trên token hai giả thuyết"""
    return (n + 1.0) / 2.0


def ratio_to_prob_threshold(r: float) -> float:
    """Ngưỡng xác suất tương đương với ngưỡng tỉ số r trên token hai giả thuyết"""
    return 1.0 / (1.0 + r)


def make_policy(measure: Union[ConfidenceMeasure, str], threshold: float) -> ThresholdPolicy:
    """Tạo ThresholdPolicy; ngưỡng ngoài miền hợp lệ là lỗi sử dụng"""
    try:
        return ThresholdPolicy(measure=ConfidenceMeasure(measure), threshold=threshold)
    except ValueError as e:
        if isinstance(e, ValidationError):
            message = "; ".join(err["msg"] for err in e.errors())
        else:
            message = str(e)
        raise UsageError(message) from None
