import logging
import os
from typing import List, Optional, Sequence, Tuple

from sklearn.utils import gen_even_slices
from sklearn.utils.parallel import Parallel, delayed

from app.core.config import settings
from app.core.exceptions import DeadEndTokenError, EmptyInputError
from app.schemas.confidence import ConfidenceMeasure, ThresholdPolicy
from app.schemas.hmm import TokenPosterior
from app.services.confidence_service import apply_policy
from app.services.hmm_model import HmmModel
from app.services.hmm_service import emission_posteriors, forward_backward

logger = logging.getLogger(__name__)


def _decode_chunk(
    model: HmmModel,
    sentences: Sequence[Sequence[str]],
    offset: int,
    strict: bool,
) -> List[List[TokenPosterior]]:
    result = []
    for k, sentence in enumerate(sentences):
        index = offset + k
        try:
            result.append(forward_backward(model, sentence))
        except DeadEndTokenError as e:
            if strict:
                raise e.in_sentence(index) from None
            # Câu không có đường đi hợp lệ: gán nhãn theo phát xạ, bỏ qua ngữ cảnh
            logger.warning(f"Câu {index}: {e}; gán nhãn tốt nhất có thể theo phát xạ")
            result.append(emission_posteriors(model, sentence))
        except EmptyInputError:
            raise EmptyInputError(f"empty input: sentence {index}") from None
    return result


def decode_sentences(
    model: HmmModel,
    sentences: Sequence[Sequence[str]],
    n_jobs: int = 1,
    strict: bool = True,
) -> List[List[TokenPosterior]]:
    """
    Chạy Forward-Backward cho từng câu, giữ nguyên thứ tự đầu vào

    Args:
        model: Mô hình HMM
        sentences: Các câu (danh sách từ)
        n_jobs: Số tiến trình; > 1 thì chia câu thành các khối giải mã song song
        strict: True thì câu ngõ cụt là lỗi (kèm chỉ số câu); False thì gán nhãn theo phát xạ và cảnh báo

    Returns:
        Danh sách hậu nghiệm theo từng câu
    """
    if n_jobs == -1:
        n_jobs = os.cpu_count() or 1
    if n_jobs <= 1 or len(sentences) < 2:
        return _decode_chunk(model, sentences, 0, strict)

    n_chunks = min(n_jobs, len(sentences))
    slices = list(gen_even_slices(len(sentences), n_chunks))
    logger.debug(f"Giải mã {len(sentences)} câu trên {n_chunks} khối song song")
    chunks = Parallel(n_jobs=n_jobs)(
        delayed(_decode_chunk)(model, sentences[s], s.start, strict) for s in slices
    )
    return [posteriors for chunk in chunks for posteriors in chunk]


class SelectiveTagger:
    """
    Bộ gán nhãn có loại bỏ: token có độ tin cậy nằm sai phía ngưỡng được
    gán nhãn loại bỏ thay cho nhãn đã chọn
    """

    def __init__(
        self,
        model: HmmModel,
        policy: Optional[ThresholdPolicy] = None,
        reject_tag: Optional[str] = None,
        strict: bool = False,
        n_jobs: int = 1,
    ):
        self.model = model
        self.policy = policy or ThresholdPolicy.accept_all(ConfidenceMeasure.PROBABILITY)
        self.reject_tag = reject_tag if reject_tag is not None else settings.REJECT_TAG
        self.strict = strict
        self.n_jobs = n_jobs

    def tag(self, sentences: Sequence[Sequence[str]]) -> List[List[Tuple[str, str]]]:
        """Gán nhãn các câu; trả về (từ, nhãn hoặc nhãn loại bỏ)"""
        decoded = decode_sentences(self.model, sentences, n_jobs=self.n_jobs, strict=self.strict)
        tagged = []
        rejected = 0
        for sentence, posteriors in zip(sentences, decoded):
            decisions = apply_policy(posteriors, self.policy)
            rejected += sum(not d.accepted for d in decisions)
            tagged.append([
                (word, d.tag if d.accepted else self.reject_tag)
                for word, d in zip(sentence, decisions)
            ])
        logger.info(f"Đã gán nhãn {len(tagged)} câu, loại bỏ {rejected} token")
        return tagged

