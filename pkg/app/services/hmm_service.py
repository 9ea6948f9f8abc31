"""
Các thuật toán HMM: Forward-Backward (hậu nghiệm), Viterbi, hợp lý của câu,
ước lượng lại Baum-Welch và sinh ngữ liệu mẫu từ mô hình.

Mỗi câu được giải mã độc lập; phân phối đầu câu đóng vai trò nhãn biên ảo.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from app.core.exceptions import DeadEndTokenError, EmptyInputError, ZeroLikelihoodError
from app.schemas.corpus import TaggedCorpus
from app.schemas.hmm import TokenPosterior
from app.services.hmm_model import HmmModel

logger = logging.getLogger(__name__)


def _check_sentence(sentence: Sequence[str]) -> None:
    if len(sentence) == 0:
        raise EmptyInputError("empty input")


def _forward(model: HmmModel, sentence: Sequence[str], obs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Forward có chuẩn hóa tại từng vị trí; trả về (alpha đã chuẩn hóa, hệ số chuẩn hóa)"""
    n_time, n_states = obs.shape
    alpha = np.zeros((n_time, n_states))
    scaling = np.zeros(n_time)

    alpha[0] = model.initial * obs[0]
    for t in range(n_time):
        if t > 0:
            alpha[t] = obs[t] * (model.transitions.T @ alpha[t - 1])
        scaling[t] = alpha[t].sum()
        if not scaling[t] > 0.0:
            raise DeadEndTokenError(t, sentence[t])
        alpha[t] /= scaling[t]
    return alpha, scaling


def _backward(model: HmmModel, obs: np.ndarray, scaling: np.ndarray) -> np.ndarray:
    n_time, n_states = obs.shape
    beta = np.zeros((n_time, n_states))
    beta[-1] = 1.0
    for t in range(n_time - 2, -1, -1):
        beta[t] = model.transitions @ (obs[t + 1] * beta[t + 1])
        beta[t] /= scaling[t + 1]
    return beta


def _token_posteriors(
    model: HmmModel,
    sentence: Sequence[str],
    obs: np.ndarray,
    unknown: Sequence[bool],
    gamma: np.ndarray,
) -> List[TokenPosterior]:
    names = model.tagset.names
    result = []
    for t, word in enumerate(sentence):
        hyp = np.flatnonzero(obs[t] > 0.0)
        scores = gamma[t, hyp]
        total = scores.sum()
        if not total > 0.0:
            raise DeadEndTokenError(t, word)
        scores = scores / total
        # argmax lấy chỉ số nhỏ nhất khi hòa, tức là nhãn đứng trước trong tập nhãn
        chosen = int(np.argmax(scores))
        result.append(
            TokenPosterior(
                word=word,
                hypotheses=[(names[k], float(p)) for k, p in zip(hyp, scores)],
                chosen=chosen,
                unknown=unknown[t],
            )
        )
    return result


def forward_backward(model: HmmModel, sentence: Sequence[str]) -> List[TokenPosterior]:
    """
    Tính hậu nghiệm đã chuẩn hóa cho từng token bằng Forward-Backward

    Args:
        model: Mô hình HMM
        sentence: Danh sách từ của một câu

    Returns:
        Một TokenPosterior cho mỗi từ
    """
    _check_sentence(sentence)
    obs, unknown = model.observation_matrix(sentence)
    alpha, scaling = _forward(model, sentence, obs)
    beta = _backward(model, obs, scaling)
    return _token_posteriors(model, sentence, obs, unknown, alpha * beta)


def emission_posteriors(model: HmmModel, sentence: Sequence[str]) -> List[TokenPosterior]:
    """Hậu nghiệm chỉ dựa vào phát xạ (bỏ qua ngữ cảnh); dùng khi câu rơi vào ngõ cụt"""
    _check_sentence(sentence)
    obs, unknown = model.observation_matrix(sentence)
    return _token_posteriors(model, sentence, obs, unknown, obs)


def viterbi(model: HmmModel, sentence: Sequence[str]) -> List[str]:
    """Dãy nhãn có xác suất đường đi lớn nhất (tính trong không gian log)"""
    _check_sentence(sentence)
    obs, _ = model.observation_matrix(sentence)
    n_time, n_states = obs.shape

    with np.errstate(divide="ignore"):
        log_initial = np.log(model.initial)
        log_transitions = np.log(model.transitions)
        log_obs = np.log(obs)

    backpointers = np.zeros((n_time, n_states), dtype=np.intp)
    delta = log_initial + log_obs[0]
    if not np.isfinite(delta).any():
        raise DeadEndTokenError(0, sentence[0])
    columns = np.arange(n_states)
    for t in range(1, n_time):
        scores = delta[:, None] + log_transitions
        backpointers[t] = np.argmax(scores, axis=0)
        delta = scores[backpointers[t], columns] + log_obs[t]
        if not np.isfinite(delta).any():
            raise DeadEndTokenError(t, sentence[t])

    path = [int(np.argmax(delta))]
    for t in range(n_time - 1, 0, -1):
        path.append(int(backpointers[t, path[-1]]))
    path.reverse()
    names = model.tagset.names
    return [names[k] for k in path]


def path_log_probability(model: HmmModel, sentence: Sequence[str], tags: Sequence[str]) -> float:
    """Log xác suất đồng thời của câu và một dãy nhãn cho trước"""
    _check_sentence(sentence)
    index = [model.tagset.index(t) for t in tags]
    obs, _ = model.observation_matrix(sentence)
    with np.errstate(divide="ignore"):
        total = math.log(model.initial[index[0]]) if model.initial[index[0]] > 0 else -math.inf
        for t, k in enumerate(index):
            if t > 0:
                a = model.transitions[index[t - 1], k]
                total += math.log(a) if a > 0 else -math.inf
            e = obs[t, k]
            total += math.log(e) if e > 0 else -math.inf
    return total


def sequence_likelihood(model: HmmModel, sentence: Sequence[str]) -> float:
    """Log tự nhiên của xác suất câu, lấy tổng trên mọi dãy nhãn"""
    _check_sentence(sentence)
    obs, _ = model.observation_matrix(sentence)
    _, scaling = _forward(model, sentence, obs)
    return float(np.sum(np.log(scaling)))


@dataclass(frozen=True)
class BaumWelchResult:
    model: HmmModel
    log_likelihoods: List[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return max(len(self.log_likelihoods) - 1, 0)


class _ExpectedCounts:
    """Số đếm kỳ vọng tích lũy qua bước E"""

    def __init__(self, model: HmmModel):
        n_tags = model.n_tags
        self.initial = np.zeros(n_tags)
        self.transitions = np.zeros((n_tags, n_tags))
        self.transition_totals = np.zeros(n_tags)
        self.emissions = np.zeros_like(model.emission_matrix)
        self.emission_totals = np.zeros(n_tags)
        self.log_likelihood = 0.0

    def add_sentence(self, model: HmmModel, sentence: Sequence[str], index: int) -> None:
        obs, unknown = model.observation_matrix(sentence)
        try:
            alpha, scaling = _forward(model, sentence, obs)
        except DeadEndTokenError:
            raise ZeroLikelihoodError(index) from None
        beta = _backward(model, obs, scaling)
        gamma = alpha * beta
        gamma /= gamma.sum(axis=1, keepdims=True)

        self.log_likelihood += float(np.sum(np.log(scaling)))
        self.initial += gamma[0]
        for t in range(len(sentence) - 1):
            xi = alpha[t][:, None] * model.transitions * (obs[t + 1] * beta[t + 1])[None, :]
            self.transitions += xi / scaling[t + 1]
            self.transition_totals += gamma[t]
        for t, word in enumerate(sentence):
            # Từ lạ giữ phát xạ hằng, không tham gia ước lượng lại phát xạ
            if unknown[t]:
                continue
            self.emissions[model.word_index(word)] += gamma[t]
            self.emission_totals += gamma[t]


def _expected_counts(model: HmmModel, raw_corpus: Sequence[Sequence[str]]) -> _ExpectedCounts:
    counts = _ExpectedCounts(model)
    for index, sentence in enumerate(raw_corpus):
        if len(sentence) == 0:
            raise EmptyInputError(f"empty input: sentence {index}")
        counts.add_sentence(model, sentence, index)
    return counts


def _maximize(model: HmmModel, counts: _ExpectedCounts, n_sentences: int) -> HmmModel:
    initial = counts.initial / n_sentences
    initial /= initial.sum()

    transitions = np.array(model.transitions)
    occupied = counts.transition_totals > 0.0
    transitions[occupied] = counts.transitions[occupied] / counts.transition_totals[occupied, None]
    transitions /= transitions.sum(axis=1, keepdims=True)
    if not occupied.all():
        logger.debug(f"Giữ nguyên {int((~occupied).sum())} hàng chuyển không có số đếm kỳ vọng")

    emission_matrix = np.array(model.emission_matrix)
    emitted = counts.emission_totals > 0.0
    emission_matrix[:, emitted] = counts.emissions[:, emitted] / counts.emission_totals[emitted]

    # Từ không xuất hiện trong ngữ liệu thô mất hết xác suất và bị loại khỏi từ điển
    keep = emission_matrix.max(axis=1) > 0.0
    vocabulary = model.vocabulary
    if not keep.all():
        logger.warning(f"Loại {int((~keep).sum())} từ không còn xác suất phát xạ khỏi từ điển")
        vocabulary = tuple(w for w, k in zip(vocabulary, keep) if k)
        emission_matrix = emission_matrix[keep]
    return HmmModel(model.tagset, initial, transitions, vocabulary, emission_matrix)


def baum_welch_trace(
    model: HmmModel,
    raw_corpus: Sequence[Sequence[str]],
    max_iters: int,
    tol: float,
) -> BaumWelchResult:
    """
    Ước lượng lại Baum-Welch, trả về cả dãy log-hợp lý

    log_likelihoods[k] là log-hợp lý của toàn ngữ liệu dưới mô hình sau k vòng lặp.
    Dừng sau max_iters vòng hoặc khi mức tăng nhỏ hơn tol.
    """
    if len(raw_corpus) == 0:
        raise EmptyInputError("empty input: raw corpus has no sentences")

    counts = _expected_counts(model, raw_corpus)
    trace = [counts.log_likelihood]
    logger.info(f"Baum-Welch: log-hợp lý ban đầu {counts.log_likelihood:.6f}")

    converged = False
    for iteration in range(1, max_iters + 1):
        new_model = _maximize(model, counts, len(raw_corpus))
        counts = _expected_counts(new_model, raw_corpus)
        trace.append(counts.log_likelihood)
        model = new_model
        improvement = trace[-1] - trace[-2]
        logger.info(f"Baum-Welch vòng {iteration}: log-hợp lý {trace[-1]:.6f} (tăng {improvement:.3g})")
        if improvement < tol:
            converged = True
            break

    return BaumWelchResult(model=model, log_likelihoods=trace, converged=converged)


def baum_welch(
    model: HmmModel,
    raw_corpus: Sequence[Sequence[str]],
    max_iters: int,
    tol: float,
) -> HmmModel:
    """Ước lượng lại Baum-Welch; mô hình đầu vào không bị thay đổi"""
    return baum_welch_trace(model, raw_corpus, max_iters, tol).model


def sample_corpus(
    model: HmmModel,
    n_sentences: int,
    length: int,
    rng: np.random.Generator,
) -> TaggedCorpus:
    """Sinh ngữ liệu có nhãn chuẩn từ mô hình (chỉ dùng các từ trong từ điển)"""
    if not model.vocabulary:
        raise EmptyInputError("empty input: model has no vocabulary")
    names = model.tagset.names
    initial_cdf = np.cumsum(model.initial)
    transition_cdf = np.cumsum(model.transitions, axis=1)
    emission_cdf = np.cumsum(model.emission_matrix, axis=0)

    def draw(cdf: np.ndarray, u: float) -> int:
        return min(int(np.searchsorted(cdf, u * cdf[-1], side="right")), len(cdf) - 1)

    sentences = []
    for _ in range(n_sentences):
        draws = rng.random((length, 2))
        state = draw(initial_cdf, draws[0, 0])
        sentence = []
        for t in range(length):
            if t > 0:
                state = draw(transition_cdf[state], draws[t, 0])
            word = model.vocabulary[draw(emission_cdf[:, state], draws[t, 1])]
            sentence.append((word, names[state]))
        sentences.append(sentence)
    return TaggedCorpus(sentences=sentences)
