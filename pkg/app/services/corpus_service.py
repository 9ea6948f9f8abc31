import logging
from collections import Counter
from pathlib import Path
from typing import Iterable, List, Sequence, TextIO, Tuple, Union

import numpy as np

from app.core.exceptions import CorpusFormatError, DataError, EmptyInputError, ModelFormatError
from app.schemas.corpus import CorpusStats, TaggedCorpus
from app.services.hmm_model import HmmModel, Tagset

logger = logging.getLogger(__name__)

TextSource = Union[str, TextIO, Iterable[str]]


def _lines(source: TextSource) -> Iterable[str]:
    if isinstance(source, str):
        return source.split("\n")
    return source


def _split_token(token: str, line_no: int, column: int) -> Tuple[str, str]:
    """Tách token tại dấu '/' cuối cùng không bị thoát; '\\/' và '\\\\' là ký tự thoát"""
    chars: List[str] = []
    separators: List[int] = []
    escaped = False
    for ch in token:
        if escaped:
            chars.append(ch)
            escaped = False
        elif ch == "\\":
            escaped = True
        else:
            if ch == "/":
                separators.append(len(chars))
            chars.append(ch)
    if escaped:
        chars.append("\\")
    if not separators:
        raise CorpusFormatError("missing tag separator", line_no, column)

    # Các dấu '/' không thoát đứng trước dấu cuối cùng thuộc về từ
    word = "".join(chars[:separators[-1]])
    tag = "".join(chars[separators[-1] + 1:])
    if not word:
        raise CorpusFormatError("empty word", line_no, column)
    if not tag:
        raise CorpusFormatError("empty tag", line_no, column)
    return word, tag


def parse_tagged(source: TextSource) -> TaggedCorpus:
    """
    Đọc ngữ liệu có nhãn: mỗi dòng một câu, các token `từ/NHÃN` cách nhau bởi khoảng trắng

    Dòng trống bị bỏ qua.
    """
    sentences = []
    for line_no, line in enumerate(_lines(source), start=1):
        line = line.rstrip("\r\n")
        sentence = []
        offset = 0
        for token in line.split():
            start = line.index(token, offset)
            sentence.append(_split_token(token, line_no, start + 1))
            offset = start + len(token)
        if sentence:
            sentences.append(sentence)
    return TaggedCorpus(sentences=sentences)


def _escape(word: str) -> str:
    return word.replace("\\", "\\\\").replace("/", "\\/")


def serialize_tagged(corpus: TaggedCorpus) -> str:
    """Ghi ngữ liệu theo đúng định dạng mà parse_tagged đọc"""
    lines = [" ".join(f"{_escape(w)}/{_escape(t)}" for w, t in sentence) for sentence in corpus.sentences]
    return "".join(line + "\n" for line in lines)


def parse_raw(source: TextSource) -> List[List[str]]:
    """Đọc văn bản đã tách từ: mỗi dòng một câu, từ cách nhau bởi khoảng trắng"""
    return [line.split() for line in _lines(source) if line.split()]


def _read_text(path: Union[str, Path]) -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror or e}") from e


def load_corpus(path: Union[str, Path]) -> TaggedCorpus:
    try:
        corpus = parse_tagged(_read_text(path))
    except CorpusFormatError as e:
        raise e.with_path(str(path)) from None
    logger.info(f"Đã đọc {len(corpus)} câu, {corpus.token_count} token từ {path}")
    return corpus


def load_raw(path: Union[str, Path]) -> List[List[str]]:
    sentences = parse_raw(_read_text(path))
    logger.info(f"Đã đọc {len(sentences)} câu chưa gán nhãn từ {path}")
    return sentences


def read_closed_tags(path: Union[str, Path]) -> List[str]:
    """Danh sách nhãn đóng: mỗi dòng một nhãn, bỏ qua dòng trống và dòng '#'"""
    tags = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            tags.append(line)
    return tags


def train_model(corpus: TaggedCorpus, closed_tags: Sequence[str] = ()) -> HmmModel:
    """
    Ước lượng mô hình bằng tần suất tương đối trên ngữ liệu có nhãn

    - initial[t] = số câu bắt đầu bằng t / số câu
    - transitions[t -> u] = số cặp (t, u) / số lần t đứng trước một nhãn khác;
      nhãn chưa từng có nhãn theo sau nhận hàng đều
    - P(w|t) = count(w, t) / count(t)
    """
    if len(corpus) == 0:
        raise EmptyInputError("empty input: training corpus has no sentences")

    tag_names = sorted({t for sentence in corpus.sentences for _, t in sentence})
    unused = sorted(set(closed_tags) - set(tag_names))
    if unused:
        logger.debug(f"Bỏ qua nhãn đóng không có trong ngữ liệu: {', '.join(unused)}")
    try:
        tagset = Tagset.from_names(tag_names, closed=closed_tags)
    except ModelFormatError as e:
        raise DataError(f"cannot build tagset: {e}") from e
    n_tags = len(tagset)

    initial_counts = np.zeros(n_tags)
    bigram_counts = np.zeros((n_tags, n_tags))
    predecessor_counts = np.zeros(n_tags)
    tag_counts = np.zeros(n_tags)
    word_tag_counts: Counter = Counter()

    for sentence in corpus.sentences:
        index = [tagset.index(t) for _, t in sentence]
        initial_counts[index[0]] += 1
        for prev, nxt in zip(index, index[1:]):
            bigram_counts[prev, nxt] += 1
            predecessor_counts[prev] += 1
        for (word, _), k in zip(sentence, index):
            tag_counts[k] += 1
            word_tag_counts[word, k] += 1

    initial = initial_counts / len(corpus)

    transitions = np.full((n_tags, n_tags), 1.0 / n_tags)
    seen = predecessor_counts > 0
    transitions[seen] = bigram_counts[seen] / predecessor_counts[seen, None]
    if not seen.all():
        logger.info(
            "Nhãn chưa từng đứng trước nhãn khác, dùng hàng chuyển đều: "
            + ", ".join(tagset.names[k] for k in np.flatnonzero(~seen))
        )

    vocabulary = list(dict.fromkeys(w for sentence in corpus.sentences for w, _ in sentence))
    word_index = {w: k for k, w in enumerate(vocabulary)}
    emission_matrix = np.zeros((len(vocabulary), n_tags))
    for (word, k), count in word_tag_counts.items():
        emission_matrix[word_index[word], k] = count / tag_counts[k]

    model = HmmModel(tagset, initial, transitions, vocabulary, emission_matrix)
    logger.info(f"Đã huấn luyện mô hình: {n_tags} nhãn, {len(vocabulary)} từ")
    return model


def corpus_stats(corpus: TaggedCorpus, model: HmmModel) -> CorpusStats:
    """Tỉ lệ token nhập nhằng (kể cả từ lạ) và tỉ lệ từ lạ theo từ điển của mô hình"""
    total = ambiguous = unknown = 0
    for sentence in corpus.sentences:
        for word, _ in sentence:
            total += 1
            if not model.knows(word):
                unknown += 1
                ambiguous += 1
            elif model.is_ambiguous(word):
                ambiguous += 1
    if total == 0:
        return CorpusStats(token_count=0, ambiguous_fraction=0.0, unknown_fraction=0.0)
    return CorpusStats(
        token_count=total,
        ambiguous_fraction=ambiguous / total,
        unknown_fraction=unknown / total,
    )
