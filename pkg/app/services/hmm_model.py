import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from app.core.exceptions import ModelFormatError
from app.schemas.hmm import TagRecord

logger = logging.getLogger(__name__)

# Xác suất phát xạ hằng cho từ lạ trên mọi nhãn mở
UNKNOWN_EMISSION = 1.0
_SUM_TOLERANCE = 1e-9


class Tagset:
    """Tập nhãn có thứ tự; thứ tự này quyết định cách phá thế hòa"""

    def __init__(self, tags: Iterable[TagRecord]):
        self.tags: Tuple[TagRecord, ...] = tuple(tags)
        names = [t.name for t in self.tags]
        if not names:
            raise ModelFormatError("tagset is empty")
        if any(not n for n in names):
            raise ModelFormatError("tag names must be non-empty")
        if len(set(names)) != len(names):
            raise ModelFormatError("tag names must be unique")
        if not any(t.open_class for t in self.tags):
            raise ModelFormatError("tagset needs at least one open-class tag")
        self.names: Tuple[str, ...] = tuple(names)
        self._index: Dict[str, int] = {n: k for k, n in enumerate(names)}
        self.open_mask = np.array([t.open_class for t in self.tags], dtype=bool)
        self.open_mask.setflags(write=False)

    def __len__(self) -> int:
        return len(self.tags)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tagset) and self.tags == other.tags

    def __repr__(self) -> str:
        return f"Tagset({', '.join(self.names)})"

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    @classmethod
    def from_names(cls, names: Iterable[str], closed: Iterable[str] = ()) -> "Tagset":
        closed_set = set(closed)
        return cls(TagRecord(name=n, open_class=n not in closed_set) for n in names)


class HmmModel:
    """
    Mô hình HMM bậc nhất (bigram nhãn) cho gán nhãn từ loại

    Bất biến sau khi khởi tạo: mọi mảng đều chỉ đọc. Phát xạ được lưu dưới dạng
    ma trận (từ x nhãn) theo thứ tự từ vựng.
    """

    def __init__(
        self,
        tagset: Tagset,
        initial: Sequence[float],
        transitions: Sequence[Sequence[float]],
        vocabulary: Sequence[str],
        emission_matrix: Sequence[Sequence[float]],
    ):
        self.tagset = tagset
        n_tags = len(tagset)

        self.initial = np.array(initial, dtype=np.float64)
        self.transitions = np.array(transitions, dtype=np.float64)
        self.emission_matrix = np.array(emission_matrix, dtype=np.float64).reshape(len(vocabulary), n_tags)
        self.vocabulary: Tuple[str, ...] = tuple(vocabulary)
        self._word_index: Dict[str, int] = {w: k for k, w in enumerate(self.vocabulary)}

        if self.initial.shape != (n_tags,):
            raise ModelFormatError(f"initial must have {n_tags} entries")
        if self.transitions.shape != (n_tags, n_tags):
            raise ModelFormatError(f"transitions must be {n_tags}x{n_tags}")
        if len(self._word_index) != len(self.vocabulary):
            raise ModelFormatError("vocabulary has duplicate words")
        self._validate()

        for array in (self.initial, self.transitions, self.emission_matrix):
            array.setflags(write=False)
        self._unknown_vector = np.where(tagset.open_mask, UNKNOWN_EMISSION, 0.0)
        self._unknown_vector.setflags(write=False)

    def _validate(self) -> None:
        for label, array in (
            ("initial", self.initial),
            ("transitions", self.transitions),
            ("emissions", self.emission_matrix),
        ):
            if array.size and (not np.all(np.isfinite(array)) or array.min() < 0.0 or array.max() > 1.0):
                raise ModelFormatError(f"{label} probabilities must lie in [0, 1]")
        if abs(self.initial.sum() - 1.0) > _SUM_TOLERANCE:
            raise ModelFormatError(f"initial probabilities sum to {self.initial.sum()!r}, not 1")
        row_sums = self.transitions.sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > _SUM_TOLERANCE)
        if bad.size:
            raise ModelFormatError(
                f"transition row {self.tagset.names[bad[0]]!r} sums to {row_sums[bad[0]]!r}, not 1"
            )
        if self.emission_matrix.size:
            dead = np.flatnonzero(self.emission_matrix.max(axis=1) <= 0.0)
            if dead.size:
                raise ModelFormatError(f"word {self.vocabulary[dead[0]]!r} has no tag with positive probability")

    @classmethod
    def from_mapping(
        cls,
        tagset: Tagset,
        initial: Sequence[float],
        transitions: Sequence[Sequence[float]],
        emissions: Mapping[str, Mapping[str, float]],
    ) -> "HmmModel":
        """Tạo mô hình từ ánh xạ từ -> nhãn -> xác suất"""
        vocabulary = list(emissions)
        matrix = np.zeros((len(vocabulary), len(tagset)))
        for row, word in enumerate(vocabulary):
            for tag, probability in emissions[word].items():
                if tag not in tagset:
                    raise ModelFormatError(f"word {word!r} uses unknown tag {tag!r}")
                matrix[row, tagset.index(tag)] = probability
        return cls(tagset, initial, transitions, vocabulary, matrix)

    @property
    def n_tags(self) -> int:
        return len(self.tagset)

    @property
    def emissions(self) -> Dict[str, Dict[str, float]]:
        """Ánh xạ từ -> nhãn -> P(từ|nhãn), chỉ gồm các xác suất dương"""
        names = self.tagset.names
        result: Dict[str, Dict[str, float]] = {}
        for row, word in enumerate(self.vocabulary):
            probs = self.emission_matrix[row]
            result[word] = {names[k]: float(probs[k]) for k in np.flatnonzero(probs > 0.0)}
        return result

    def knows(self, word: str) -> bool:
        return word in self._word_index

    def word_index(self, word: str) -> int:
        return self._word_index[word]

    def emission_vector(self, word: str) -> np.ndarray:
        """Vector phát xạ của một từ; từ lạ nhận giá trị hằng trên mọi nhãn mở"""
        row = self._word_index.get(word)
        if row is None:
            return self._unknown_vector
        return self.emission_matrix[row]

    def observation_matrix(self, sentence: Sequence[str]) -> Tuple[np.ndarray, List[bool]]:
        rows = [self.emission_vector(w) for w in sentence]
        unknown = [w not in self._word_index for w in sentence]
        return np.vstack(rows), unknown

    def hypotheses(self, word: str) -> List[int]:
        return np.flatnonzero(self.emission_vector(word) > 0.0).tolist()

    def lexicon_tags(self, word: str) -> List[str]:
        return [self.tagset.names[k] for k in self.hypotheses(word)]

    def is_ambiguous(self, word: str) -> bool:
        """Từ lạ, hoặc từ có nhiều hơn một nhãn trong từ điển"""
        return not self.knows(word) or len(self.hypotheses(word)) > 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HmmModel):
            return NotImplemented
        return (
            self.tagset == other.tagset
            and self.vocabulary == other.vocabulary
            and np.array_equal(self.initial, other.initial)
            and np.array_equal(self.transitions, other.transitions)
            and np.array_equal(self.emission_matrix, other.emission_matrix)
        )

    def __repr__(self) -> str:
        return f"HmmModel(tags={len(self.tagset)}, words={len(self.vocabulary)})"
