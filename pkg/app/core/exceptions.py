"""Các lỗi của bộ gán nhãn. Mỗi lỗi mang mã thoát tương ứng cho dòng lệnh."""
from typing import Optional


class TaggerError(Exception):
    """Lỗi gốc"""
    exit_code = 2


class UsageError(TaggerError):
    """Tham số dòng lệnh hoặc cấu hình không hợp lệ"""
    exit_code = 1


class DataError(TaggerError):
    """Dữ liệu đầu vào không xử lý được"""
    exit_code = 2


class CorpusFormatError(DataError):
    def __init__(self, message: str, line: int, column: int, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.path}:" if self.path else ""
        return f"{where}{self.line}:{self.column}: {self.message}"

    def __reduce__(self):
        return CorpusFormatError, (self.message, self.line, self.column, self.path)

    def with_path(self, path: str) -> "CorpusFormatError":
        return CorpusFormatError(self.message, self.line, self.column, path)


class EmptyInputError(DataError):
    def __init__(self, what: str = "empty input"):
        super().__init__(what)


class DeadEndTokenError(DataError):
    """Không còn đường đi nào có xác suất dương tại một token"""

    def __init__(self, position: int, word: str, sentence_index: Optional[int] = None):
        self.position = position
        self.word = word
        self.sentence_index = sentence_index
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"sentence {self.sentence_index}, " if self.sentence_index is not None else ""
        return f"dead-end token: {where}position {self.position} ({self.word!r})"

    # Giữ nguyên thuộc tính khi lỗi đi qua tiến trình con của joblib
    def __reduce__(self):
        return DeadEndTokenError, (self.position, self.word, self.sentence_index)

    def in_sentence(self, sentence_index: int) -> "DeadEndTokenError":
        return DeadEndTokenError(self.position, self.word, sentence_index)


class DegenerateHypothesisError(DataError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"degenerate chosen hypothesis for {word!r}")

    def __reduce__(self):
        return DegenerateHypothesisError, (self.word,)


class ModelFormatError(DataError):
    pass


class ZeroLikelihoodError(DataError):
    def __init__(self, sentence_index: int):
        self.sentence_index = sentence_index
        super().__init__(f"sentence {sentence_index} has zero likelihood under the model")

    def __reduce__(self):
        return ZeroLikelihoodError, (self.sentence_index,)


class UndefinedRateError(DataError):
    def __init__(self, rate: str, reason: str):
        self.rate = rate
        self.reason = reason
        super().__init__(f"rate {rate} is undefined: {reason}")

    def __reduce__(self):
        return UndefinedRateError, (self.rate, self.reason)


class InsufficientObservationsError(DataError):
    pass


class TargetUnachievableError(DataError):
    def __init__(self, detail: str = ""):
        self.detail = detail
        message = "target unachievable"
        super().__init__(f"{message}: {detail}" if detail else message)

    def __reduce__(self):
        return TargetUnachievableError, (self.detail,)


class LengthMismatchError(DataError):
    pass
