import math
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

# Giá trị lớn nhất của -p*log2(p) trên [0, 1], đạt tại p = 1/e
MAX_ENTROPY_CONTRIBUTION = math.log2(math.e) / math.e
_RANGE_SLACK = 1e-12


class ConfidenceMeasure(str, Enum):
    """Các đại lượng đo độ tin cậy của nhãn được chọn"""
    PROBABILITY = "prob"
    SURPRISAL = "surprisal"
    ENTROPY_CONTRIBUTION = "pentropy"
    MARGIN = "margin"
    RATIO = "ratio"

    @property
    def lower_bounded(self) -> bool:
        """True nếu ngưỡng là cận dưới (chấp nhận khi giá trị >= ngưỡng)"""
        return self in (ConfidenceMeasure.PROBABILITY, ConfidenceMeasure.MARGIN)

    @property
    def accept_all_threshold(self) -> float:
        return -math.inf if self.lower_bounded else math.inf

    @property
    def reject_all_threshold(self) -> float:
        """Biên của miền giá trị: loại mọi token có giá trị khác biên"""
        low, high = self.valid_range
        return high if self.lower_bounded else low

    @property
    def valid_range(self) -> Tuple[float, float]:
        if self is ConfidenceMeasure.SURPRISAL:
            return 0.0, math.inf
        if self is ConfidenceMeasure.ENTROPY_CONTRIBUTION:
            return 0.0, MAX_ENTROPY_CONTRIBUTION
        return 0.0, 1.0

    @property
    def per_hypothesis(self) -> bool:
        """Đo được trên từng giả thuyết (không chỉ nhãn được chọn)"""
        return self in (
            ConfidenceMeasure.PROBABILITY,
            ConfidenceMeasure.SURPRISAL,
            ConfidenceMeasure.ENTROPY_CONTRIBUTION,
        )


class ThresholdPolicy(BaseModel):
    """Quy tắc loại bỏ: đại lượng đo + ngưỡng, chiều so sánh suy ra từ đại lượng"""
    model_config = ConfigDict(frozen=True)

    measure: ConfidenceMeasure = Field(ConfidenceMeasure.PROBABILITY, description="Đại lượng đo")
    threshold: float = Field(..., description="Ngưỡng; -inf/+inf nghĩa là chấp nhận tất cả")

    @model_validator(mode="after")
    def check_range(self) -> "ThresholdPolicy":
        t = self.threshold
        if math.isnan(t):
            raise ValueError("threshold must be a number")
        if t == self.measure.accept_all_threshold:
            return self
        low, high = self.measure.valid_range
        if t < low - _RANGE_SLACK or t > high + _RANGE_SLACK:
            raise ValueError(
                f"threshold {t} out of range [{low}, {high}] for measure {self.measure.value}"
            )
        return self

    @field_serializer("threshold")
    def serialize_threshold(self, threshold: float):
        return format_threshold(threshold)

    @classmethod
    def accept_all(cls, measure: ConfidenceMeasure) -> "ThresholdPolicy":
        return cls(measure=measure, threshold=measure.accept_all_threshold)

    def accepts(self, value: float) -> bool:
        if self.measure.lower_bounded:
            return value >= self.threshold
        return value <= self.threshold


class Decision(BaseModel):
    """Quyết định chấp nhận/loại bỏ nhãn được chọn của một token"""
    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0, description="Vị trí token")
    tag: str = Field(..., description="Nhãn được chọn")
    value: float = Field(..., description="Giá trị của đại lượng đo")
    accepted: bool


def format_threshold(threshold: float):
    """Ngưỡng vô hạn được ghi thành chuỗi để JSON giữ đúng giá trị"""
    if math.isinf(threshold):
        return "inf" if threshold > 0 else "-inf"
    return threshold
