from typing import Optional

from pydantic import BaseModel, Field, field_serializer

from app.schemas.confidence import ConfidenceMeasure, format_threshold


class EvalCounts(BaseModel):
    """Bảng đếm chấp nhận/loại bỏ x đúng/sai trên token nhập nhằng"""
    correct_accepted: int = Field(0, ge=0)
    correct_rejected: int = Field(0, ge=0)
    incorrect_accepted: int = Field(0, ge=0)
    incorrect_rejected: int = Field(0, ge=0)
    unambiguous_total: int = Field(0, ge=0)
    unambiguous_correct: int = Field(0, ge=0)

    @property
    def ambiguous_total(self) -> int:
        return (
            self.correct_accepted + self.correct_rejected
            + self.incorrect_accepted + self.incorrect_rejected
        )

    @property
    def correct_total(self) -> int:
        return self.correct_accepted + self.correct_rejected

    @property
    def incorrect_total(self) -> int:
        return self.incorrect_accepted + self.incorrect_rejected

    @property
    def accepted_total(self) -> int:
        return self.correct_accepted + self.incorrect_accepted

    @property
    def rejected_total(self) -> int:
        return self.correct_rejected + self.incorrect_rejected

    @property
    def token_total(self) -> int:
        return self.ambiguous_total + self.unambiguous_total


class Rates(BaseModel):
    """Các tỉ lệ s, c, i, a"""
    s: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ token nhập nhằng được gán đúng")
    c: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ nhãn đúng bị loại bỏ")
    i: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ nhãn sai bị loại bỏ")
    a: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ token nhập nhằng")


class AccuracySummary(BaseModel):
    """Độ chính xác khi chấp nhận tất cả: toàn kho, trên token nhập nhằng, và độ nhập nhằng"""
    token_count: int
    ambiguous_count: int
    all_accuracy: float = Field(..., description="Độ chính xác trên toàn bộ token")
    ambiguous_accuracy: Optional[float] = Field(None, description="Độ chính xác trên token nhập nhằng")
    ambiguity: float = Field(..., description="Tỉ lệ token nhập nhằng")


class EvaluationReport(BaseModel):
    """Báo cáo đo độ chính xác và hiệu suất với một ngưỡng"""
    measure: ConfidenceMeasure
    threshold: float
    accuracy_oracle: float = Field(..., description="Độ chính xác khi có oracle gán lại token bị loại")
    accuracy_ignore: Optional[float] = Field(None, description="Độ chính xác trên token không bị loại")
    efficiency: float = Field(..., description="Tỉ lệ token nhập nhằng được gán nhãn")
    s: float
    c: float
    i: float
    a: float
    overall_accuracy: float = Field(..., description="Độ chính xác toàn kho (token không nhập nhằng coi là đúng)")
    counts: EvalCounts
    summary: Optional[AccuracySummary] = Field(None, description="Độ chính xác khi chấp nhận tất cả")
    generated_at: Optional[str] = None

    @field_serializer("threshold")
    def serialize_threshold(self, threshold: float):
        return format_threshold(threshold)
