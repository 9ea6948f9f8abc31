from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_serializer

from app.schemas.confidence import ConfidenceMeasure, format_threshold


class AccuracyMode(str, Enum):
    """Cách tính độ chính xác khi có token bị loại"""
    ORACLE = "oracle"
    IGNORE = "ignore"


class TargetKind(str, Enum):
    ACCURACY = "accuracy"
    EFFICIENCY = "efficiency"


class CalibrationResult(BaseModel):
    """Ngưỡng tìm được và các giá trị dự đoán tương ứng"""
    measure: ConfidenceMeasure
    mode: AccuracyMode
    target_kind: TargetKind = TargetKind.ACCURACY
    target: float = Field(..., description="Giá trị mục tiêu")
    threshold: float
    s: float = Field(..., ge=0.0, le=1.0)
    predicted_c: float = Field(..., ge=0.0, le=1.0)
    predicted_i: float = Field(..., ge=0.0, le=1.0)
    predicted_efficiency: float = Field(..., ge=0.0, le=1.0)
    predicted_accuracy: float = Field(..., ge=0.0, le=1.0)

    model_config = {
        "json_schema_extra": {
            "example": {
                "measure": "prob",
                "mode": "oracle",
                "target_kind": "accuracy",
                "target": 0.95,
                "threshold": 0.629,
                "s": 0.9266,
                "predicted_c": 0.0309,
                "predicted_i": 0.3188,
                "predicted_efficiency": 0.948,
                "predicted_accuracy": 0.95,
            }
        }
    }

    @field_serializer("threshold")
    def serialize_threshold(self, threshold: float):
        return format_threshold(threshold)


class SweepRow(BaseModel):
    """Một điểm trên đường cong đánh đổi độ chính xác - hiệu suất"""
    threshold: float
    c: float
    i: float
    accuracy_oracle: float
    accuracy_ignore: Optional[float] = None
    efficiency: float

    @field_serializer("threshold")
    def serialize_threshold(self, threshold: float):
        return format_threshold(threshold)


class CalibrationReport(BaseModel):
    """Kết quả hiệu chỉnh cho một hoặc nhiều mục tiêu"""
    results: List[CalibrationResult] = Field(default_factory=list)
    generated_at: Optional[str] = None
