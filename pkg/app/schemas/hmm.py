from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class TagRecord(BaseModel):
    """Một nhãn trong tập nhãn"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Tên nhãn", examples=["NN"])
    open_class: bool = Field(True, description="Nhãn mở (từ lạ có thể nhận nhãn này)")


class HmmModelDocument(BaseModel):
    """Dạng tài liệu JSON của mô hình HMM"""
    version: int = Field(..., description="Phiên bản định dạng")
    tags: List[TagRecord] = Field(..., description="Tập nhãn theo thứ tự")
    initial: List[float] = Field(..., description="Xác suất nhãn đầu câu")
    transitions: List[List[float]] = Field(..., description="Ma trận chuyển nhãn, theo hàng")
    emissions: Dict[str, Dict[str, float]] = Field(..., description="Từ -> nhãn -> P(từ|nhãn)")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "version": 1,
                "tags": [{"name": "DT", "open_class": False}, {"name": "NN", "open_class": True}],
                "initial": [1.0, 0.0],
                "transitions": [[0.0, 1.0], [0.5, 0.5]],
                "emissions": {"the": {"DT": 1.0}, "dog": {"NN": 1.0}},
            }
        }
    )

    @field_validator("tags")
    @classmethod
    def check_tags(cls, v: List[TagRecord]) -> List[TagRecord]:
        names = [t.name for t in v]
        if not names:
            raise ValueError("tagset is empty")
        if len(set(names)) != len(names):
            raise ValueError("tag names must be unique")
        if not any(t.open_class for t in v):
            raise ValueError("tagset needs at least one open-class tag")
        return v


class TokenPosterior(BaseModel):
    """Phân phối hậu nghiệm đã chuẩn hóa trên các nhãn giả thuyết của một token"""
    model_config = ConfigDict(frozen=True)

    word: str
    hypotheses: List[Tuple[str, float]] = Field(..., description="(nhãn, điểm) theo thứ tự tập nhãn")
    chosen: int = Field(..., ge=0, description="Chỉ số giả thuyết có điểm lớn nhất")
    unknown: bool = Field(False, description="Từ không có trong từ điển")

    @property
    def chosen_tag(self) -> str:
        return self.hypotheses[self.chosen][0]

    @property
    def chosen_score(self) -> float:
        return self.hypotheses[self.chosen][1]

    @property
    def ambiguous(self) -> bool:
        # Từ lạ luôn được tính là nhập nhằng
        return self.unknown or len(self.hypotheses) > 1
