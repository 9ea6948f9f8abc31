from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.calibration import AccuracyMode, TargetKind
from app.schemas.confidence import ConfidenceMeasure

CommandName = Literal["train", "tag", "calibrate", "eval", "curves"]

# Các lệnh cần ngữ liệu có nhãn chuẩn làm đối số vị trí
_GOLD_COMMANDS = ("calibrate", "eval", "curves")


class CommandConfig(BaseModel):
    """Cấu hình cho một lần chạy dòng lệnh, mặc định lấy từ settings"""
    command: CommandName
    model: Optional[Path] = Field(None, description="File mô hình")
    corpus: Optional[Path] = Field(None, description="Ngữ liệu có nhãn (huấn luyện hoặc chuẩn)")
    input: Optional[Path] = Field(None, description="Văn bản đã tách từ cần gán nhãn; mặc định stdin")
    raw: Optional[Path] = Field(None, description="Văn bản thô cho Baum-Welch")
    closed_tags: Optional[Path] = Field(None, description="File danh sách nhãn đóng")
    out: Optional[Path] = Field(None, description="File kết quả")

    measure: ConfidenceMeasure = Field(default_factory=lambda: ConfidenceMeasure(settings.DEFAULT_MEASURE))
    threshold: Optional[float] = None
    targets: List[float] = Field(default_factory=list)
    target_kind: TargetKind = TargetKind.ACCURACY
    mode: AccuracyMode = Field(default_factory=lambda: AccuracyMode(settings.DEFAULT_MODE))
    reject_tag: str = Field(default_factory=lambda: settings.REJECT_TAG)
    strict: bool = False
    sweep: bool = False
    all_hypotheses: bool = False
    stamp: bool = False

    bw_iters: int = Field(default_factory=lambda: settings.BW_MAX_ITERS, ge=0)
    bw_tol: float = Field(default_factory=lambda: settings.BW_TOL, ge=0.0)
    n_jobs: int = Field(default_factory=lambda: settings.N_JOBS)

    @field_validator("reject_tag")
    @classmethod
    def check_reject_tag(cls, v: str) -> str:
        if not v or any(ch.isspace() for ch in v):
            raise ValueError("reject tag must be non-empty and contain no whitespace")
        return v

    @field_validator("targets")
    @classmethod
    def check_targets(cls, v: List[float]) -> List[float]:
        for target in v:
            if not 0.0 < target <= 1.0:
                raise ValueError(f"target {target} must lie in (0, 1]")
        return v

    @field_validator("n_jobs")
    @classmethod
    def check_n_jobs(cls, v: int) -> int:
        if v == 0 or v < -1:
            raise ValueError("n_jobs must be a positive count or -1")
        return v

    @model_validator(mode="after")
    def check_required(self) -> "CommandConfig":
        missing = []
        if self.command == "train":
            if self.corpus is None:
                missing.append("corpus")
            if self.out is None:
                missing.append("--out")
        else:
            if self.model is None:
                missing.append("--model")
            if self.command in _GOLD_COMMANDS and self.corpus is None:
                missing.append("corpus")
        if self.command == "calibrate" and not self.targets and not self.sweep:
            missing.append("--target (or --sweep)")
        if missing:
            raise ValueError(f"{self.command} requires {', '.join(missing)}")

        if self.all_hypotheses:
            if self.command != "curves":
                raise ValueError("--all-hypotheses applies to curves only")
            if not self.measure.per_hypothesis:
                raise ValueError(f"--all-hypotheses is not defined for measure {self.measure.value}")
        if self.target_kind is TargetKind.EFFICIENCY and self.command != "calibrate":
            raise ValueError("--efficiency applies to calibrate only")
        return self
