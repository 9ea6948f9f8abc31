from typing import List, Optional, Union

from pydantic import field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict
from typing_extensions import Annotated

MEASURE_NAMES = ("prob", "surprisal", "pentropy", "margin", "ratio")
MODE_NAMES = ("oracle", "ignore")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Settings(BaseSettings):
    PROJECT_NAME: str = "Selective POS Tagger"
    DESCRIPTION: str = "Bộ gán nhãn từ loại HMM có ngưỡng tin cậy (đánh đổi độ chính xác và hiệu suất)"
    APP_VERSION: str = "0.1.0"

    # Logging: không ghi file nếu LOG_DIR để trống
    LOG_DIR: Optional[str] = None
    LOG_LEVEL: str = "INFO"

    # Cấu hình bộ gán nhãn
    CLOSED_TAGS: Annotated[List[str], NoDecode] = []
    DEFAULT_MEASURE: str = "prob"
    DEFAULT_MODE: str = "oracle"
    REJECT_TAG: str = "??"
    MODEL_FORMAT_VERSION: int = 1

    # Baum-Welch
    BW_MAX_ITERS: int = 10
    BW_TOL: float = 1e-6

    # Số tiến trình giải mã song song
    N_JOBS: int = 1

    @field_validator("CLOSED_TAGS", mode="before")
    @classmethod
    def assemble_closed_tags(cls, v: Union[str, List[str]]) -> List[str]:
        if isinstance(v, str):
            return [i.strip() for i in v.split(",") if i.strip()]
        elif isinstance(v, list):
            return v
        raise ValueError(v)

    @field_validator("DEFAULT_MEASURE")
    @classmethod
    def check_measure(cls, v: str) -> str:
        if v not in MEASURE_NAMES:
            raise ValueError(f"measure must be one of {', '.join(MEASURE_NAMES)}")
        return v

    @field_validator("DEFAULT_MODE")
    @classmethod
    def check_mode(cls, v: str) -> str:
        if v not in MODE_NAMES:
            raise ValueError(f"mode must be one of {', '.join(MODE_NAMES)}")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        v = v.upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {', '.join(LOG_LEVELS)}")
        return v

    @field_validator("BW_MAX_ITERS")
    @classmethod
    def check_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be >= 0")
        return v

    @field_validator("N_JOBS")
    @classmethod
    def check_n_jobs(cls, v: int) -> int:
        if v == 0 or v < -1:
            raise ValueError("must be a positive count or -1")
        return v

    @field_validator("BW_TOL")
    @classmethod
    def check_tol(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("must be >= 0")
        return v

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_prefix="SELTAG_",
        env_file=".env",
        extra="ignore",
    )


settings = Settings()
