from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class TaggedCorpus(BaseModel):
    """Kho ngữ liệu đã gán nhãn: mỗi câu là danh sách (từ, nhãn chuẩn)"""
    sentences: List[List[Tuple[str, str]]] = Field(default_factory=list)

    @field_validator("sentences")
    @classmethod
    def check_sentences(cls, v: List[List[Tuple[str, str]]]) -> List[List[Tuple[str, str]]]:
        for index, sentence in enumerate(v):
            if not sentence:
                raise ValueError(f"sentence {index} is empty")
            for word, tag in sentence:
                if not word or not tag:
                    raise ValueError(f"sentence {index} has an empty word or tag")
        return v

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def words(self) -> List[List[str]]:
        return [[w for w, _ in s] for s in self.sentences]

    def gold_tags(self) -> List[List[str]]:
        return [[t for _, t in s] for s in self.sentences]


class CorpusStats(BaseModel):
    """Thống kê độ nhập nhằng của kho ngữ liệu so với từ điển của mô hình"""
    token_count: int = Field(..., ge=0)
    ambiguous_fraction: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ token nhập nhằng")
    unknown_fraction: float = Field(..., ge=0.0, le=1.0, description="Tỉ lệ token không có trong từ điển")

    @model_validator(mode="after")
    def check_order(self) -> "CorpusStats":
        if self.ambiguous_fraction < self.unknown_fraction:
            raise ValueError("unknown tokens must count as ambiguous")
        return self
