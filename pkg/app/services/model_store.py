import logging
from pathlib import Path
from typing import Union

import orjson
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import DataError, ModelFormatError
from app.schemas.hmm import HmmModelDocument
from app.services.hmm_model import HmmModel, Tagset

logger = logging.getLogger(__name__)


def to_document(model: HmmModel) -> HmmModelDocument:
    return HmmModelDocument(
        version=settings.MODEL_FORMAT_VERSION,
        tags=list(model.tagset.tags),
        initial=model.initial.tolist(),
        transitions=model.transitions.tolist(),
        emissions=model.emissions,
    )


def from_document(document: HmmModelDocument) -> HmmModel:
    if document.version != settings.MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {document.version} (expected {settings.MODEL_FORMAT_VERSION})"
        )
    tagset = Tagset(document.tags)
    return HmmModel.from_mapping(tagset, document.initial, document.transitions, document.emissions)


def dumps_model(model: HmmModel) -> bytes:
    """Tuần tự hóa mô hình thành JSON; số thực được ghi ở dạng ngắn nhất khôi phục đúng giá trị"""
    return orjson.dumps(to_document(model).model_dump(mode="json"), option=orjson.OPT_INDENT_2) + b"\n"


def loads_model(data: Union[bytes, str]) -> HmmModel:
    try:
        document = HmmModelDocument.model_validate(orjson.loads(data))
    except orjson.JSONDecodeError as e:
        raise ModelFormatError(f"model is not valid JSON: {e}") from None
    except ValidationError as e:
        raise ModelFormatError(f"invalid model document: {e.error_count()} error(s), first: {e.errors()[0]['msg']}") from None
    return from_document(document)


def save_model(model: HmmModel, path: Union[str, Path]) -> Path:
    """Ghi mô hình ra file JSON, tạo thư mục cha nếu cần"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(dumps_model(model))
    except OSError as e:
        raise DataError(f"cannot write {path}: {e.strerror or e}") from e
    logger.info(f"Đã lưu mô hình vào {path}")
    return path


def load_model(path: Union[str, Path]) -> HmmModel:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror or e}") from e
    try:
        model = loads_model(data)
    except ModelFormatError as e:
        raise ModelFormatError(f"{path}: {e}") from None
    logger.info(f"Đã tải mô hình từ {path}: {model!r}")
    return model
