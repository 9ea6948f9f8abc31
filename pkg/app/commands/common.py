"""Các tham số dùng chung giữa các lệnh con và tiện ích đọc/ghi"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Union

from app.core.config import MEASURE_NAMES, MODE_NAMES
from app.core.exceptions import DataError, EmptyInputError
from app.schemas.corpus import TaggedCorpus
from app.services.corpus_service import load_corpus

logger = logging.getLogger(__name__)


def add_model_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", type=Path, help="File mô hình JSON")


def add_measure_arguments(parser: argparse.ArgumentParser, threshold: bool = True) -> None:
    parser.add_argument("--measure", choices=MEASURE_NAMES, help="Đại lượng đo độ tin cậy")
    if threshold:
        parser.add_argument("--threshold", type=float, help="Ngưỡng; 'inf'/'-inf' nghĩa là chấp nhận tất cả")


def add_output_arguments(parser: argparse.ArgumentParser, stamp: bool = False) -> None:
    parser.add_argument("--out", type=Path, help="File kết quả (mặc định stdout)")
    if stamp:
        parser.add_argument("--stamp", action="store_true", help="Ghi thời điểm tạo vào báo cáo")


def add_jobs_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-jobs", dest="n_jobs", type=int, help="Số tiến trình giải mã song song")


def add_mode_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=MODE_NAMES, help="Cách tính độ chính xác (oracle hoặc ignore)")


def load_gold(path: Path) -> TaggedCorpus:
    corpus = load_corpus(path)
    if len(corpus) == 0:
        raise EmptyInputError(f"empty input: {path} has no sentences")
    return corpus


def write_output(content: Union[str, bytes], out: Optional[Path]) -> None:
    """Ghi kết quả ra file nếu có --out, nếu không thì ra stdout"""
    if out is None:
        if isinstance(content, bytes):
            content = content.decode("utf-8")
        sys.stdout.write(content)
        sys.stdout.flush()
        return
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            out.write_bytes(content)
        else:
            out.write_text(content, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot write {out}: {e.strerror or e}") from e
    logger.info(f"Đã ghi kết quả vào {out}")
