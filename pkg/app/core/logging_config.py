import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional, Union

_HANDLER_MARK = "_seltag_handler"


def setup_logging(log_level: Union[int, str] = logging.INFO, log_dir: Optional[str] = None) -> logging.Logger:
    """
    Thiết lập logging cho công cụ dòng lệnh

    Log được ghi ra stderr để stdout chỉ chứa kết quả gán nhãn và báo cáo.
    Gọi lại nhiều lần chỉ thay thế các handler do hàm này tạo ra.
    """
    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())

    # Định dạng log
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_MARK, False):
            root_logger.removeHandler(handler)
            handler.close()

    # Handler cho console
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    setattr(console_handler, _HANDLER_MARK, True)
    root_logger.addHandler(console_handler)

    # Handler cho file với encoding utf-8
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(log_dir, "seltag.log"),
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        setattr(file_handler, _HANDLER_MARK, True)
        root_logger.addHandler(file_handler)

    root_logger.setLevel(log_level)

    # Giảm bớt log từ các thư viện khác
    logging.getLogger("joblib").setLevel(logging.WARNING)

    return root_logger
