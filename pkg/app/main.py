import argparse
import logging
import sys
from typing import List, NoReturn, Optional

# Load .env file
from dotenv import load_dotenv
load_dotenv()

from pydantic import ValidationError

from app.commands import COMMANDS
from app.core.config import settings
from app.core.exceptions import TaggerError, UsageError
from app.core.logging_config import setup_logging
from app.schemas.command import CommandConfig

logger = logging.getLogger(__name__)

# Lỗi không lường trước được coi như lỗi dữ liệu
EXIT_DATA = 2


class ArgumentParser(argparse.ArgumentParser):
    """argparse thoát với mã 2 khi sai cú pháp; ở đây sai cú pháp là lỗi sử dụng (mã 1)"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="seltag", description=f"{settings.PROJECT_NAME}: {settings.DESCRIPTION}")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Ghi log chi tiết (DEBUG)")
    parser.add_argument("-q", "--quiet", action="store_true", help="Chỉ ghi cảnh báo và lỗi")
    parser.add_argument("--log-dir", dest="log_dir", help="Thư mục ghi file log (xoay vòng)")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers).set_defaults(handler=command.run)
    return parser


def _log_level(args: argparse.Namespace) -> str:
    if args.verbose:
        return "DEBUG"
    if args.quiet:
        return "WARNING"
    return settings.LOG_LEVEL


def _config_from_args(args: argparse.Namespace) -> CommandConfig:
    """Chỉ các tham số người dùng đưa vào mới ghi đè giá trị mặc định từ settings"""
    options = {
        key: value
        for key, value in vars(args).items()
        if key not in ("handler", "verbose", "quiet", "log_dir") and value is not None and value is not False
    }
    try:
        return CommandConfig.model_validate(options)
    except ValidationError as e:
        messages = "; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())
        raise UsageError(messages) from None


# Xử lý exception toàn cục
def handle_error(exc: BaseException) -> int:
    if isinstance(exc, TaggerError):
        logger.error(str(exc))
        return exc.exit_code
    logger.error(f"Unhandled error: {exc}", exc_info=True)
    return EXIT_DATA


def main(argv: Optional[List[str]] = None) -> int:
    """
    Điểm vào dòng lệnh

    Returns:
        0 khi thành công, 1 khi sai cách dùng, 2 khi lỗi dữ liệu
    """
    setup_logging(settings.LOG_LEVEL, settings.LOG_DIR)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        setup_logging(_log_level(args), args.log_dir or settings.LOG_DIR)
        config = _config_from_args(args)
        logger.debug(f"Cấu hình: {config.model_dump(exclude_none=True)}")
        return args.handler(config)
    except Exception as exc:
        return handle_error(exc)


if __name__ == "__main__":
    sys.exit(main())
