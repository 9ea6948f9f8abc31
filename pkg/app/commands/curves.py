import argparse
import io
import logging
from pathlib import Path

from app.commands.common import add_jobs_argument, add_measure_arguments, add_model_argument, add_output_arguments, load_gold, write_output
from app.schemas.command import CommandConfig
from app.services.calibration_service import build_cdfs, collect_observations, emit_curves, write_tsv
from app.services.model_store import load_model

logger = logging.getLogger(__name__)

NAME = "curves"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, help="Xuất số liệu đường cong tích lũy (TSV) của một đại lượng đo")
    parser.add_argument("corpus", type=Path, help="Ngữ liệu có nhãn chuẩn")
    add_model_argument(parser)
    add_measure_arguments(parser, threshold=False)
    parser.add_argument(
        "--all-hypotheses",
        dest="all_hypotheses",
        action="store_true",
        help="Ghi mọi giả thuyết của token nhập nhằng, không chỉ nhãn được chọn",
    )
    add_jobs_argument(parser)
    add_output_arguments(parser)
    return parser


def run(config: CommandConfig) -> int:
    model = load_model(config.model)
    gold = load_gold(config.corpus)
    observations = collect_observations(
        model, gold, config.measure, all_hypotheses=config.all_hypotheses, n_jobs=config.n_jobs
    )
    frame = emit_curves(build_cdfs(observations))
    buffer = io.StringIO()
    write_tsv(frame, buffer)
    write_output(buffer.getvalue(), config.out)
    return 0
