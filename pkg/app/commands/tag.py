import argparse
import logging
import sys
from pathlib import Path

from app.commands.common import add_jobs_argument, add_measure_arguments, add_model_argument, add_output_arguments, write_output
from app.schemas.command import CommandConfig
from app.schemas.confidence import ThresholdPolicy
from app.schemas.corpus import TaggedCorpus
from app.services.confidence_service import make_policy
from app.services.corpus_service import load_raw, parse_raw, serialize_tagged
from app.services.model_store import load_model
from app.services.tagging_service import SelectiveTagger

logger = logging.getLogger(__name__)

NAME = "tag"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, help="Gán nhãn văn bản đã tách từ, loại bỏ nhãn kém tin cậy")
    parser.add_argument("input", type=Path, nargs="?", help="Văn bản đầu vào, mỗi dòng một câu (mặc định stdin)")
    add_model_argument(parser)
    add_measure_arguments(parser)
    parser.add_argument("--reject-tag", dest="reject_tag", help="Nhãn đánh dấu token bị loại")
    parser.add_argument("--strict", action="store_true", help="Dừng khi gặp câu ngõ cụt thay vì gán nhãn tốt nhất có thể")
    add_jobs_argument(parser)
    add_output_arguments(parser)
    return parser


def run(config: CommandConfig) -> int:
    model = load_model(config.model)
    if config.threshold is None:
        policy = ThresholdPolicy.accept_all(config.measure)
    else:
        policy = make_policy(config.measure, config.threshold)

    sentences = load_raw(config.input) if config.input is not None else parse_raw(sys.stdin)
    tagger = SelectiveTagger(
        model,
        policy=policy,
        reject_tag=config.reject_tag,
        strict=config.strict,
        n_jobs=config.n_jobs,
    )
    tagged = tagger.tag(sentences)
    write_output(serialize_tagged(TaggedCorpus(sentences=tagged)), config.out)
    return 0
