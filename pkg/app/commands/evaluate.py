import argparse
import logging
from pathlib import Path

from app.commands.common import (
    add_jobs_argument,
    add_measure_arguments,
    add_model_argument,
    add_output_arguments,
    load_gold,
    write_output,
)
from app.schemas.command import CommandConfig
from app.schemas.confidence import ThresholdPolicy
from app.services.confidence_service import make_policy
from app.services.evaluation_service import (
    accuracy_summary,
    dump_json,
    format_report_text,
    format_summary_text,
    report,
    tally_corpus,
)
from app.services.model_store import load_model
from app.services.tagging_service import decode_sentences

logger = logging.getLogger(__name__)

NAME = "eval"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, help="Đo độ chính xác và hiệu suất với một ngưỡng trên ngữ liệu chuẩn")
    parser.add_argument("corpus", type=Path, help="Ngữ liệu có nhãn chuẩn")
    add_model_argument(parser)
    add_measure_arguments(parser)
    add_jobs_argument(parser)
    add_output_arguments(parser, stamp=True)
    return parser


def run(config: CommandConfig) -> int:
    """In báo cáo dạng văn bản ra stdout; --out ghi thêm bản JSON"""
    model = load_model(config.model)
    gold = load_gold(config.corpus)
    if config.threshold is None:
        policy = ThresholdPolicy.accept_all(config.measure)
    else:
        policy = make_policy(config.measure, config.threshold)

    posteriors = decode_sentences(model, gold.words(), n_jobs=config.n_jobs, strict=True)
    summary = accuracy_summary(
        [p for sentence in posteriors for p in sentence],
        [t for sentence in gold.gold_tags() for t in sentence],
    )
    counts = tally_corpus(posteriors, gold, policy)
    result = report(counts, policy, stamp=config.stamp).model_copy(update={"summary": summary})

    write_output(format_summary_text(summary) + format_report_text(result), None)
    if config.out is not None:
        write_output(dump_json(result), config.out)
    return 0
