import argparse
import io
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import List

import pandas as pd

from app.commands.common import (
    add_jobs_argument,
    add_measure_arguments,
    add_mode_argument,
    add_model_argument,
    add_output_arguments,
    load_gold,
    write_output,
)
from app.schemas.calibration import CalibrationReport, CalibrationResult, TargetKind
from app.schemas.command import CommandConfig
from app.schemas.confidence import format_threshold
from app.services.calibration_service import (
    build_cdfs,
    calibrate_efficiency,
    calibrate_threshold,
    collect_observations,
    sweep_frame,
    sweep_thresholds,
    write_tsv,
)
from app.services.evaluation_service import dump_json, format_percent
from app.services.model_store import load_model

logger = logging.getLogger(__name__)

NAME = "calibrate"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, help="Tìm ngưỡng đạt độ chính xác mục tiêu trên ngữ liệu chuẩn")
    parser.add_argument("corpus", type=Path, help="Ngữ liệu có nhãn chuẩn (held-out)")
    add_model_argument(parser)
    add_measure_arguments(parser, threshold=False)
    parser.add_argument(
        "--target",
        dest="targets",
        type=float,
        action="append",
        help="Độ chính xác mục tiêu trong (0, 1]; có thể lặp lại",
    )
    parser.add_argument(
        "--efficiency",
        dest="target_kind",
        action="store_const",
        const=TargetKind.EFFICIENCY.value,
        help="Coi --target là hiệu suất mục tiêu và tối đa hóa độ chính xác",
    )
    add_mode_argument(parser)
    parser.add_argument("--sweep", action="store_true", help="In toàn bộ đường cong đánh đổi thay vì một ngưỡng")
    add_jobs_argument(parser)
    add_output_arguments(parser, stamp=True)
    return parser


def format_results_text(results: List[CalibrationResult]) -> str:
    """Mỗi mục tiêu một dòng: đại lượng, ngưỡng, c, i, độ chính xác và hiệu suất dự đoán"""
    frame = pd.DataFrame([{
        "Measure": r.measure.value,
        "Mode": r.mode.value,
        "Target": r.target,
        # Ngưỡng giữ đủ chữ số để dùng lại nguyên giá trị với eval/tag
        "Threshold": str(format_threshold(r.threshold)),
        "s %": format_percent(r.s),
        "c %": format_percent(r.predicted_c),
        "i %": format_percent(r.predicted_i),
        "Accuracy %": format_percent(r.predicted_accuracy),
        "Efficiency %": format_percent(r.predicted_efficiency, 1),
    } for r in results])
    return frame.to_string(index=False) + "\n"


def run(config: CommandConfig) -> int:
    model = load_model(config.model)
    gold = load_gold(config.corpus)
    observations = collect_observations(model, gold, config.measure, n_jobs=config.n_jobs)
    cdfs = build_cdfs(observations)
    s = observations.s

    if config.sweep:
        buffer = io.StringIO()
        write_tsv(sweep_frame(sweep_thresholds(cdfs, s, config.measure)), buffer)
        write_output(buffer.getvalue(), config.out)
        return 0

    results = []
    for target in config.targets:
        if config.target_kind is TargetKind.EFFICIENCY:
            results.append(calibrate_efficiency(cdfs, s, target, config.mode, config.measure))
        else:
            results.append(calibrate_threshold(cdfs, s, target, config.mode, config.measure))

    calibration = CalibrationReport(
        results=results,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds") if config.stamp else None,
    )
    write_output(format_results_text(results), None)
    if config.out is not None:
        write_output(dump_json(calibration), config.out)
    return 0
