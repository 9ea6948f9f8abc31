import argparse
import logging
from pathlib import Path

import pandas as pd

from app.commands.common import add_output_arguments, write_output
from app.core.config import settings
from app.schemas.command import CommandConfig
from app.services.corpus_service import corpus_stats, load_corpus, load_raw, read_closed_tags, train_model
from app.services.evaluation_service import accuracy_summary, format_percent, format_summary_text
from app.services.hmm_service import baum_welch_trace
from app.services.model_store import save_model
from app.services.tagging_service import decode_sentences

logger = logging.getLogger(__name__)

NAME = "train"


def register(subparsers: argparse._SubParsersAction) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, help="Huấn luyện mô hình từ ngữ liệu có nhãn")
    parser.add_argument("corpus", type=Path, help="Ngữ liệu huấn luyện (từ/NHÃN)")
    parser.add_argument("--closed-tags", dest="closed_tags", type=Path, help="File danh sách nhãn đóng")
    parser.add_argument("--raw", type=Path, help="Văn bản thô để tinh chỉnh bằng Baum-Welch")
    parser.add_argument("--bw-iters", dest="bw_iters", type=int, help="Số vòng Baum-Welch tối đa")
    parser.add_argument("--bw-tol", dest="bw_tol", type=float, help="Ngưỡng dừng theo mức tăng log-hợp lý")
    add_output_arguments(parser)
    return parser


def run(config: CommandConfig) -> int:
    """Huấn luyện, tùy chọn tinh chỉnh Baum-Welch, lưu mô hình và in thống kê"""
    corpus = load_corpus(config.corpus)
    closed = read_closed_tags(config.closed_tags) if config.closed_tags else settings.CLOSED_TAGS
    model = train_model(corpus, closed)

    lines = []
    if config.raw is not None:
        # Câu huấn luyện đi cùng văn bản thô để mọi từ trong từ điển vẫn có số đếm kỳ vọng
        raw = corpus.words() + load_raw(config.raw)
        result = baum_welch_trace(model, raw, config.bw_iters, config.bw_tol)
        model = result.model
        trace = pd.DataFrame({
            "iteration": range(len(result.log_likelihoods)),
            "log_likelihood": result.log_likelihoods,
        })
        lines.append(trace.to_string(index=False))
        lines.append(f"converged: {'yes' if result.converged else 'no'}")

    save_model(model, config.out)

    stats = corpus_stats(corpus, model)
    lines.append(pd.DataFrame([{
        "Tokens": stats.token_count,
        "Ambiguity %": format_percent(stats.ambiguous_fraction),
        "Unknown %": format_percent(stats.unknown_fraction),
    }]).to_string(index=False))

    # Tự kiểm tra trên chính ngữ liệu huấn luyện, chấp nhận mọi nhãn
    posteriors = decode_sentences(model, corpus.words(), n_jobs=config.n_jobs, strict=False)
    summary = accuracy_summary(
        [p for sentence in posteriors for p in sentence],
        [t for sentence in corpus.gold_tags() for t in sentence],
    )
    lines.append(format_summary_text(summary).rstrip("\n"))
    write_output("\n".join(lines) + "\n", None)
    return 0
