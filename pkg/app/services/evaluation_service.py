"""
Đếm kết quả chấp nhận/loại bỏ và tính các tỉ lệ s, c, i, a cùng các công thức
độ chính xác (bỏ qua, oracle), hiệu suất và độ chính xác toàn kho.

Mọi phép tính giữ nguyên độ chính xác; chỉ làm tròn khi định dạng báo cáo.
"""
import logging
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal
from typing import List, Optional, Sequence

import orjson
import pandas as pd
from pydantic import BaseModel

from app.core.exceptions import EmptyInputError, LengthMismatchError, UndefinedRateError, UsageError
from app.schemas.confidence import Decision, ThresholdPolicy, format_threshold
from app.schemas.corpus import TaggedCorpus
from app.schemas.evaluation import AccuracySummary, EvalCounts, EvaluationReport, Rates
from app.schemas.hmm import TokenPosterior
from app.services.confidence_service import apply_policy

logger = logging.getLogger(__name__)


def _check_proportion(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"{name} must lie in [0, 1], got {value}")


def tally(decisions: Sequence[Decision], gold: Sequence[str], ambiguous: Sequence[bool]) -> EvalCounts:
    """
    Đếm các ô chấp nhận/loại bỏ x đúng/sai trên token nhập nhằng

    Token không nhập nhằng được đếm riêng (tổng số và số gán đúng).
    """
    if not len(decisions) == len(gold) == len(ambiguous):
        raise LengthMismatchError(
            f"length mismatch: {len(decisions)} decisions, {len(gold)} gold tags, {len(ambiguous)} flags"
        )
    cells = {"ca": 0, "cr": 0, "ia": 0, "ir": 0}
    unambiguous_total = unambiguous_correct = 0
    for decision, gold_tag, is_ambiguous in zip(decisions, gold, ambiguous):
        correct = decision.tag == gold_tag
        if not is_ambiguous:
            unambiguous_total += 1
            unambiguous_correct += correct
            continue
        key = ("c" if correct else "i") + ("a" if decision.accepted else "r")
        cells[key] += 1
    return EvalCounts(
        correct_accepted=cells["ca"],
        correct_rejected=cells["cr"],
        incorrect_accepted=cells["ia"],
        incorrect_rejected=cells["ir"],
        unambiguous_total=unambiguous_total,
        unambiguous_correct=unambiguous_correct,
    )


def tally_corpus(
    posteriors: Sequence[Sequence[TokenPosterior]],
    corpus: TaggedCorpus,
    policy: ThresholdPolicy,
) -> EvalCounts:
    """Áp dụng policy cho từng câu đã giải mã rồi cộng dồn bảng đếm"""
    if len(posteriors) != len(corpus):
        raise LengthMismatchError(f"length mismatch: {len(posteriors)} decoded sentences, {len(corpus)} gold")
    decisions: List[Decision] = []
    gold: List[str] = []
    ambiguous: List[bool] = []
    for index, (sentence_posteriors, sentence) in enumerate(zip(posteriors, corpus.sentences)):
        if len(sentence_posteriors) != len(sentence):
            raise LengthMismatchError(f"length mismatch in sentence {index}")
        decisions.extend(apply_policy(sentence_posteriors, policy))
        gold.extend(t for _, t in sentence)
        ambiguous.extend(p.ambiguous for p in sentence_posteriors)
    return tally(decisions, gold, ambiguous)


def rates(counts: EvalCounts) -> Rates:
    """Tính s, c, i, a; mẫu số bằng 0 là lỗi ghi rõ tên tỉ lệ"""
    if counts.ambiguous_total == 0:
        raise UndefinedRateError("s", "no ambiguous tokens")
    if counts.correct_total == 0:
        raise UndefinedRateError("c", "no correctly tagged ambiguous tokens")
    if counts.incorrect_total == 0:
        raise UndefinedRateError("i", "no incorrectly tagged ambiguous tokens")
    return Rates(
        s=counts.correct_total / counts.ambiguous_total,
        c=counts.correct_rejected / counts.correct_total,
        i=counts.incorrect_rejected / counts.incorrect_total,
        a=counts.ambiguous_total / counts.token_total,
    )


def accuracy_ignore(s: float, c: float, i: float) -> float:
    """Độ chính xác trên các token không bị loại: s(1-c) / (1 - sc - (1-s)i)"""
    for name, value in (("s", s), ("c", c), ("i", i)):
        _check_proportion(name, value)
    denominator = 1.0 - s * c - (1.0 - s) * i
    if (c >= 1.0 and i >= 1.0) or denominator <= 0.0:
        raise UndefinedRateError("accuracy_ignore", "all tokens rejected")
    return s * (1.0 - c) / denominator


def accuracy_oracle(s: float, i: float) -> float:
    """Độ chính xác khi oracle gán đúng mọi token bị loại: s + (1-s)i"""
    _check_proportion("s", s)
    _check_proportion("i", i)
    return s + (1.0 - s) * i


def efficiency(s: float, c: float, i: float) -> float:
    """Tỉ lệ token nhập nhằng được gán nhãn: s(1-c) + (1-s)(1-i)"""
    for name, value in (("s", s), ("c", c), ("i", i)):
        _check_proportion(name, value)
    return s * (1.0 - c) + (1.0 - s) * (1.0 - i)


def overall_accuracy(a: float, acc_ambig: float) -> float:
    """Độ chính xác trên toàn kho, coi token không nhập nhằng là đúng: (1-a) + a*acc"""
    _check_proportion("a", a)
    _check_proportion("acc_ambig", acc_ambig)
    return (1.0 - a) + a * acc_ambig


def accuracy_summary(posteriors: Sequence[TokenPosterior], gold: Sequence[str]) -> AccuracySummary:
    """Độ chính xác khi chấp nhận tất cả: trên toàn bộ token, trên token nhập nhằng, và độ nhập nhằng"""
    if len(posteriors) != len(gold):
        raise LengthMismatchError(f"length mismatch: {len(posteriors)} posteriors, {len(gold)} gold tags")
    if not posteriors:
        raise EmptyInputError("empty input: no tokens to evaluate")
    correct = ambiguous = ambiguous_correct = 0
    for posterior, gold_tag in zip(posteriors, gold):
        hit = posterior.chosen_tag == gold_tag
        correct += hit
        if posterior.ambiguous:
            ambiguous += 1
            ambiguous_correct += hit
    total = len(posteriors)
    return AccuracySummary(
        token_count=total,
        ambiguous_count=ambiguous,
        all_accuracy=correct / total,
        ambiguous_accuracy=ambiguous_correct / ambiguous if ambiguous else None,
        ambiguity=ambiguous / total,
    )


def report(counts: EvalCounts, policy: ThresholdPolicy, stamp: bool = False) -> EvaluationReport:
    """Báo cáo đầy đủ: độ chính xác đo được (oracle, bỏ qua), hiệu suất, s, c, i, a và độ chính xác toàn kho"""
    r = rates(counts)
    oracle = accuracy_oracle(r.s, r.i)
    ignore: Optional[float] = None
    if counts.accepted_total > 0:
        ignore = accuracy_ignore(r.s, r.c, r.i)
    result = EvaluationReport(
        measure=policy.measure,
        threshold=policy.threshold,
        accuracy_oracle=oracle,
        accuracy_ignore=ignore,
        efficiency=efficiency(r.s, r.c, r.i),
        s=r.s,
        c=r.c,
        i=r.i,
        a=r.a,
        overall_accuracy=overall_accuracy(r.a, oracle),
        counts=counts,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds") if stamp else None,
    )
    logger.info(
        f"Đánh giá {policy.measure.value} ngưỡng {format_threshold(policy.threshold)}: "
        f"oracle {oracle:.4f}, hiệu suất {result.efficiency:.4f}"
    )
    return result


def format_percent(value: Optional[float], places: int = 2) -> str:
    """Phần trăm làm tròn nửa lên; None thành 'n/a'"""
    if value is None:
        return "n/a"
    quantum = Decimal(1).scaleb(-places)
    return str((Decimal(repr(value)) * 100).quantize(quantum, rounding=ROUND_HALF_UP))


def format_report_text(result: EvaluationReport) -> str:
    """Báo cáo dạng bảng văn bản căn lề"""
    rows = [
        ("measure", result.measure.value),
        ("threshold", str(format_threshold(result.threshold))),
        ("accuracy (oracle) %", format_percent(result.accuracy_oracle)),
        ("accuracy (ignore) %", format_percent(result.accuracy_ignore)),
        ("efficiency %", format_percent(result.efficiency, 1)),
        ("s %", format_percent(result.s)),
        ("c %", format_percent(result.c)),
        ("i %", format_percent(result.i)),
        ("ambiguity %", format_percent(result.a)),
        ("overall accuracy %", format_percent(result.overall_accuracy, 1)),
        ("ambiguous tokens", str(result.counts.ambiguous_total)),
        ("unambiguous tokens", str(result.counts.unambiguous_total)),
    ]
    if result.generated_at:
        rows.append(("generated at", result.generated_at))
    frame = pd.DataFrame(rows, columns=["field", "value"])
    return frame.to_string(index=False, header=False) + "\n"


def format_summary_text(summary: AccuracySummary) -> str:
    """Một dòng bảng độ chính xác cơ bản: All, Ambig, Ambiguity"""
    frame = pd.DataFrame(
        [{
            "Tokens": summary.token_count,
            "All %": format_percent(summary.all_accuracy),
            "Ambig %": format_percent(summary.ambiguous_accuracy),
            "Ambiguity %": format_percent(summary.ambiguity),
        }]
    )
    return frame.to_string(index=False) + "\n"


def dump_json(record: BaseModel) -> bytes:
    """Ghi một bản ghi pydantic thành JSON có thứ tự khóa cố định"""
    return orjson.dumps(record.model_dump(mode="json"), option=orjson.OPT_INDENT_2) + b"\n"
