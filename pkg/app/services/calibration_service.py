"""
Phân phối tích lũy thực nghiệm của độ tin cậy (nhãn đúng / nhãn sai) và
hiệu chỉnh ngưỡng để đạt độ chính xác hoặc hiệu suất mục tiêu.

Ngưỡng ứng viên là đúng các giá trị quan sát được cộng thêm ngưỡng chấp nhận tất cả
(-inf với cận dưới, +inf với cận trên) và biên miền giá trị (loại tất cả), xếp theo
thứ tự số token bị loại tăng dần.
"""
import logging
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from app.core.exceptions import InsufficientObservationsError, TargetUnachievableError, UndefinedRateError, UsageError
from app.schemas.calibration import AccuracyMode, CalibrationResult, SweepRow, TargetKind
from app.schemas.confidence import ConfidenceMeasure, format_threshold
from app.schemas.corpus import TaggedCorpus
from app.services.confidence_service import measure_value, score_value
from app.services.evaluation_service import accuracy_ignore, accuracy_oracle, efficiency
from app.services.hmm_model import HmmModel
from app.services.tagging_service import decode_sentences

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["value", "cum_count_correct", "cum_count_incorrect", "cum_frac_correct", "cum_frac_incorrect"]


class ObservationSet:
    """Các cặp (giá trị đo, đúng/sai), mỗi cặp ứng với một giả thuyết của một token nhập nhằng"""

    def __init__(self, values: Sequence[float], correct: Sequence[bool], measure: ConfidenceMeasure):
        self.values = np.asarray(values, dtype=np.float64)
        self.correct = np.asarray(correct, dtype=bool)
        self.measure = measure
        if self.values.shape != self.correct.shape or self.values.ndim != 1:
            raise ValueError("values and correct flags must be 1-d and of equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observation values must be finite")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_correct(self) -> int:
        return int(self.correct.sum())

    @property
    def n_incorrect(self) -> int:
        return len(self) - self.n_correct

    @property
    def s(self) -> float:
        """Tỉ lệ đúng; không xác định khi tập rỗng"""
        if len(self) == 0:
            raise InsufficientObservationsError("no ambiguous tokens")
        return self.n_correct / len(self)


def collect_observations(
    model: HmmModel,
    tagged: TaggedCorpus,
    measure: ConfidenceMeasure,
    all_hypotheses: bool = False,
    n_jobs: int = 1,
) -> ObservationSet:
    """
    Giải mã ngữ liệu chuẩn và ghi lại giá trị đo của nhãn được chọn trên mỗi token nhập nhằng

    Args:
        model: Mô hình HMM
        tagged: Ngữ liệu có nhãn chuẩn
        measure: Đại lượng đo
        all_hypotheses: Ghi mọi giả thuyết của token (chỉ với prob, surprisal, pentropy)
        n_jobs: Số tiến trình giải mã

    Returns:
        ObservationSet; lỗi "no ambiguous tokens" nếu không có token nhập nhằng nào
    """
    measure = ConfidenceMeasure(measure)
    if all_hypotheses and not measure.per_hypothesis:
        raise UsageError(f"measure {measure.value} is only defined for the chosen hypothesis")

    decoded = decode_sentences(model, tagged.words(), n_jobs=n_jobs, strict=True)
    values: List[float] = []
    correct: List[bool] = []
    for posteriors, sentence in zip(decoded, tagged.sentences):
        for posterior, (word, gold) in zip(posteriors, sentence):
            if not posterior.ambiguous:
                continue
            if all_hypotheses:
                for tag, score in posterior.hypotheses:
                    values.append(score_value(score, measure, word))
                    correct.append(tag == gold)
            else:
                values.append(measure_value(posterior, measure))
                correct.append(posterior.chosen_tag == gold)

    if not values:
        raise InsufficientObservationsError("no ambiguous tokens")
    observations = ObservationSet(values, correct, measure)
    logger.info(
        f"Thu thập {len(observations)} quan sát ({measure.value}): "
        f"{observations.n_correct} đúng, {observations.n_incorrect} sai, s={observations.s:.4f}"
    )
    return observations


class EmpiricalCdf:
    """
    Hai hàm phân phối tích lũy bậc thang (nhãn đúng, nhãn sai) trên cùng lưới giá trị

    grid là các giá trị phân biệt đã sắp xếp; cum_correct[k], cum_incorrect[k] là số
    quan sát có giá trị <= grid[k].
    """

    def __init__(self, correct_values: np.ndarray, incorrect_values: np.ndarray, measure: ConfidenceMeasure):
        self.measure = measure
        self._correct = np.sort(np.asarray(correct_values, dtype=np.float64))
        self._incorrect = np.sort(np.asarray(incorrect_values, dtype=np.float64))
        self.grid = np.unique(np.concatenate([self._correct, self._incorrect]))
        self.cum_correct = np.searchsorted(self._correct, self.grid, side="right")
        self.cum_incorrect = np.searchsorted(self._incorrect, self.grid, side="right")

    @property
    def n_correct(self) -> int:
        return len(self._correct)

    @property
    def n_incorrect(self) -> int:
        return len(self._incorrect)

    @property
    def s(self) -> float:
        return self.n_correct / (self.n_correct + self.n_incorrect)

    def correct_at(self, value: float) -> float:
        """F_correct(value): tỉ lệ nhãn đúng có giá trị <= value"""
        return int(np.searchsorted(self._correct, value, side="right")) / self.n_correct

    def incorrect_at(self, value: float) -> float:
        return int(np.searchsorted(self._incorrect, value, side="right")) / self.n_incorrect

    def rejected_counts(self, threshold: float) -> Tuple[int, int]:
        """Số nhãn đúng và sai bị loại tại ngưỡng (so sánh chặt phía loại bỏ)"""
        if self.measure.lower_bounded:
            return (
                int(np.searchsorted(self._correct, threshold, side="left")),
                int(np.searchsorted(self._incorrect, threshold, side="left")),
            )
        return (
            self.n_correct - int(np.searchsorted(self._correct, threshold, side="right")),
            self.n_incorrect - int(np.searchsorted(self._incorrect, threshold, side="right")),
        )

    def candidates(self) -> List[float]:
        """Các ngưỡng ứng viên theo thứ tự số token bị loại tăng dần, kết thúc bằng ngưỡng loại tất cả"""
        observed = [float(v) for v in self.grid]
        if not self.measure.lower_bounded:
            observed.reverse()
        boundary = self.measure.reject_all_threshold
        if not observed or observed[-1] != boundary:
            observed.append(boundary)
        return [self.measure.accept_all_threshold] + observed


def build_cdfs(obs: ObservationSet) -> EmpiricalCdf:
    """Dựng hai CDF thực nghiệm; cần ít nhất một quan sát đúng và một quan sát sai"""
    if obs.n_correct == 0:
        raise InsufficientObservationsError("no correct observations: the correct subpopulation is empty")
    if obs.n_incorrect == 0:
        raise InsufficientObservationsError("no incorrect observations: the incorrect subpopulation is empty")
    return EmpiricalCdf(obs.values[obs.correct], obs.values[~obs.correct], obs.measure)


def _check_target(name: str, target: float) -> None:
    if not 0.0 < target <= 1.0:
        raise UsageError(f"{name} must lie in (0, 1], got {target}")


def _check_cdfs(cdfs: EmpiricalCdf, s: float, measure: ConfidenceMeasure) -> None:
    if not 0.0 < s < 1.0:
        raise UsageError(f"s must lie in (0, 1), got {s}")
    if cdfs.measure != measure:
        raise UsageError(f"curves were built for {cdfs.measure.value}, not {ConfidenceMeasure(measure).value}")


def _predictions(
    cdfs: EmpiricalCdf, s: float
) -> Iterator[Tuple[float, float, float, float, Optional[float], float]]:
    """(ngưỡng, c, i, acc oracle, acc ignore hoặc None, hiệu suất) cho từng ứng viên"""
    for threshold in cdfs.candidates():
        correct_rejected, incorrect_rejected = cdfs.rejected_counts(threshold)
        c = correct_rejected / cdfs.n_correct
        i = incorrect_rejected / cdfs.n_incorrect
        try:
            ignore: Optional[float] = accuracy_ignore(s, c, i)
        except UndefinedRateError:
            ignore = None
        yield threshold, c, i, accuracy_oracle(s, i), ignore, efficiency(s, c, i)


def _result(
    measure: ConfidenceMeasure,
    mode: AccuracyMode,
    target_kind: TargetKind,
    target: float,
    s: float,
    row: Tuple[float, float, float, float, Optional[float], float],
    accuracy: float,
) -> CalibrationResult:
    threshold, c, i, _, _, eff = row
    result = CalibrationResult(
        measure=measure,
        mode=mode,
        target_kind=target_kind,
        target=target,
        threshold=threshold,
        s=s,
        predicted_c=c,
        predicted_i=i,
        predicted_efficiency=eff,
        predicted_accuracy=accuracy,
    )
    logger.info(
        f"Ngưỡng {measure.value} = {format_threshold(threshold)} cho {target_kind.value} {target}: "
        f"độ chính xác {accuracy:.4f} ({mode.value}), hiệu suất {eff:.4f}"
    )
    return result


def calibrate_threshold(
    cdfs: EmpiricalCdf,
    s: float,
    target: float,
    mode: AccuracyMode,
    measure: ConfidenceMeasure,
) -> CalibrationResult:
    """
    Chọn ngưỡng có hiệu suất dự đoán lớn nhất trong số các ngưỡng đạt độ chính xác mục tiêu

    Hòa hiệu suất thì lấy độ chính xác cao hơn, rồi đến ngưỡng loại ít token hơn.
    """
    _check_target("target", target)
    _check_cdfs(cdfs, s, measure)
    mode = AccuracyMode(mode)

    best = None
    best_key: Tuple[float, float] = (-1.0, -1.0)
    for row in _predictions(cdfs, s):
        accuracy = row[3] if mode is AccuracyMode.ORACLE else row[4]
        if accuracy is None or accuracy < target:
            continue
        key = (row[5], accuracy)
        if key > best_key:
            best, best_key = row, key
    if best is None:
        raise TargetUnachievableError(f"no threshold reaches {mode.value} accuracy {target}")
    return _result(measure, mode, TargetKind.ACCURACY, target, s, best, best_key[1])


def calibrate_efficiency(
    cdfs: EmpiricalCdf,
    s: float,
    target_efficiency: float,
    mode: AccuracyMode,
    measure: ConfidenceMeasure,
) -> CalibrationResult:
    """Chọn ngưỡng có độ chính xác dự đoán lớn nhất trong số các ngưỡng đạt hiệu suất mục tiêu"""
    _check_target("target efficiency", target_efficiency)
    _check_cdfs(cdfs, s, measure)
    mode = AccuracyMode(mode)

    best = None
    best_key: Tuple[float, float] = (-1.0, -1.0)
    for row in _predictions(cdfs, s):
        accuracy = row[3] if mode is AccuracyMode.ORACLE else row[4]
        if accuracy is None or row[5] < target_efficiency:
            continue
        key = (accuracy, row[5])
        if key > best_key:
            best, best_key = row, key
    if best is None:
        raise TargetUnachievableError(f"no threshold reaches efficiency {target_efficiency}")
    return _result(measure, mode, TargetKind.EFFICIENCY, target_efficiency, s, best, best_key[0])


def sweep_thresholds(cdfs: EmpiricalCdf, s: float, measure: ConfidenceMeasure) -> List[SweepRow]:
    """Đường cong đánh đổi: mọi ngưỡng ứng viên cùng c, i, độ chính xác và hiệu suất dự đoán"""
    _check_cdfs(cdfs, s, measure)
    return [
        SweepRow(threshold=t, c=c, i=i, accuracy_oracle=oracle, accuracy_ignore=ignore, efficiency=eff)
        for t, c, i, oracle, ignore, eff in _predictions(cdfs, s)
    ]


def emit_curves(cdfs: EmpiricalCdf) -> pd.DataFrame:
    """Bảng số liệu của hai đường cong tích lũy, sắp theo giá trị"""
    return pd.DataFrame({
        "value": cdfs.grid,
        "cum_count_correct": cdfs.cum_correct,
        "cum_count_incorrect": cdfs.cum_incorrect,
        "cum_frac_correct": cdfs.cum_correct / cdfs.n_correct,
        "cum_frac_incorrect": cdfs.cum_incorrect / cdfs.n_incorrect,
    }, columns=CURVE_COLUMNS)


def write_tsv(frame: pd.DataFrame, target: Union[str, Path, TextIO]) -> None:
    """Ghi bảng dạng TSV có dòng tiêu đề, giữ đủ độ chính xác số thực"""
    frame.to_csv(target, sep="\t", index=False, lineterminator="\n")


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump(mode="json") for row in rows])
