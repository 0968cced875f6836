"""Detection evaluation: greedy IoU matching, per-class AP, macro mAP.

Matching runs per image and per class: predictions sweep in order of
descending confidence (input order on ties) and each one claims the
still-unmatched ground-truth box of its class with the highest IoU at or
above the threshold, else counts as a false positive. A prediction without
a confidence scores 1.0, so rankings degrade gracefully for sources that
do not emit scores; over-predicting sources pay for it in precision.

AP is all-point interpolated: the precision/recall staircase is replaced
by its monotone (suffix-max) envelope and integrated over recall. Matches
are pooled across images into one PR curve per class; mAP is the plain
mean over classes that actually occur in the ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .alto import LabelMap, Page, Region
from .errors import EvaluationError
from .geometry import iou


@dataclass(frozen=True)
class PredictionMatch:
    """Outcome of one prediction after matching on one image."""

    class_index: int
    confidence: float
    is_true_positive: bool
    matched_gt_id: str | None = None


@dataclass(frozen=True)
class MatchResult:
    """All prediction outcomes of one image plus that image's gt counts."""

    predictions: tuple[PredictionMatch, ...]
    gt_counts: dict[int, int]
    label_map: LabelMap


@dataclass(frozen=True)
class ClassCounts:
    gt: int = 0
    pred: int = 0
    tp: int = 0
    fp: int = 0


@dataclass(frozen=True)
class EvalReport:
    """Per-class AP plus macro mAP, with the raw counts behind them."""

    per_class_ap: dict[str, float]
    mean_ap: float
    iou_threshold: float
    counts: dict[str, ClassCounts] = field(default_factory=dict)


def match(preds: Sequence[Region], gts: Sequence[Region], iou_thr: float,
          label_map: LabelMap | None = None) -> MatchResult:
    """Greedy within-image matching at the given IoU threshold."""
    if not 0.0 < iou_thr <= 1.0:
        raise ValueError(f"IoU threshold must be in (0, 1], got {iou_thr}")
    if label_map is None:
        seen: dict[str, None] = {}
        for region in list(gts) + list(preds):
            seen.setdefault(region.label, None)
        label_map = LabelMap(seen)

    gt_counts: dict[int, int] = {}
    for gt in gts:
        gt_counts[label_map.index(gt.label)] = gt_counts.get(label_map.index(gt.label), 0) + 1

    order = sorted(range(len(preds)),
                   key=lambda i: -(preds[i].confidence if preds[i].confidence is not None else 1.0))
    matched_gt: set[int] = set()
    outcome_by_pred: dict[int, PredictionMatch] = {}
    for i in order:
        pred = preds[i]
        confidence = pred.confidence if pred.confidence is not None else 1.0
        best_j, best_iou = None, 0.0
        for j, gt in enumerate(gts):
            if j in matched_gt or gt.label != pred.label:
                continue
            overlap = iou(pred.box, gt.box)
            if overlap >= iou_thr and overlap > best_iou:
                best_j, best_iou = j, overlap
        if best_j is not None:
            matched_gt.add(best_j)
            outcome_by_pred[i] = PredictionMatch(
                class_index=label_map.index(pred.label),
                confidence=confidence,
                is_true_positive=True,
                matched_gt_id=gts[best_j].id,
            )
        else:
            outcome_by_pred[i] = PredictionMatch(
                class_index=label_map.index(pred.label),
                confidence=confidence,
                is_true_positive=False,
            )

    predictions = tuple(outcome_by_pred[i] for i in order)
    return MatchResult(predictions=predictions, gt_counts=gt_counts, label_map=label_map)


def average_precision(predictions: Iterable[PredictionMatch], gt_count: int) -> float:
    """All-point interpolated AP for one class from pooled match outcomes.

    The envelope value at each true positive contributes 1/gt_count of
    itself, which is the exact integral of the staircase and keeps the
    perfect-detector case at exactly 1.0.
    """
    if gt_count <= 0:
        raise EvaluationError("AP is undefined for a class with no ground truth")
    preds = list(predictions)
    if not preds:
        return 0.0

    confidence = np.array([p.confidence for p in preds], dtype=float)
    is_tp = np.array([p.is_true_positive for p in preds], dtype=bool)
    order = np.argsort(-confidence, kind="stable")
    is_tp = is_tp[order]
    if not is_tp.any():
        return 0.0

    tp_cum = np.cumsum(is_tp)
    precision = tp_cum / np.arange(1, len(preds) + 1)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    return float(envelope[is_tp].sum() / gt_count)


def evaluate(pred_pages: Mapping[str, object], gt_pages: Mapping[str, object],
             iou_thr: float = 0.5) -> EvalReport:
    """Whole-dataset report over pages keyed by image path.

    Inputs may map to Pages or straight to region sequences. Keys must
    agree exactly; pooling walks keys in sorted order so the report does
    not depend on mapping insertion order.
    """
    if not 0.0 < iou_thr <= 1.0:
        raise ValueError(f"IoU threshold must be in (0, 1], got {iou_thr}")
    missing_preds = sorted(set(gt_pages) - set(pred_pages))
    missing_gts = sorted(set(pred_pages) - set(gt_pages))
    if missing_preds or missing_gts:
        parts = []
        if missing_preds:
            parts.append(f"keys missing from predictions: {missing_preds}")
        if missing_gts:
            parts.append(f"keys missing from ground truth: {missing_gts}")
        raise EvaluationError("; ".join(parts))
    if not gt_pages:
        raise EvaluationError("ground-truth set is empty")

    keys = sorted(gt_pages)
    label_map = _label_universe(keys, gt_pages, pred_pages)

    pooled: dict[int, list[PredictionMatch]] = {i: [] for i in range(len(label_map))}
    gt_totals: dict[int, int] = {i: 0 for i in range(len(label_map))}
    for key in keys:
        result = match(_regions(pred_pages[key]), _regions(gt_pages[key]),
                       iou_thr, label_map)
        for pm in result.predictions:
            pooled[pm.class_index].append(pm)
        for class_index, count in result.gt_counts.items():
            gt_totals[class_index] += count

    if sum(gt_totals.values()) == 0:
        raise EvaluationError("ground-truth set contains no regions")

    per_class_ap: dict[str, float] = {}
    counts: dict[str, ClassCounts] = {}
    for class_index, label in enumerate(label_map):
        preds = pooled[class_index]
        tp = sum(1 for p in preds if p.is_true_positive)
        counts[label] = ClassCounts(gt=gt_totals[class_index], pred=len(preds),
                                    tp=tp, fp=len(preds) - tp)
        if gt_totals[class_index] > 0:
            per_class_ap[label] = average_precision(preds, gt_totals[class_index])

    mean_ap = math.fsum(per_class_ap.values()) / len(per_class_ap)
    return EvalReport(per_class_ap=per_class_ap, mean_ap=mean_ap,
                      iou_threshold=iou_thr, counts=counts)


def _label_universe(keys, gt_pages, pred_pages) -> LabelMap:
    seen: dict[str, None] = {}
    for key in keys:
        for region in _regions(gt_pages[key]):
            seen.setdefault(region.label, None)
    for key in keys:
        for region in _regions(pred_pages[key]):
            seen.setdefault(region.label, None)
    return LabelMap(seen)


def _regions(value: object) -> Sequence[Region]:
    if isinstance(value, Page):
        return value.regions
    return tuple(value)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# report rendering

def format_table(report: EvalReport) -> str:
    """Aligned text table, APs in percent with 2 decimals."""
    rows = [("class", "gt", "pred", "tp", "fp", "AP%")]
    for label in _report_order(report):
        c = report.counts[label]
        ap = report.per_class_ap.get(label)
        ap_text = f"{ap * 100:.2f}" if ap is not None else "-"
        rows.append((label, str(c.gt), str(c.pred), str(c.tp), str(c.fp), ap_text))
    rows.append(("mAP", "", "", "", "", f"{report.mean_ap * 100:.2f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * max(len(line) for line in lines))
    return "\n".join(lines) + "\n"


def format_kv(report: EvalReport) -> str:
    """Machine-readable key=value lines, percents with 2 decimals."""
    lines = [f"iou_threshold={report.iou_threshold:g}",
             f"map={report.mean_ap * 100:.2f}"]
    for label in _report_order(report):
        c = report.counts[label]
        ap = report.per_class_ap.get(label)
        if ap is not None:
            lines.append(f"ap.{label}={ap * 100:.2f}")
        lines.extend((f"gt.{label}={c.gt}", f"pred.{label}={c.pred}",
                      f"tp.{label}={c.tp}", f"fp.{label}={c.fp}"))
    return "\n".join(lines) + "\n"


def _report_order(report: EvalReport) -> list[str]:
    return sorted(report.counts, key=lambda lab: (-report.counts[lab].gt, lab))
