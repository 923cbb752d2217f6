"""Rank and agreement metrics: PR curves, average precision, subset accuracy, recall, consistency.

Average precision follows the composite trapezoidal rule over a carefully
interpolated precision-recall curve: operating points are taken at every
distinct score threshold (ties share one threshold), and between consecutive
operating points extra PR points are inserted at each unit true-positive step
with false positives interpolated linearly in count space. This avoids the
over-optimism of interpolating precision linearly in PR coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, ZeroPositivesError


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float
    tp: float
    fp: float
    interpolated: bool


@dataclass(frozen=True)
class PRCurve:
    """PR points in non-decreasing recall order; the first point anchors recall 0."""

    points: tuple[PRPoint, ...]
    positives: int

    def base_points(self) -> list[PRPoint]:
        """The achievable operating points (one per distinct threshold, tp >= 1)."""
        return [p for p in self.points if not p.interpolated]


def _operating_points(scores: np.ndarray, golds: np.ndarray) -> list[tuple[int, int]]:
    """Cumulative (tp, fp) at each distinct threshold, scores descending."""
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_golds = golds[order]
    boundaries = np.nonzero(np.diff(sorted_scores))[0]
    ends = np.concatenate([boundaries + 1, [len(scores)]])
    cum_tp = np.cumsum(sorted_golds)
    points = []
    for end in ends:
        tp = int(cum_tp[end - 1])
        points.append((tp, int(end) - tp))
    return points


def pr_curve(scores: Sequence[float], golds: Sequence[int]) -> PRCurve:
    """Precision-recall curve for one label over per-case scores and gold bits.

    Operating points with tp = 0 shape the interpolation but are not emitted
    (they carry no defined precision mass), so every curve point has
    precision in (0, 1]. Requires at least one positive gold.
    """
    s = np.asarray(scores, dtype=np.float64)
    g = np.asarray(golds, dtype=np.int64)
    if s.shape != g.shape or s.ndim != 1 or len(s) == 0:
        raise InputError("scores and golds must be equal-length non-empty 1-D sequences")
    positives = int(g.sum())
    if positives == 0:
        raise ZeroPositivesError("PR curve undefined: no positive cases for this label")

    points: list[PRPoint] = []

    def emit(tp: float, fp: float, interpolated: bool) -> None:
        points.append(
            PRPoint(
                recall=tp / positives,
                precision=tp / (tp + fp),
                tp=tp,
                fp=fp,
                interpolated=interpolated,
            )
        )

    prev_tp, prev_fp = 0, 0
    for tp, fp in _operating_points(s, g):
        for step in range(prev_tp + 1, tp):
            frac = (step - prev_tp) / (tp - prev_tp)
            emit(step, prev_fp + frac * (fp - prev_fp), interpolated=True)
        if tp > 0:
            emit(tp, fp, interpolated=False)
        prev_tp, prev_fp = tp, fp

    anchor = PRPoint(recall=0.0, precision=points[0].precision, tp=0, fp=0, interpolated=True)
    return PRCurve(points=(anchor, *points), positives=positives)


def average_precision(curve: PRCurve) -> float:
    """Composite trapezoid over the curve's (recall, precision) points."""
    total = 0.0
    for left, right in zip(curve.points, curve.points[1:]):
        total += (right.recall - left.recall) * (right.precision + left.precision) / 2.0
    return total


def label_average_precisions(
    scores: np.ndarray, golds: np.ndarray
) -> list[float | None]:
    """AP per label column; None where the label has no positive case."""
    scores = np.asarray(scores, dtype=np.float64)
    golds = np.asarray(golds, dtype=np.int64)
    if scores.shape != golds.shape or scores.ndim != 2:
        raise InputError("scores and golds must be equal-shape 2-D arrays")
    out: list[float | None] = []
    for i in range(scores.shape[1]):
        try:
            out.append(average_precision(pr_curve(scores[:, i], golds[:, i])))
        except ZeroPositivesError:
            out.append(None)
    return out


def mean_average_precision(aps: Sequence[float | None]) -> float:
    """Arithmetic mean over the defined per-label AP values."""
    defined = [ap for ap in aps if ap is not None]
    if not defined:
        raise ZeroPositivesError("mAP undefined: every label has zero positives")
    return float(np.mean(defined))


def subset_accuracy(predictions: np.ndarray, golds: np.ndarray) -> float:
    """Fraction of cases whose whole predicted bit-vector equals the gold one."""
    p = np.asarray(predictions, dtype=np.int64)
    g = np.asarray(golds, dtype=np.int64)
    if p.shape != g.shape or p.ndim != 2 or len(p) == 0:
        raise InputError("predictions and golds must be equal-shape non-empty 2-D arrays")
    return float(np.mean(np.all(p == g, axis=1)))


def label_recalls(predictions: np.ndarray, golds: np.ndarray) -> list[float | None]:
    """Recall tp / (tp + fn) per label; None where the label has no positive case."""
    p = np.asarray(predictions, dtype=np.int64)
    g = np.asarray(golds, dtype=np.int64)
    if p.shape != g.shape or p.ndim != 2 or len(p) == 0:
        raise InputError("predictions and golds must be equal-shape non-empty 2-D arrays")
    out: list[float | None] = []
    for i in range(g.shape[1]):
        pos = int(g[:, i].sum())
        if pos == 0:
            out.append(None)
        else:
            out.append(float(np.sum((p[:, i] == 1) & (g[:, i] == 1)) / pos))
    return out


def mean_label_recall(predictions: np.ndarray, golds: np.ndarray) -> float:
    """Mean of per-label recalls over labels with at least one positive.

    Stricter than sample-wise recall on unbalanced data: a fully missed rare
    label drags the mean down by a full 1/n_defined share.
    """
    recalls = [r for r in label_recalls(predictions, golds) if r is not None]
    if not recalls:
        raise ZeroPositivesError("mean label recall undefined: no label has a positive case")
    return float(np.mean(recalls))


@dataclass(frozen=True)
class ConsistencyRecord:
    """One report with its three independent annotation label-sets."""

    case_id: str
    annotations: tuple[frozenset[str], frozenset[str], frozenset[str]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "annotations", tuple(frozenset(a) for a in self.annotations)
        )
        if len(self.annotations) != 3:
            raise InputError(f"case {self.case_id!r} needs exactly 3 annotations")


def annotator_consistency(records: Sequence[ConsistencyRecord]) -> float:
    """Mean per-report agreement: 1 if all three label-sets match, 2/3 if two do, else 1/3.

    Identity is exact label-set equality; there is no partial credit within a
    set. Summation uses math.fsum, so the value is independent of record order.
    """
    if not records:
        raise InputError("annotator_consistency needs at least one record")
    shares = []
    for record in records:
        a, b, c = record.annotations
        matches = (a == b) + (a == c) + (b == c)
        if matches == 3:
            shares.append(1.0)
        elif matches == 1:
            shares.append(2.0 / 3.0)
        else:
            shares.append(1.0 / 3.0)
    return math.fsum(shares) / len(records)
