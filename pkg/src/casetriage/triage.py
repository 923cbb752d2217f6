"""Confidence-band triage: split cases into automatic vs. expert-review groups.

A case is deferred to a human whenever any of its per-label scores falls
inside the closed band [t_low, t_high]; everything else is decided
automatically (score above the band means positive, below means negative).
The band is tuned on validation data to maximize
automatic accuracy * (1 - uncertain percentage).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, LowConfidenceCaseError, ZeroPositivesError
from .metrics import mean_label_recall, subset_accuracy

# Candidate t_low values for tuning, with t_high pinned at 1 - t_low.
TUNING_GRID = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45)

# Decision threshold used when scoring the full set without a band.
FULL_SET_THRESHOLD = 0.5


@dataclass(frozen=True)
class ThresholdPair:
    """The [t_low, t_high] uncertainty band."""

    t_low: float
    t_high: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.t_low < self.t_high <= 1.0):
            raise InputError(f"need 0 <= t_low < t_high <= 1, got ({self.t_low}, {self.t_high})")

    @classmethod
    def symmetric(cls, t_low: float) -> "ThresholdPair":
        """Tuned-mode band with t_high = 1 - t_low; requires t_low in (0, 0.5)."""
        if not 0.0 < t_low < 0.5:
            raise InputError(f"symmetric band needs t_low in (0, 0.5), got {t_low}")
        return cls(t_low=t_low, t_high=1.0 - t_low)


def _as_score_matrix(scores: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.size == 0:
        raise InputError("scores must be a non-empty 2-D array (cases x labels)")
    return s


def split_confidence(
    scores: Sequence[Sequence[float]] | np.ndarray, thresholds: ThresholdPair
) -> tuple[list[int], list[int]]:
    """Partition case positions into (high_confidence, low_confidence).

    Low confidence means at least one score inside the closed band; the
    boundary itself routes to humans.
    """
    s = _as_score_matrix(scores)
    in_band = (s >= thresholds.t_low) & (s <= thresholds.t_high)
    low_mask = in_band.any(axis=1)
    positions = np.arange(len(s))
    return list(positions[~low_mask]), list(positions[low_mask])


def decide_labels(
    scores: Sequence[float] | np.ndarray, thresholds: ThresholdPair
) -> np.ndarray:
    """Bit-vector decision for a high-confidence case: 1 above the band, 0 below."""
    s = np.asarray(scores, dtype=np.float64)
    inside = (s >= thresholds.t_low) & (s <= thresholds.t_high)
    if inside.any():
        raise LowConfidenceCaseError(
            f"case has scores inside [{thresholds.t_low}, {thresholds.t_high}] "
            f"at labels {np.nonzero(inside)[0].tolist()}"
        )
    return (s > thresholds.t_high).astype(np.int64)


@dataclass(frozen=True)
class TriageReport:
    """Automation summary for one task on one evaluation set."""

    uncertain_percentage: float
    automatic_subset_accuracy: float | None
    automatic_mean_recall: float | None
    full_set_accuracy: float
    n_total: int
    n_high_confidence: int
    n_low_confidence: int

    def to_dict(self) -> dict:
        return {
            "uncertain_pct": self.uncertain_percentage,
            "auto_accuracy": self.automatic_subset_accuracy,
            "auto_recall": self.automatic_mean_recall,
            "full_accuracy": self.full_set_accuracy,
            "n_total": self.n_total,
            "n_high_confidence": self.n_high_confidence,
            "n_low_confidence": self.n_low_confidence,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TriageReport":
        return cls(
            uncertain_percentage=raw["uncertain_pct"],
            automatic_subset_accuracy=raw["auto_accuracy"],
            automatic_mean_recall=raw["auto_recall"],
            full_set_accuracy=raw["full_accuracy"],
            n_total=raw["n_total"],
            n_high_confidence=raw["n_high_confidence"],
            n_low_confidence=raw["n_low_confidence"],
        )


def evaluate_triage(
    scores: Sequence[Sequence[float]] | np.ndarray,
    golds: Sequence[Sequence[int]] | np.ndarray,
    thresholds: ThresholdPair,
) -> TriageReport:
    """Band split plus the accuracy/recall numbers for the automatic group.

    Accuracy fields are None when every case lands in the review queue; the
    full-set accuracy always uses a plain 0.5 decision threshold over all cases.
    """
    s = _as_score_matrix(scores)
    g = np.asarray(golds, dtype=np.int64)
    if g.shape != s.shape:
        raise InputError(f"golds shape {g.shape} does not match scores shape {s.shape}")

    high, low = split_confidence(s, thresholds)
    auto_accuracy: float | None = None
    auto_recall: float | None = None
    if high:
        decisions = np.stack([decide_labels(s[i], thresholds) for i in high])
        auto_accuracy = subset_accuracy(decisions, g[high])
        try:
            auto_recall = mean_label_recall(decisions, g[high])
        except ZeroPositivesError:
            auto_recall = None

    full_predictions = (s > FULL_SET_THRESHOLD).astype(np.int64)
    return TriageReport(
        uncertain_percentage=len(low) / len(s),
        automatic_subset_accuracy=auto_accuracy,
        automatic_mean_recall=auto_recall,
        full_set_accuracy=subset_accuracy(full_predictions, g),
        n_total=len(s),
        n_high_confidence=len(high),
        n_low_confidence=len(low),
    )


@dataclass(frozen=True)
class TuningResult:
    """Grid search outcome: the chosen t_low and the objective at every grid point."""

    t_low: float
    thresholds: ThresholdPair
    objectives: tuple[tuple[float, float], ...]   # (t_low, objective) per grid point

    def __post_init__(self) -> None:
        best = max(obj for _, obj in self.objectives)
        chosen = dict(self.objectives)[self.t_low]
        if chosen != best:
            raise InputError("chosen t_low does not attain the grid maximum")


def tune_thresholds(
    scores: Sequence[Sequence[float]] | np.ndarray,
    golds: Sequence[Sequence[int]] | np.ndarray,
    grid: Sequence[float] = TUNING_GRID,
) -> TuningResult:
    """Pick t_low from the grid maximizing automatic accuracy * (1 - uncertain pct).

    Grid points whose high-confidence group is empty score 0, so the search is
    total; ties break toward the largest t_low (the narrowest band, maximum
    automation).
    """
    s = _as_score_matrix(scores)
    g = np.asarray(golds, dtype=np.int64)
    if not len(grid):
        raise InputError("threshold grid must be non-empty")

    objectives: list[tuple[float, float]] = []
    best_t, best_obj = None, -1.0
    for t_low in sorted(grid):
        report = evaluate_triage(s, g, ThresholdPair.symmetric(t_low))
        if report.automatic_subset_accuracy is None:
            objective = 0.0
        else:
            objective = report.automatic_subset_accuracy * (1.0 - report.uncertain_percentage)
        objectives.append((t_low, objective))
        if objective >= best_obj:
            best_t, best_obj = t_low, objective

    assert best_t is not None
    return TuningResult(
        t_low=best_t,
        thresholds=ThresholdPair.symmetric(best_t),
        objectives=tuple(objectives),
    )


def format_triage_table(rows: Sequence[tuple[str, TriageReport]]) -> str:
    """Human-readable table of triage reports, percentages to two decimals."""
    headers = ("Task", "Uncertain", "Auto recall", "Auto accuracy", "Full-set accuracy")

    def pct(value: float | None) -> str:
        return "undefined" if value is None else f"{100.0 * value:.2f}%"

    table = [headers]
    for task, report in rows:
        table.append(
            (
                task,
                pct(report.uncertain_percentage),
                pct(report.automatic_mean_recall),
                pct(report.automatic_subset_accuracy),
                pct(report.full_set_accuracy),
            )
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in table]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
