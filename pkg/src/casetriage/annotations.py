"""Append-only annotation log: durable event appends and replay helpers.

The log is JSONL, one event per line, never rewritten. All queue state
(pending counts, per-case status, consistency records) is a pure function of
the log contents, so replaying the file after a restart reconstructs the
service exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError
from .metrics import ConsistencyRecord


@dataclass(frozen=True)
class AnnotationEvent:
    """One reviewer's label-set decision for one case."""

    task: str
    case_id: str
    reviewer_id: str
    labels: tuple[str, ...]
    timestamp: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(sorted(set(self.labels))))
        if not self.case_id or not self.reviewer_id:
            raise InputError("annotation events need a case_id and a reviewer_id")

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "case_id": self.case_id,
            "reviewer_id": self.reviewer_id,
            "labels": list(self.labels),
            "timestamp": self.timestamp,
        }


def load_log(path: str | Path) -> list[AnnotationEvent]:
    """Replay the log; a missing file is an empty log."""
    path = Path(path)
    if not path.exists():
        return []
    events = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                events.append(
                    AnnotationEvent(
                        task=raw.get("task", ""),
                        case_id=raw["case_id"],
                        reviewer_id=raw["reviewer_id"],
                        labels=tuple(raw["labels"]),
                        timestamp=raw.get("timestamp", ""),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad annotation event: {exc}") from exc
    return events


def append_event(path: str | Path, event: AnnotationEvent) -> None:
    """Append one event and fsync before returning, so a 2xx response is durable."""
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(event.to_dict(), ensure_ascii=False) + "\n")
        handle.flush()
        os.fsync(handle.fileno())


def latest_by_reviewer(
    events: list[AnnotationEvent], task: str | None = None
) -> dict[str, dict[str, frozenset[str]]]:
    """case_id -> reviewer_id -> that reviewer's most recent label set.

    Repeat submissions are legitimate history; the latest one wins here.
    """
    out: dict[str, dict[str, frozenset[str]]] = {}
    for event in events:
        if task is not None and event.task != task:
            continue
        out.setdefault(event.case_id, {})[event.reviewer_id] = frozenset(event.labels)
    return out


def consistency_records(
    events: list[AnnotationEvent],
    case_ids: list[str] | None = None,
    task: str | None = None,
) -> tuple[list[ConsistencyRecord], dict[str, int]]:
    """Build three-annotator records from the log.

    Returns the records for cases with exactly three reviewers plus a map of
    case id -> reviewer count for the cases that do not qualify (callers decide
    whether that is an error or just something to skip).
    """
    per_case = latest_by_reviewer(events, task=task)
    if case_ids is None:
        case_ids = sorted(per_case)
    records: list[ConsistencyRecord] = []
    problems: dict[str, int] = {}
    for case_id in case_ids:
        sets = per_case.get(case_id, {})
        if len(sets) != 3:
            problems[case_id] = len(sets)
            continue
        annotations = tuple(sets[r] for r in sorted(sets))
        records.append(ConsistencyRecord(case_id=case_id, annotations=annotations))
    return records, problems
