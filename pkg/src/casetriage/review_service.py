"""HTTP service for expert review of low-confidence cases.

Serves the review queue produced by `casetriage evaluate`, accepts annotation
submissions into an append-only JSONL log, and reports live queue and
agreement numbers. All state is reconstructed from the queue file and the log,
so restarting the service never loses or invents annotations.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotations import AnnotationEvent, append_event, consistency_records, load_log
from .corpus import TaskSchema, load_dataset, load_schema
from .errors import InputError
from .metrics import annotator_consistency
from .triage import ThresholdPair


@dataclass(frozen=True)
class QueuedCase:
    id: str
    text: str
    scores: tuple[float, ...]
    margin: float   # distance of the closest score to 0.5; small = least sure


@dataclass(frozen=True)
class ServiceTask:
    """One task's review queue plus everything needed to render and validate it."""

    name: str
    schema: TaskSchema
    thresholds: ThresholdPair
    queue: tuple[QueuedCase, ...]
    triage_report: dict | None

    @classmethod
    def from_files(
        cls,
        queue_path: Path,
        dataset_path: Path,
        schema_path: Path,
        report_path: Path | None = None,
    ) -> "ServiceTask":
        schema = load_schema(schema_path)
        text_by_id = {case.id: case.text for case in load_dataset(dataset_path, schema)}
        try:
            raw = json.loads(Path(queue_path).read_text(encoding="utf-8"))
            name = raw["task"]
            thresholds = ThresholdPair(t_low=raw["t_low"], t_high=raw["t_high"])
            entries = raw["cases"]
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read queue file {queue_path}: {exc}") from exc

        queue = []
        for entry in entries:
            case_id, scores = entry["id"], entry["scores"]
            if case_id not in text_by_id:
                raise InputError(f"queue case {case_id!r} is not in the dataset")
            if len(scores) != schema.n_labels:
                raise InputError(f"queue case {case_id!r} has {len(scores)} scores, "
                                 f"schema has {schema.n_labels} labels")
            margin = float(np.min(np.abs(np.asarray(scores) - 0.5)))
            queue.append(QueuedCase(case_id, text_by_id[case_id], tuple(scores), margin))

        report = None
        if report_path is not None:
            report = json.loads(Path(report_path).read_text(encoding="utf-8"))
        return cls(
            name=name,
            schema=schema,
            thresholds=thresholds,
            queue=tuple(queue),
            triage_report=report,
        )


class AnnotationIn(BaseModel):
    case_id: str
    reviewer_id: str
    labels: list[str]
    task: str | None = None


def build_app(
    tasks: list[ServiceTask],
    log_path: Path,
    static_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="casetriage review service")
    by_name = {task.name: task for task in tasks}
    if len(by_name) != len(tasks):
        raise InputError("duplicate task names in service configuration")

    # The log is the source of truth; the in-memory copy just avoids rereads.
    events: list[AnnotationEvent] = load_log(log_path)
    write_lock = threading.Lock()

    def annotated_ids(task: ServiceTask) -> set[str]:
        queue_ids = {case.id for case in task.queue}
        return {e.case_id for e in events if e.task == task.name and e.case_id in queue_ids}

    def pending_cases(task: ServiceTask) -> list[QueuedCase]:
        done = annotated_ids(task)
        remaining = [case for case in task.queue if case.id not in done]
        return sorted(remaining, key=lambda case: (case.margin, case.id))

    def find_task(name: str) -> ServiceTask:
        if name not in by_name:
            raise HTTPException(status_code=404, detail=f"unknown task {name!r}")
        return by_name[name]

    @app.get("/api/tasks")
    def list_tasks() -> list[dict]:
        out = []
        for task in tasks:
            done = annotated_ids(task)
            out.append(
                {
                    "task": task.name,
                    "labels": list(task.schema.labels),
                    "queue_size": len(task.queue),
                    "pending": len(task.queue) - len(done),
                    "annotated": len(done),
                    "t_low": task.thresholds.t_low,
                    "t_high": task.thresholds.t_high,
                }
            )
        return out

    @app.get("/api/queue/{task_name}")
    def next_pending(task_name: str, limit: int = 1) -> dict:
        task = find_task(task_name)
        cases = pending_cases(task)[: max(0, limit)]
        return {
            "task": task.name,
            "t_low": task.thresholds.t_low,
            "t_high": task.thresholds.t_high,
            "labels": list(task.schema.labels),
            "pending": len(pending_cases(task)),
            "cases": [
                {
                    "id": case.id,
                    "text": case.text,
                    "scores": list(case.scores),
                    "labels": list(task.schema.labels),
                    "status": "pending",
                }
                for case in cases
            ],
        }

    @app.post("/api/annotations")
    def submit_annotation(body: AnnotationIn) -> dict:
        if body.task is not None:
            candidates = [find_task(body.task)]
        else:
            candidates = [t for t in tasks if any(c.id == body.case_id for c in t.queue)]
            if len(candidates) > 1:
                raise HTTPException(
                    status_code=400,
                    detail=f"case {body.case_id!r} is queued in several tasks; pass 'task'",
                )
        task = next(
            (t for t in candidates if any(c.id == body.case_id for c in t.queue)), None
        )
        if task is None:
            raise HTTPException(status_code=404, detail=f"case {body.case_id!r} is not queued")
        if not body.reviewer_id.strip():
            raise HTTPException(status_code=400, detail="reviewer_id must be non-empty")
        bad = [label for label in body.labels if label not in task.schema.labels]
        if bad:
            raise HTTPException(
                status_code=400,
                detail=f"labels not in task {task.name!r} schema: {bad}",
            )
        event = AnnotationEvent(
            task=task.name,
            case_id=body.case_id,
            reviewer_id=body.reviewer_id,
            labels=tuple(body.labels),
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        # Serialize appends: durable on disk before the 200 goes out.
        with write_lock:
            append_event(log_path, event)
            events.append(event)
        return {"event": event.to_dict(), "pending": len(pending_cases(task))}

    @app.get("/api/metrics/{task_name}")
    def task_metrics(task_name: str) -> dict:
        task = find_task(task_name)
        queue_ids = [case.id for case in task.queue]
        records, _ = consistency_records(events, case_ids=queue_ids, task=task.name)
        consistency = annotator_consistency(records) if records else None
        done = annotated_ids(task)
        return {
            "task": task.name,
            "triage": task.triage_report,
            "consistency": consistency,
            "consistency_cases": len(records),
            "pending": len(task.queue) - len(done),
            "annotated": len(done),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/")
        def index() -> dict:
            return {
                "service": "casetriage review service",
                "routes": ["/api/tasks", "/api/queue/{task}", "/api/annotations",
                           "/api/metrics/{task}"],
            }

    return app
