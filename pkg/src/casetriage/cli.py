"""Command-line pipeline: split, train, evaluate, tune, consistency, ingest, serve."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus, features, linear_models, metrics, triage
from .annotations import consistency_records, load_log
from .errors import InputError, TrainingDivergedError
from .metrics import annotator_consistency

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_RUNTIME_ERROR = 2


@dataclass
class RunConfig:
    """Everything one pipeline run needs; all randomness flows from the seed."""

    schema: Path
    dataset: Path
    out: Path
    task: str | None = None
    seed: int = 0
    ratios: tuple[float, float, float] = corpus.DEFAULT_RATIOS
    min_df: int = 2
    ngram_orders: tuple[int, ...] = features.DEFAULT_ORDERS
    model_grid: list[dict] = field(default_factory=lambda: [{}])
    threshold_grid: tuple[float, ...] = triage.TUNING_GRID

    def __post_init__(self) -> None:
        if not self.model_grid:
            raise InputError("model_grid must be non-empty")
        if not self.threshold_grid:
            raise InputError("threshold_grid must be non-empty")
        for path, kind in ((self.schema, "schema"), (self.dataset, "dataset")):
            if not Path(path).exists():
                raise InputError(f"{kind} file not found: {path}")


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Read a JSON run config; relative paths resolve against the config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    base = path.parent
    feats = raw.get("features", {})
    merged = {
        "schema": base / raw["schema"] if "schema" in raw else None,
        "dataset": base / raw["dataset"] if "dataset" in raw else None,
        "out": base / raw.get("out", "run"),
        "task": raw.get("task"),
        "seed": raw.get("seed", 0),
        "ratios": tuple(raw.get("ratios", corpus.DEFAULT_RATIOS)),
        "min_df": feats.get("min_df", 2),
        "ngram_orders": tuple(feats.get("ngram_orders", features.DEFAULT_ORDERS)),
        "model_grid": raw.get("model_grid", [{}]),
        "threshold_grid": tuple(raw.get("threshold_grid", triage.TUNING_GRID)),
    }
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    if merged["schema"] is None or merged["dataset"] is None:
        raise InputError(f"config {path} must name a schema and a dataset")
    return RunConfig(**merged)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_inputs(config: RunConfig) -> tuple[corpus.TaskSchema, list[corpus.LabeledCase]]:
    schema = corpus.load_schema(config.schema)
    cases = corpus.load_dataset(config.dataset, schema)
    return schema, cases


def _task_name(config: RunConfig, schema: corpus.TaskSchema) -> str:
    return config.task or schema.name


def _select_cases(
    cases: list[corpus.LabeledCase], ids: tuple[str, ...]
) -> list[corpus.LabeledCase]:
    by_id = {case.id: case for case in cases}
    missing = [cid for cid in ids if cid not in by_id]
    if missing:
        raise InputError(f"split references unknown case ids: {missing[:5]}")
    return [by_id[cid] for cid in ids]


def cmd_split(config: RunConfig) -> Path:
    """Write the stratified train/validation/test split for the configured dataset."""
    _, cases = _load_inputs(config)
    split = corpus.stratified_split(cases, ratios=config.ratios, seed=config.seed)
    out = Path(config.out) / "split.json"
    _write_json(out, split.to_dict())
    return out


def cmd_train_select(config: RunConfig) -> Path:
    """Train one model per grid point, keep the best validation mAP, persist the sweep."""
    schema, cases = _load_inputs(config)
    split = corpus.load_split(Path(config.out) / "split.json")
    train_cases = _select_cases(cases, split.train)
    val_cases = _select_cases(cases, split.validation)

    terms = [
        features.ngrams(features.word_tokenize(case.text), config.ngram_orders)
        for case in train_cases
    ]
    vocab = features.fit_tfidf(terms, min_df=config.min_df)
    vocab.to_file(Path(config.out) / "vocabulary.json")

    val_golds = np.asarray([case.gold for case in val_cases], dtype=np.int64)
    sweep_rows: list[dict] = []
    best: tuple[float, int, linear_models.LinearModel] | None = None
    for index, grid_point in enumerate(config.model_grid):
        train_config = linear_models.TrainConfig(
            seed=config.seed, ngram_orders=config.ngram_orders, **grid_point
        )
        row: dict = {"index": index, "config": grid_point}
        try:
            model = linear_models.train(train_cases, schema, vocab, train_config)
        except TrainingDivergedError as exc:
            row["error"] = str(exc)
            row["validation_map"] = None
            sweep_rows.append(row)
            continue
        val_scores = linear_models.score_cases(model, val_cases, vocab)
        aps = metrics.label_average_precisions(val_scores, val_golds)
        val_map = metrics.mean_average_precision(aps)
        row["validation_map"] = val_map
        row["skipped_labels"] = [
            schema.labels[i] for i, ap in enumerate(aps) if ap is None
        ]
        sweep_rows.append(row)
        if best is None or val_map > best[0]:
            best = (val_map, index, model)

    if best is None:
        raise TrainingDivergedError("every grid point diverged; nothing to select")
    _write_json(
        Path(config.out) / "sweep.json",
        {"selected_index": best[1], "rows": sweep_rows},
    )
    model_path = Path(config.out) / "model.json"
    linear_models.save_model(best[2], model_path)
    return model_path


@dataclass(frozen=True)
class ScoreFile:
    """Validated external scores: per-case, per-label probabilities for one task."""

    task: str
    rows: dict[str, np.ndarray]


def ingest_scores(
    path: str | Path, schema: corpus.TaskSchema, known_ids: set[str], task: str
) -> ScoreFile:
    """Read and validate a JSONL score file: rows of {"id", "scores": {label: float}}.

    Rejects unknown ids, unknown or missing labels, out-of-range scores, and
    duplicate ids, naming the offending row number.
    """
    rows: dict[str, np.ndarray] = {}
    expected = set(schema.labels)
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                case_id, scores = raw["id"], raw["scores"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad score row: {exc}") from exc
            if case_id not in known_ids:
                raise InputError(f"{path}:{lineno}: unknown case id {case_id!r}")
            if case_id in rows:
                raise InputError(f"{path}:{lineno}: duplicate case id {case_id!r}")
            got = set(scores)
            if got != expected:
                raise InputError(
                    f"{path}:{lineno}: label set mismatch for task {schema.name!r} "
                    f"(unexpected: {sorted(got - expected)}, missing: {sorted(expected - got)})"
                )
            vector = np.asarray([scores[label] for label in schema.labels], dtype=np.float64)
            if not np.isfinite(vector).all() or (vector < 0).any() or (vector > 1).any():
                raise InputError(f"{path}:{lineno}: scores must lie in [0, 1]")
            rows[case_id] = vector
    return ScoreFile(task=task, rows=rows)


def _export_scores(
    path: Path, schema: corpus.TaskSchema, ids: list[str], matrix: np.ndarray
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for case_id, row in zip(ids, matrix):
            record = {"id": case_id, "scores": dict(zip(schema.labels, row.tolist()))}
            handle.write(json.dumps(record) + "\n")


def _resolve_scores(
    config: RunConfig,
    schema: corpus.TaskSchema,
    cases: list[corpus.LabeledCase],
    wanted: list[corpus.LabeledCase],
    model_path: Path | None,
    scores_path: Path | None,
) -> np.ndarray:
    """Score the wanted cases either with a saved model or from an ingested file."""
    if (model_path is None) == (scores_path is None):
        raise InputError("provide exactly one of a model file or a score file")
    if model_path is not None:
        model = linear_models.load_model(model_path)
        vocab = features.Vocabulary.from_file(Path(config.out) / "vocabulary.json")
        if model.vocab_hash != vocab.digest():
            raise InputError("model was trained against a different vocabulary file")
        return linear_models.score_cases(model, wanted, vocab)
    score_file = ingest_scores(
        scores_path, schema, {case.id for case in cases}, _task_name(config, schema)
    )
    missing = [case.id for case in wanted if case.id not in score_file.rows]
    if missing:
        raise InputError(f"score file lacks rows for required ids: {missing[:5]}")
    return np.stack([score_file.rows[case.id] for case in wanted])


def cmd_evaluate(
    config: RunConfig,
    model_path: Path | None = None,
    scores_path: Path | None = None,
    t_low: float | None = None,
) -> dict:
    """Full test-set evaluation: rank metrics, triage report, review queue, score export."""
    schema, cases = _load_inputs(config)
    task = _task_name(config, schema)
    split = corpus.load_split(Path(config.out) / "split.json")
    val_cases = _select_cases(cases, split.validation)
    test_cases = _select_cases(cases, split.test)
    eval_cases = val_cases + test_cases

    matrix = _resolve_scores(config, schema, cases, eval_cases, model_path, scores_path)
    val_scores, test_scores = matrix[: len(val_cases)], matrix[len(val_cases) :]
    val_golds = np.asarray([case.gold for case in val_cases], dtype=np.int64)
    test_golds = np.asarray([case.gold for case in test_cases], dtype=np.int64)

    out = Path(config.out)
    if t_low is not None:
        thresholds = triage.ThresholdPair.symmetric(t_low)
        _write_json(
            out / "thresholds.json",
            {"t_low": thresholds.t_low, "t_high": thresholds.t_high, "source": "provided"},
        )
    else:
        tuning = triage.tune_thresholds(val_scores, val_golds, config.threshold_grid)
        thresholds = tuning.thresholds
        _write_json(
            out / "thresholds.json",
            {
                "t_low": thresholds.t_low,
                "t_high": thresholds.t_high,
                "source": "tuned",
                "grid": [{"t_low": t, "objective": obj} for t, obj in tuning.objectives],
            },
        )

    aps = metrics.label_average_precisions(test_scores, test_golds)
    _write_json(
        out / "metrics_report.json",
        {
            "task": task,
            "map": metrics.mean_average_precision(aps),
            "per_label_ap": dict(zip(schema.labels, aps)),
            "skipped_labels": [schema.labels[i] for i, ap in enumerate(aps) if ap is None],
        },
    )
    with open(out / "pr_points.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label", "recall", "precision", "tp", "fp", "interpolated"])
        for i, label in enumerate(schema.labels):
            if aps[i] is None:
                continue
            curve = metrics.pr_curve(test_scores[:, i], test_golds[:, i])
            for point in curve.points:
                writer.writerow(
                    [label, point.recall, point.precision, point.tp, point.fp, int(point.interpolated)]
                )

    report = triage.evaluate_triage(test_scores, test_golds, thresholds)
    _write_json(out / "triage_report.json", {"task": task} | report.to_dict())

    _, low = triage.split_confidence(test_scores, thresholds)
    _write_json(
        out / "queue.json",
        {
            "task": task,
            "t_low": thresholds.t_low,
            "t_high": thresholds.t_high,
            "cases": [
                {"id": test_cases[i].id, "scores": test_scores[i].tolist()} for i in low
            ],
        },
    )
    _export_scores(out / "scores.jsonl", schema, [c.id for c in eval_cases], matrix)
    print(triage.format_triage_table([(task, report)]))
    return {"thresholds": thresholds, "report": report}


def cmd_tune(
    config: RunConfig, model_path: Path | None = None, scores_path: Path | None = None
) -> triage.TuningResult:
    """Standalone threshold tuning on the validation split."""
    schema, cases = _load_inputs(config)
    split = corpus.load_split(Path(config.out) / "split.json")
    val_cases = _select_cases(cases, split.validation)
    val_scores = _resolve_scores(config, schema, cases, val_cases, model_path, scores_path)
    val_golds = np.asarray([case.gold for case in val_cases], dtype=np.int64)
    tuning = triage.tune_thresholds(val_scores, val_golds, config.threshold_grid)
    _write_json(
        Path(config.out) / "thresholds.json",
        {
            "t_low": tuning.thresholds.t_low,
            "t_high": tuning.thresholds.t_high,
            "source": "tuned",
            "grid": [{"t_low": t, "objective": obj} for t, obj in tuning.objectives],
        },
    )
    return tuning


def cmd_consistency(log_path: Path, case_ids: list[str] | None, task: str | None) -> float:
    """Three-annotator consistency over the given cases from an annotation log."""
    events = load_log(log_path)
    records, problems = consistency_records(events, case_ids=case_ids, task=task)
    if problems:
        listing = ", ".join(f"{cid} ({n} annotations)" for cid, n in sorted(problems.items()))
        raise InputError(f"cases lacking exactly 3 annotations: {listing}")
    if not records:
        raise InputError("no cases to score")
    return annotator_consistency(records)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casetriage",
        description="Multilabel report classification with confidence triage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="run config JSON")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--task", default=None)
        p.add_argument("--out", default=None, help="output directory")

    p_split = sub.add_parser("split", help="write the stratified dataset split")
    add_config_args(p_split)

    p_train = sub.add_parser("train", help="sweep the model grid, keep the best by validation mAP")
    add_config_args(p_train)

    p_eval = sub.add_parser("evaluate", help="metrics + triage reports on the test split")
    add_config_args(p_eval)
    p_eval.add_argument("--model", default=None, help="model file (default: <out>/model.json)")
    p_eval.add_argument("--scores", default=None, help="external score file instead of a model")
    p_eval.add_argument("--t-low", type=float, default=None, help="skip tuning, use this band")

    p_tune = sub.add_parser("tune", help="tune the confidence band on the validation split")
    add_config_args(p_tune)
    p_tune.add_argument("--model", default=None)
    p_tune.add_argument("--scores", default=None)

    p_cons = sub.add_parser("consistency", help="three-annotator consistency from a log")
    p_cons.add_argument("--log", required=True)
    p_cons.add_argument("--ids", default=None, help="comma-separated case ids (default: all)")
    p_cons.add_argument("--task", default=None)

    p_ingest = sub.add_parser("ingest", help="validate an external score file")
    add_config_args(p_ingest)
    p_ingest.add_argument("--scores", required=True)

    p_serve = sub.add_parser("serve", help="run the expert review service")
    p_serve.add_argument("--queue", required=True, help="queue file from evaluate")
    p_serve.add_argument("--dataset", required=True)
    p_serve.add_argument("--schema", required=True)
    p_serve.add_argument("--log", required=True, help="annotation log path (appended to)")
    p_serve.add_argument("--report", default=None, help="triage report JSON from evaluate")
    p_serve.add_argument("--static", default=None, help="built review UI directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "seed": args.seed,
        "task": args.task,
        "out": Path(args.out) if args.out else None,
    }


def _run(args: argparse.Namespace) -> int:
    if args.command == "split":
        path = cmd_split(load_config(args.config, _overrides(args)))
        print(f"wrote {path}")
    elif args.command == "train":
        path = cmd_train_select(load_config(args.config, _overrides(args)))
        print(f"wrote {path}")
    elif args.command in ("evaluate", "tune"):
        config = load_config(args.config, _overrides(args))
        scores = Path(args.scores) if args.scores else None
        model = Path(args.model) if args.model else None
        if model is None and scores is None:
            model = Path(config.out) / "model.json"
        if args.command == "evaluate":
            cmd_evaluate(config, model, scores, t_low=getattr(args, "t_low", None))
        else:
            tuning = cmd_tune(config, model, scores)
            print(f"t_low={tuning.t_low} t_high={tuning.thresholds.t_high}")
    elif args.command == "consistency":
        ids = args.ids.split(",") if args.ids else None
        value = cmd_consistency(Path(args.log), ids, args.task)
        print(json.dumps({"consistency": value}))
    elif args.command == "ingest":
        config = load_config(args.config, _overrides(args))
        schema, cases = _load_inputs(config)
        score_file = ingest_scores(
            args.scores, schema, {c.id for c in cases}, _task_name(config, schema)
        )
        print(json.dumps({"task": score_file.task, "rows": len(score_file.rows)}))
    elif args.command == "serve":
        from .review_service import ServiceTask, build_app
        import uvicorn

        task = ServiceTask.from_files(
            queue_path=Path(args.queue),
            dataset_path=Path(args.dataset),
            schema_path=Path(args.schema),
            report_path=Path(args.report) if args.report else None,
        )
        app = build_app(
            [task],
            log_path=Path(args.log),
            static_dir=Path(args.static) if args.static else None,
        )
        uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
