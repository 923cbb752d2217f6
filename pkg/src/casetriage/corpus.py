"""Data model for multilabel report corpora: task schemas, labeled cases, splits, label stats."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError

DEFAULT_RATIOS = (0.65, 0.15, 0.20)


@dataclass(frozen=True)
class TaskSchema:
    """A named classification task with an ordered list of label names."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.name:
            raise InputError("schema name must be non-empty")
        if len(self.labels) < 2:
            raise InputError(f"schema {self.name!r} needs at least 2 labels")
        if any(not label for label in self.labels):
            raise InputError(f"schema {self.name!r} contains an empty label name")
        if len(set(self.labels)) != len(self.labels):
            raise InputError(f"schema {self.name!r} contains duplicate labels")

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def label_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}


def load_schema(path: str | Path) -> TaskSchema:
    """Read a schema file: JSON with "name" and "labels" keys."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read schema file {path}: {exc}") from exc
    if not isinstance(raw, dict) or "name" not in raw or "labels" not in raw:
        raise InputError(f"schema file {path} must be a JSON object with 'name' and 'labels'")
    return TaskSchema(name=raw["name"], labels=tuple(raw["labels"]))


def bundled_schema_path(task: str) -> Path:
    """Path to one of the task schemas shipped with the package."""
    path = Path(__file__).parent / "schemas" / f"{task}.json"
    if not path.exists():
        available = sorted(p.stem for p in (Path(__file__).parent / "schemas").glob("*.json"))
        raise InputError(f"no bundled schema named {task!r}; available: {available}")
    return path


@dataclass(frozen=True)
class LabeledCase:
    """One report: a unique id, its free text, and a gold bit-vector over the schema labels."""

    id: str
    text: str
    gold: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gold", tuple(int(g) for g in self.gold))
        if not self.id:
            raise InputError("case id must be non-empty")
        if not self.text.strip():
            raise InputError(f"case {self.id!r} has empty text")
        if any(g not in (0, 1) for g in self.gold):
            raise InputError(f"case {self.id!r} gold vector must be 0/1")


def load_dataset(path: str | Path, schema: TaskSchema) -> list[LabeledCase]:
    """Read a JSONL dataset, one {"id", "text", "labels"} object per line.

    The gold bit-vector is built from the record's label-name set; an empty
    label list is legal and yields an all-zero vector. Raises InputError on
    malformed lines (with the line number), unknown label names, or ids seen
    twice.
    """
    index = schema.label_index()
    cases: list[LabeledCase] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
            try:
                case_id, text, names = record["id"], record["text"], record["labels"]
            except (TypeError, KeyError) as exc:
                raise InputError(f"{path}:{lineno}: record needs 'id', 'text' and 'labels'") from exc
            gold = [0] * schema.n_labels
            for name in names:
                if name not in index:
                    raise InputError(
                        f"{path}:{lineno}: unknown label {name!r} for task {schema.name!r}"
                    )
                gold[index[name]] = 1
            if case_id in seen:
                raise InputError(f"{path}:{lineno}: duplicate case id {case_id!r}")
            seen.add(case_id)
            try:
                cases.append(LabeledCase(id=case_id, text=text, gold=tuple(gold)))
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    return cases


def save_dataset(cases: list[LabeledCase], schema: TaskSchema, path: str | Path) -> None:
    """Write cases back to JSONL; inverse of load_dataset."""
    with open(path, "w", encoding="utf-8") as handle:
        for case in cases:
            names = [schema.labels[i] for i, g in enumerate(case.gold) if g]
            record = {"id": case.id, "text": case.text, "labels": names}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class DatasetSplit:
    """Disjoint train/validation/test case-id lists covering a dataset."""

    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]
    seed: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DatasetSplit":
        try:
            return cls(
                train=tuple(raw["train"]),
                validation=tuple(raw["validation"]),
                test=tuple(raw["test"]),
                seed=int(raw["seed"]),
            )
        except (TypeError, KeyError) as exc:
            raise InputError(f"split file needs 'seed', 'train', 'validation', 'test': {exc}") from exc


def load_split(path: str | Path) -> DatasetSplit:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read split file {path}: {exc}") from exc
    return DatasetSplit.from_dict(raw)


def _apportion(total: int, ratios: tuple[float, ...]) -> list[int]:
    """Integer split sizes by largest remainder; sums to total, each within 1 of ratio * total."""
    exact = [r * total for r in ratios]
    sizes = [int(e) for e in exact]
    remainders = sorted(range(len(ratios)), key=lambda i: (exact[i] - sizes[i], -i), reverse=True)
    for i in remainders[: total - sum(sizes)]:
        sizes[i] += 1
    return sizes


def stratified_split(
    cases: list[LabeledCase],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> DatasetSplit:
    """Split cases into train/validation/test, balancing per-label positive rates.

    Greedy iterative stratification: labels are processed from rarest to most
    frequent, and every yet-unassigned case positive for the current label
    goes to the split furthest below its target count for that label. Split
    sizes are capped at the apportioned totals, so overall proportions hold
    within one case. Cases left over (typically all-negative ones) fill the
    splits with the most remaining room. Deterministic for a fixed seed.
    """
    m = len(cases)
    if m < 5:
        raise InputError(f"need at least 5 cases to split, got {m}")
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise InputError(f"ratios must be three positive numbers summing to 1, got {ratios}")
    n = len(cases[0].gold)

    caps = _apportion(m, tuple(ratios))
    order = list(range(m))
    random.Random(seed).shuffle(order)

    counts = [0] * n
    for case in cases:
        for i, g in enumerate(case.gold):
            counts[i] += g
    label_order = sorted(range(n), key=lambda i: (counts[i], i))

    assignment: dict[int, int] = {}
    sizes = [0, 0, 0]
    fill = [[0] * n for _ in range(3)]

    def place(case_idx: int, split: int) -> None:
        assignment[case_idx] = split
        sizes[split] += 1
        for j, g in enumerate(cases[case_idx].gold):
            fill[split][j] += g

    for li in label_order:
        targets = [ratios[s] * counts[li] for s in range(3)]
        for ci in order:
            if ci in assignment or not cases[ci].gold[li]:
                continue
            open_splits = [s for s in range(3) if sizes[s] < caps[s]]
            best = max(open_splits, key=lambda s: (targets[s] - fill[s][li], caps[s] - sizes[s], -s))
            place(ci, best)

    for ci in order:
        if ci in assignment:
            continue
        open_splits = [s for s in range(3) if sizes[s] < caps[s]]
        best = max(open_splits, key=lambda s: (caps[s] - sizes[s], -s))
        place(ci, best)

    buckets: list[list[str]] = [[], [], []]
    for idx, case in enumerate(cases):
        buckets[assignment[idx]].append(case.id)
    return DatasetSplit(
        train=tuple(buckets[0]),
        validation=tuple(buckets[1]),
        test=tuple(buckets[2]),
        seed=seed,
    )


@dataclass(frozen=True)
class LabelStats:
    """Per-label positive counts over a dataset of total_cases cases."""

    positive_counts: tuple[int, ...]
    total_cases: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive_counts", tuple(int(c) for c in self.positive_counts))
        if any(c < 0 or c > self.total_cases for c in self.positive_counts):
            raise InputError("label counts must lie in [0, total_cases]")


def label_stats(cases: list[LabeledCase]) -> LabelStats:
    """Count positive cases per label."""
    if not cases:
        raise InputError("label_stats needs a non-empty case list")
    n = len(cases[0].gold)
    counts = [0] * n
    for case in cases:
        if len(case.gold) != n:
            raise InputError(f"case {case.id!r} gold length {len(case.gold)} != {n}")
        for i, g in enumerate(case.gold):
            counts[i] += g
    return LabelStats(positive_counts=tuple(counts), total_cases=len(cases))


def balanced_weights(
    stats: LabelStats,
    mode: str = "balanced",
    labels: tuple[str, ...] | None = None,
) -> tuple[float, ...]:
    """Per-label loss weights: m / (n * c_i) in balanced mode, all 1.0 in uniform mode.

    The m/n constant makes a perfectly balanced dataset come out at weight 1.0
    for every label, so loss magnitudes stay comparable across modes. Labels
    with zero positives are rejected in balanced mode (named in the error;
    pass `labels` for readable names).
    """
    n = len(stats.positive_counts)
    if mode == "uniform":
        return tuple(1.0 for _ in range(n))
    if mode != "balanced":
        raise InputError(f"weighting mode must be 'uniform' or 'balanced', got {mode!r}")
    for i, c in enumerate(stats.positive_counts):
        if c == 0:
            name = labels[i] if labels else f"label {i}"
            raise InputError(f"balanced weighting undefined: {name} has zero positive cases")
    m = stats.total_cases
    return tuple(m / (n * c) for c in stats.positive_counts)
