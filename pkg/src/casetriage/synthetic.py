"""Synthetic multilabel report generators for development, demos, and benchmarks.

Each label gets a private set of "strong" marker words that appear only in its
positive cases, plus one "weak" marker that is deliberately ambiguous: it shows
up in some positives instead of the strong evidence and in some negatives as a
false signal. Classifiers trained on this data produce confident scores for
strong cases and mid-range scores for weak-only cases, which is the regime the
confidence triage is designed for.
"""

from __future__ import annotations

import numpy as np

from .corpus import LabeledCase, TaskSchema

PLANTED_LABELS = ("alpha", "bravo", "charlie", "delta", "echo", "foxtrot")


def planted_dataset(
    n_cases: int = 5000,
    n_labels: int = 6,
    seed: int = 0,
    weak_positive_share: float = 0.08,
) -> tuple[TaskSchema, list[LabeledCase]]:
    """Vocabulary-planted dataset where weak-marker cases are true coin flips.

    For each label, `weak_positive_share` of its positives carry only the weak
    marker, and the weak marker is planted in negatives at the rate that makes
    P(positive | weak marker only) = 0.5. Everything else is decidable from
    the strong markers.
    """
    if not 1 <= n_labels <= len(PLANTED_LABELS):
        raise ValueError(f"n_labels must be in [1, {len(PLANTED_LABELS)}]")
    rng = np.random.default_rng(seed)
    labels = PLANTED_LABELS[:n_labels]
    schema = TaskSchema(name=f"planted{n_labels}", labels=labels)

    prevalence = np.linspace(0.12, 0.30, n_labels)
    background = [f"routine{i}" for i in range(60)]
    strong = {label: [f"{label}sign{j}" for j in range(2)] for label in labels}
    weak = {label: f"{label}hint" for label in labels}
    # false-signal rate making the weak marker a 50/50 signal
    weak_negative_rate = weak_positive_share * prevalence / (1.0 - prevalence)

    cases = []
    for idx in range(n_cases):
        gold = (rng.random(n_labels) < prevalence).astype(int)
        words = list(rng.choice(background, size=8))
        for li, label in enumerate(labels):
            if gold[li]:
                if rng.random() < weak_positive_share:
                    words.append(weak[label])
                else:
                    words.extend(strong[label])
                    if rng.random() < 0.3:
                        words.append(weak[label])
            elif rng.random() < weak_negative_rate[li]:
                words.append(weak[label])
        rng.shuffle(words)
        cases.append(
            LabeledCase(id=f"case{idx:05d}", text=" ".join(words), gold=tuple(gold))
        )
    return schema, cases


def skewed_dataset(
    n_cases: int = 800, seed: int = 0
) -> tuple[TaskSchema, list[LabeledCase]]:
    """Two-label task with a 95:5 positive-rate skew and a noisier rare label."""
    rng = np.random.default_rng(seed)
    schema = TaskSchema(name="skewed", labels=("common", "rare"))
    background = [f"routine{i}" for i in range(40)]

    cases = []
    for idx in range(n_cases):
        common = int(rng.random() < 0.95)
        rare = int(rng.random() < 0.05)
        words = list(rng.choice(background, size=8))
        if common:
            words.extend(["commonsign0", "commonsign1"])
        if rare:
            # rare positives often carry only one marker, so the evidence is thin
            words.append("raresign0")
            if rng.random() < 0.4:
                words.append("raresign1")
        elif rng.random() < 0.02:
            words.append("raresign0")
        rng.shuffle(words)
        cases.append(
            LabeledCase(id=f"case{idx:05d}", text=" ".join(words), gold=(common, rare))
        )
    return schema, cases
