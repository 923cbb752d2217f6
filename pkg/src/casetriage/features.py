"""Tokenization and featurization: word tokens, n-grams, TF-IDF, WordPiece."""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError

# A term-index -> weight sparse map; L2 norm is 1 for any non-empty vector.
FeatureVector = dict[int, float]

DEFAULT_ORDERS = (1, 2, 3)

# Runs of word characters stay together ("pt2" is one token); every other
# non-space character becomes its own token, so punctuation is preserved.
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def word_tokenize(text: str) -> list[str]:
    """Lowercase and split into word and single-character punctuation tokens."""
    return _TOKEN_RE.findall(text.lower())


def ngrams(tokens: Sequence[str], orders: Iterable[int] = DEFAULT_ORDERS) -> list[str]:
    """Contiguous n-grams for each requested order, space-joined, in reading order."""
    out: list[str] = []
    for n in sorted(set(orders)):
        if n < 1:
            raise InputError(f"n-gram order must be >= 1, got {n}")
        out.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Fitted TF-IDF vocabulary: term order is fixed, feature index = position."""

    terms: tuple[str, ...]
    document_frequency: tuple[int, ...]
    total_documents: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.document_frequency):
            raise InputError("terms and document_frequency lengths differ")
        if any(df < 1 or df > self.total_documents for df in self.document_frequency):
            raise InputError("document frequencies must lie in [1, total_documents]")
        index = {term: i for i, term in enumerate(self.terms)}
        if len(index) != len(self.terms):
            raise InputError("vocabulary terms must be unique")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.terms)

    def index(self, term: str) -> int | None:
        return self._index.get(term)

    def idf(self, position: int) -> float:
        df = self.document_frequency[position]
        return math.log((1 + self.total_documents) / (1 + df)) + 1.0

    def digest(self) -> str:
        """Stable content hash, recorded in model files to pin the feature space."""
        canon = json.dumps(
            {
                "terms": list(self.terms),
                "df": list(self.document_frequency),
                "total_documents": self.total_documents,
            },
            sort_keys=True,
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def to_file(self, path: str | Path) -> None:
        payload = {
            "total_documents": self.total_documents,
            "terms": [
                {"term": t, "df": df} for t, df in zip(self.terms, self.document_frequency)
            ],
        }
        Path(path).write_text(json.dumps(payload, ensure_ascii=False) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "Vocabulary":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(
                terms=tuple(entry["term"] for entry in raw["terms"]),
                document_frequency=tuple(int(entry["df"]) for entry in raw["terms"]),
                total_documents=int(raw["total_documents"]),
            )
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read vocabulary file {path}: {exc}") from exc


def fit_tfidf(corpus: Sequence[Sequence[str]], min_df: int = 2) -> Vocabulary:
    """Fit a vocabulary over term lists (typically n-grams of tokenized documents).

    Terms seen in fewer than min_df documents are dropped. Term order is
    lexicographic, so the result is independent of corpus order.
    """
    if not corpus:
        raise InputError("fit_tfidf needs a non-empty corpus")
    if min_df < 1:
        raise InputError(f"min_df must be >= 1, got {min_df}")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc))
    kept = sorted(term for term, count in df.items() if count >= min_df)
    return Vocabulary(
        terms=tuple(kept),
        document_frequency=tuple(df[t] for t in kept),
        total_documents=len(corpus),
    )


def transform_tfidf(doc: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """Project a term list onto the vocabulary: tf * (ln((1+N)/(1+df)) + 1), L2-normalized.

    Out-of-vocabulary terms are ignored; a document with no known terms maps
    to the empty vector, the only case with norm 0.
    """
    counts: Counter[int] = Counter()
    for term in doc:
        pos = vocab.index(term)
        if pos is not None:
            counts[pos] += 1
    if not counts:
        return {}
    weights = {pos: tf * vocab.idf(pos) for pos, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    return {pos: w / norm for pos, w in weights.items()}


def featurize(text: str, vocab: Vocabulary, orders: Iterable[int] = DEFAULT_ORDERS) -> FeatureVector:
    """Full text-to-vector pipeline: tokenize, n-gram, TF-IDF transform."""
    return transform_tfidf(ngrams(word_tokenize(text), orders), vocab)


UNK = "[UNK]"


@dataclass(frozen=True)
class WordPieceVocab:
    """Subword unit inventory; continuation units carry the '##' prefix."""

    units: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", frozenset(self.units))
        if UNK not in self.units:
            raise InputError(f"wordpiece vocabulary must contain {UNK}")

    @classmethod
    def from_file(cls, path: str | Path) -> "WordPieceVocab":
        """Read the standard plain-text layout, one unit per line."""
        units: list[str] = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            unit = line.strip()
            if unit:
                units.append(unit)
        if len(set(units)) != len(units):
            dupes = sorted({u for u in units if units.count(u) > 1})
            raise InputError(f"wordpiece vocabulary {path} has duplicate units: {dupes}")
        return cls(units=frozenset(units))


def wordpiece_tokenize(word: str, vocab: WordPieceVocab) -> list[str]:
    """Greedy longest-match-first subword split.

    Repeatedly takes the longest vocabulary prefix of the remainder, with the
    '##' continuation prefix after the first unit. If at any point no prefix
    matches, the whole word collapses to [UNK].
    """
    if not word:
        raise InputError("wordpiece_tokenize needs a non-empty word")
    units: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = "##" + candidate
            if candidate in vocab.units:
                match = candidate
                break
            end -= 1
        if match is None:
            return [UNK]
        units.append(match)
        start = end
    return units
