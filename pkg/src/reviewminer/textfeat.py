"""Chi-square feature selection and TF-IDF sparse vectors."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Mapping

from .corpus import NEGATIVE, POSITIVE, LabeledCorpus, ReviewDocument

DEFAULT_TOP_K = 2000
DEFAULT_MIN_DF = 2


def chi_square(a: int, b: int, c: int, d: int) -> float:
    """2x2 chi-square statistic for a term/class contingency table.

    a = docs with term in the class, b = docs with term outside it,
    c = docs without term in the class, d = the rest.  Returns 0 when any
    marginal is 0 (degenerate table).
    """
    if min(a, b, c, d) < 0:
        raise ValueError("contingency counts must be non-negative")
    n = a + b + c + d
    if n == 0:
        raise ValueError("empty contingency table")
    for marginal in (a + b, c + d, a + c, b + d):
        if marginal == 0:
            return 0.0
    return n * (a * d - c * b) ** 2 / ((a + c) * (b + d) * (a + b) * (c + d))


@dataclass(frozen=True)
class FeatureSet:
    """Selected vocabulary with idf weights; columns follow `terms` order."""

    terms: tuple[str, ...]
    idf: Mapping[str, float]
    doc_count: int
    top_k: int
    min_df: int

    @cached_property
    def term_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "idf": {t: self.idf[t] for t in self.terms},
            "doc_count": self.doc_count,
            "top_k": self.top_k,
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSet":
        return cls(
            terms=tuple(data["terms"]),
            idf=dict(data["idf"]),
            doc_count=int(data["doc_count"]),
            top_k=int(data["top_k"]),
            min_df=int(data["min_df"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSet":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class SparseVector:
    """Sorted (column, weight) pairs; zero weights are never stored."""

    entries: tuple[tuple[int, float], ...]

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))


def select_features(
    corpus: LabeledCorpus,
    top_k: int = DEFAULT_TOP_K,
    min_df: int = DEFAULT_MIN_DF,
) -> FeatureSet:
    """Pick the top_k terms by chi-square against the positive class.

    Vocabulary is restricted to document frequency >= min_df; ties are broken
    lexicographically; idf(t) = ln(doc_count / df(t)).
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: Counter[str] = Counter()
    df_pos: Counter[str] = Counter()
    for doc in corpus.documents:
        for term in set(doc.tokens):
            df[term] += 1
            if doc.gold_polarity == POSITIVE:
                df_pos[term] += 1
    n = len(corpus.documents)
    n_pos = corpus.class_counts[POSITIVE]
    n_neg = corpus.class_counts[NEGATIVE]
    vocabulary = [t for t, c in df.items() if c >= min_df]
    if not vocabulary:
        raise ValueError(f"no terms with document frequency >= {min_df}")
    scores = {}
    for term in vocabulary:
        a = df_pos[term]
        b = df[term] - a
        scores[term] = chi_square(a, b, n_pos - a, n_neg - b)
    selected = sorted(vocabulary, key=lambda t: (-scores[t], t))[:top_k]
    idf = {t: math.log(n / df[t]) for t in selected}
    return FeatureSet(
        terms=tuple(selected), idf=idf, doc_count=n, top_k=top_k, min_df=min_df
    )


def vectorize(doc: ReviewDocument, fs: FeatureSet) -> SparseVector:
    """TF-IDF weights over the selected terms, L2-normalized when nonzero."""
    tf: Counter[str] = Counter(t for t in doc.tokens if t in fs.term_index)
    raw = [(fs.term_index[t], c * fs.idf[t]) for t, c in tf.items() if fs.idf[t] != 0.0]
    if not raw:
        return SparseVector(entries=())
    norm = math.sqrt(sum(w * w for _, w in raw))
    return SparseVector(entries=tuple(sorted((i, w / norm) for i, w in raw)))
