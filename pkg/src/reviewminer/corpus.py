"""Review ingestion, tokenization, and labeled-corpus handling."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

POSITIVE = "positive"
NEGATIVE = "negative"
POLARITIES = (POSITIVE, NEGATIVE)

UNICODE_WORD = "unicode_word"
LEXICON_MAX_MATCH = "lexicon_max_match"
TOKENIZER_MODES = (UNICODE_WORD, LEXICON_MAX_MATCH)

# Maximal runs of letters/digits (underscore excluded from \w).
_WORD_RUN = re.compile(r"[^\W_]+", re.UNICODE)

# CJK unified ideographs, extension A, compatibility ideographs.
_HAN_RANGES = ((0x3400, 0x4DBF), (0x4E00, 0x9FFF), (0xF900, 0xFAFF))


def _is_han(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _HAN_RANGES)


@dataclass(frozen=True)
class ReviewDocument:
    """One review with its token positions 0..n-1."""

    id: str
    text: str
    tokens: tuple[str, ...]
    category: str
    brand: str
    corpus_tag: str
    gold_polarity: Optional[str] = None


@dataclass(frozen=True)
class LabeledCorpus:
    """Reviews with gold polarities; both classes must be present."""

    documents: tuple[ReviewDocument, ...]
    class_counts: Mapping[str, int]

    @classmethod
    def from_documents(cls, documents: Iterable[ReviewDocument]) -> "LabeledCorpus":
        docs = tuple(documents)
        counts = {POSITIVE: 0, NEGATIVE: 0}
        for doc in docs:
            if doc.gold_polarity not in POLARITIES:
                raise ValueError(f"document {doc.id!r} has no gold polarity")
            counts[doc.gold_polarity] += 1
        if counts[POSITIVE] == 0 or counts[NEGATIVE] == 0:
            raise ValueError("labeled corpus needs at least one document per class")
        return cls(documents=docs, class_counts=counts)


def load_term_file(path: str | Path) -> frozenset[str]:
    """Read a UTF-8 term list, one term per line; blank lines ignored."""
    terms = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            term = line.strip()
            if term:
                terms.add(term)
    return frozenset(terms)


@dataclass(frozen=True)
class TokenizerConfig:
    mode: str = UNICODE_WORD
    lexicon_path: Optional[str] = None
    lowercase: bool = True
    lexicon: frozenset = field(default=frozenset())

    def __post_init__(self):
        if self.mode not in TOKENIZER_MODES:
            raise ValueError(f"unknown tokenizer mode {self.mode!r}")
        if self.mode == LEXICON_MAX_MATCH and not self.lexicon:
            if self.lexicon_path is None:
                raise ValueError("lexicon_max_match requires a lexicon file")
            object.__setattr__(self, "lexicon", load_term_file(self.lexicon_path))
            if not self.lexicon:
                raise ValueError(f"segmentation lexicon {self.lexicon_path} is empty")


@lru_cache(maxsize=16)
def _max_entry_len(lexicon: frozenset) -> int:
    return max((len(entry) for entry in lexicon), default=1)


def _max_match(run: str, lexicon: frozenset) -> list[str]:
    """Greedy longest match over a Han run, single-character fallback."""
    longest = _max_entry_len(lexicon)
    out = []
    i = 0
    while i < len(run):
        for j in range(min(longest, len(run) - i), 1, -1):
            if run[i : i + j] in lexicon:
                out.append(run[i : i + j])
                i += j
                break
        else:
            out.append(run[i])
            i += 1
    return out


def _split_scripts(run: str) -> Iterable[tuple[bool, str]]:
    """Split a word run into maximal (is_han, substring) segments."""
    start = 0
    for i in range(1, len(run) + 1):
        if i == len(run) or _is_han(run[i]) != _is_han(run[start]):
            yield _is_han(run[start]), run[start:i]
            start = i


def tokenize(text: str, cfg: TokenizerConfig) -> list[str]:
    """Deterministically tokenize text per the configured mode.

    unicode_word: maximal runs of letters/digits, lowercased if configured.
    lexicon_max_match: Han runs are segmented by greedy longest match against
    the lexicon with single-character fallback; other runs as unicode_word.

    Lowercasing happens before run extraction so that every token consists
    of word characters only, keeping tokenize idempotent on its own output
    even when case folding expands a character into a combining sequence.
    """
    if cfg.lowercase:
        text = text.lower()
    tokens: list[str] = []
    for run in _WORD_RUN.findall(text):
        if cfg.mode == LEXICON_MAX_MATCH:
            for is_han, segment in _split_scripts(run):
                if is_han:
                    tokens.extend(_max_match(segment, cfg.lexicon))
                else:
                    tokens.append(segment)
        else:
            tokens.append(run)
    return tokens


@dataclass(frozen=True)
class IngestResult:
    documents: tuple[ReviewDocument, ...]
    dropped: int


_REQUIRED_FIELDS = ("id", "text", "category", "brand", "corpus_tag")


def load_reviews(
    path: str | Path,
    tokenizer: TokenizerConfig | None = None,
    schema: str = "jsonl",
) -> IngestResult:
    """Load reviews from a JSON Lines file, tokenizing and dropping empty ones.

    Records whose text tokenizes to nothing are dropped and counted, never
    silently discarded.
    """
    if schema != "jsonl":
        raise ValueError(f"unknown schema {schema!r}")
    cfg = tokenizer or TokenizerConfig()
    documents: list[ReviewDocument] = []
    seen_ids: set[str] = set()
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise ValueError(f"{path}:{lineno}: record is not an object")
            missing = [f for f in _REQUIRED_FIELDS if f not in record]
            if missing:
                raise ValueError(f"{path}:{lineno}: missing fields {missing}")
            polarity = record.get("polarity")
            if polarity is not None and polarity not in POLARITIES:
                raise ValueError(f"{path}:{lineno}: bad polarity {polarity!r}")
            doc_id = str(record["id"])
            if doc_id in seen_ids:
                raise ValueError(f"{path}:{lineno}: duplicate id {doc_id!r}")
            seen_ids.add(doc_id)
            tokens = tuple(tokenize(str(record["text"]), cfg))
            if not tokens:
                dropped += 1
                continue
            documents.append(
                ReviewDocument(
                    id=doc_id,
                    text=str(record["text"]),
                    tokens=tokens,
                    category=str(record["category"]),
                    brand=str(record["brand"]),
                    corpus_tag=str(record["corpus_tag"]),
                    gold_polarity=polarity,
                )
            )
    return IngestResult(documents=tuple(documents), dropped=dropped)


def kfold_split(corpus: LabeledCorpus, k: int, seed: int) -> dict[str, int]:
    """Stratified fold assignment, a pure function of (doc ids, k, seed).

    Per-class fold sizes differ by at most one.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    assignment: dict[str, int] = {}
    for polarity in POLARITIES:
        ids = sorted(d.id for d in corpus.documents if d.gold_polarity == polarity)
        if len(ids) < k:
            raise ValueError(
                f"class {polarity!r} has {len(ids)} documents, fewer than k={k}"
            )
        for position, idx in enumerate(rng.permutation(len(ids))):
            assignment[ids[idx]] = position % k
    return assignment
