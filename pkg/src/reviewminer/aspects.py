"""Aspect mention counting, distance-weighted sentiment, entropies, alignment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .corpus import ReviewDocument
from .topics import CandidateAspect

DEFAULT_TOP_N = 10

# word -> orientation in {+1, -1}
SentimentLexicon = Mapping[str, int]


def load_sentiment_lexicon(path: str | Path) -> dict[str, int]:
    """Read a TSV `word<TAB>score` lexicon, binarizing scores to +-1.

    Real-valued scores are thresholded at 0 (positive scores map to +1,
    everything else to -1).  Conflicting duplicate entries are an error.
    """
    entries: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected `word<TAB>score`")
            word, raw = parts[0].strip(), parts[1].strip()
            try:
                score = float(raw)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad score {raw!r}") from exc
            orientation = 1 if score > 0 else -1
            if entries.get(word, orientation) != orientation:
                raise ValueError(f"{path}:{lineno}: conflicting orientation for {word!r}")
            entries[word] = orientation
    if not entries:
        raise ValueError(f"sentiment lexicon {path} is empty")
    return entries


@dataclass(frozen=True)
class AspectDef:
    """Canonical aspect term with its alias token sequences."""

    term: str
    aliases: tuple[tuple[str, ...], ...]

    @classmethod
    def create(cls, term: str, extra_aliases: Sequence[str] = ()) -> "AspectDef":
        forms = [term, *extra_aliases]
        seqs = []
        for form in forms:
            seq = tuple(form.split())
            if seq and seq not in seqs:
                seqs.append(seq)
        return cls(term=term, aliases=tuple(seqs))


@dataclass(frozen=True)
class AspectStats:
    """Per-aspect tallies; every mention is classified +1 or -1."""

    aspect: str
    aliases: tuple[str, ...]
    pos: int
    neg: int
    zero_signal: int  # mentions classified negative because the sum was exactly 0

    @property
    def fa(self) -> int:
        return self.pos + self.neg

    @property
    def mention_count(self) -> int:
        return self.fa

    @property
    def pa(self) -> float:
        if self.fa == 0:
            raise ValueError(f"aspect {self.aspect!r} has no mentions")
        return self.pos / self.fa


def _alias_positions(tokens: Sequence[str], aspect: AspectDef) -> list[int]:
    """Token indices covered by any alias occurrence (multiword = contiguous run)."""
    covered: set[int] = set()
    for alias in aspect.aliases:
        span = len(alias)
        for start in range(len(tokens) - span + 1):
            if tuple(tokens[start : start + span]) == alias:
                covered.update(range(start, start + span))
    return sorted(covered)


def aspect_signal(
    tokens: Sequence[str], aspect: AspectDef, lex: SentimentLexicon
) -> Optional[float]:
    """Distance-weighted sentiment sum for one review, None if no mention.

    Each sentiment-word occurrence contributes orientation / dis, where dis
    is the token distance to the nearest alias occurrence, floored at 1.
    """
    positions = _alias_positions(tokens, aspect)
    if not positions:
        return None
    total = 0.0
    for i, token in enumerate(tokens):
        orientation = lex.get(token)
        if orientation is None:
            continue
        dis = max(1, min(abs(i - p) for p in positions))
        total += orientation / dis
    return total


def aspect_sentiment(
    doc: ReviewDocument | Sequence[str], aspect: AspectDef, lex: SentimentLexicon
) -> Optional[int]:
    """SP of the aspect in one review: +1 if the weighted sum is > 0, else -1.

    Zero sums (including reviews without sentiment words) classify negative;
    returns None when no alias of the aspect occurs.
    """
    tokens = doc.tokens if isinstance(doc, ReviewDocument) else doc
    signal = aspect_signal(tokens, aspect, lex)
    if signal is None:
        return None
    return 1 if signal > 0 else -1


def aspect_stats(
    aspect: AspectDef, docs: Sequence[ReviewDocument], lex: SentimentLexicon
) -> AspectStats:
    """Tally SP over all reviews; each review counts at most once."""
    pos = neg = zero = 0
    for doc in docs:
        signal = aspect_signal(doc.tokens, aspect, lex)
        if signal is None:
            continue
        if signal > 0:
            pos += 1
        else:
            neg += 1
            if signal == 0.0:
                zero += 1
    return AspectStats(
        aspect=aspect.term,
        aliases=tuple(" ".join(a) for a in aspect.aliases),
        pos=pos,
        neg=neg,
        zero_signal=zero,
    )


def frequency_score(
    aspect: AspectDef, docs: Sequence[ReviewDocument], lex: SentimentLexicon
) -> int:
    """FA: number of reviews whose mention classifies +1 plus those at -1."""
    return aspect_stats(aspect, docs, lex).fa


def popularity_score(
    aspect: AspectDef, docs: Sequence[ReviewDocument], lex: SentimentLexicon
) -> float:
    """PA: positive fraction of the aspect's mentions; needs >= 1 mention."""
    return aspect_stats(aspect, docs, lex).pa


def build_aspect_defs(
    candidates: Sequence[CandidateAspect],
    aliases: Optional[Mapping[str, Sequence[str]]] = None,
) -> list[AspectDef]:
    alias_table = aliases or {}
    return [
        AspectDef.create(c.term, alias_table.get(c.term, ())) for c in candidates
    ]


def top_frequent(
    candidates: Sequence[CandidateAspect],
    docs: Sequence[ReviewDocument],
    lex: SentimentLexicon,
    n: int = DEFAULT_TOP_N,
    aliases: Optional[Mapping[str, Sequence[str]]] = None,
) -> tuple[list[AspectStats], bool]:
    """Rank candidates by FA and keep the top n, ties lexicographic.

    Returns (ranking, shortfall); shortfall is True when fewer than n
    candidates have FA > 0, in which case all of those are returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    stats = [aspect_stats(a, docs, lex) for a in build_aspect_defs(candidates, aliases)]
    mentioned = [s for s in stats if s.fa > 0]
    mentioned.sort(key=lambda s: (-s.fa, s.aspect))
    return mentioned[:n], len(mentioned) < n


@dataclass(frozen=True)
class EntropySummary:
    kind: str  # "frequent" | "popular"
    values: tuple[float, ...]
    entropy: float


def entropy_frequent(fa_values: Sequence[float]) -> float:
    """Base-10 entropy of the FA column normalized to a probability vector."""
    if not fa_values:
        raise ValueError("empty FA list")
    if any(v <= 0 for v in fa_values):
        raise ValueError("FA values must be positive")
    total = sum(fa_values)
    return -sum((v / total) * math.log10(v / total) for v in fa_values)


def entropy_popular(pa_values: Sequence[float]) -> float:
    """-sum(PA * log10 PA) over raw PA values, no normalization."""
    if not pa_values:
        raise ValueError("empty PA list")
    if any(v <= 0 or v > 1 for v in pa_values):
        raise ValueError("PA values must lie in (0, 1]")
    return -sum(v * math.log10(v) for v in pa_values)


@dataclass(frozen=True)
class BilingualMap:
    """Source-language aspect term -> target-language term, plus alias table."""

    pairs: Mapping[str, str]
    aliases: Mapping[str, tuple[str, ...]]


def load_bilingual_map(path: str | Path) -> BilingualMap:
    """Read TSV rows `source<TAB>target[<TAB>alias,alias,...]`.

    Identity rows (source == target) may be used purely to attach aliases.
    """
    pairs: dict[str, str] = {}
    aliases: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected `source<TAB>target[<TAB>aliases]`"
                )
            source, target = parts[0].strip(), parts[1].strip()
            if not source or not target:
                raise ValueError(f"{path}:{lineno}: empty source or target")
            if pairs.get(source, target) != target:
                raise ValueError(f"{path}:{lineno}: {source!r} maps to two targets")
            pairs[source] = target
            if len(parts) == 3:
                forms = tuple(a.strip() for a in parts[2].split(",") if a.strip())
                if forms:
                    aliases[source] = tuple(dict.fromkeys(aliases.get(source, ()) + forms))
    return BilingualMap(pairs=pairs, aliases=aliases)


@dataclass(frozen=True)
class AlignmentResult:
    pairs: tuple[tuple[AspectStats, AspectStats], ...]
    unmatched_source: tuple[AspectStats, ...]
    unmatched_target: tuple[AspectStats, ...]


def align_bilingual(
    source: Sequence[AspectStats],
    target: Sequence[AspectStats],
    bmap: BilingualMap,
) -> AlignmentResult:
    """Pair source aspects with target aspects via the map or identity match."""
    by_term = {s.aspect: s for s in target}
    pairs = []
    matched_targets = set()
    unmatched_source = []
    for stats in source:
        translated = bmap.pairs.get(stats.aspect, stats.aspect)
        hit = by_term.get(translated)
        if hit is None:
            unmatched_source.append(stats)
        else:
            pairs.append((stats, hit))
            matched_targets.add(hit.aspect)
    unmatched_target = [s for s in target if s.aspect not in matched_targets]
    return AlignmentResult(
        pairs=tuple(pairs),
        unmatched_source=tuple(unmatched_source),
        unmatched_target=tuple(unmatched_target),
    )
