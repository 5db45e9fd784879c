"""Collapsed-Gibbs LDA and noun candidate-aspect extraction."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .corpus import load_term_file

DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_CANDIDATES = 50

NounLexicon = frozenset


def load_noun_lexicon(path: str | Path) -> NounLexicon:
    entries = load_term_file(path)
    if not entries:
        raise ValueError(f"noun lexicon {path} is empty")
    return entries


def nouns_from_tagged(
    lines: Iterable[str],
    separator: str = "/",
    noun_prefixes: tuple[str, ...] = ("n", "N"),
) -> NounLexicon:
    """Build a noun lexicon from pre-tagged token/TAG text lines."""
    nouns = set()
    for line in lines:
        for item in line.split():
            token, sep, tag = item.rpartition(separator)
            if sep and token and tag.startswith(noun_prefixes):
                nouns.add(token)
    if not nouns:
        raise ValueError("no noun-tagged tokens found")
    return frozenset(nouns)


@dataclass(frozen=True, eq=False)
class TopicModel:
    k: int
    vocab: tuple[str, ...]
    phi: np.ndarray  # k x V topic-word distributions
    theta: np.ndarray  # D x k document-topic distributions
    alpha: float
    beta: float
    iterations: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "vocab": list(self.vocab),
            "phi": self.phi.tolist(),
            "theta": self.theta.tolist(),
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopicModel":
        return cls(
            k=int(data["k"]),
            vocab=tuple(data["vocab"]),
            phi=np.array(data["phi"]),
            theta=np.array(data["theta"]),
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            iterations=int(data["iterations"]),
            seed=int(data["seed"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CandidateAspect:
    term: str
    score: float  # sum of per-topic probabilities


@njit(cache=True)
def _seed_rng(seed):
    np.random.seed(seed)


@njit(cache=True)
def _init_assignments(n_tokens, k):
    z = np.empty(n_tokens, dtype=np.int64)
    for idx in range(n_tokens):
        z[idx] = np.random.randint(0, k)
    return z


@njit(cache=True)
def _gibbs_sweep(doc_ids, word_ids, z, n_wt, n_dt, n_t, alpha, beta, k, v):
    probs = np.empty(k)
    for idx in range(doc_ids.shape[0]):
        d = doc_ids[idx]
        w = word_ids[idx]
        t = z[idx]
        n_wt[w, t] -= 1
        n_dt[d, t] -= 1
        n_t[t] -= 1
        total = 0.0
        for tt in range(k):
            p = (n_wt[w, tt] + beta) / (n_t[tt] + v * beta) * (n_dt[d, tt] + alpha)
            probs[tt] = p
            total += p
        r = np.random.random() * total
        acc = 0.0
        new_t = k - 1
        for tt in range(k):
            acc += probs[tt]
            if r < acc:
                new_t = tt
                break
        z[idx] = new_t
        n_wt[w, new_t] += 1
        n_dt[d, new_t] += 1
        n_t[new_t] += 1


def fit_lda(
    docs: Sequence[Sequence[str]],
    k: int,
    alpha: Optional[float] = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    sweep_hook: Optional[Callable[[int, np.ndarray], None]] = None,
) -> TopicModel:
    """Fit LDA by collapsed Gibbs sampling with symmetric priors.

    alpha defaults to 50/k.  phi and theta are point estimates from the final
    sampler state with add-beta/add-alpha smoothing.  Fully deterministic
    given the seed.  `sweep_hook(sweep_index, per_topic_counts)` is called
    after every sweep, mainly for invariant checks in tests.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not docs:
        raise ValueError("empty corpus")
    for d, tokens in enumerate(docs):
        if not tokens:
            raise ValueError(f"document {d} has no tokens")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if alpha is None:
        alpha = 50.0 / k

    vocab = tuple(sorted({t for tokens in docs for t in tokens}))
    word_index = {t: i for i, t in enumerate(vocab)}
    v = len(vocab)
    doc_ids = np.concatenate(
        [np.full(len(tokens), d, dtype=np.int64) for d, tokens in enumerate(docs)]
    )
    word_ids = np.array(
        [word_index[t] for tokens in docs for t in tokens], dtype=np.int64
    )
    n_tokens = doc_ids.shape[0]

    _seed_rng(seed)
    z = _init_assignments(n_tokens, k)
    n_wt = np.zeros((v, k), dtype=np.int64)
    n_dt = np.zeros((len(docs), k), dtype=np.int64)
    n_t = np.zeros(k, dtype=np.int64)
    for idx in range(n_tokens):
        n_wt[word_ids[idx], z[idx]] += 1
        n_dt[doc_ids[idx], z[idx]] += 1
        n_t[z[idx]] += 1

    for sweep in range(iterations):
        _gibbs_sweep(doc_ids, word_ids, z, n_wt, n_dt, n_t, alpha, beta, k, v)
        if n_t.sum() != n_tokens:
            raise RuntimeError("sampler count invariant violated")
        if sweep_hook is not None:
            sweep_hook(sweep, n_t.copy())

    phi = (n_wt.T + beta) / (n_t[:, None] + v * beta)
    doc_lengths = n_dt.sum(axis=1)
    theta = (n_dt + alpha) / (doc_lengths[:, None] + k * alpha)
    return TopicModel(
        k=k,
        vocab=vocab,
        phi=phi,
        theta=theta,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        seed=seed,
    )


def candidate_aspects(
    model: TopicModel, nouns: NounLexicon, m: int = DEFAULT_CANDIDATES
) -> list[CandidateAspect]:
    """Top m nouns by summed per-topic probability, ties lexicographic."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not nouns:
        raise ValueError("empty noun lexicon")
    scores = {
        term: float(model.phi[:, col].sum())
        for col, term in enumerate(model.vocab)
        if term in nouns
    }
    if not scores:
        raise ValueError("no nouns present in the model vocabulary")
    ranked = sorted(scores, key=lambda t: (-scores[t], t))[:m]
    return [CandidateAspect(term=t, score=scores[t]) for t in ranked]
