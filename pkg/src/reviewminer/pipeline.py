"""Pipeline configuration, stage orchestration, and artifact persistence."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import aspects as aspects_mod
from . import survey as survey_mod
from .corpus import (
    NEGATIVE,
    POSITIVE,
    LabeledCorpus,
    ReviewDocument,
    TokenizerConfig,
    kfold_split,
    load_reviews,
)
from .polarity import (
    LinearModel,
    PolarityCounts,
    SvmConfig,
    evaluate,
    predict,
    train,
)
from .textfeat import FeatureSet, select_features, vectorize
from .topics import CandidateAspect, candidate_aspects, fit_lda, load_noun_lexicon

STAGE_INGEST = "ingest"
STAGE_TRAIN = "train-polarity"
STAGE_TOPICS = "fit-topics"
STAGE_ASPECTS = "aspects"
STAGE_SURVEY = "survey"
STAGES = (STAGE_INGEST, STAGE_TRAIN, STAGE_TOPICS, STAGE_ASPECTS, STAGE_SURVEY)

# nonzero exit codes, tagged per stage
EXIT_CONFIG = 3
STAGE_EXIT_CODES = {
    STAGE_INGEST: 10,
    STAGE_TRAIN: 11,
    STAGE_TOPICS: 12,
    STAGE_ASPECTS: 13,
    STAGE_SURVEY: 14,
    "eval-polarity": 15,
}


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class CorpusConfig:
    tag: str
    reviews: Path
    labeled: Path
    sentiment_lexicon: Path
    noun_lexicon: Path
    tokenizer: TokenizerConfig


@dataclass(frozen=True)
class FeatureParams:
    top_k: int = 2000
    min_df: int = 2


@dataclass(frozen=True)
class SvmParams:
    C: float = 1.0
    tolerance: float = 1e-6
    max_epochs: int = 1000


@dataclass(frozen=True)
class LdaParams:
    k: int = 10
    alpha: Optional[float] = None  # None -> 50/k
    beta: float = 0.01
    iterations: int = 1000


@dataclass(frozen=True)
class AspectParams:
    candidates: int = 50
    top: int = 10


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    out_dir: Path
    taxonomy: Path
    templates: Optional[Path]
    bilingual_map: Optional[Path]
    compare: Optional[tuple[str, str]]
    corpora: Mapping[str, CorpusConfig]
    features: FeatureParams
    svm: SvmParams
    lda: LdaParams
    aspects: AspectParams
    config_hash: str


def stage_seed(seed: int, name: str) -> int:
    """Per-stage seed derived from the single config seed, keyed by name."""
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**31)


def _require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise ConfigError(f"{what} file not found: {path}")
    return path


def _deep_merge(base: dict, overrides: Mapping) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(
    path: str | Path,
    seed: Optional[int] = None,
    out_dir: Optional[str | Path] = None,
    overrides: Optional[Mapping] = None,
) -> PipelineConfig:
    """Load and validate a pipeline config; flags override config fields.

    Overrides are merged into the raw config before validation, so the config
    hash always reflects the effective configuration.  Paths are resolved
    relative to the config file.  The hash excludes the output directory, so
    runs into different output directories stay byte-comparable.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if overrides:
        data = _deep_merge(data, overrides)
    base = path.parent

    if seed is None:
        seed = data.get("seed")
    if seed is None:
        raise ConfigError("config must set a seed")
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")

    raw_corpora = data.get("corpora")
    if not raw_corpora:
        raise ConfigError("config must define at least one corpus")
    corpora: dict[str, CorpusConfig] = {}
    for tag, entry in sorted(raw_corpora.items()):
        for key in ("reviews", "labeled", "sentiment_lexicon", "noun_lexicon"):
            if key not in entry:
                raise ConfigError(f"corpus {tag!r} is missing {key!r}")
        tok = entry.get("tokenizer", {})
        lexicon_path = tok.get("lexicon")
        try:
            tokenizer = TokenizerConfig(
                mode=tok.get("mode", "unicode_word"),
                lexicon_path=(
                    str(_require_file(base / lexicon_path, "segmentation lexicon"))
                    if lexicon_path
                    else None
                ),
                lowercase=bool(tok.get("lowercase", True)),
            )
        except ValueError as exc:
            raise ConfigError(f"corpus {tag!r}: {exc}") from exc
        corpora[tag] = CorpusConfig(
            tag=tag,
            reviews=_require_file(base / entry["reviews"], "reviews"),
            labeled=_require_file(base / entry["labeled"], "labeled corpus"),
            sentiment_lexicon=_require_file(
                base / entry["sentiment_lexicon"], "sentiment lexicon"
            ),
            noun_lexicon=_require_file(base / entry["noun_lexicon"], "noun lexicon"),
            tokenizer=tokenizer,
        )

    if "taxonomy" not in data:
        raise ConfigError("config must reference a taxonomy file")
    taxonomy = _require_file(base / data["taxonomy"], "taxonomy")
    templates = (
        _require_file(base / data["templates"], "templates")
        if data.get("templates")
        else None
    )
    bilingual = (
        _require_file(base / data["bilingual_map"], "bilingual map")
        if data.get("bilingual_map")
        else None
    )

    compare = None
    if data.get("compare"):
        source = data["compare"].get("source")
        target = data["compare"].get("target")
        if source not in corpora or target not in corpora:
            raise ConfigError("compare.source/target must name configured corpora")
        if source == target:
            raise ConfigError("compare.source and compare.target must differ")
        compare = (source, target)

    feat = data.get("features", {})
    features = FeatureParams(
        top_k=int(feat.get("top_k", 2000)), min_df=int(feat.get("min_df", 2))
    )
    if features.top_k < 1 or features.min_df < 1:
        raise ConfigError("features.top_k and features.min_df must be >= 1")

    svm_raw = data.get("svm", {})
    svm = SvmParams(
        C=float(svm_raw.get("C", 1.0)),
        tolerance=float(svm_raw.get("tolerance", 1e-6)),
        max_epochs=int(svm_raw.get("max_epochs", 1000)),
    )
    if svm.C <= 0 or svm.tolerance <= 0 or svm.max_epochs < 1:
        raise ConfigError("svm params out of range")

    lda_raw = data.get("lda", {})
    lda = LdaParams(
        k=int(lda_raw.get("k", 10)),
        alpha=None if lda_raw.get("alpha") is None else float(lda_raw["alpha"]),
        beta=float(lda_raw.get("beta", 0.01)),
        iterations=int(lda_raw.get("iterations", 1000)),
    )
    if lda.k < 2 or lda.beta <= 0 or lda.iterations < 1:
        raise ConfigError("lda params out of range")
    if lda.alpha is not None and lda.alpha <= 0:
        raise ConfigError("lda.alpha must be positive")

    asp_raw = data.get("aspects", {})
    asp = AspectParams(
        candidates=int(asp_raw.get("candidates", 50)), top=int(asp_raw.get("top", 10))
    )
    if asp.candidates < 1 or asp.top < 1:
        raise ConfigError("aspect params out of range")

    if out_dir is None:
        out_dir = base / data.get("out_dir", "out")
    out_dir = Path(out_dir)

    hash_source = {
        "seed": seed,
        "taxonomy": str(taxonomy),
        "templates": str(templates) if templates else None,
        "bilingual_map": str(bilingual) if bilingual else None,
        "compare": list(compare) if compare else None,
        "corpora": {
            tag: {
                "reviews": str(c.reviews),
                "labeled": str(c.labeled),
                "sentiment_lexicon": str(c.sentiment_lexicon),
                "noun_lexicon": str(c.noun_lexicon),
                "tokenizer": {
                    "mode": c.tokenizer.mode,
                    "lexicon": c.tokenizer.lexicon_path,
                    "lowercase": c.tokenizer.lowercase,
                },
            }
            for tag, c in corpora.items()
        },
        "features": [features.top_k, features.min_df],
        "svm": [svm.C, svm.tolerance, svm.max_epochs],
        "lda": [lda.k, lda.alpha, lda.beta, lda.iterations],
        "aspects": [asp.candidates, asp.top],
    }
    config_hash = hashlib.sha256(
        json.dumps(hash_source, sort_keys=True).encode("utf-8")
    ).hexdigest()

    return PipelineConfig(
        seed=seed,
        out_dir=out_dir,
        taxonomy=taxonomy,
        templates=templates,
        bilingual_map=bilingual,
        compare=compare,
        corpora=corpora,
        features=features,
        svm=svm,
        lda=lda,
        aspects=asp,
        config_hash=config_hash,
    )


# ---------------------------------------------------------------------------
# artifact I/O


def _write_artifact(cfg: PipelineConfig, name: str, payload: dict) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / name
    body = {"config_hash": cfg.config_hash, **payload}
    path.write_text(
        json.dumps(body, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def _read_artifact(cfg: PipelineConfig, name: str, stage: str, force: bool) -> dict:
    path = cfg.out_dir / name
    if not path.is_file():
        raise StageError(stage, f"missing artifact {name}; run earlier stages first")
    data = json.loads(path.read_text(encoding="utf-8"))
    if not force and data.get("config_hash") != cfg.config_hash:
        raise StageError(
            stage,
            f"artifact {name} was produced under a different configuration "
            "(config hash mismatch); rerun earlier stages or pass --force",
        )
    return data


def _doc_to_dict(doc: ReviewDocument) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "tokens": list(doc.tokens),
        "category": doc.category,
        "brand": doc.brand,
        "corpus_tag": doc.corpus_tag,
        "gold_polarity": doc.gold_polarity,
    }


def _doc_from_dict(data: dict) -> ReviewDocument:
    return ReviewDocument(
        id=data["id"],
        text=data["text"],
        tokens=tuple(data["tokens"]),
        category=data["category"],
        brand=data["brand"],
        corpus_tag=data["corpus_tag"],
        gold_polarity=data["gold_polarity"],
    )


def _update_manifest(
    cfg: PipelineConfig, stage: str, status: str, artifacts: Sequence[str], error: str | None = None
) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "manifest.json"
    manifest = {"config_hash": cfg.config_hash, "stages": {}}
    if path.is_file():
        existing = json.loads(path.read_text(encoding="utf-8"))
        if existing.get("config_hash") == cfg.config_hash:
            manifest = existing
    manifest["stages"][stage] = {
        "status": status,
        "artifacts": sorted(artifacts),
        "error": error,
    }
    path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# stages


def stage_ingest(cfg: PipelineConfig, force: bool = False) -> list[str]:
    written = []
    for tag, corpus_cfg in sorted(cfg.corpora.items()):
        result = load_reviews(corpus_cfg.reviews, tokenizer=corpus_cfg.tokenizer)
        for doc in result.documents:
            if doc.corpus_tag != tag:
                raise ValueError(
                    f"review {doc.id!r} is tagged {doc.corpus_tag!r}, expected {tag!r}"
                )
        name = f"corpus_{tag}.json"
        _write_artifact(
            cfg,
            name,
            {
                "tag": tag,
                "dropped": result.dropped,
                "documents": [_doc_to_dict(d) for d in result.documents],
            },
        )
        written.append(name)
        labeled_result = load_reviews(corpus_cfg.labeled, tokenizer=corpus_cfg.tokenizer)
        labeled = LabeledCorpus.from_documents(labeled_result.documents)
        name = f"labeled_{tag}.json"
        _write_artifact(
            cfg,
            name,
            {
                "tag": tag,
                "dropped": labeled_result.dropped,
                "class_counts": dict(labeled.class_counts),
                "documents": [_doc_to_dict(d) for d in labeled.documents],
            },
        )
        written.append(name)
    return written


def stage_train_polarity(cfg: PipelineConfig, force: bool = False) -> list[str]:
    written = []
    for tag in sorted(cfg.corpora):
        labeled_data = _read_artifact(cfg, f"labeled_{tag}.json", STAGE_TRAIN, force)
        docs = [_doc_from_dict(d) for d in labeled_data["documents"]]
        labeled = LabeledCorpus.from_documents(docs)
        fs = select_features(labeled, top_k=cfg.features.top_k, min_df=cfg.features.min_df)
        svm_cfg = SvmConfig(
            C=cfg.svm.C,
            tolerance=cfg.svm.tolerance,
            max_epochs=cfg.svm.max_epochs,
            seed=stage_seed(cfg.seed, f"train:{tag}"),
        )
        vectors = [vectorize(d, fs) for d in docs]
        labels = [d.gold_polarity for d in docs]
        model = train(vectors, labels, svm_cfg, dim=len(fs))
        name = f"features_{tag}.json"
        _write_artifact(cfg, name, fs.to_dict())
        written.append(name)
        name = f"model_{tag}.json"
        _write_artifact(cfg, name, _model_to_dict(model, feature_hash(fs)))
        written.append(name)

        corpus_data = _read_artifact(cfg, f"corpus_{tag}.json", STAGE_TRAIN, force)
        predictions = {}
        for record in corpus_data["documents"]:
            doc = _doc_from_dict(record)
            predictions[doc.id] = predict(model, vectorize(doc, fs))
        name = f"predictions_{tag}.json"
        _write_artifact(cfg, name, {"tag": tag, "polarities": predictions})
        written.append(name)
    return written


def feature_hash(fs: FeatureSet) -> str:
    canonical = json.dumps(fs.to_dict(), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _model_to_dict(model: LinearModel, fs_hash: str) -> dict:
    return {
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "hyperparams": {
            "C": model.config.C,
            "tolerance": model.config.tolerance,
            "max_epochs": model.config.max_epochs,
            "seed": model.config.seed,
            "class_weights": dict(model.config.class_weights or {}),
        },
        "feature_hash": fs_hash,
    }


def stage_fit_topics(cfg: PipelineConfig, force: bool = False) -> list[str]:
    tax = survey_mod.load_taxonomy(cfg.taxonomy)
    written = []
    for tag in sorted(cfg.corpora):
        corpus_data = _read_artifact(cfg, f"corpus_{tag}.json", STAGE_TOPICS, force)
        docs = [_doc_from_dict(d) for d in corpus_data["documents"]]
        nouns = load_noun_lexicon(cfg.corpora[tag].noun_lexicon)
        for category in tax.categories:
            cat_docs = [d.tokens for d in docs if d.category == category.id]
            if not cat_docs:
                continue
            model = fit_lda(
                cat_docs,
                k=cfg.lda.k,
                alpha=cfg.lda.alpha,
                beta=cfg.lda.beta,
                iterations=cfg.lda.iterations,
                seed=stage_seed(cfg.seed, f"lda:{tag}:{category.id}"),
            )
            candidates = candidate_aspects(model, nouns, m=cfg.aspects.candidates)
            name = f"topics_{tag}_{category.id}.json"
            _write_artifact(
                cfg,
                name,
                {
                    "tag": tag,
                    "category_id": category.id,
                    "model": model.to_dict(),
                    "candidates": [{"term": c.term, "score": c.score} for c in candidates],
                },
            )
            written.append(name)
    return written


def _load_templates(cfg: PipelineConfig) -> dict[str, str]:
    if cfg.templates is None:
        return dict(survey_mod.DEFAULT_TEMPLATES)
    return survey_mod.load_templates(cfg.templates)


def _load_bilingual(cfg: PipelineConfig) -> aspects_mod.BilingualMap:
    if cfg.bilingual_map is None:
        return aspects_mod.BilingualMap(pairs={}, aliases={})
    return aspects_mod.load_bilingual_map(cfg.bilingual_map)


def _question_lookup(
    tax: survey_mod.ProductTaxonomy, templates: Mapping[str, str]
) -> dict[tuple[str, str], survey_mod.Question]:
    questions = survey_mod.generate_questions(tax, templates)
    return {(q.level, q.slots["subject"]): q for q in questions}


def stage_aspects(cfg: PipelineConfig, force: bool = False) -> list[str]:
    tax = survey_mod.load_taxonomy(cfg.taxonomy)
    templates = _load_templates(cfg)
    questions = _question_lookup(tax, templates)
    bmap = _load_bilingual(cfg)
    written = []
    for tag in sorted(cfg.corpora):
        corpus_data = _read_artifact(cfg, f"corpus_{tag}.json", STAGE_ASPECTS, force)
        docs = [_doc_from_dict(d) for d in corpus_data["documents"]]
        lex = aspects_mod.load_sentiment_lexicon(cfg.corpora[tag].sentiment_lexicon)
        for category in tax.categories:
            topics_name = f"topics_{tag}_{category.id}.json"
            if not (cfg.out_dir / topics_name).is_file():
                continue
            topics_data = _read_artifact(cfg, topics_name, STAGE_ASPECTS, force)
            candidates = [
                CandidateAspect(term=c["term"], score=c["score"])
                for c in topics_data["candidates"]
            ]
            cat_docs = [d for d in docs if d.category == category.id]
            frequent, popular = survey_mod.answer_decision_factors(
                questions[(survey_mod.FREQUENT_ASPECT, category.display)],
                questions[(survey_mod.POPULAR_ASPECT, category.display)],
                candidates,
                cat_docs,
                lex,
                n=cfg.aspects.top,
                aliases=bmap.aliases,
            )
            name = f"aspects_{tag}_{category.id}.json"
            _write_artifact(
                cfg,
                name,
                {
                    "tag": tag,
                    "category_id": category.id,
                    "category": category.display,
                    "frequent": survey_mod.answer_to_dict(frequent),
                    "popular": survey_mod.answer_to_dict(popular),
                },
            )
            written.append(name)
    return written


def _answer_from_dict(data: dict) -> survey_mod.Answer:
    question = survey_mod.Question(
        level=data["level"],
        text=data["question"],
        slots=data["slots"],
        options=tuple(data["options"]),
    )
    return survey_mod.Answer(
        question=question,
        payload=data["payload"],
        insufficient=data["insufficient"],
    )


def _stats_from_rows(rows: Sequence[Mapping]) -> list[aspects_mod.AspectStats]:
    return [
        aspects_mod.AspectStats(
            aspect=row["aspect"],
            aliases=(),
            pos=row["pos"],
            neg=row["neg"],
            zero_signal=row["zero_signal"],
        )
        for row in rows
    ]


def stage_survey(cfg: PipelineConfig, force: bool = False) -> list[str]:
    tax = survey_mod.load_taxonomy(cfg.taxonomy)
    templates = _load_templates(cfg)
    questions = _question_lookup(tax, templates)
    bmap = _load_bilingual(cfg)
    brand_display = {
        (c.id, b.id): b.display for c in tax.categories for b in c.brands
    }

    answers_by_corpus: dict[str, list[survey_mod.Answer]] = {}
    aspect_answers: dict[tuple[str, str], dict] = {}
    for tag in sorted(cfg.corpora):
        corpus_data = _read_artifact(cfg, f"corpus_{tag}.json", STAGE_SURVEY, force)
        docs = [_doc_from_dict(d) for d in corpus_data["documents"]]
        predictions = _read_artifact(cfg, f"predictions_{tag}.json", STAGE_SURVEY, force)[
            "polarities"
        ]

        def counts(docs_subset) -> PolarityCounts:
            pos = sum(1 for d in docs_subset if predictions.get(d.id) == POSITIVE)
            neg = sum(1 for d in docs_subset if predictions.get(d.id) == NEGATIVE)
            return PolarityCounts(pos=pos, neg=neg)

        counts_by_category = {}
        for category in tax.categories:
            cat_docs = [d for d in docs if d.category == category.id]
            if cat_docs:
                counts_by_category[category.display] = counts(cat_docs)

        answers = [
            survey_mod.answer_overall(
                questions[(survey_mod.OVERALL, tax.overall_label)],
                counts_by_category,
                mode=survey_mod.MACRO,
            )
        ]
        for category in tax.categories:
            cat_docs = [d for d in docs if d.category == category.id]
            answers.append(
                survey_mod.answer_product(
                    questions[(survey_mod.PRODUCT, category.display)],
                    counts(cat_docs),
                )
            )
            brand_q = questions.get((survey_mod.BRAND, category.display))
            if brand_q is not None:
                per_brand = {}
                for brand in category.brands:
                    brand_docs = [d for d in cat_docs if d.brand == brand.id]
                    per_brand[brand.display] = counts(brand_docs)
                answers.append(survey_mod.answer_brand(brand_q, per_brand))
            aspects_name = f"aspects_{tag}_{category.id}.json"
            if (cfg.out_dir / aspects_name).is_file():
                data = _read_artifact(cfg, aspects_name, STAGE_SURVEY, force)
                aspect_answers[(tag, category.display)] = data
                answers.append(_answer_from_dict(data["frequent"]))
                answers.append(_answer_from_dict(data["popular"]))
            else:
                reason = "no topic model for this category"
                for level in (survey_mod.FREQUENT_ASPECT, survey_mod.POPULAR_ASPECT):
                    answers.append(
                        survey_mod.Answer(
                            questions[(level, category.display)],
                            None,
                            insufficient=reason,
                        )
                    )
        answers_by_corpus[tag] = answers

    alignments = {}
    if cfg.compare is not None:
        source_tag, target_tag = cfg.compare
        for category in tax.categories:
            source = aspect_answers.get((source_tag, category.display))
            target = aspect_answers.get((target_tag, category.display))
            if not source or not target:
                continue
            if source["frequent"]["payload"] is None or target["frequent"]["payload"] is None:
                continue
            alignments[category.display] = aspects_mod.align_bilingual(
                _stats_from_rows(source["frequent"]["payload"]["ranking"]),
                _stats_from_rows(target["frequent"]["payload"]["ranking"]),
                bmap,
            )

    metadata = {
        "corpus_tags": sorted(cfg.corpora),
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "overall_mode": survey_mod.MACRO,
        "notes": {
            "overall_os": (
                "headline overall OS is the unweighted mean of per-category OS; "
                "the pooled-count micro OS is reported alongside"
            ),
            "zero_signal": (
                "aspect mentions with a zero sentiment sum classify negative and "
                "are counted in zero_signal for auditing"
            ),
        },
    }
    json_path, md_path = survey_mod.render_report(
        answers_by_corpus, alignments, metadata, cfg.out_dir
    )
    return [json_path.name, md_path.name]


_STAGE_FUNCS = {
    STAGE_INGEST: stage_ingest,
    STAGE_TRAIN: stage_train_polarity,
    STAGE_TOPICS: stage_fit_topics,
    STAGE_ASPECTS: stage_aspects,
    STAGE_SURVEY: stage_survey,
}


def run_stage(cfg: PipelineConfig, stage: str, force: bool = False) -> list[str]:
    """Run one stage, recording the outcome in the manifest."""
    try:
        artifacts = _STAGE_FUNCS[stage](cfg, force=force)
    except StageError as exc:
        _update_manifest(cfg, stage, "failed", [], error=str(exc))
        raise
    except Exception as exc:
        _update_manifest(cfg, stage, "failed", [], error=str(exc))
        raise StageError(stage, str(exc)) from exc
    _update_manifest(cfg, stage, "ok", artifacts)
    return artifacts


def run_pipeline(cfg: PipelineConfig, force: bool = False) -> Path:
    """Run every stage in order; returns the report.json path."""
    for stage in STAGES:
        run_stage(cfg, stage, force=force)
    return cfg.out_dir / "report.json"


def eval_polarity(cfg: PipelineConfig, tag: str, folds: int) -> dict:
    """Stratified k-fold cross-validation of the polarity classifier."""
    if tag not in cfg.corpora:
        raise ConfigError(f"unknown corpus tag {tag!r}")
    result = load_reviews(cfg.corpora[tag].labeled, tokenizer=cfg.corpora[tag].tokenizer)
    corpus = LabeledCorpus.from_documents(result.documents)
    assignment = kfold_split(corpus, folds, seed=stage_seed(cfg.seed, f"kfold:{tag}"))
    svm_cfg = SvmConfig(
        C=cfg.svm.C,
        tolerance=cfg.svm.tolerance,
        max_epochs=cfg.svm.max_epochs,
        seed=stage_seed(cfg.seed, f"train:{tag}"),
    )
    fold_rows = []
    for fold in range(folds):
        train_docs = [d for d in corpus.documents if assignment[d.id] != fold]
        test_docs = [d for d in corpus.documents if assignment[d.id] == fold]
        train_corpus = LabeledCorpus.from_documents(train_docs)
        fs = select_features(
            train_corpus, top_k=cfg.features.top_k, min_df=cfg.features.min_df
        )
        model = train(
            [vectorize(d, fs) for d in train_docs],
            [d.gold_polarity for d in train_docs],
            svm_cfg,
            dim=len(fs),
        )
        metrics = evaluate(
            model, [vectorize(d, fs) for d in test_docs], [d.gold_polarity for d in test_docs]
        )
        fold_rows.append(
            {
                "fold": fold,
                "accuracy": metrics.accuracy,
                "precision": metrics.precision,
                "recall": metrics.recall,
                "f1": metrics.f1,
                "confusion": dict(metrics.confusion),
            }
        )
    summary = {
        "tag": tag,
        "folds": folds,
        "per_fold": fold_rows,
        "mean_accuracy": sum(r["accuracy"] for r in fold_rows) / folds,
        "mean_f1": sum(r["f1"] for r in fold_rows) / folds,
    }
    _write_artifact(cfg, f"eval_{tag}.json", summary)
    return summary
