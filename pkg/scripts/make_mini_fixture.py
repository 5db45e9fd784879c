#!/usr/bin/env python3
"""Generate the bundled mini-corpus fixture (60 synthetic reviews, two corpora).

Deterministic: rerunning overwrites tests/fixtures/mini/ with identical files.
The fixture covers every pipeline stage: two categories with two brands each,
planted aspect vocabulary with known polarity words, a Han-script corpus that
exercises the longest-match segmenter, and a bilingual map with a multiword
alias.
"""

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "mini"

SEED = 20240810

EN_ASPECTS = ["screen", "battery", "price", "quality", "lens", "logistics"]
EN_POS = ["great", "excellent", "sharp", "fast"]
EN_NEG = ["awful", "terrible", "slow", "disappointing"]

ZH_ASPECTS = ["屏幕", "电池", "价格", "质量", "物流", "正品"]
ZH_POS = ["好", "满意", "快", "清晰"]
ZH_NEG = ["差", "失望", "慢", "坏"]

# (category, brand, n_reviews, n_positive)
PLAN = [
    ("digital_camera", "cannon", 8, 6),
    ("digital_camera", "nikon", 7, 6),
    ("smart_phone", "apple", 8, 4),
    ("smart_phone", "samsung", 7, 6),
]


def en_clause(aspect, word):
    return f"the {aspect} is {word}"


def zh_clause(aspect, word):
    return f"{aspect}很{word}"


def build_reviews(tag, aspects, pos_words, neg_words, clause, rng):
    """30 unlabeled reviews; aspects rotate so each gets mentions of both signs."""
    reviews = []
    aspect_cycle = list(aspects)
    cursor = 0

    def next_aspects(n):
        nonlocal cursor
        picked = []
        for _ in range(n):
            picked.append(aspect_cycle[cursor % len(aspect_cycle)])
            cursor += 1
        return picked

    idx = 0
    for category, brand, total, positive in PLAN:
        for i in range(total):
            idx += 1
            is_positive = i < positive
            mentioned = next_aspects(2)
            words = pos_words if is_positive else neg_words
            clauses = [clause(a, words[int(rng.integers(len(words)))]) for a in mentioned]
            # a few mixed reviews keep the distance weighting non-trivial
            if i == total - 1:
                extra = next_aspects(1)[0]
                other = neg_words if is_positive else pos_words
                clauses.append(clause(extra, other[int(rng.integers(len(other)))]))
            joiner = ", " if tag == "en" else "，"
            stop = "." if tag == "en" else "。"
            reviews.append(
                {
                    "id": f"{tag}-{idx:03d}",
                    "text": joiner.join(clauses) + stop,
                    "category": category,
                    "brand": brand,
                    "corpus_tag": tag,
                }
            )
    return reviews


def build_labeled(tag, aspects, pos_words, neg_words, clause, rng):
    """20 labeled reviews, 12 positive / 8 negative, trivially separable."""
    reviews = []
    cells = [(c, b) for c, b, _, _ in PLAN]
    for i in range(20):
        polarity = "positive" if i < 12 else "negative"
        words = pos_words if polarity == "positive" else neg_words
        mentioned = [aspects[i % len(aspects)], aspects[(i + 3) % len(aspects)]]
        clauses = [clause(a, words[int(rng.integers(len(words)))]) for a in mentioned]
        category, brand = cells[i % len(cells)]
        joiner = ", " if tag == "en" else "，"
        stop = "." if tag == "en" else "。"
        reviews.append(
            {
                "id": f"{tag}-lab-{i:03d}",
                "text": joiner.join(clauses) + stop,
                "category": category,
                "brand": brand,
                "corpus_tag": tag,
                "polarity": polarity,
            }
        )
    return reviews


def write_jsonl(path, records):
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    en_reviews = build_reviews("en", EN_ASPECTS, EN_POS, EN_NEG, en_clause, rng)
    zh_reviews = build_reviews("zh", ZH_ASPECTS, ZH_POS, ZH_NEG, zh_clause, rng)
    assert len(en_reviews) + len(zh_reviews) == 60
    write_jsonl(OUT / "reviews_en.jsonl", en_reviews)
    write_jsonl(OUT / "reviews_zh.jsonl", zh_reviews)

    write_jsonl(
        OUT / "labeled_en.jsonl",
        build_labeled("en", EN_ASPECTS, EN_POS, EN_NEG, en_clause, rng),
    )
    write_jsonl(
        OUT / "labeled_zh.jsonl",
        build_labeled("zh", ZH_ASPECTS, ZH_POS, ZH_NEG, zh_clause, rng),
    )

    (OUT / "sentiment_en.tsv").write_text(
        "".join(f"{w}\t+1\n" for w in EN_POS) + "".join(f"{w}\t-1\n" for w in EN_NEG),
        encoding="utf-8",
    )
    (OUT / "sentiment_zh.tsv").write_text(
        "".join(f"{w}\t+1\n" for w in ZH_POS) + "".join(f"{w}\t-1\n" for w in ZH_NEG),
        encoding="utf-8",
    )

    (OUT / "nouns_en.txt").write_text("\n".join(EN_ASPECTS) + "\n", encoding="utf-8")
    (OUT / "nouns_zh.txt").write_text("\n".join(ZH_ASPECTS) + "\n", encoding="utf-8")

    # segmentation lexicon: every multi-character Han token used above
    seg_terms = sorted(set(ZH_ASPECTS + ZH_POS + ZH_NEG) | {"满意", "失望", "清晰"})
    seg_terms = [t for t in seg_terms if len(t) > 1]
    (OUT / "seg_zh.txt").write_text("\n".join(seg_terms) + "\n", encoding="utf-8")

    taxonomy = {
        "overall_label": "digital products",
        "categories": [
            {
                "id": "digital_camera",
                "display": "digital cameras",
                "brands": [
                    {"id": "cannon", "display": "Cannon"},
                    {"id": "nikon", "display": "Nikon"},
                ],
            },
            {
                "id": "smart_phone",
                "display": "smartphones",
                "brands": [
                    {"id": "apple", "display": "Apple"},
                    {"id": "samsung", "display": "Samsung"},
                ],
            },
        ],
    }
    (OUT / "taxonomy.json").write_text(
        json.dumps(taxonomy, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    templates = {
        "overall": "Do you like ____?",
        "product": "Do you like ____?",
        "brand": "Which brand of ____ do you prefer?",
        "frequent_aspect": "What aspects of ____ do you care about?",
        "popular_aspect": "What aspects of ____ are you satisfied with?",
    }
    (OUT / "templates.json").write_text(
        json.dumps(templates, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    bilingual = [
        ("屏幕", "screen", ""),
        ("电池", "battery", ""),
        ("价格", "price", ""),
        ("质量", "quality", ""),
        ("物流", "logistics", ""),
        ("正品", "genuine", ""),
        ("genuine", "genuine", "genuine product"),
    ]
    (OUT / "bilingual_map.tsv").write_text(
        "".join(
            f"{s}\t{t}\t{a}\n" if a else f"{s}\t{t}\n" for s, t, a in bilingual
        ),
        encoding="utf-8",
    )

    config = {
        "seed": 20240,
        "out_dir": "out",
        "taxonomy": "taxonomy.json",
        "templates": "templates.json",
        "bilingual_map": "bilingual_map.tsv",
        "compare": {"source": "zh", "target": "en"},
        "corpora": {
            "en": {
                "reviews": "reviews_en.jsonl",
                "labeled": "labeled_en.jsonl",
                "sentiment_lexicon": "sentiment_en.tsv",
                "noun_lexicon": "nouns_en.txt",
                "tokenizer": {"mode": "unicode_word", "lowercase": True},
            },
            "zh": {
                "reviews": "reviews_zh.jsonl",
                "labeled": "labeled_zh.jsonl",
                "sentiment_lexicon": "sentiment_zh.tsv",
                "noun_lexicon": "nouns_zh.txt",
                "tokenizer": {"mode": "lexicon_max_match", "lexicon": "seg_zh.txt", "lowercase": True},
            },
        },
        "features": {"top_k": 200, "min_df": 2},
        "svm": {"C": 1.0, "tolerance": 1e-6, "max_epochs": 1000},
        "lda": {"k": 3, "alpha": None, "beta": 0.01, "iterations": 400},
        "aspects": {"candidates": 8, "top": 5},
    }
    (OUT / "pipeline.json").write_text(
        json.dumps(config, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"fixture written to {OUT}")


if __name__ == "__main__":
    main()
