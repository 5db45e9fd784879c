"""Questionnaire generation, answer extraction, and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .aspects import (
    AlignmentResult,
    AspectStats,
    SentimentLexicon,
    entropy_frequent,
    entropy_popular,
    top_frequent,
)
from .corpus import ReviewDocument
from .polarity import PolarityCounts
from .topics import CandidateAspect

OVERALL = "overall"
PRODUCT = "product"
BRAND = "brand"
FREQUENT_ASPECT = "frequent_aspect"
POPULAR_ASPECT = "popular_aspect"
LEVELS = (OVERALL, PRODUCT, BRAND, FREQUENT_ASPECT, POPULAR_ASPECT)

MICRO = "micro"
MACRO = "macro"

PLACEHOLDER = "____"

DEFAULT_TEMPLATES = {
    OVERALL: "Do you like ____?",
    PRODUCT: "Do you like ____?",
    BRAND: "Which brand of ____ do you prefer?",
    FREQUENT_ASPECT: "What aspects of ____ do you care about?",
    POPULAR_ASPECT: "What aspects of ____ are you satisfied with?",
}


@dataclass(frozen=True)
class Brand:
    id: str
    display: str


@dataclass(frozen=True)
class Category:
    id: str
    display: str
    brands: tuple[Brand, ...]


@dataclass(frozen=True)
class ProductTaxonomy:
    overall_label: str
    categories: tuple[Category, ...]


def load_taxonomy(path: str | Path) -> ProductTaxonomy:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    categories = tuple(
        Category(
            id=str(c["id"]),
            display=str(c["display"]),
            brands=tuple(
                Brand(id=str(b["id"]), display=str(b["display"]))
                for b in c.get("brands", [])
            ),
        )
        for c in data["categories"]
    )
    return ProductTaxonomy(
        overall_label=str(data["overall_label"]), categories=categories
    )


def load_templates(path: str | Path) -> dict[str, str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    templates = dict(DEFAULT_TEMPLATES)
    for level, template in data.items():
        if level not in LEVELS:
            raise ValueError(f"unknown template level {level!r}")
        templates[level] = str(template)
    return templates


def _check_template(template: str) -> None:
    if template.count(PLACEHOLDER) != 1:
        raise ValueError(f"template must contain exactly one {PLACEHOLDER!r} blank")


def format_options(options: Sequence[str]) -> str:
    return " ".join(f"{chr(ord('A') + i)}. {opt}" for i, opt in enumerate(options))


def fill_template(template: str, subject: str, options: Sequence[str] = ()) -> str:
    _check_template(template)
    text = template.replace(PLACEHOLDER, subject)
    if options:
        text += " " + format_options(options)
    return text


def parse_template(template: str, text: str, options: Sequence[str] = ()) -> str:
    """Recover the slot value from a filled question text."""
    _check_template(template)
    if options:
        suffix = " " + format_options(options)
        if not text.endswith(suffix):
            raise ValueError("question text does not carry its options")
        text = text[: -len(suffix)]
    before, after = template.split(PLACEHOLDER)
    if not (text.startswith(before) and text.endswith(after)):
        raise ValueError("question text does not match its template")
    return text[len(before) : len(text) - len(after)]


@dataclass(frozen=True)
class Question:
    level: str
    text: str
    slots: Mapping[str, str]
    options: tuple[str, ...] = ()


def _make_question(
    level: str, templates: Mapping[str, str], subject: str, options: Sequence[str] = ()
) -> Question:
    return Question(
        level=level,
        text=fill_template(templates[level], subject, options),
        slots={"subject": subject},
        options=tuple(options),
    )


def generate_questions(
    tax: ProductTaxonomy, templates: Optional[Mapping[str, str]] = None
) -> list[Question]:
    """One overall question, then per category: product, brand (when the
    category has >= 2 brands), and the frequent/popular aspect pair."""
    if not tax.categories:
        raise ValueError("taxonomy has no categories")
    tpl = dict(DEFAULT_TEMPLATES)
    if templates:
        tpl.update(templates)
    questions = [_make_question(OVERALL, tpl, tax.overall_label)]
    for category in tax.categories:
        questions.append(_make_question(PRODUCT, tpl, category.display))
        if len(category.brands) >= 2:
            questions.append(
                _make_question(
                    BRAND, tpl, category.display, [b.display for b in category.brands]
                )
            )
        questions.append(_make_question(FREQUENT_ASPECT, tpl, category.display))
        questions.append(_make_question(POPULAR_ASPECT, tpl, category.display))
    return questions


@dataclass(frozen=True)
class Answer:
    question: Question
    payload: Optional[Mapping[str, object]]
    insufficient: Optional[str] = None


def os_value(counts: PolarityCounts) -> float:
    """Overall sentiment: fraction of positive reviews."""
    if counts.total == 0:
        raise ValueError("OS undefined for zero reviews")
    return counts.pos / counts.total


def answer_overall(
    question: Question,
    counts_by_category: Mapping[str, PolarityCounts],
    mode: str = MACRO,
) -> Answer:
    """Overall OS: macro = unweighted mean of per-category OS, micro = pooled.

    Both values are always reported; `mode` picks the headline one.
    """
    if mode not in (MICRO, MACRO):
        raise ValueError(f"unknown OS mode {mode!r}")
    if not counts_by_category:
        return Answer(question, None, insufficient="no predictions")
    for name, counts in counts_by_category.items():
        if counts.total == 0:
            return Answer(question, None, insufficient=f"no reviews for {name!r}")
    per_category = {
        name: {"os": os_value(c), "pos": c.pos, "neg": c.neg}
        for name, c in sorted(counts_by_category.items())
    }
    pos = sum(c.pos for c in counts_by_category.values())
    neg = sum(c.neg for c in counts_by_category.values())
    micro = pos / (pos + neg)
    macro = sum(row["os"] for row in per_category.values()) / len(per_category)
    return Answer(
        question,
        {
            "mode": mode,
            "os": macro if mode == MACRO else micro,
            "os_micro": micro,
            "os_macro": macro,
            "pos": pos,
            "neg": neg,
            "per_category": per_category,
        },
    )


def answer_product(question: Question, counts: PolarityCounts) -> Answer:
    if counts.total == 0:
        return Answer(question, None, insufficient="no reviews")
    return Answer(
        question, {"os": os_value(counts), "pos": counts.pos, "neg": counts.neg}
    )


def answer_brand(
    question: Question, counts_by_brand: Mapping[str, PolarityCounts]
) -> Answer:
    """Pick the brand with the strictly higher OS; ties go to the later option."""
    per_brand = {}
    for brand in question.options:
        counts = counts_by_brand.get(brand)
        if counts is None or counts.total == 0:
            return Answer(question, None, insufficient=f"no reviews for {brand!r}")
        per_brand[brand] = {"os": os_value(counts), "pos": counts.pos, "neg": counts.neg}
    choice = question.options[0]
    for brand in question.options[1:]:
        if not per_brand[choice]["os"] > per_brand[brand]["os"]:
            choice = brand
    return Answer(question, {"choice": choice, "per_brand": per_brand})


def _aspect_row(stats: AspectStats) -> dict:
    return {
        "aspect": stats.aspect,
        "fa": stats.fa,
        "pos": stats.pos,
        "neg": stats.neg,
        "pa": stats.pa,
        "zero_signal": stats.zero_signal,
    }


def answer_decision_factors(
    frequent_question: Question,
    popular_question: Question,
    candidates: Sequence[CandidateAspect],
    docs: Sequence[ReviewDocument],
    lex: SentimentLexicon,
    n: int = 10,
    aliases: Optional[Mapping[str, Sequence[str]]] = None,
) -> tuple[Answer, Answer]:
    """Frequent ranking by FA plus the same aspect set re-ranked by PA.

    Aspects whose PA is 0 cannot enter the popular entropy (log of 0); they
    stay in the ranking and are counted in `zero_pa_excluded`.
    """
    ranked, shortfall = top_frequent(candidates, docs, lex, n=n, aliases=aliases)
    if not ranked:
        reason = "no aspect mentions"
        return (
            Answer(frequent_question, None, insufficient=reason),
            Answer(popular_question, None, insufficient=reason),
        )
    fa_values = [s.fa for s in ranked]
    frequent = Answer(
        frequent_question,
        {
            "ranking": [_aspect_row(s) for s in ranked],
            "entropy": {
                "kind": "frequent",
                "values": fa_values,
                "entropy": entropy_frequent(fa_values),
            },
            "shortfall": shortfall,
        },
    )
    by_pa = sorted(ranked, key=lambda s: (-s.pa, s.aspect))
    positive_pas = [s.pa for s in by_pa if s.pa > 0]
    popular = Answer(
        popular_question,
        {
            "ranking": [_aspect_row(s) for s in by_pa],
            "entropy": {
                "kind": "popular",
                "values": positive_pas,
                "entropy": entropy_popular(positive_pas) if positive_pas else None,
            },
            "zero_pa_excluded": len(by_pa) - len(positive_pas),
            "shortfall": shortfall,
        },
    )
    return frequent, popular


def answer_to_dict(answer: Answer) -> dict:
    return {
        "level": answer.question.level,
        "question": answer.question.text,
        "slots": dict(answer.question.slots),
        "options": list(answer.question.options),
        "payload": None if answer.payload is None else dict(answer.payload),
        "insufficient": answer.insufficient,
    }


def _alignment_to_dict(result: AlignmentResult) -> dict:
    return {
        "pairs": [
            {
                "source_aspect": a.aspect,
                "target_aspect": b.aspect,
                "source_pa": a.pa,
                "target_pa": b.pa,
                "source_fa": a.fa,
                "target_fa": b.fa,
            }
            for a, b in result.pairs
        ],
        "unmatched_source": [s.aspect for s in result.unmatched_source],
        "unmatched_target": [s.aspect for s in result.unmatched_target],
    }


def build_report(
    answers_by_corpus: Mapping[str, Sequence[Answer]],
    alignments: Mapping[str, AlignmentResult],
    metadata: Mapping[str, object],
) -> dict:
    """Assemble the machine-readable report from per-corpus answers.

    Every OS value sits next to the counts it was computed from, so the
    report is self-auditing.
    """
    overall_rows = []
    product_rows = []
    brand_rows = []
    aspect_rows = []
    entropy_rows = []
    answer_dicts = []
    for corpus in sorted(answers_by_corpus):
        pending_entropy: dict[str, dict] = {}
        for answer in answers_by_corpus[corpus]:
            record = dict(answer_to_dict(answer), corpus=corpus)
            answer_dicts.append(record)
            level = answer.question.level
            subject = answer.question.slots["subject"]
            if answer.payload is None:
                row = {"corpus": corpus, "insufficient": answer.insufficient}
                if level == OVERALL:
                    overall_rows.append(row)
                elif level == PRODUCT:
                    product_rows.append(dict(row, category=subject))
                elif level == BRAND:
                    brand_rows.append(dict(row, category=subject))
                else:
                    kind = "frequent" if level == FREQUENT_ASPECT else "popular"
                    aspect_rows.append(dict(row, category=subject, kind=kind))
                continue
            payload = answer.payload
            if level == OVERALL:
                overall_rows.append(
                    {
                        "corpus": corpus,
                        "mode": payload["mode"],
                        "os": payload["os"],
                        "os_micro": payload["os_micro"],
                        "os_macro": payload["os_macro"],
                        "pos": payload["pos"],
                        "neg": payload["neg"],
                        "per_category": payload["per_category"],
                    }
                )
            elif level == PRODUCT:
                product_rows.append(
                    {
                        "corpus": corpus,
                        "category": subject,
                        "os": payload["os"],
                        "pos": payload["pos"],
                        "neg": payload["neg"],
                    }
                )
            elif level == BRAND:
                brand_rows.append(
                    {
                        "corpus": corpus,
                        "category": subject,
                        "choice": payload["choice"],
                        "brands": [
                            dict(stats, brand=brand)
                            for brand, stats in payload["per_brand"].items()
                        ],
                    }
                )
            elif level in (FREQUENT_ASPECT, POPULAR_ASPECT):
                kind = "frequent" if level == FREQUENT_ASPECT else "popular"
                aspect_rows.append(
                    {
                        "corpus": corpus,
                        "category": subject,
                        "kind": kind,
                        "ranking": payload["ranking"],
                        "shortfall": payload["shortfall"],
                    }
                )
                slot = pending_entropy.setdefault(
                    subject, {"corpus": corpus, "category": subject}
                )
                slot[f"{kind}_entropy"] = payload["entropy"]["entropy"]
                slot[f"{kind}_values"] = payload["entropy"]["values"]
        entropy_rows.extend(pending_entropy[c] for c in sorted(pending_entropy))
    alignment_rows = [
        dict(_alignment_to_dict(alignments[category]), category=category)
        for category in sorted(alignments)
    ]
    return {
        "metadata": dict(metadata),
        "sections": {
            "overall_sentiment": {"overall": overall_rows, "products": product_rows},
            "brand_preference": brand_rows,
            "top_aspects": aspect_rows,
            "entropy": entropy_rows,
            "aspect_alignment": alignment_rows,
        },
        "answers": answer_dicts,
    }


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _md_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> list[str]:
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join("---" for _ in headers) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(cell) for cell in row) + " |")
    return lines


def render_markdown(report: dict) -> str:
    """Human-readable tables mirroring the JSON report sections."""
    sections = report["sections"]
    lines = ["# Survey report", ""]
    meta = report["metadata"]
    lines += [f"- corpora: {', '.join(meta.get('corpus_tags', []))}"]
    lines += [f"- seed: {meta.get('seed')}"]
    lines += [f"- config hash: {meta.get('config_hash')}", ""]

    lines += ["## Overall sentiment", ""]
    rows = []
    for r in sections["overall_sentiment"]["overall"]:
        if "insufficient" in r:
            rows.append([r["corpus"], "-", "-", "-", r["insufficient"]])
        else:
            rows.append([r["corpus"], r["pos"], r["neg"], r["os"], r["mode"]])
    lines += _md_table(["corpus", "pos", "neg", "OS", "mode"], rows) + [""]

    lines += ["## Product sentiment", ""]
    rows = []
    for r in sections["overall_sentiment"]["products"]:
        if "insufficient" in r:
            rows.append([r["corpus"], r["category"], "-", "-", r["insufficient"]])
        else:
            rows.append([r["corpus"], r["category"], r["pos"], r["neg"], r["os"]])
    lines += _md_table(["corpus", "category", "pos", "neg", "OS"], rows) + [""]

    lines += ["## Brand preference", ""]
    rows = []
    for r in sections["brand_preference"]:
        if "insufficient" in r:
            rows.append([r["corpus"], r["category"], "-", "-", r["insufficient"]])
        else:
            detail = "; ".join(
                f"{b['brand']}: {b['os']:.4f} ({b['pos']}/{b['pos'] + b['neg']})"
                for b in r["brands"]
            )
            rows.append([r["corpus"], r["category"], r["choice"], detail, ""])
    lines += _md_table(["corpus", "category", "preferred", "per-brand OS", "note"], rows)
    lines += [""]

    lines += ["## Top aspects", ""]
    for r in sections["top_aspects"]:
        if "insufficient" in r:
            lines += [
                f"### {r['corpus']} / {r['category']} ({r['kind']})",
                "",
                f"insufficient data: {r['insufficient']}",
                "",
            ]
            continue
        lines += [f"### {r['corpus']} / {r['category']} ({r['kind']})", ""]
        value_key = "fa" if r["kind"] == "frequent" else "pa"
        rows = [
            [row["aspect"], row[value_key], row["pos"], row["neg"]]
            for row in r["ranking"]
        ]
        lines += _md_table(["aspect", value_key.upper(), "pos", "neg"], rows) + [""]

    lines += ["## Entropy", ""]
    rows = [
        [r["corpus"], r["category"], r.get("frequent_entropy"), r.get("popular_entropy")]
        for r in sections["entropy"]
    ]
    lines += _md_table(["corpus", "category", "E_frequent", "E_popular"], rows) + [""]

    lines += ["## Aspect alignment", ""]
    for r in sections["aspect_alignment"]:
        lines += [f"### {r['category']}", ""]
        rows = [
            [p["source_aspect"], p["target_aspect"], p["source_pa"], p["target_pa"]]
            for p in r["pairs"]
        ]
        lines += _md_table(
            ["source aspect", "target aspect", "source PA", "target PA"], rows
        )
        lines += [
            f"- unmatched source: {', '.join(r['unmatched_source']) or '-'}",
            f"- unmatched target: {', '.join(r['unmatched_target']) or '-'}",
            "",
        ]
    return "\n".join(lines) + "\n"


def render_report(
    answers_by_corpus: Mapping[str, Sequence[Answer]],
    alignments: Mapping[str, AlignmentResult],
    metadata: Mapping[str, object],
    out_dir: str | Path,
) -> tuple[Path, Path]:
    """Write report.json and report.md; byte-stable for identical inputs."""
    report = build_report(answers_by_corpus, alignments, metadata)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    md_path = out / "report.md"
    json_path.write_text(
        json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    md_path.write_text(render_markdown(report), encoding="utf-8")
    return json_path, md_path
