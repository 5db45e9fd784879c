import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reviewminer.aspects import AlignmentResult, AspectStats
from reviewminer.polarity import PolarityCounts
from reviewminer.survey import (
    BRAND,
    DEFAULT_TEMPLATES,
    FREQUENT_ASPECT,
    MACRO,
    MICRO,
    OVERALL,
    POPULAR_ASPECT,
    PRODUCT,
    Answer,
    Brand,
    Category,
    ProductTaxonomy,
    Question,
    answer_brand,
    answer_decision_factors,
    answer_overall,
    answer_product,
    build_report,
    fill_template,
    generate_questions,
    load_taxonomy,
    load_templates,
    os_value,
    parse_template,
    render_markdown,
    render_report,
)
from reviewminer.topics import CandidateAspect
from helpers import make_doc


def taxonomy(n_categories=1, brands=("Cannon", "Nikon")):
    cats = tuple(
        Category(
            id=f"c{i}",
            display=f"category {i}" if n_categories > 1 else "digital cameras",
            brands=tuple(Brand(id=b.lower(), display=b) for b in brands),
        )
        for i in range(n_categories)
    )
    return ProductTaxonomy(overall_label="digital products", categories=cats)


class TestTemplates:
    def test_fill(self):
        assert fill_template("Do you like ____?", "digital cameras") == (
            "Do you like digital cameras?"
        )

    def test_fill_with_options(self):
        text = fill_template(
            "Which brand of ____ do you prefer?", "digital cameras", ["Cannon", "Nikon"]
        )
        assert text == "Which brand of digital cameras do you prefer? A. Cannon B. Nikon"

    def test_parse_round_trip(self):
        template = "What aspects of ____ do you care about?"
        text = fill_template(template, "smartphones")
        assert parse_template(template, text) == "smartphones"

    def test_parse_with_options_round_trip(self):
        template = "Which brand of ____ do you prefer?"
        options = ["Apple", "Samsung"]
        text = fill_template(template, "smartphones", options)
        assert parse_template(template, text, options) == "smartphones"

    def test_template_needs_exactly_one_blank(self):
        with pytest.raises(ValueError):
            fill_template("Do you like it?", "x")
        with pytest.raises(ValueError):
            fill_template("____ vs ____", "x")

    @given(st.text(alphabet="abc XYZ", min_size=1, max_size=20))
    def test_round_trip_any_subject(self, subject):
        for template in DEFAULT_TEMPLATES.values():
            assert parse_template(template, fill_template(template, subject)) == subject

    def test_load_templates_rejects_unknown_level(self, tmp_path):
        path = tmp_path / "templates.json"
        path.write_text(json.dumps({"weird": "x ____"}), encoding="utf-8")
        with pytest.raises(ValueError):
            load_templates(path)


class TestGenerateQuestions:
    def test_brand_question_text(self):
        questions = generate_questions(taxonomy())
        brand_q = [q for q in questions if q.level == BRAND][0]
        assert brand_q.text == (
            "Which brand of digital cameras do you prefer? A. Cannon B. Nikon"
        )

    def test_counting_rule(self):
        # 3 categories, all with 2 brands: 1 + 3 + 3 + 6 = 13
        questions = generate_questions(taxonomy(n_categories=3))
        assert len(questions) == 13

    def test_single_brand_category_skips_brand_question(self):
        questions = generate_questions(taxonomy(brands=("Solo",)))
        assert [q.level for q in questions] == [
            OVERALL,
            PRODUCT,
            FREQUENT_ASPECT,
            POPULAR_ASPECT,
        ]

    def test_empty_taxonomy(self):
        with pytest.raises(ValueError):
            generate_questions(ProductTaxonomy("x", ()))

    def test_all_questions_round_trip(self):
        questions = generate_questions(taxonomy(n_categories=3))
        for q in questions:
            recovered = parse_template(DEFAULT_TEMPLATES[q.level], q.text, q.options)
            assert recovered == q.slots["subject"]

    def test_load_taxonomy(self, mini_dir):
        tax = load_taxonomy(mini_dir / "taxonomy.json")
        assert tax.overall_label == "digital products"
        assert [c.id for c in tax.categories] == ["digital_camera", "smart_phone"]
        assert tax.categories[0].brands[0].display == "Cannon"


def q(level, subject="digital products", options=()):
    return Question(
        level=level,
        text=fill_template(DEFAULT_TEMPLATES[level], subject, options),
        slots={"subject": subject},
        options=tuple(options),
    )


class TestAnswerOverall:
    def test_micro_pooled_counts(self):
        answer = answer_overall(
            q(OVERALL), {"cam": PolarityCounts(8341, 1198)}, mode=MICRO
        )
        assert answer.payload["os"] == pytest.approx(0.8744, abs=5e-5)

    def test_macro_mean_of_category_os(self):
        counts = {
            "camera": PolarityCounts(9178, 822),
            "phone": PolarityCounts(8227, 1773),
            "tablet": PolarityCounts(9214, 786),
        }
        answer = answer_overall(q(OVERALL), counts, mode=MACRO)
        assert answer.payload["os"] == pytest.approx(0.8873, abs=1e-9)

    def test_zero_positive_boundary(self):
        answer = answer_overall(q(OVERALL), {"cam": PolarityCounts(0, 5)}, mode=MICRO)
        assert answer.payload["os"] == 0.0

    def test_empty_group_insufficient(self):
        answer = answer_overall(q(OVERALL), {}, mode=MACRO)
        assert answer.payload is None
        assert answer.insufficient

    def test_micro_is_count_weighted_mean(self):
        counts = {"a": PolarityCounts(3, 1), "b": PolarityCounts(10, 30)}
        answer = answer_overall(q(OVERALL), counts, mode=MICRO)
        weighted = (4 * (3 / 4) + 40 * (10 / 40)) / 44
        assert answer.payload["os_micro"] == pytest.approx(weighted, abs=1e-12)
        assert answer.payload["os_macro"] == pytest.approx(
            ((3 / 4) + (10 / 40)) / 2, abs=1e-12
        )

    def test_payload_self_auditing(self):
        counts = {"a": PolarityCounts(3, 1), "b": PolarityCounts(5, 5)}
        payload = answer_overall(q(OVERALL), counts).payload
        assert payload["os_micro"] == pytest.approx(
            payload["pos"] / (payload["pos"] + payload["neg"]), abs=1e-12
        )
        for row in payload["per_category"].values():
            assert row["os"] == pytest.approx(
                row["pos"] / (row["pos"] + row["neg"]), abs=1e-12
            )

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            answer_overall(q(OVERALL), {"a": PolarityCounts(1, 1)}, mode="median")


class TestAnswerProduct:
    def test_micro(self):
        answer = answer_product(q(PRODUCT, "cameras"), PolarityCounts(4054, 363))
        assert answer.payload["os"] == pytest.approx(0.9178, abs=5e-5)

    def test_zero_reviews(self):
        answer = answer_product(q(PRODUCT, "cameras"), PolarityCounts(0, 0))
        assert answer.insufficient


class TestAnswerBrand:
    def brand_q(self):
        return q(BRAND, "smartphones", options=("Apple", "Samsung"))

    def test_higher_os_wins(self):
        answer = answer_brand(
            self.brand_q(),
            {"Apple": PolarityCounts(6401, 3599), "Samsung": PolarityCounts(7548, 2452)},
        )
        assert answer.payload["choice"] == "Samsung"
        assert answer.payload["per_brand"]["Apple"]["os"] == pytest.approx(0.6401)

    def test_tie_goes_to_second_option(self):
        answer = answer_brand(
            self.brand_q(),
            {"Apple": PolarityCounts(3, 1), "Samsung": PolarityCounts(6, 2)},
        )
        assert answer.payload["choice"] == "Samsung"

    def test_scaling_invariance(self):
        base = answer_brand(
            self.brand_q(),
            {"Apple": PolarityCounts(3, 2), "Samsung": PolarityCounts(2, 3)},
        )
        scaled = answer_brand(
            self.brand_q(),
            {"Apple": PolarityCounts(30, 20), "Samsung": PolarityCounts(2, 3)},
        )
        assert base.payload["choice"] == scaled.payload["choice"] == "Apple"

    def test_zero_review_brand_insufficient(self):
        answer = answer_brand(
            self.brand_q(),
            {"Apple": PolarityCounts(3, 2), "Samsung": PolarityCounts(0, 0)},
        )
        assert answer.insufficient


LEX = {"great": 1, "awful": -1}

DOCS = [
    make_doc(["screen", "is", "great"], id="d0"),
    make_doc(["screen", "is", "great", "too"], id="d1"),
    make_doc(["awful", "screen"], id="d2"),
    make_doc(["lens", "is", "great"], id="d3"),
    make_doc(["battery", "is", "great"], id="d4"),
    make_doc(["battery", "is", "great", "really"], id="d5"),
    make_doc(["battery", "is", "awful"], id="d6"),
]


def cands(*terms):
    return [CandidateAspect(term=t, score=1.0) for t in terms]


class TestDecisionFactors:
    def questions(self):
        return q(FREQUENT_ASPECT, "cameras"), q(POPULAR_ASPECT, "cameras")

    def test_rankings_match_exhaustive_recount(self):
        fq, pq = self.questions()
        frequent, popular = answer_decision_factors(
            fq, pq, cands("screen", "lens", "battery"), DOCS, LEX, n=3
        )
        fa = {
            t: sum(1 for d in DOCS if t in d.tokens)
            for t in ("screen", "lens", "battery")
        }
        expected_order = sorted(fa, key=lambda t: (-fa[t], t))
        assert [r["aspect"] for r in frequent.payload["ranking"]] == expected_order
        pa = {r["aspect"]: r["pos"] / (r["pos"] + r["neg"]) for r in frequent.payload["ranking"]}
        expected_popular = sorted(pa, key=lambda t: (-pa[t], t))
        assert [r["aspect"] for r in popular.payload["ranking"]] == expected_popular

    def test_popular_uses_same_aspect_set(self):
        fq, pq = self.questions()
        frequent, popular = answer_decision_factors(
            fq, pq, cands("screen", "lens", "battery"), DOCS, LEX, n=2
        )
        assert {r["aspect"] for r in frequent.payload["ranking"]} == {
            r["aspect"] for r in popular.payload["ranking"]
        }

    def test_single_aspect_degenerate(self):
        fq, pq = self.questions()
        frequent, popular = answer_decision_factors(
            fq, pq, cands("lens"), DOCS, LEX, n=5
        )
        assert len(frequent.payload["ranking"]) == 1
        assert len(popular.payload["entropy"]["values"]) == 1
        assert frequent.payload["shortfall"] is True

    def test_no_mentions_insufficient(self):
        fq, pq = self.questions()
        frequent, popular = answer_decision_factors(
            fq, pq, cands("missing"), DOCS, LEX, n=3
        )
        assert frequent.insufficient and popular.insufficient

    def test_zero_pa_excluded_from_entropy(self):
        docs = [
            make_doc(["screen", "is", "great"], id="a"),
            make_doc(["awful", "lens"], id="b"),
        ]
        fq, pq = self.questions()
        _, popular = answer_decision_factors(
            fq, pq, cands("screen", "lens"), docs, LEX, n=2
        )
        assert popular.payload["zero_pa_excluded"] == 1
        assert popular.payload["entropy"]["values"] == [1.0]


def report_inputs():
    counts = {"digital cameras": PolarityCounts(12, 3)}
    answers = {
        "en": [
            answer_overall(q(OVERALL), counts),
            answer_product(q(PRODUCT, "digital cameras"), PolarityCounts(12, 3)),
            answer_brand(
                q(BRAND, "digital cameras", options=("Cannon", "Nikon")),
                {"Cannon": PolarityCounts(6, 1), "Nikon": PolarityCounts(6, 2)},
            ),
            *answer_decision_factors(
                q(FREQUENT_ASPECT, "digital cameras"),
                q(POPULAR_ASPECT, "digital cameras"),
                cands("screen", "lens", "battery"),
                DOCS,
                LEX,
                n=3,
            ),
        ]
    }
    stats = AspectStats("screen", ("screen",), pos=2, neg=1, zero_signal=0)
    stats_t = AspectStats("屏幕", ("屏幕",), pos=3, neg=1, zero_signal=0)
    alignments = {
        "digital cameras": AlignmentResult(
            pairs=((stats_t, stats),), unmatched_source=(), unmatched_target=()
        )
    }
    metadata = {"corpus_tags": ["en"], "config_hash": "h", "seed": 1}
    return answers, alignments, metadata


class TestReport:
    def test_contains_all_five_section_kinds(self):
        report = build_report(*report_inputs())
        assert set(report["sections"]) == {
            "overall_sentiment",
            "brand_preference",
            "top_aspects",
            "entropy",
            "aspect_alignment",
        }
        assert report["sections"]["overall_sentiment"]["overall"]
        assert report["sections"]["brand_preference"]
        assert report["sections"]["top_aspects"]
        assert report["sections"]["entropy"]
        assert report["sections"]["aspect_alignment"]

    def test_byte_stable(self, tmp_path):
        answers, alignments, metadata = report_inputs()
        p1, m1 = render_report(answers, alignments, metadata, tmp_path / "a")
        p2, m2 = render_report(answers, alignments, metadata, tmp_path / "b")
        assert p1.read_bytes() == p2.read_bytes()
        assert m1.read_bytes() == m2.read_bytes()

    def test_os_recomputable_from_adjacent_counts(self):
        report = build_report(*report_inputs())
        for row in report["sections"]["overall_sentiment"]["products"]:
            assert row["os"] == pytest.approx(
                row["pos"] / (row["pos"] + row["neg"]), abs=1e-12
            )
        for row in report["sections"]["brand_preference"]:
            for brand in row["brands"]:
                assert brand["os"] == pytest.approx(
                    brand["pos"] / (brand["pos"] + brand["neg"]), abs=1e-12
                )

    def test_insufficient_marker_propagates(self):
        answers, alignments, metadata = report_inputs()
        answers["en"].append(
            Answer(
                q(BRAND, "tablets", options=("A", "B")),
                None,
                insufficient="no reviews for 'A'",
            )
        )
        report = build_report(answers, alignments, metadata)
        flagged = [r for r in report["sections"]["brand_preference"] if "insufficient" in r]
        assert flagged and flagged[0]["insufficient"] == "no reviews for 'A'"

    def test_markdown_renders_all_sections(self):
        report = build_report(*report_inputs())
        md = render_markdown(report)
        for heading in (
            "## Overall sentiment",
            "## Product sentiment",
            "## Brand preference",
            "## Top aspects",
            "## Entropy",
            "## Aspect alignment",
        ):
            assert heading in md

    def test_every_question_answered_once(self):
        report = build_report(*report_inputs())
        questions = [a["question"] for a in report["answers"]]
        assert len(questions) == len(set(questions))
        for a in report["answers"]:
            assert (a["payload"] is None) != (a["insufficient"] is None)


class TestOsValue:
    def test_positive_fraction(self):
        assert os_value(PolarityCounts(8341, 1198)) == pytest.approx(0.8744, abs=5e-5)

    def test_zero_total(self):
        with pytest.raises(ValueError):
            os_value(PolarityCounts(0, 0))
