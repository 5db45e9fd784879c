import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reviewminer.corpus import (
    LabeledCorpus,
    TokenizerConfig,
    kfold_split,
    load_reviews,
    tokenize,
)
from helpers import make_doc


def write_jsonl(path, records):
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )


def record(i, text, polarity=None):
    rec = {
        "id": f"r{i}",
        "text": text,
        "category": "cam",
        "brand": "b1",
        "corpus_tag": "en",
    }
    if polarity:
        rec["polarity"] = polarity
    return rec


class TestTokenize:
    def test_unicode_word_split(self):
        cfg = TokenizerConfig()
        assert tokenize("Battery life is very disappointing.", cfg) == [
            "battery",
            "life",
            "is",
            "very",
            "disappointing",
        ]

    def test_empty_text(self):
        assert tokenize("", TokenizerConfig()) == []
        assert tokenize("  ...  ", TokenizerConfig()) == []

    def test_lowercase_off(self):
        cfg = TokenizerConfig(lowercase=False)
        assert tokenize("Great Screen", cfg) == ["Great", "Screen"]

    def test_han_greedy_longest_match(self):
        cfg = TokenizerConfig(
            mode="lexicon_max_match", lexicon=frozenset({"正品", "质量", "好"})
        )
        assert tokenize("正品质量好", cfg) == ["正品", "质量", "好"]

    def test_han_single_char_fallback(self):
        cfg = TokenizerConfig(mode="lexicon_max_match", lexicon=frozenset({"质量"}))
        assert tokenize("很质量好", cfg) == ["很", "质量", "好"]

    def test_longest_match_wins(self):
        cfg = TokenizerConfig(
            mode="lexicon_max_match", lexicon=frozenset({"数码", "数码相机", "相机"})
        )
        assert tokenize("数码相机", cfg) == ["数码相机"]

    def test_mixed_scripts_in_lexicon_mode(self):
        cfg = TokenizerConfig(mode="lexicon_max_match", lexicon=frozenset({"相机"}))
        assert tokenize("Canon相机很好", cfg) == ["canon", "相机", "很", "好"]

    def test_lexicon_mode_requires_lexicon(self):
        with pytest.raises(ValueError):
            TokenizerConfig(mode="lexicon_max_match")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            TokenizerConfig(mode="sentencepiece")

    def test_lexicon_loaded_from_file(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("正品\n质量\n", encoding="utf-8")
        cfg = TokenizerConfig(mode="lexicon_max_match", lexicon_path=str(path))
        assert tokenize("正品质量", cfg) == ["正品", "质量"]

    def test_empty_lexicon_file(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("\n\n", encoding="utf-8")
        with pytest.raises(ValueError):
            TokenizerConfig(mode="lexicon_max_match", lexicon_path=str(path))

    @given(st.text(max_size=80))
    def test_idempotent_on_rejoined_output(self, text):
        cfg = TokenizerConfig()
        tokens = tokenize(text, cfg)
        assert tokenize(" ".join(tokens), cfg) == tokens

    def test_idempotent_when_lowercasing_expands_characters(self):
        # 'İ'.lower() is 'i' plus a combining mark, which is not a word char
        cfg = TokenizerConfig()
        tokens = tokenize("İstanbul İ", cfg)
        assert tokenize(" ".join(tokens), cfg) == tokens

    @given(st.text(max_size=80))
    def test_deterministic(self, text):
        cfg = TokenizerConfig()
        assert tokenize(text, cfg) == tokenize(text, cfg)


class TestLoadReviews:
    def test_drops_empty_text(self, tmp_path):
        path = tmp_path / "r.jsonl"
        write_jsonl(
            path,
            [record(0, "good screen"), record(1, "   "), record(2, "bad"), record(3, "ok")],
        )
        result = load_reviews(path)
        assert len(result.documents) == 3
        assert result.dropped == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text("", encoding="utf-8")
        result = load_reviews(path)
        assert result.documents == ()
        assert result.dropped == 0

    def test_malformed_record_reports_line(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text(
            json.dumps(record(0, "fine")) + "\n{not json\n", encoding="utf-8"
        )
        with pytest.raises(ValueError, match=":2:"):
            load_reviews(path)

    def test_missing_field_reports_line(self, tmp_path):
        path = tmp_path / "r.jsonl"
        bad = {"id": "x", "text": "hi"}
        write_jsonl(path, [bad])
        with pytest.raises(ValueError, match="missing fields"):
            load_reviews(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "r.jsonl"
        write_jsonl(path, [record(0, "a b"), record(0, "c d")])
        with pytest.raises(ValueError, match="duplicate id"):
            load_reviews(path)

    def test_bad_polarity(self, tmp_path):
        path = tmp_path / "r.jsonl"
        write_jsonl(path, [record(0, "a b", polarity="mixed")])
        with pytest.raises(ValueError, match="bad polarity"):
            load_reviews(path)

    def test_unknown_schema(self, tmp_path):
        path = tmp_path / "r.jsonl"
        write_jsonl(path, [record(0, "a")])
        with pytest.raises(ValueError, match="unknown schema"):
            load_reviews(path, schema="csv")

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            load_reviews(tmp_path / "missing.jsonl")

    def test_mini_fixture_loads_60_documents(self, mini_dir):
        en = load_reviews(mini_dir / "reviews_en.jsonl")
        zh = load_reviews(
            mini_dir / "reviews_zh.jsonl",
            tokenizer=TokenizerConfig(
                mode="lexicon_max_match", lexicon_path=str(mini_dir / "seg_zh.txt")
            ),
        )
        docs = en.documents + zh.documents
        assert len(docs) == 60
        assert en.dropped == 0 and zh.dropped == 0
        assert all(d.category and d.brand and d.corpus_tag for d in docs)
        assert all(d.tokens for d in docs)


def labeled_corpus(n_pos, n_neg):
    docs = [
        make_doc(["w"], id=f"p{i}", polarity="positive") for i in range(n_pos)
    ] + [make_doc(["w"], id=f"n{i}", polarity="negative") for i in range(n_neg)]
    return LabeledCorpus.from_documents(docs)


class TestKfold:
    def test_even_split(self):
        corpus = labeled_corpus(10, 10)
        assignment = kfold_split(corpus, k=5, seed=1)
        for fold in range(5):
            ids = [i for i, f in assignment.items() if f == fold]
            assert sum(1 for i in ids if i.startswith("p")) == 2
            assert sum(1 for i in ids if i.startswith("n")) == 2

    def test_deterministic(self):
        corpus = labeled_corpus(13, 7)
        assert kfold_split(corpus, 4, seed=9) == kfold_split(corpus, 4, seed=9)

    def test_partition(self):
        corpus = labeled_corpus(13, 7)
        assignment = kfold_split(corpus, 4, seed=9)
        assert sorted(assignment) == sorted(d.id for d in corpus.documents)
        assert set(assignment.values()) <= set(range(4))

    def test_imbalanced_2_to_1_fold_sizes(self):
        # 1200 positive / 600 negative split 5 ways -> 240 + 120 per fold
        corpus = labeled_corpus(1200, 600)
        assignment = kfold_split(corpus, 5, seed=3)
        for fold in range(5):
            ids = [i for i, f in assignment.items() if f == fold]
            assert sum(1 for i in ids if i.startswith("p")) == 240
            assert sum(1 for i in ids if i.startswith("n")) == 120

    def test_k_too_large(self):
        corpus = labeled_corpus(10, 3)
        with pytest.raises(ValueError, match="fewer than k"):
            kfold_split(corpus, 4, seed=0)

    def test_k_below_two(self):
        corpus = labeled_corpus(5, 5)
        with pytest.raises(ValueError):
            kfold_split(corpus, 1, seed=0)


class TestLabeledCorpus:
    def test_counts(self):
        corpus = labeled_corpus(3, 2)
        assert corpus.class_counts == {"positive": 3, "negative": 2}
        assert sum(corpus.class_counts.values()) == len(corpus.documents)

    def test_single_class_rejected(self):
        docs = [make_doc(["w"], id="a", polarity="positive")]
        with pytest.raises(ValueError):
            LabeledCorpus.from_documents(docs)

    def test_unlabeled_rejected(self):
        docs = [make_doc(["w"], id="a"), make_doc(["w"], id="b", polarity="negative")]
        with pytest.raises(ValueError):
            LabeledCorpus.from_documents(docs)
