import math
import random

import pytest
from hypothesis import given, strategies as st

from memepipe.evaluation import (
    EmptyReferenceSet,
    EmptySlice,
    GoldRecord,
    HashNgramEmbedder,
    LengthMismatch,
    MissingTask,
    PredictionRecord,
    binary_metrics,
    bert_score,
    bleu,
    evaluate,
    load_predictions,
    multilabel_metrics,
    overall_score,
    rationale_metrics,
    rouge_l,
    tokenize,
)
from memepipe.records import CATEGORY_UNIVERSE


class TestBinaryMetrics:
    def test_perfect(self):
        m = binary_metrics(["hate", "normal"], ["hate", "normal"])
        assert (m.accuracy, m.precision, m.recall, m.f1) == (100.0, 100.0, 100.0, 100.0)

    def test_confusion_counts(self):
        preds = ["hate", "hate", "normal", "normal"]
        golds = ["hate", "normal", "hate", "normal"]
        m = binary_metrics(preds, golds)
        assert (m.tp, m.fp, m.fn, m.tn) == (1, 1, 1, 1)
        assert m.accuracy == 50.0

    def test_zero_division_convention(self):
        m = binary_metrics(["normal", "normal"], ["normal", "normal"])
        assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
        assert m.accuracy == 100.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            binary_metrics(["hate"], ["hate", "normal"])
        with pytest.raises(LengthMismatch):
            binary_metrics([], [])


class TestMultiLabelMetrics:
    def test_perfect(self):
        sets = [["race"], ["politics", "violence"]]
        m = multilabel_metrics(sets, sets)
        assert m.hamming_loss == 0.0
        assert m.subset_accuracy == 100.0
        # Six categories never appear; they drag the macro averages down.
        assert m.macro_f1 == pytest.approx(100.0 * 3 / 8)

    def test_skip_absent(self):
        sets = [["race"], ["politics", "violence"]]
        m = multilabel_metrics(sets, sets, skip_absent=True)
        assert m.macro_f1 == 100.0

    def test_hamming_single_difference(self):
        m = multilabel_metrics([["race"]], [["race", "violence"]])
        assert m.hamming_loss == pytest.approx(100.0 / 8)
        assert m.subset_accuracy == 0.0

    def test_empty_prediction_sets_allowed(self):
        m = multilabel_metrics([[]], [["race"]])
        assert m.hamming_loss == pytest.approx(100.0 / 8)


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("Mock a Group, incite Violence!") == \
            ["mock", "a", "group", "incite", "violence"]

    def test_empty(self):
        assert tokenize("...!?") == []


class TestBleu:
    def test_identical_is_100(self):
        s = "mock a political group and incite violence"
        assert bleu(s, [s]) == pytest.approx(100.0)

    def test_zero_unigram_overlap_is_exact_zero(self):
        assert bleu("completely different words", ["nothing shared here"]) == 0.0

    def test_empty_candidate_zero(self):
        assert bleu("", ["a reference"]) == 0.0

    def test_no_references_rejected(self):
        with pytest.raises(EmptyReferenceSet):
            bleu("anything", [])

    def test_partial_overlap_strictly_between(self):
        score = bleu("mock a group", ["mock a group of people loudly"])
        assert 0.0 < score < 100.0

    def test_brevity_penalty_applies(self):
        short = bleu("mock a", ["mock a political group now"])
        assert short < bleu("mock a political group now", ["mock a political group now"])


class TestRougeL:
    def test_identical(self):
        assert rouge_l("mock a group", "mock a group") == pytest.approx(100.0)

    def test_disjoint_zero(self):
        assert rouge_l("alpha beta", "gamma delta") == 0.0

    def test_empty_sides_zero(self):
        assert rouge_l("", "ref") == 0.0
        assert rouge_l("cand", "") == 0.0

    def test_subsequence_not_substring(self):
        # "a c" is a subsequence of "a b c" even though not contiguous.
        score = rouge_l("a c", "a b c")
        assert score == pytest.approx(100.0 * 2 * 1.0 * (2 / 3) / (1.0 + 2 / 3))


class TestBertScore:
    def test_self_match(self):
        emb = HashNgramEmbedder()
        assert bert_score("mock a group", "mock a group", emb) == pytest.approx(100.0)

    def test_both_empty_token_lists(self):
        emb = HashNgramEmbedder()
        assert bert_score("...", "!!!", emb) == 100.0

    def test_one_empty_zero(self):
        emb = HashNgramEmbedder()
        assert bert_score("words here", "...", emb) == 0.0

    def test_range(self):
        emb = HashNgramEmbedder()
        score = bert_score("mock a group", "insult a community", emb)
        assert 0.0 <= score <= 100.0

    def test_embedder_deterministic_nonzero(self):
        emb = HashNgramEmbedder()
        v1, v2 = emb.embed("token"), emb.embed("token")
        assert (v1 == v2).all()
        assert v1.sum() > 0


class TestOverallScore:
    def _parts(self):
        b = binary_metrics(["hate", "normal"], ["hate", "normal"])
        m = multilabel_metrics([["race"]], [["race"]])
        r = rationale_metrics(["mock a group"], ["mock a group"])
        return b, m, r

    def test_within_bounds(self):
        b, m, r = self._parts()
        assert 0.0 <= overall_score(b, m, r) <= 100.0

    def test_weights_shift_composite(self):
        b, m, r = self._parts()
        binary_only = overall_score(b, m, r, weights=(1.0, 0.0, 0.0))
        assert binary_only == pytest.approx(100.0)

    def test_missing_task_rejected(self):
        b, m, _ = self._parts()
        with pytest.raises(MissingTask):
            overall_score(b, m, None)

    @given(st.floats(0, 100), st.floats(0, 100))
    def test_monotone_in_binary_accuracy(self, lo, hi):
        from memepipe.evaluation import BinaryMetrics, MultiLabelMetrics, RationaleMetrics

        lo, hi = sorted((lo, hi))
        m = MultiLabelMetrics(50, 50, 50, 10, 40)
        r = RationaleMetrics(5, 10, 90)
        low = overall_score(BinaryMetrics(lo, 50, 50, 50), m, r)
        high = overall_score(BinaryMetrics(hi, 50, 50, 50), m, r)
        assert low <= high + 1e-9


class TestEvaluate:
    def _golds(self):
        return [
            GoldRecord("a", "x", "hate", ("race",), ("mock a group",)),
            GoldRecord("b", "x", "normal"),
            GoldRecord("c", "weibo", "hate", ("politics", "violence"),
                       ("incite violence",)),
        ]

    def _preds(self):
        return [
            PredictionRecord("a", "hate", ("race",), "mock a group"),
            PredictionRecord("b", "normal"),
            PredictionRecord("c", "normal", (), ""),
        ]

    def test_full_report(self):
        report = evaluate(self._golds(), self._preds())
        assert report.n_records == 3
        assert report.binary.accuracy == pytest.approx(100.0 * 2 / 3)
        assert 0.0 <= report.overall <= 100.0

    def test_platform_slice(self):
        report = evaluate(self._golds(), self._preds(), platform="weibo")
        assert report.n_records == 1
        assert report.slice_platform == "weibo"

    def test_unknown_slice_rejected(self):
        with pytest.raises(EmptySlice):
            evaluate(self._golds(), self._preds(), platform="mastodon")

    def test_missing_prediction_rejected(self):
        with pytest.raises(LengthMismatch):
            evaluate(self._golds(), self._preds()[:2])

    def test_multilabel_population_is_gold_hate(self):
        # The normal record's empty category set must not inflate subset
        # accuracy when the population is gold-hate.
        report = evaluate(self._golds(), self._preds())
        assert report.multilabel.subset_accuracy == pytest.approx(50.0)


class TestLoadPredictions:
    def test_json_list(self, tmp_path):
        p = tmp_path / "preds.json"
        p.write_text('[{"img_id": "a", "label": "Hate"}]')
        preds = load_predictions(p)
        assert preds[0].label == "hate"

    def test_jsonl(self, tmp_path):
        p = tmp_path / "preds.jsonl"
        p.write_text('{"img_id": "a", "label": "hate"}\n{"img_id": "b", "label": "normal"}\n')
        assert len(load_predictions(p)) == 2
