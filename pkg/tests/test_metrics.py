import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from tonolab.metrics import (
    TranscriptPair,
    cer,
    corpus_eval,
    delta_report,
    edit_distance,
    wer,
    words_from_chars,
)


def oracle_distance(a, b):
    """Plain recursive minimal edit distance; the slow reference."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        if a[i - 1] == b[j - 1]:
            return go(i - 1, j - 1)
        return 1 + min(go(i - 1, j - 1), go(i - 1, j), go(i, j - 1))

    return go(len(a), len(b))


class TestEditDistance:
    def test_identity(self):
        assert edit_distance("abc", "abc") == (0, 0, 0, 0)

    def test_single_substitution(self):
        assert edit_distance("abc", "abd") == (1, 1, 0, 0)

    def test_deletion_and_insertion(self):
        assert edit_distance("ab", "b") == (1, 0, 0, 1)
        assert edit_distance("b", "ab") == (1, 0, 1, 0)

    def test_tie_break_prefers_substitution(self):
        # "ab" -> "ba" could be del+ins; the substitution path is preferred
        assert edit_distance("ab", "ba") == (2, 2, 0, 0)

    def test_empty_sides(self):
        assert edit_distance("", "abc") == (3, 0, 3, 0)
        assert edit_distance("abc", "") == (3, 0, 0, 3)

    def test_exhaustive_pairs_match_oracle(self):
        alphabet = "ab"
        for la in range(0, 5):
            for lb in range(0, 5):
                for a in itertools.product(alphabet, repeat=la):
                    for b in itertools.product(alphabet, repeat=lb):
                        d, s, i, dl = edit_distance(a, b)
                        assert d == oracle_distance(a, b)
                        assert d == s + i + dl

    @given(
        st.text(alphabet="abc", max_size=12),
        st.text(alphabet="abc", max_size=12),
        st.text(alphabet="abc", max_size=12),
    )
    @settings(max_examples=300)
    def test_metric_axioms(self, a, b, c):
        dab = edit_distance(a, b)[0]
        assert dab == edit_distance(b, a)[0]
        assert (dab == 0) == (a == b)
        assert edit_distance(a, c)[0] <= dab + edit_distance(b, c)[0]


class TestRates:
    def test_cer_one_sub_over_three(self):
        pair = TranscriptPair("u", list("abc"), list("abd"))
        assert cer(pair) == pytest.approx(1 / 3)

    def test_cer_zero_for_equal(self):
        pair = TranscriptPair("u", list("abc"), list("abc"))
        assert cer(pair) == 0.0

    def test_cer_counts_delimiter_tokens(self):
        # space token substituted: many toolkits would skip it, this one scores it
        pair = TranscriptPair("u", list("a b"), list("axb"))
        assert cer(pair) == pytest.approx(1 / 3)

    def test_cer_can_exceed_one(self):
        pair = TranscriptPair("u", list("a"), list("xyz"))
        assert cer(pair) > 1.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            cer(TranscriptPair("u", [], list("a")))

    def test_wer_identity(self):
        pair = TranscriptPair("u", "bod skad".split(), "bod skad".split())
        assert wer(pair) == 0.0

    def test_wer_one_deletion_over_two(self):
        pair = TranscriptPair("u", "bod skad".split(), ["bod"])
        assert wer(pair) == 0.5

    def test_empty_hypothesis_scores_all_deletions(self):
        pair = TranscriptPair("u", list("abcd"), [])
        assert cer(pair) == 1.0

    def test_random_pairs_match_oracle(self):
        rng = random.Random(1234)
        for _ in range(400):
            a = "".join(rng.choice("abcd") for _ in range(rng.randint(1, 8)))
            b = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 8)))
            pair = TranscriptPair("u", list(a), list(b))
            assert cer(pair) == pytest.approx(oracle_distance(a, b) / len(a))

    def test_words_from_chars(self):
        assert words_from_chars(list(" bod  ja ")) == ("bod", "ja")
        assert words_from_chars(list("bod")) == ("bod",)
        assert words_from_chars([" ", " "]) == ()


class TestCorpusEval:
    def test_micro_average(self):
        pairs = [
            TranscriptPair("a", list("aaaaaaaaab"), list("aaaaaaaaaa")),
            TranscriptPair("b", list("aaaaaaabbb"), list("aaaaaaaaaa")),
        ]
        report = corpus_eval(pairs, {"a": "G", "b": "G"})
        assert report.groups["G"].cer == pytest.approx((1 + 3) / 20)

    def test_perfect_single_utterance(self):
        pairs = [TranscriptPair("a", list("bod skad"), list("bod skad"))]
        report = corpus_eval(pairs, {"a": "G"})
        assert report.groups["G"].cer == 0.0
        assert report.groups["G"].wer == 0.0

    def test_order_invariance(self):
        pairs = [
            TranscriptPair("a", list("abcd"), list("abcx")),
            TranscriptPair("b", list("wxyz"), list("wxyz")),
            TranscriptPair("c", list("pq r"), list("pqr")),
        ]
        grouping = {"a": "G1", "b": "G1", "c": "G2"}
        fwd = corpus_eval(pairs, grouping)
        rev = corpus_eval(list(reversed(pairs)), grouping)
        assert fwd.rates() == rev.rates()
        assert fwd.overall.cer == rev.overall.cer

    def test_duplicating_pairs_keeps_ratios(self):
        pairs = [
            TranscriptPair("a", list("abcd"), list("abcx")),
            TranscriptPair("b", list("efgh"), list("eggh")),
        ]
        grouping = lambda _: "G"
        once = corpus_eval(pairs, grouping)
        twice = corpus_eval(
            pairs + [TranscriptPair(p.id + "2", p.reference, p.hypothesis) for p in pairs],
            grouping,
        )
        assert once.groups["G"].cer == pytest.approx(twice.groups["G"].cer)
        assert once.groups["G"].wer == pytest.approx(twice.groups["G"].wer)

    def test_quarantine_empty_reference(self):
        pairs = [
            TranscriptPair("ok", list("ab"), list("ab")),
            TranscriptPair("empty", [], list("ab")),
        ]
        report = corpus_eval(pairs, lambda _: "G")
        assert report.quarantined == ["empty"]
        assert report.groups["G"].utterance_ids == ["ok"]

    def test_all_quarantined_rejected(self):
        with pytest.raises(ValueError):
            corpus_eval([TranscriptPair("e", [], list("a"))], lambda _: "G")

    def test_sid_counts_recoverable(self):
        pairs = [TranscriptPair("a", list("abc"), list("axcd"))]
        report = corpus_eval(pairs, {"a": "G"})
        chars = report.groups["G"].chars
        assert chars.distance == chars.substitutions + chars.insertions + chars.deletions
        assert report.groups["G"].cer == pytest.approx(chars.distance / chars.reference_tokens)


# Per-group (original, flattened) CER/WER fixtures and their expected deltas.
DELTA_FIXTURES = {
    "Xiahe": ((0.114, 0.320), (0.139, 0.378), (0.025, 0.058)),
    "Aba": ((0.182, 0.525), (0.202, 0.563), (0.020, 0.038)),
    "Lhasa": ((0.177, 0.486), (0.237, 0.593), (0.060, 0.107)),
    "Shigatse": ((0.490, 0.175), (0.629, 0.250), (0.139, 0.075)),
    "Changdu": ((0.247, 0.523), (0.303, 0.613), (0.056, 0.090)),
    "Dege": ((0.475, 0.902), (0.492, 0.917), (0.017, 0.015)),
}


class TestDeltaReport:
    def test_fixture_deltas_exact_at_3_decimals(self):
        original = {g: orig for g, (orig, _, _) in DELTA_FIXTURES.items()}
        flattened = {g: flat for g, (_, flat, _) in DELTA_FIXTURES.items()}
        report = delta_report(original, flattened)
        for row in report.rows:
            exp_cer, exp_wer = DELTA_FIXTURES[row.group][2]
            assert f"{row.cer_delta:.3f}" == f"{exp_cer:.3f}", row.group
            assert f"{row.wer_delta:.3f}" == f"{exp_wer:.3f}", row.group

    def test_identical_reports_zero_delta(self):
        rates = {g: orig for g, (orig, _, _) in DELTA_FIXTURES.items()}
        report = delta_report(rates, rates)
        assert all(r.cer_delta == 0.0 and r.wer_delta == 0.0 for r in report.rows)

    def test_group_mismatch_rejected(self):
        with pytest.raises(ValueError):
            delta_report({"A": (0.1, 0.2)}, {"B": (0.1, 0.2)})

    def test_id_set_mismatch_rejected(self):
        pairs1 = [TranscriptPair("a", list("ab"), list("ab"))]
        pairs2 = [TranscriptPair("b", list("ab"), list("ab"))]
        r1 = corpus_eval(pairs1, lambda _: "G")
        r2 = corpus_eval(pairs2, lambda _: "G")
        with pytest.raises(ValueError):
            delta_report(r1, r2)

    def test_csv_column_order(self):
        report = delta_report({"G": (0.1, 0.2)}, {"G": (0.15, 0.3)}, tone_status={"G": "Tonal"})
        lines = report.to_csv().splitlines()
        assert lines[0] == "group,tone_status,cer_orig,wer_orig,cer_flat,wer_flat,cer_delta,wer_delta"
        assert lines[1] == "G,Tonal,0.100,0.200,0.150,0.300,0.050,0.100"

    def test_markdown_renders_rows_and_notes(self):
        report = delta_report({"G": (0.1, 0.2)}, {"G": (0.15, 0.3)})
        report.notes.append("one utterance excluded")
        md = report.to_markdown()
        assert "| G |" in md
        assert "one utterance excluded" in md

    def test_explicit_group_order(self):
        original = {g: orig for g, (orig, _, _) in DELTA_FIXTURES.items()}
        flattened = {g: flat for g, (_, flat, _) in DELTA_FIXTURES.items()}
        order = ["Xiahe", "Aba", "Lhasa", "Shigatse", "Changdu", "Dege"]
        report = delta_report(original, flattened, group_order=order)
        assert [r.group for r in report.rows] == order
