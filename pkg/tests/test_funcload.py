import math
import random
from collections import Counter, defaultdict

import pytest

from tonolab.funcload import (
    Lexicon,
    LexiconEntry,
    find_minimal_pairs,
    functional_load_entropy,
    load_lexicon_tsv,
    load_merge_map_tsv,
    tonal_confusion_bound,
)

TONES = ["high", "low", "rising", "falling"]


def random_lexicon(rng, n_entries=50, n_segments=None):
    n_segments = n_segments or max(2, n_entries // 3)
    forms = set()
    entries = []
    while len(entries) < n_entries:
        seg = f"s{rng.randrange(n_segments)}"
        tone = rng.choice(TONES)
        if (seg, tone) in forms:
            continue
        forms.add((seg, tone))
        entries.append(
            LexiconEntry(f"w{len(entries)}", seg, tone, rng.randint(1, 20))
        )
    return Lexicon(entries)


def random_merge(rng, n_classes=2):
    return {t: f"c{rng.randrange(n_classes)}" for t in TONES}


def oracle_entropy(weights):
    total = sum(weights)
    return -sum(w / total * math.log2(w / total) for w in weights if w)


def oracle_fl(lex, merge):
    h = oracle_entropy([e.frequency for e in lex.entries])
    if h == 0:
        return 0.0
    pooled = Counter()
    for e in lex.entries:
        pooled[(e.segments, merge[e.tone])] += e.frequency
    return (h - oracle_entropy(list(pooled.values()))) / h


def oracle_minimal_pairs(lex):
    pairs = set()
    for i, a in enumerate(lex.entries):
        for b in lex.entries[i + 1 :]:
            if a.segments == b.segments and a.tone != b.tone:
                pairs.add((a.word_id, b.word_id))
    return pairs


def oracle_confusion(lex, merge):
    mass = 0
    for e in lex.entries:
        if any(
            o is not e
            and o.segments == e.segments
            and merge[o.tone] == merge[e.tone]
            for o in lex.entries
        ):
            mass += e.frequency
    return mass / lex.total_frequency


class TestMinimalPairs:
    def test_canonical_pair(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "high"), LexiconEntry("w1", "ma", "low")])
        assert find_minimal_pairs(lex) == [("w0", "w1")]

    def test_all_distinct_segments(self):
        lex = Lexicon(
            [LexiconEntry(f"w{i}", f"seg{i}", "high") for i in range(10)]
        )
        assert find_minimal_pairs(lex) == []

    def test_same_tone_not_a_pair(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "high", 1), LexiconEntry("w1", "mb", "high", 1)])
        assert find_minimal_pairs(lex) == []

    def test_matches_quadratic_oracle(self):
        rng = random.Random(99)
        for _ in range(10):
            lex = random_lexicon(rng, n_entries=200)
            assert set(map(frozenset, find_minimal_pairs(lex))) == set(
                map(frozenset, oracle_minimal_pairs(lex))
            )

    def test_adding_unique_word_never_removes_pairs(self):
        rng = random.Random(5)
        lex = random_lexicon(rng, n_entries=60)
        before = len(find_minimal_pairs(lex))
        grown = Lexicon(
            list(lex.entries) + [LexiconEntry("wnew", "unique-seg", "weird-tone")]
        )
        assert len(find_minimal_pairs(grown)) >= before


class TestEntropyLoad:
    def test_identity_merge_is_zero(self):
        rng = random.Random(1)
        lex = random_lexicon(rng)
        identity = {t: t for t in TONES}
        assert functional_load_entropy(lex, identity) == 0.0

    def test_two_entry_full_merge_is_one(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "H", 1), LexiconEntry("w1", "ma", "L", 1)])
        assert functional_load_entropy(lex, {"H": "X", "L": "X"}) == 1.0

    def test_matches_oracle_on_random_lexicons(self):
        rng = random.Random(42)
        for _ in range(30):
            lex = random_lexicon(rng)
            merge = random_merge(rng)
            assert functional_load_entropy(lex, merge) == pytest.approx(
                oracle_fl(lex, merge)
            )

    def test_bounded_in_unit_interval(self):
        rng = random.Random(7)
        for _ in range(100):
            lex = random_lexicon(rng, n_entries=rng.randint(2, 80))
            fl = functional_load_entropy(lex, random_merge(rng, rng.randint(1, 4)))
            assert 0.0 <= fl <= 1.0

    def test_monotone_under_coarsening(self):
        rng = random.Random(13)
        for _ in range(50):
            lex = random_lexicon(rng)
            fine = {t: f"c{i}" for i, t in enumerate(TONES)}
            mid = {"high": "a", "low": "a", "rising": "b", "falling": "b"}
            coarse = {t: "all" for t in TONES}
            fls = [
                functional_load_entropy(lex, m) for m in (fine, mid, coarse)
            ]
            assert fls[0] <= fls[1] + 1e-12
            assert fls[1] <= fls[2] + 1e-12

    def test_empty_lexicon_rejected(self):
        with pytest.raises(ValueError):
            functional_load_entropy(Lexicon([]), {})

    def test_partial_merge_map_rejected(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "H"), LexiconEntry("w1", "ma", "L")])
        with pytest.raises(ValueError):
            functional_load_entropy(lex, {"H": "X"})


class TestConfusionBound:
    def test_no_collisions(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "H"), LexiconEntry("w1", "na", "H")])
        assert tonal_confusion_bound(lex, {"H": "X"}) == 0.0

    def test_everything_collides(self):
        lex = Lexicon([LexiconEntry("w0", "ma", "H", 3), LexiconEntry("w1", "ma", "L", 5)])
        assert tonal_confusion_bound(lex, {"H": "X", "L": "X"}) == 1.0

    def test_matches_oracle(self):
        rng = random.Random(31)
        for _ in range(30):
            lex = random_lexicon(rng)
            merge = random_merge(rng)
            assert tonal_confusion_bound(lex, merge) == pytest.approx(
                oracle_confusion(lex, merge)
            )


class TestLexiconValidation:
    def test_duplicate_form_rejected(self):
        with pytest.raises(ValueError):
            Lexicon([LexiconEntry("w0", "ma", "H"), LexiconEntry("w1", "ma", "H")])

    def test_zero_frequency_rejected(self):
        with pytest.raises(ValueError):
            Lexicon([LexiconEntry("w0", "ma", "H", 0)])


class TestTsvIO:
    def test_lexicon_round_trip(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("ma\thigh\t4\nma\tlow\nnga\thigh\t2\n", encoding="utf-8")
        lex = load_lexicon_tsv(path)
        assert len(lex) == 3
        assert lex.entries[0].frequency == 4
        assert lex.entries[1].frequency == 1  # default

    def test_merge_map(self, tmp_path):
        path = tmp_path / "merge.tsv"
        path.write_text("high\tflat\nlow\tflat\n", encoding="utf-8")
        assert load_merge_map_tsv(path) == {"high": "flat", "low": "flat"}

    def test_bad_lexicon_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("only-one-column\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_lexicon_tsv(path)
