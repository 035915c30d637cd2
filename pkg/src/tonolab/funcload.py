"""Text-based tone functional load: minimal pairs, entropy loss, collisions.

The entropy measure asks how much of the lexicon's form distribution
collapses when tone categories are merged: FL = (H - H_merged) / H over the
frequency-weighted distribution of (segments, tone) forms. The companion
confusion bound is the token-frequency mass of forms that become ambiguous
under the merge.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

__all__ = [
    "Lexicon",
    "LexiconEntry",
    "find_minimal_pairs",
    "functional_load_entropy",
    "load_lexicon_tsv",
    "load_merge_map_tsv",
    "tonal_confusion_bound",
]


@dataclass(frozen=True)
class LexiconEntry:
    word_id: str
    segments: str
    tone: str
    frequency: int = 1


@dataclass(frozen=True)
class Lexicon:
    entries: tuple

    def __init__(self, entries: Sequence[LexiconEntry]):
        entries = tuple(entries)
        seen = set()
        for e in entries:
            if e.frequency < 1:
                raise ValueError(f"{e.word_id}: frequency must be >= 1")
            key = (e.segments, e.tone)
            if key in seen:
                raise ValueError(f"duplicate (segments, tone) form: {key}")
            seen.add(key)
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def tones(self) -> set:
        return {e.tone for e in self.entries}

    @property
    def total_frequency(self) -> int:
        return sum(e.frequency for e in self.entries)


def _check_merge(lex: Lexicon, merge: Mapping[str, str]) -> None:
    missing = lex.tones - set(merge)
    if missing:
        raise ValueError(f"merge map misses tone labels: {sorted(missing)}")


def find_minimal_pairs(lex: Lexicon) -> list[tuple[str, str]]:
    """Unordered entry pairs with identical segments but distinct tones."""
    by_segments = defaultdict(list)
    for e in lex.entries:
        by_segments[e.segments].append(e)
    pairs = []
    for group in by_segments.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if group[i].tone != group[j].tone:
                    pairs.append((group[i].word_id, group[j].word_id))
    return pairs


def _entropy(weights) -> float:
    total = sum(weights)
    return -sum(w / total * math.log2(w / total) for w in weights if w)


def functional_load_entropy(lex: Lexicon, merge: Mapping[str, str]) -> float:
    """Relative entropy loss when tone labels collapse per the merge map."""
    if len(lex) == 0:
        raise ValueError("empty lexicon")
    _check_merge(lex, merge)
    h = _entropy([e.frequency for e in lex.entries])
    if h == 0.0:
        return 0.0
    merged = defaultdict(int)
    for e in lex.entries:
        merged[(e.segments, merge[e.tone])] += e.frequency
    h_merged = _entropy(list(merged.values()))
    return (h - h_merged) / h


def tonal_confusion_bound(lex: Lexicon, merge: Mapping[str, str]) -> float:
    """Frequency mass of entries whose merged form collides with another's."""
    if len(lex) == 0:
        raise ValueError("empty lexicon")
    _check_merge(lex, merge)
    counts = defaultdict(int)
    for e in lex.entries:
        counts[(e.segments, merge[e.tone])] += 1
    colliding = sum(
        e.frequency
        for e in lex.entries
        if counts[(e.segments, merge[e.tone])] > 1
    )
    return colliding / lex.total_frequency


def load_lexicon_tsv(path) -> Lexicon:
    """UTF-8 TSV with columns: segments, tone, frequency (optional)."""
    entries = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            raise ValueError(f"{path}:{lineno}: need at least segments<TAB>tone")
        freq = int(cols[2]) if len(cols) > 2 and cols[2] else 1
        entries.append(
            LexiconEntry(
                word_id=f"w{len(entries)}",
                segments=cols[0],
                tone=cols[1],
                frequency=freq,
            )
        )
    return Lexicon(entries)


def load_merge_map_tsv(path) -> dict:
    """UTF-8 TSV with columns: tone, merged class."""
    merge = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"{path}:{lineno}: need tone<TAB>class")
        merge[cols[0]] = cols[1]
    return merge
