"""Edit-distance scoring (CER/WER), corpus aggregation, and delta tables.

CER counts the space/delimiter as a character, because the character
tokenization treats spaces as symbols in their own right; many toolkits
exclude them, so this is worth stating loudly. A word is a maximal run of
non-delimiter tokens. Ratios are micro-averaged (summed error counts over
summed reference lengths) and are not clamped at 1.0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

__all__ = [
    "DeltaReport",
    "DeltaRow",
    "ErrorCounts",
    "EvalReport",
    "GroupScore",
    "TranscriptPair",
    "cer",
    "corpus_eval",
    "delta_report",
    "edit_distance",
    "wer",
    "words_from_chars",
]

@dataclass(frozen=True)
class TranscriptPair:
    """Reference/hypothesis token sequences for one utterance."""

    id: str
    reference: tuple
    hypothesis: tuple

    def __init__(self, id, reference, hypothesis):
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "reference", tuple(reference))
        object.__setattr__(self, "hypothesis", tuple(hypothesis))


def edit_distance(a: Sequence, b: Sequence) -> tuple[int, int, int, int]:
    """Unit-cost Levenshtein distance from ``a`` to ``b`` as (dist, S, I, D).

    Ties in the decomposition are broken preferring substitution over
    deletion over insertion, so the S/I/D split is reproducible.
    """
    a = tuple(a)
    b = tuple(b)
    # prev[j] = (distance, S, I, D) for a[:i] -> b[:j]
    prev = [(j, 0, j, 0) for j in range(len(b) + 1)]
    for i in range(1, len(a) + 1):
        cur = [(i, 0, 0, i)]
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                d, s, ins, dl = prev[j - 1]
                cur.append((d, s, ins, dl))
                continue
            sub_d, sub_s, sub_i, sub_dl = prev[j - 1]
            del_d, del_s, del_i, del_dl = prev[j]
            ins_d, ins_s, ins_i, ins_dl = cur[j - 1]
            best = min(sub_d, del_d, ins_d) + 1
            if sub_d + 1 == best:
                cur.append((best, sub_s + 1, sub_i, sub_dl))
            elif del_d + 1 == best:
                cur.append((best, del_s, del_i, del_dl + 1))
            else:
                cur.append((best, ins_s, ins_i + 1, ins_dl))
        prev = cur
    return prev[len(b)]


def cer(pair: TranscriptPair) -> float:
    """Character error rate over character tokens (delimiters included)."""
    if not pair.reference:
        raise ValueError(f"utterance {pair.id!r}: empty reference")
    dist, _, _, _ = edit_distance(pair.reference, pair.hypothesis)
    return dist / len(pair.reference)


def wer(pair: TranscriptPair) -> float:
    """Word error rate over word tokens."""
    if not pair.reference:
        raise ValueError(f"utterance {pair.id!r}: empty reference")
    dist, _, _, _ = edit_distance(pair.reference, pair.hypothesis)
    return dist / len(pair.reference)


def words_from_chars(tokens: Sequence[str], delimiter: str = " ") -> tuple[str, ...]:
    """Collapse character tokens into words (maximal non-delimiter runs)."""
    words = []
    current: list[str] = []
    for tok in tokens:
        if tok == delimiter:
            if current:
                words.append("".join(current))
                current = []
        else:
            current.append(tok)
    if current:
        words.append("".join(current))
    return tuple(words)


@dataclass
class ErrorCounts:
    substitutions: int = 0
    insertions: int = 0
    deletions: int = 0
    reference_tokens: int = 0

    def add(self, s: int, i: int, d: int, n_ref: int) -> None:
        self.substitutions += s
        self.insertions += i
        self.deletions += d
        self.reference_tokens += n_ref

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def rate(self) -> float:
        return self.distance / self.reference_tokens


@dataclass
class GroupScore:
    chars: ErrorCounts = field(default_factory=ErrorCounts)
    words: ErrorCounts = field(default_factory=ErrorCounts)
    utterance_ids: list = field(default_factory=list)

    @property
    def cer(self) -> float:
        return self.chars.rate

    @property
    def wer(self) -> float:
        return self.words.rate


@dataclass
class EvalReport:
    """Micro-averaged scores per group plus an overall row."""

    groups: dict
    overall: GroupScore
    quarantined: list

    def rates(self) -> dict:
        return {g: (s.cer, s.wer) for g, s in self.groups.items()}


def corpus_eval(pairs, grouping) -> EvalReport:
    """Score character-token pairs, micro-averaged per group.

    ``grouping`` maps utterance id to its group key (callable or mapping).
    Word scores are derived from the same tokens by splitting at the
    delimiter. Pairs with an empty reference at either granularity are
    quarantined, not scored.
    """
    group_of = grouping if callable(grouping) else grouping.__getitem__
    groups: dict[str, GroupScore] = {}
    overall = GroupScore()
    quarantined = []
    for pair in pairs:
        ref_words = words_from_chars(pair.reference)
        if not pair.reference or not ref_words:
            quarantined.append(pair.id)
            continue
        hyp_words = words_from_chars(pair.hypothesis)
        group = group_of(pair.id)
        score = groups.setdefault(group, GroupScore())
        _, cs, ci, cd = edit_distance(pair.reference, pair.hypothesis)
        _, ws, wi, wd = edit_distance(ref_words, hyp_words)
        for target in (score, overall):
            target.chars.add(cs, ci, cd, len(pair.reference))
            target.words.add(ws, wi, wd, len(ref_words))
            target.utterance_ids.append(pair.id)

    empty = [g for g, s in groups.items() if not s.utterance_ids]
    if not groups or empty:
        raise ValueError(f"no scoreable utterances for groups: {empty or 'all'}")
    for score in groups.values():
        score.utterance_ids.sort()
    overall.utterance_ids.sort()
    return EvalReport(groups=groups, overall=overall, quarantined=quarantined)


@dataclass(frozen=True)
class DeltaRow:
    group: str
    tone_status: str
    cer_orig: float
    wer_orig: float
    cer_flat: float
    wer_flat: float
    cer_delta: float
    wer_delta: float


@dataclass
class DeltaReport:
    rows: list
    notes: list = field(default_factory=list)

    CSV_HEADER = (
        "group,tone_status,cer_orig,wer_orig,cer_flat,wer_flat,cer_delta,wer_delta"
    )

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.group},{r.tone_status},{r.cer_orig:.3f},{r.wer_orig:.3f},"
                f"{r.cer_flat:.3f},{r.wer_flat:.3f},{r.cer_delta:.3f},{r.wer_delta:.3f}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        header = (
            "| Group | Tone status | CER orig | WER orig | CER flat | WER flat "
            "| ΔCER | ΔWER |"
        )
        sep = "|---|---|---:|---:|---:|---:|---:|---:|"
        lines = [header, sep]
        for r in self.rows:
            lines.append(
                f"| {r.group} | {r.tone_status} | {r.cer_orig:.3f} | {r.wer_orig:.3f} "
                f"| {r.cer_flat:.3f} | {r.wer_flat:.3f} | {r.cer_delta:.3f} "
                f"| {r.wer_delta:.3f} |"
            )
        body = "\n".join(lines)
        if self.notes:
            body += "\n\n" + "\n".join(f"*{note}*" for note in self.notes)
        return body + "\n"


def delta_report(original, flattened, tone_status=None, group_order=None) -> DeltaReport:
    """Per-group deltas (flattened minus original) at 3-decimal precision.

    Both arguments are EvalReports or plain ``{group: (cer, wer)}`` mappings;
    they must cover identical groups (and, for EvalReports, identical
    utterance id sets). Rates are rounded to the output precision first so
    every delta column equals the printed difference exactly.
    """
    orig_rates = original.rates() if isinstance(original, EvalReport) else dict(original)
    flat_rates = flattened.rates() if isinstance(flattened, EvalReport) else dict(flattened)
    if set(orig_rates) != set(flat_rates):
        raise ValueError(
            f"group mismatch: {sorted(orig_rates)} vs {sorted(flat_rates)}"
        )
    if isinstance(original, EvalReport) and isinstance(flattened, EvalReport):
        for g in orig_rates:
            if original.groups[g].utterance_ids != flattened.groups[g].utterance_ids:
                raise ValueError(f"group {g!r}: utterance id sets differ")

    tone_status = tone_status or {}
    order = list(group_order) if group_order is not None else list(orig_rates)
    rows = []
    for group in order:
        co, wo = (round(v, 3) for v in orig_rates[group])
        cf, wf = (round(v, 3) for v in flat_rates[group])
        rows.append(
            DeltaRow(
                group=group,
                tone_status=tone_status.get(group, ""),
                cer_orig=co,
                wer_orig=wo,
                cer_flat=cf,
                wer_flat=wf,
                cer_delta=round(cf - co, 3),
                wer_delta=round(wf - wo, 3),
            )
        )
    return DeltaReport(rows=rows)
