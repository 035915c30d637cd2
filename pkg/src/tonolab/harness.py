"""Batch orchestration: manifests in, flattened audio and delta reports out.

Manifests are JSONL, one utterance per line:
``{"id", "audio_path", "text", "dialect", "group", "split"}`` with audio
paths relative to the corpus root. Hypothesis files are JSONL
``{"id", "hyp"}``. Any recognizer that speaks these two schemas can sit in
the middle; nothing here depends on a particular model.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import metrics
from .audio_io import read_wav, resample, write_wav
from .pitch import DEFAULT_PARAMS, PitchParams, estimate_f0
from .psola import flatten_pitch
from .validation import CANONICAL_RATE
from .wylie import tibetan_to_wylie, tokenize_chars

log = logging.getLogger(__name__)

SPLITS = ("train", "test")

# presentation order for report sections, and the conventional tone status
# of each dialect group
GROUP_ORDER = ("Amdo", "Ü-Tsang", "Kham", "other")
TONE_STATUS = {"Amdo": "Non-tonal", "Ü-Tsang": "Tonal", "Kham": "Tonal"}


class ManifestError(ValueError):
    """One or more manifest lines failed validation; all issues listed."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("manifest validation failed:\n" + "\n".join(self.issues))


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: str
    text: str
    dialect: str
    group: str
    split: str
    text_format: str = "auto"  # "tibetan" | "wylie" | "auto"

    def resolve_audio(self, corpus_root: Path) -> Path:
        return corpus_root / self.audio_path


@dataclass(frozen=True)
class RunConfig:
    corpus_root: Path
    out_dir: Path
    pitch: PitchParams = DEFAULT_PARAMS
    jobs: int = 1
    seed: int = 0  # reserved; the pipeline is deterministic
    dump_pitch_csv: bool = False

    def __post_init__(self):
        root = Path(self.corpus_root).resolve()
        out = Path(self.out_dir).resolve()
        object.__setattr__(self, "corpus_root", root)
        object.__setattr__(self, "out_dir", out)
        if root == out:
            raise ValueError("output directory must differ from the corpus root")


def load_manifest(path, corpus_root=None, check_audio=True) -> list[ManifestEntry]:
    """Parse and validate a JSONL manifest.

    All problems (malformed lines, duplicate ids, out-of-root or missing
    audio) are collected and reported together in one ManifestError.
    """
    path = Path(path)
    root = Path(corpus_root) if corpus_root is not None else path.parent
    entries: list[ManifestEntry] = []
    issues: list[str] = []
    seen: dict[str, int] = {}

    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            issues.append(f"line {lineno}: malformed JSON ({exc.msg})")
            continue
        missing = [k for k in ("id", "audio_path", "text", "dialect", "group", "split") if k not in rec]
        if missing:
            issues.append(f"line {lineno}: missing fields {missing}")
            continue
        entry = ManifestEntry(
            id=str(rec["id"]),
            audio_path=str(rec["audio_path"]),
            text=str(rec["text"]),
            dialect=str(rec["dialect"]),
            group=str(rec["group"]),
            split=str(rec["split"]),
            text_format=str(rec.get("text_format", "auto")),
        )
        if entry.id in seen:
            issues.append(
                f"line {lineno}: duplicate id {entry.id!r} (first on line {seen[entry.id]})"
            )
            continue
        seen[entry.id] = lineno
        if entry.split not in SPLITS:
            issues.append(f"line {lineno}: bad split {entry.split!r}")
            continue
        apath = Path(entry.audio_path)
        if apath.is_absolute() or ".." in apath.parts:
            issues.append(f"line {lineno}: audio path escapes corpus root: {entry.audio_path}")
            continue
        if check_audio and not (root / apath).is_file():
            issues.append(f"line {lineno}: audio file not found: {root / apath}")
            continue
        entries.append(entry)

    if issues:
        raise ManifestError(issues)
    return entries


def _flatten_one(args):
    """Worker: flatten a single utterance; returns (id, diag dict or error)."""
    entry, corpus_root, out_dir, params, dump_csv = args
    try:
        buf = read_wav(Path(corpus_root) / entry.audio_path)
        buf = resample(buf, CANONICAL_RATE)
        flat, diag = flatten_pitch(buf, params)
        out_path = Path(out_dir) / entry.audio_path
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_wav(out_path, flat)
        if dump_csv:
            track = estimate_f0(buf, params)
            csv_path = out_path.with_suffix(".pitch.csv")
            csv_path.write_text(track.to_csv(), encoding="utf-8")
        record = {"id": entry.id, **diag.to_record()}
        return entry.id, record, None
    except Exception as exc:  # per-utterance fault isolation
        return entry.id, None, f"{type(exc).__name__}: {exc}"


def run_flatten(manifest, config: RunConfig):
    """Flatten every test-split utterance into the output directory.

    Writes WAVs mirroring the corpus layout, a diagnostics JSONL, and a new
    manifest pointing at the flattened audio. Per-utterance failures are
    logged and skipped; the run fails only if nothing succeeds. Re-running
    the same configuration overwrites with byte-identical artifacts.
    """
    test_entries = [e for e in manifest if e.split == "test"]
    if not test_entries:
        raise ValueError("manifest has no test-split entries")
    config.out_dir.mkdir(parents=True, exist_ok=True)

    tasks = [
        (e, str(config.corpus_root), str(config.out_dir), config.pitch, config.dump_pitch_csv)
        for e in test_entries
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_flatten_one, tasks))
    else:
        results = [_flatten_one(t) for t in tasks]

    diagnostics = []
    failures = []
    ok_ids = set()
    for utt_id, record, error in results:
        if error is None:
            diagnostics.append(record)
            ok_ids.add(utt_id)
        else:
            failures.append((utt_id, error))
            log.warning("skipping %s: %s", utt_id, error)
    if not ok_ids:
        raise RuntimeError(f"all {len(test_entries)} utterances failed: {failures}")

    diag_path = config.out_dir / "diagnostics.jsonl"
    with diag_path.open("w", encoding="utf-8") as f:
        for rec in diagnostics:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    flat_entries = [e for e in test_entries if e.id in ok_ids]
    manifest_path = config.out_dir / "manifest.jsonl"
    with manifest_path.open("w", encoding="utf-8") as f:
        for e in flat_entries:
            rec = {
                "id": e.id,
                "audio_path": e.audio_path,
                "text": e.text,
                "dialect": e.dialect,
                "group": e.group,
                "split": e.split,
            }
            if e.text_format != "auto":
                rec["text_format"] = e.text_format
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return flat_entries


def load_hypotheses(path) -> dict:
    """JSONL {"id", "hyp"} -> dict keyed by id."""
    hyps = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        if "id" not in rec or "hyp" not in rec:
            raise ValueError(f"{path}:{lineno}: hypothesis lines need id and hyp")
        hyps[str(rec["id"])] = str(rec["hyp"])
    return hyps


def _as_wylie(text: str, text_format: str) -> str:
    if text_format == "wylie":
        return text
    if text_format == "tibetan":
        return tibetan_to_wylie(text)
    return tibetan_to_wylie(text) if _has_tibetan(text) else text


def _has_tibetan(text: str) -> bool:
    return any("ༀ" <= ch <= "࿿" for ch in text)


def _pairs_for(entries, hyps) -> list[metrics.TranscriptPair]:
    pairs = []
    for e in entries:
        ref = _as_wylie(e.text, e.text_format).strip()
        hyp = _as_wylie(hyps[e.id], "auto").strip()
        pairs.append(
            metrics.TranscriptPair(
                id=e.id,
                reference=tokenize_chars(ref),
                hypothesis=tokenize_chars(hyp),
            )
        )
    return pairs


def _dialect_order(entries) -> list[str]:
    rank = {g: i for i, g in enumerate(GROUP_ORDER)}
    seen: dict[str, tuple] = {}
    for pos, e in enumerate(entries):
        if e.dialect not in seen:
            seen[e.dialect] = (rank.get(e.group, len(rank)), pos)
    return sorted(seen, key=seen.__getitem__)


def run_eval(ref_manifest, hyp_original, hyp_flattened, out_dir) -> metrics.DeltaReport:
    """Paired before/after evaluation.

    Utterances missing from either hypothesis file are excluded from both
    conditions (noted in the report footer), keeping the comparison paired.
    Writes ``delta_report.csv`` and ``delta_report.md`` under ``out_dir``.
    """
    entries = [e for e in ref_manifest if e.split == "test"]
    hyp_o = hyp_original if isinstance(hyp_original, dict) else load_hypotheses(hyp_original)
    hyp_f = hyp_flattened if isinstance(hyp_flattened, dict) else load_hypotheses(hyp_flattened)

    excluded = [e.id for e in entries if e.id not in hyp_o or e.id not in hyp_f]
    kept = [e for e in entries if e.id not in set(excluded)]
    if not kept:
        raise ValueError("no utterance has hypotheses in both conditions")

    grouping = {e.id: e.dialect for e in kept}
    report_o = metrics.corpus_eval(_pairs_for(kept, hyp_o), grouping)
    report_f = metrics.corpus_eval(_pairs_for(kept, hyp_f), grouping)

    status_of = {e.dialect: TONE_STATUS.get(e.group, "") for e in kept}
    delta = metrics.delta_report(
        report_o,
        report_f,
        tone_status=status_of,
        group_order=_dialect_order(kept),
    )
    if excluded:
        delta.notes.append(
            f"excluded from both conditions (missing hypothesis): {', '.join(sorted(excluded))}"
        )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "delta_report.csv").write_text(delta.to_csv(), encoding="utf-8")
    (out / "delta_report.md").write_text(delta.to_markdown(), encoding="utf-8")
    return delta
