"""tonolab: quantify what pitch does for a speech corpus.

Three legs: TD-PSOLA pitch flattening of utterances onto their mean f0,
CER/WER evaluation of recognizer output before vs. after flattening, and
text-based tone functional-load baselines. A JSONL-manifest harness and a
CLI tie them together.
"""

from .audio_io import (
    AudioBuffer,
    AudioIOError,
    TruncatedAudioError,
    UnsupportedAudioError,
    read_wav,
    resample,
    write_wav,
)
from .funcload import (
    Lexicon,
    LexiconEntry,
    find_minimal_pairs,
    functional_load_entropy,
    tonal_confusion_bound,
)
from .harness import (
    ManifestEntry,
    ManifestError,
    RunConfig,
    load_manifest,
    run_eval,
    run_flatten,
)
from .metrics import (
    DeltaReport,
    EvalReport,
    TranscriptPair,
    cer,
    corpus_eval,
    delta_report,
    edit_distance,
    wer,
)
from .pitch import (
    EpochSequence,
    PitchParams,
    PitchTrack,
    detect_epochs,
    estimate_f0,
    mean_f0,
)
from .psola import (
    FlattenDiagnostics,
    PitchFlattener,
    TargetContour,
    flatten_pitch,
    resynthesize,
)
from .validation import CANONICAL_RATE
from .wylie import (
    Vocabulary,
    WylieParseError,
    build_vocab,
    tibetan_to_wylie,
    tokenize_chars,
    wylie_to_tibetan,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "AudioIOError",
    "CANONICAL_RATE",
    "DeltaReport",
    "EpochSequence",
    "EvalReport",
    "FlattenDiagnostics",
    "Lexicon",
    "LexiconEntry",
    "ManifestEntry",
    "ManifestError",
    "PitchFlattener",
    "PitchParams",
    "PitchTrack",
    "RunConfig",
    "TargetContour",
    "TranscriptPair",
    "TruncatedAudioError",
    "UnsupportedAudioError",
    "Vocabulary",
    "WylieParseError",
    "build_vocab",
    "cer",
    "corpus_eval",
    "delta_report",
    "detect_epochs",
    "edit_distance",
    "estimate_f0",
    "find_minimal_pairs",
    "flatten_pitch",
    "functional_load_entropy",
    "load_manifest",
    "mean_f0",
    "read_wav",
    "resample",
    "resynthesize",
    "run_eval",
    "run_flatten",
    "tibetan_to_wylie",
    "tokenize_chars",
    "tonal_confusion_bound",
    "wer",
    "write_wav",
    "wylie_to_tibetan",
]
