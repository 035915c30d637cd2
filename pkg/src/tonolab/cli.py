"""Command-line front end: flatten, eval, translit, funcload."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import funcload as fl
from . import harness
from .pitch import PitchParams
from .wylie import WylieParseError, tibetan_to_wylie_stats, wylie_to_tibetan


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tonolab",
        description="Pitch flattening and tone evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flatten", help="flatten test-split utterances onto their mean f0")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--corpus-root", type=Path, default=None,
                   help="defaults to the manifest's directory")
    p.add_argument("--floor", type=float, default=75.0, help="pitch floor in Hz")
    p.add_argument("--ceiling", type=float, default=500.0, help="pitch ceiling in Hz")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--pitch-csv", action="store_true",
                   help="also write per-utterance pitch track CSVs")

    p = sub.add_parser("eval", help="paired original/flattened CER+WER report")
    p.add_argument("--refs", required=True, type=Path, help="reference manifest (JSONL)")
    p.add_argument("--hyp-original", required=True, type=Path)
    p.add_argument("--hyp-flattened", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("translit", help="convert between Tibetan script and Wylie")
    p.add_argument("--direction", choices=["to-wylie", "to-tibetan"], default="to-wylie")
    p.add_argument("--in", dest="infile", type=Path, default=None, help="default: stdin")
    p.add_argument("--out", dest="outfile", type=Path, default=None, help="default: stdout")

    p = sub.add_parser("funcload", help="minimal pairs and entropy functional load")
    p.add_argument("--lexicon", required=True, type=Path, help="TSV: segments, tone, freq")
    p.add_argument("--merge", required=True, type=Path, help="TSV: tone, merged class")
    p.add_argument("--out", type=Path, default=None, help="default: stdout")
    return parser


def _cmd_flatten(args) -> int:
    root = args.corpus_root if args.corpus_root is not None else args.manifest.parent
    manifest = harness.load_manifest(args.manifest, corpus_root=root)
    config = harness.RunConfig(
        corpus_root=root,
        out_dir=args.out,
        pitch=PitchParams(floor=args.floor, ceiling=args.ceiling),
        jobs=args.jobs,
        dump_pitch_csv=args.pitch_csv,
    )
    entries = harness.run_flatten(manifest, config)
    print(f"flattened {len(entries)} utterances into {config.out_dir}")
    return 0


def _cmd_eval(args) -> int:
    manifest = harness.load_manifest(args.refs, check_audio=False)
    delta = harness.run_eval(manifest, args.hyp_original, args.hyp_flattened, args.out)
    sys.stdout.write(delta.to_markdown())
    return 0


def _cmd_translit(args) -> int:
    text = (
        args.infile.read_text(encoding="utf-8")
        if args.infile is not None
        else sys.stdin.read()
    )
    if args.direction == "to-wylie":
        converted, stats = tibetan_to_wylie_stats(text)
        print(
            f"escaped codepoints: {stats.escaped}, "
            f"passed through verbatim: {stats.passed_through}",
            file=sys.stderr,
        )
    else:
        try:
            converted = wylie_to_tibetan(text)
        except WylieParseError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return 2
    if args.outfile is not None:
        args.outfile.write_text(converted, encoding="utf-8")
    else:
        sys.stdout.write(converted)
    return 0


def _cmd_funcload(args) -> int:
    lexicon = fl.load_lexicon_tsv(args.lexicon)
    merge = fl.load_merge_map_tsv(args.merge)
    result = {
        "minimal_pairs": len(fl.find_minimal_pairs(lexicon)),
        "fl_entropy": fl.functional_load_entropy(lexicon, merge),
        "confusion_bound": fl.tonal_confusion_bound(lexicon, merge),
    }
    payload = json.dumps(result, indent=2)
    if args.out is not None:
        args.out.write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return 0


_COMMANDS = {
    "flatten": _cmd_flatten,
    "eval": _cmd_eval,
    "translit": _cmd_translit,
    "funcload": _cmd_funcload,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (harness.ManifestError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
