"""Command-line pipeline over JSON Lines manifests.

Subcommands: align, align-dtw, make-targets, project, eval, sweep,
inspect.  Exit codes: 0 success, 1 usage/config error, 2 data error.
Per-utterance failures never abort a run; they are counted, logged, and
reported in the run summary JSON written next to each output.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import codec
from .codec import Rounding
from .config import PipelineConfig, load_config
from .ctc import Vocabulary, force_align_utterance, load_emissions, load_lexicon
from .dtw import boundaries_to_transcript, dtw_align, load_attention, path_to_boundaries
from .emat import MAGIC, read_emat
from .errors import ConfigError, ManifestError, WordstampsError
from .fileio import atomic_write_text
from .manifest import Utterance, read_manifest, write_manifest
from .metrics import Normalization, evaluate_corpus, macro_summary, threshold_sweep
from .projection import parse_pharaoh, project_timestamps, projection_diagnostics
from .types import Mode, PromptStyle, TimedTranscript

log = logging.getLogger("wordstamps")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise ConfigError(message)


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--frame-rate", type=float, dest="frame_rate_s")
    parser.add_argument("--max-frame", type=int, dest="max_frame")
    parser.add_argument("--threshold-ms", type=int, dest="threshold_ms")
    parser.add_argument(
        "--rounding", choices=[r.value for r in Rounding], dest="rounding"
    )
    parser.add_argument(
        "--normalize", choices=[n.value for n in Normalization], dest="normalization"
    )
    parser.add_argument("--fraction", type=float, dest="timestamp_data_fraction")
    parser.add_argument("--seed", type=int, dest="seed")
    parser.add_argument("--workers", type=int, dest="workers")
    parser.add_argument("--format", choices=["json", "tsv"], default=None)
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> _Parser:
    parser = _Parser(prog="wordstamps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="forced-align a manifest against emissions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--emissions-dir", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--check-normalized", action="store_true")
    _common_flags(p)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("align-dtw", help="attention-DTW baseline alignment")
    p.add_argument("--manifest", required=True)
    p.add_argument("--attention-dir", required=True)
    p.add_argument("--out", required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_align_dtw)

    p = sub.add_parser("make-targets", help="emit training-target text lines")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--both-styles",
        action="store_true",
        help="emit each utterance in both styles instead of sampling",
    )
    _common_flags(p)
    p.set_defaults(func=_cmd_make_targets)

    p = sub.add_parser("project", help="project source timestamps onto translations")
    p.add_argument("--source", required=True, help="timed source-language manifest")
    p.add_argument("--targets", required=True, help="manifest with alignment fields")
    p.add_argument("--out", required=True)
    p.add_argument("--interpolate-untimed", action="store_true")
    _common_flags(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("eval", help="score a hypothesis manifest against a reference")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sweep", help="comma-separated ms thresholds to append")
    p.add_argument("--macro", action="store_true")
    _common_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="threshold sweep table")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--thresholds", default="240,320,400,480")
    _common_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("inspect", help="summarize a manifest or matrix file")
    p.add_argument("path")
    _common_flags(p)
    p.set_defaults(func=_cmd_inspect)

    return parser


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {}
    for name in (
        "frame_rate_s",
        "max_frame",
        "threshold_ms",
        "timestamp_data_fraction",
        "seed",
        "workers",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "rounding", None) is not None:
        overrides["rounding"] = Rounding(args.rounding)
    if getattr(args, "normalization", None) is not None:
        overrides["normalization"] = Normalization(args.normalization)
    config = replace(config, **overrides)
    config.validate()
    return config


def _write_summary(out_path: str, summary: dict) -> None:
    atomic_write_text(Path(f"{out_path}.summary.json"), json.dumps(summary, indent=1))


# ---------------------------------------------------------------------------
# align
# ---------------------------------------------------------------------------

_WORKER: dict = {}


def _align_init(vocab_path: str, lexicon_path: str) -> None:
    _WORKER["vocab"] = Vocabulary.load(vocab_path)
    _WORKER["lexicon"] = load_lexicon(lexicon_path)


def _align_one(task: dict):
    """Align one utterance; returns (utt_id, words | None, error | None)."""
    try:
        emissions = load_emissions(task["emission_path"])
        if task["check_normalized"]:
            emissions.check_normalized()
        transcript = force_align_utterance(
            emissions,
            task["text"],
            _WORKER["vocab"],
            _WORKER["lexicon"],
            language=task["lang"],
            emission_frame_s=task["emission_frame_s"],
            frame_s=task["frame_s"],
            rounding=Rounding(task["rounding"]),
            max_frame=task["max_frame"],
        )
        return task["utt_id"], transcript.words, None
    except WordstampsError as exc:
        return task["utt_id"], None, f"{type(exc).__name__}: {exc}"


def _emission_path(directory: Path, utt_id: str) -> Path | None:
    for suffix in (".emat", ".txt"):
        candidate = directory / f"{utt_id}{suffix}"
        if candidate.exists():
            return candidate
    return None


def _cmd_align(args: argparse.Namespace, config: PipelineConfig) -> int:
    started = time.perf_counter()
    utts = read_manifest(args.manifest)
    emissions_dir = Path(args.emissions_dir)
    if not emissions_dir.is_dir():
        raise ManifestError(f"emissions directory not found: {emissions_dir}")

    tasks, skips = [], {}
    order = []
    for utt in utts:
        text = utt.text if utt.text is not None else ""
        path = _emission_path(emissions_dir, utt.utt_id)
        if path is None:
            skips[utt.utt_id] = "MissingEmissions"
            continue
        order.append(utt)
        tasks.append(
            {
                "utt_id": utt.utt_id,
                "text": text,
                "lang": utt.lang,
                "emission_path": str(path),
                "emission_frame_s": utt.emission_frame_s or config.frame_rate_s,
                "frame_s": config.frame_rate_s,
                "rounding": config.rounding.value,
                "max_frame": config.max_frame,
                "check_normalized": args.check_normalized,
            }
        )

    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_align_init,
            initargs=(args.vocab, args.lexicon),
        ) as pool:
            results = list(pool.map(_align_one, tasks))
    else:
        _align_init(args.vocab, args.lexicon)
        results = [_align_one(t) for t in tasks]

    out_utts = []
    for utt, (utt_id, words, error) in zip(order, results):
        if error is not None:
            skips[utt_id] = error
            log.warning("skipping %s: %s", utt_id, error)
            continue
        out_utts.append(
            Utterance(
                utt_id=utt.utt_id,
                text=utt.text,
                lang=utt.lang,
                mode=Mode.ASR,
                words=words,
            )
        )
    write_manifest(args.out, out_utts)
    _write_summary(
        args.out,
        {
            "command": "align",
            "total": len(utts),
            "written": len(out_utts),
            "skipped": len(skips),
            "skip_reasons": skips,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    log.info("align: wrote %d, skipped %d", len(out_utts), len(skips))
    return 0


# ---------------------------------------------------------------------------
# align-dtw
# ---------------------------------------------------------------------------


def _cmd_align_dtw(args: argparse.Namespace, config: PipelineConfig) -> int:
    started = time.perf_counter()
    utts = read_manifest(args.manifest)
    attention_dir = Path(args.attention_dir)
    if not attention_dir.is_dir():
        raise ManifestError(f"attention directory not found: {attention_dir}")

    out_utts, skips = [], {}
    for utt in utts:
        words = utt.text.split() if utt.text else [w.text for w in (utt.words or [])]
        try:
            if not words:
                raise ManifestError("no words to align")
            if not utt.word_end_rows:
                raise ManifestError("missing word_end_rows")
            path = _emission_path(attention_dir, utt.utt_id)
            if path is None:
                raise ManifestError("missing attention matrix")
            attention = load_attention(path)
            bounds = path_to_boundaries(
                dtw_align(attention),
                utt.word_end_rows,
                attention_frame_s=utt.attention_frame_s or config.attention_frame_s,
                frame_s=config.frame_rate_s,
                rounding=config.rounding,
                max_frame=config.max_frame,
            )
            transcript = boundaries_to_transcript(words, bounds, language=utt.lang)
        except WordstampsError as exc:
            skips[utt.utt_id] = f"{type(exc).__name__}: {exc}"
            log.warning("skipping %s: %s", utt.utt_id, exc)
            continue
        out_utts.append(
            Utterance(
                utt_id=utt.utt_id,
                text=utt.text,
                lang=utt.lang,
                mode=Mode.ASR,
                words=transcript.words,
            )
        )
    write_manifest(args.out, out_utts)
    _write_summary(
        args.out,
        {
            "command": "align-dtw",
            "total": len(utts),
            "written": len(out_utts),
            "skipped": len(skips),
            "skip_reasons": skips,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    return 0


# ---------------------------------------------------------------------------
# make-targets
# ---------------------------------------------------------------------------


def _target_line(utt: Utterance, style: PromptStyle) -> Utterance:
    transcript = utt.transcript()
    tokens = codec.encode_transcript(transcript, style)
    return Utterance(
        utt_id=utt.utt_id,
        text=codec.tokens_to_text(tokens),
        lang=utt.lang,
        mode=utt.mode,
        prompt=style,
    )


def _cmd_make_targets(args: argparse.Namespace, config: PipelineConfig) -> int:
    started = time.perf_counter()
    utts = read_manifest(args.manifest)
    rng = random.Random(config.seed)
    out_utts, skips = [], {}
    timestamp_lines = 0
    for utt in utts:
        if utt.words is None:
            skips[utt.utt_id] = "NoTimedWords"
            continue
        try:
            if args.both_styles:
                out_utts.append(_target_line(utt, PromptStyle.TIMESTAMP))
                out_utts.append(_target_line(utt, PromptStyle.NOTIMESTAMP))
                timestamp_lines += 1
            else:
                draw = rng.random()
                style = (
                    PromptStyle.TIMESTAMP
                    if draw < config.timestamp_data_fraction
                    else PromptStyle.NOTIMESTAMP
                )
                if style is PromptStyle.TIMESTAMP:
                    timestamp_lines += 1
                out_utts.append(_target_line(utt, style))
        except WordstampsError as exc:
            skips[utt.utt_id] = f"{type(exc).__name__}: {exc}"
            log.warning("skipping %s: %s", utt.utt_id, exc)
    write_manifest(args.out, out_utts)
    _write_summary(
        args.out,
        {
            "command": "make-targets",
            "total": len(utts),
            "written": len(out_utts),
            "skipped": len(skips),
            "skip_reasons": skips,
            "timestamp_lines": timestamp_lines,
            "fraction": config.timestamp_data_fraction,
            "seed": config.seed,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    return 0


# ---------------------------------------------------------------------------
# project
# ---------------------------------------------------------------------------


def _cmd_project(args: argparse.Namespace, config: PipelineConfig) -> int:
    started = time.perf_counter()
    sources = {u.utt_id: u for u in read_manifest(args.source)}
    targets = read_manifest(args.targets)
    out_utts, skips = [], {}
    untimed_targets = noncontiguous = 0
    for utt in targets:
        try:
            source = sources.get(utt.utt_id)
            if source is None:
                raise ManifestError("no matching source utterance")
            if utt.alignment is None:
                raise ManifestError("missing alignment field")
            if utt.text is None:
                raise ManifestError("missing target text")
            src_transcript = source.transcript()
            tgt_words = utt.text.split()
            alignment = parse_pharaoh(
                utt.alignment, len(src_transcript.words), len(tgt_words)
            )
            projected = project_timestamps(
                src_transcript,
                tgt_words,
                alignment,
                language=utt.lang,
                interpolate_untimed=args.interpolate_untimed,
            )
            diag = projection_diagnostics(src_transcript, tgt_words, alignment)
            untimed_targets += diag.untimed_targets
            noncontiguous += diag.noncontiguous_targets
        except WordstampsError as exc:
            skips[utt.utt_id] = f"{type(exc).__name__}: {exc}"
            log.warning("skipping %s: %s", utt.utt_id, exc)
            continue
        out_utts.append(
            Utterance(
                utt_id=utt.utt_id,
                text=utt.text,
                lang=utt.lang,
                mode=Mode.AST,
                words=projected.words,
            )
        )
    write_manifest(args.out, out_utts)
    _write_summary(
        args.out,
        {
            "command": "project",
            "total": len(targets),
            "written": len(out_utts),
            "skipped": len(skips),
            "skip_reasons": skips,
            "untimed_targets": untimed_targets,
            "noncontiguous_targets": noncontiguous,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    return 0


# ---------------------------------------------------------------------------
# eval / sweep
# ---------------------------------------------------------------------------


def _keyed(utts: list[Utterance], label: str) -> dict[str, Utterance]:
    keyed: dict[str, Utterance] = {}
    for utt in utts:
        if utt.utt_id in keyed:
            raise ManifestError(f"duplicate utt_id {utt.utt_id!r} in {label} manifest")
        keyed[utt.utt_id] = utt
    return keyed


def _to_transcript(utt: Utterance, config: PipelineConfig) -> tuple[TimedTranscript, bool]:
    """Words field if present, otherwise decode the text tokens."""
    if utt.words is not None:
        return utt.transcript(), True
    result = codec.decode_transcript(
        codec.text_to_tokens(utt.text or ""),
        mode=utt.mode,
        language=utt.lang,
        max_frame=config.max_frame,
    )
    return result.transcript, result.monotonic


def _paired_transcripts(args, config):
    hyp = _keyed(read_manifest(args.hyp), "hypothesis")
    ref = _keyed(read_manifest(args.ref), "reference")
    shared = [u for u in hyp if u in ref]
    coverage = {
        "hyp_only": sorted(set(hyp) - set(ref)),
        "ref_only": sorted(set(ref) - set(hyp)),
    }
    if not shared:
        raise ManifestError("no overlapping utt_ids between hypothesis and reference")
    pairs, warnings = [], 0
    for utt_id in shared:
        h, h_mono = _to_transcript(hyp[utt_id], config)
        r, r_mono = _to_transcript(ref[utt_id], config)
        warnings += (not h_mono) + (not r_mono)
        pairs.append((h, r))
    return shared, pairs, coverage, warnings


def _cmd_eval(args: argparse.Namespace, config: PipelineConfig) -> int:
    shared, pairs, coverage, warnings = _paired_transcripts(args, config)
    evaluation = evaluate_corpus(
        pairs,
        config.threshold_ms,
        normalization=config.normalization,
        frame_ms=config.frame_ms,
    )
    report = {
        "threshold_ms": config.threshold_ms,
        "normalization": config.normalization.value,
        "utts_evaluated": len(shared),
        "coverage": coverage,
        "nonmonotonic_decodes": warnings,
        "per_utt": [
            {"utt_id": utt_id, **r.to_dict()}
            for utt_id, r in zip(shared, evaluation.per_utt)
        ],
        "corpus": evaluation.corpus.to_dict(),
        "wer": evaluation.wer,
        "wer_errors": evaluation.wer_errors,
        "ref_words": evaluation.ref_words,
    }
    if args.macro:
        report["macro"] = macro_summary(evaluation.per_utt)
    if args.sweep:
        thresholds = _parse_thresholds(args.sweep)
        rows = threshold_sweep(
            pairs,
            thresholds,
            normalization=config.normalization,
            frame_ms=config.frame_ms,
        )
        report["sweep"] = [
            {"threshold_ms": r.threshold_ms, "precision": r.precision, "recall": r.recall}
            for r in rows
        ]
    atomic_write_text(args.out, json.dumps(report, indent=1))
    log.info(
        "eval: %d utts, precision=%s recall=%s wer=%s",
        len(shared),
        evaluation.corpus.precision,
        evaluation.corpus.recall,
        evaluation.wer,
    )
    return 0


def _parse_thresholds(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"bad threshold list: {raw!r}") from None


def _cmd_sweep(args: argparse.Namespace, config: PipelineConfig) -> int:
    _, pairs, _, _ = _paired_transcripts(args, config)
    rows = threshold_sweep(
        pairs,
        _parse_thresholds(args.thresholds),
        normalization=config.normalization,
        frame_ms=config.frame_ms,
    )
    fmt = args.format or "tsv"
    if fmt == "json":
        payload = json.dumps(
            [
                {
                    "threshold_ms": r.threshold_ms,
                    "precision": r.precision,
                    "recall": r.recall,
                }
                for r in rows
            ],
            indent=1,
        )
    else:

        def pct(value: float | None) -> str:
            return "n/a" if value is None else f"{100 * value:.1f}"

        lines = ["threshold_ms\tprecision\trecall"]
        lines += [f"{r.threshold_ms}\t{pct(r.precision)}\t{pct(r.recall)}" for r in rows]
        payload = "\n".join(lines) + "\n"
    atomic_write_text(args.out, payload)
    return 0


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------


def _cmd_inspect(args: argparse.Namespace, config: PipelineConfig) -> int:
    path = Path(args.path)
    if not path.exists():
        raise ManifestError(f"no such file: {path}")
    with path.open("rb") as f:
        head = f.read(4)
    if head == MAGIC or _looks_like_text_emat(path):
        matrix, blank = read_emat(path)
        stats = {
            "type": "emat",
            "frames": matrix.shape[0],
            "labels": matrix.shape[1],
            "blank_index": blank,
            "min": float(matrix.min()),
            "max": float(matrix.max()),
            "max_row_sum_deviation": float(
                np.abs(np.exp(matrix).sum(axis=1) - 1.0).max()
            ),
        }
    else:
        utts = read_manifest(path)
        modes: dict[str, int] = {}
        prompts: dict[str, int] = {}
        languages: dict[str, int] = {}
        words = timed = violations = 0
        violating_utts = []
        for utt in utts:
            modes[utt.mode.value] = modes.get(utt.mode.value, 0) + 1
            if utt.prompt:
                prompts[utt.prompt.value] = prompts.get(utt.prompt.value, 0) + 1
            languages[utt.lang] = languages.get(utt.lang, 0) + 1
            if utt.words is not None:
                transcript = utt.transcript()
                words += len(transcript.words)
                timed += transcript.timed_count
                bad = transcript.monotonicity_violations()
                if bad and utt.mode is Mode.ASR:
                    violations += len(bad)
                    violating_utts.append(utt.utt_id)
        stats = {
            "type": "manifest",
            "lines": len(utts),
            "modes": modes,
            "prompts": prompts,
            "languages": languages,
            "words": words,
            "timed_words": timed,
            "untimed_words": words - timed,
            "monotonicity_violations": violations,
            "utts_with_violations": violating_utts[:20],
        }
    print(json.dumps(stats, indent=1))
    return 0


def _looks_like_text_emat(path: Path) -> bool:
    try:
        with path.open(encoding="utf-8") as f:
            first = f.readline().split()
    except UnicodeDecodeError:
        return False
    return len(first) == 3 and all(p.lstrip("-").isdigit() for p in first)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        config = _resolve_config(args)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (WordstampsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
