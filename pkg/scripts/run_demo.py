#!/usr/bin/env python3
"""Run the whole pipeline on a synthetic corpus and print the reports.

Stages: fixture generation, forced alignment, DTW baseline alignment,
training-target emission, cross-lingual projection, and evaluation of
both aligners against the ground-truth spans.
"""

import argparse
import json
from pathlib import Path

from wordstamps.cli import main as wordstamps
from wordstamps.synth import build_demo_corpus


def run(*argv: str) -> None:
    code = wordstamps(list(argv))
    if code != 0:
        raise SystemExit(f"command {argv[0]} failed with exit code {code}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default="demo_data")
    parser.add_argument("--utts", type=int, default=5)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()
    root = Path(args.dir)

    print(f"==> building corpus under {root}")
    build_demo_corpus(root, n_utts=args.utts, seed=args.seed)

    print("==> forced alignment")
    run(
        "align",
        "--manifest", str(root / "manifest.jsonl"),
        "--emissions-dir", str(root / "emissions"),
        "--vocab", str(root / "vocab.json"),
        "--lexicon", str(root / "lexicon.json"),
        "--out", str(root / "timed.jsonl"),
    )

    print("==> DTW baseline alignment")
    run(
        "align-dtw",
        "--manifest", str(root / "dtw_manifest.jsonl"),
        "--attention-dir", str(root / "attention"),
        "--out", str(root / "dtw_timed.jsonl"),
    )

    print("==> training targets (15% timestamp style)")
    run(
        "make-targets",
        "--manifest", str(root / "timed.jsonl"),
        "--out", str(root / "targets.jsonl"),
        "--fraction", "0.15",
        "--seed", str(args.seed),
    )

    print("==> projecting timestamps onto the reversed-word translations")
    run(
        "project",
        "--source", str(root / "timed.jsonl"),
        "--targets", str(root / "ast_targets.jsonl"),
        "--out", str(root / "ast_timed.jsonl"),
    )

    print("==> evaluating the forced aligner against ground truth")
    run(
        "eval",
        "--hyp", str(root / "timed.jsonl"),
        "--ref", str(root / "ref_timed.jsonl"),
        "--out", str(root / "report.json"),
    )
    report = json.loads((root / "report.json").read_text())
    print(json.dumps(report["corpus"], indent=1))

    print("==> threshold sweep for the DTW baseline")
    run(
        "sweep",
        "--hyp", str(root / "dtw_timed.jsonl"),
        "--ref", str(root / "ref_timed.jsonl"),
        "--out", str(root / "dtw_sweep.tsv"),
    )
    print((root / "dtw_sweep.tsv").read_text())
    print(f"all outputs under {root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
