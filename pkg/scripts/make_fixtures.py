#!/usr/bin/env python3
"""Generate a synthetic demo corpus: manifests, emissions, attention, lexicon.

The corpus is self-consistent: peaked emissions guarantee the forced
aligner reproduces the spans recorded in ref_timed.jsonl, so the full
pipeline can be exercised end to end without a neural model.
"""

import argparse
import json

from wordstamps.synth import build_demo_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_data", help="output directory")
    parser.add_argument("--utts", type=int, default=5)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()
    summary = build_demo_corpus(args.out, n_utts=args.utts, seed=args.seed)
    print(json.dumps(summary, indent=1))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
