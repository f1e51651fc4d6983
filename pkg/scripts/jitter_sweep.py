#!/usr/bin/env python3
"""Threshold-sweep experiment on a synthetically jittered corpus.

Builds a reference corpus, perturbs every hypothesis timestamp by up to
--jitter frames, and prints corpus precision/recall at each threshold.
Because the per-word error never exceeds jitter * 80 ms, the rows rise
toward 100% as the threshold passes the jitter ceiling.
"""

import argparse
import random

from wordstamps.metrics import threshold_sweep
from wordstamps.types import TimedTranscript, TimedWord


def build_pairs(utts: int, jitter: int, seed: int):
    rng = random.Random(seed)
    pairs = []
    for _ in range(utts):
        at = 0
        ref_words = []
        for k in range(rng.randint(2, 8)):
            start = at + rng.randint(0, 2)
            end = start + rng.randint(1, 5)
            at = end + rng.randint(1, 3)
            ref_words.append(TimedWord(f"w{k}", start, end))
        hyp_words = []
        for w in ref_words:
            end = w.end + rng.randint(0, jitter)
            start = min(max(0, w.start + rng.randint(-jitter, jitter)), end)
            hyp_words.append(TimedWord(w.text, start, end))
        pairs.append((TimedTranscript(hyp_words), TimedTranscript(ref_words)))
    return pairs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utts", type=int, default=500)
    parser.add_argument("--jitter", type=int, default=5, help="max shift in frames")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument(
        "--thresholds", default="240,320,400,480", help="comma-separated ms values"
    )
    args = parser.parse_args()

    thresholds = [int(t) for t in args.thresholds.split(",")]
    pairs = build_pairs(args.utts, args.jitter, args.seed)
    words = sum(len(r.words) for _, r in pairs)
    print(f"# {args.utts} utterances, {words} words, jitter <= {args.jitter * 80} ms")
    print("threshold_ms\tprecision\trecall")
    for row in threshold_sweep(pairs, thresholds):
        print(f"{row.threshold_ms}\t{100 * row.precision:.1f}\t{100 * row.recall:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
