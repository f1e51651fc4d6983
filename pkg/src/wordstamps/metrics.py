"""Timestamp evaluation: precision/recall under a threshold, SD/ED, WER.

A hypothesis word scores a true positive when it pairs with a reference
word of equal text (after optional normalization), both carry timestamps,
and both the start and end differ by strictly less than the threshold.
SD and ED are the mean absolute start/end differences over all matched
timed pairs, regardless of the threshold.  Word pairing is a monotone
minimal-edit-distance alignment; metrics treat it as symmetric, so
precision(hyp, ref) equals recall(ref, hyp).
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyReference, InvariantViolation
from .types import TimedTranscript

DEFAULT_THRESHOLD_MS = 240
FRAME_MS = 80

_SWEEP_DEFAULT = (240, 320, 400, 480)


class Normalization(str, Enum):
    NONE = "none"
    LOWER_STRIP_PUNCT = "lower_strip_punct"


def normalize_word(word: str, normalization: Normalization) -> str:
    if normalization is Normalization.LOWER_STRIP_PUNCT:
        return word.lower().strip(string.punctuation)
    return word


@dataclass
class WordMatching:
    """Monotone pairing between hypothesis and reference word indices."""

    pairs: list[tuple[int, int]]  # equal-word matches, increasing in both
    hyp_unmatched: list[int]
    ref_unmatched: list[int]
    distance: int  # substitutions + insertions + deletions


def match_words(
    hyp: list[str],
    ref: list[str],
    normalization: Normalization = Normalization.NONE,
) -> WordMatching:
    """Minimal-edit-distance word pairing; only equal words form pairs.

    Among minimal-cost alignments the one with the most matches wins, then
    matches are taken as early as possible.  The pairing is canonicalized
    so that swapping hypothesis and reference exactly mirrors it, which
    makes precision and recall swap roles between the two orders.
    """
    h = [normalize_word(w, normalization) for w in hyp]
    r = [normalize_word(w, normalization) for w in ref]
    if tuple(h) <= tuple(r):
        return _match(h, r)
    mirrored = _match(r, h)
    return WordMatching(
        pairs=[(j, i) for i, j in mirrored.pairs],
        hyp_unmatched=mirrored.ref_unmatched,
        ref_unmatched=mirrored.hyp_unmatched,
        distance=mirrored.distance,
    )


def _match(a: list[str], b: list[str]) -> WordMatching:
    n, m = len(a), len(b)
    # suffix DP over (cost, -matches); forward walk then prefers matches
    # first, so they land as early as possible
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    matches = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        cost[i][m] = n - i
    for j in range(m + 1):
        cost[n][j] = m - j
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                best = (cost[i + 1][j + 1], matches[i + 1][j + 1] + 1)
            else:
                best = (cost[i + 1][j + 1] + 1, matches[i + 1][j + 1])
            for c, k in (
                (cost[i + 1][j] + 1, matches[i + 1][j]),  # delete a[i]
                (cost[i][j + 1] + 1, matches[i][j + 1]),  # insert b[j]
            ):
                if c < best[0] or (c == best[0] and k > best[1]):
                    best = (c, k)
            cost[i][j], matches[i][j] = best

    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n or j < m:
        here = (cost[i][j], matches[i][j])
        if i < n and j < m and a[i] == b[j]:
            if (cost[i + 1][j + 1], matches[i + 1][j + 1] + 1) == here:
                pairs.append((i, j))
                i, j = i + 1, j + 1
                continue
        if (
            i < n
            and j < m
            and a[i] != b[j]
            and (cost[i + 1][j + 1] + 1, matches[i + 1][j + 1]) == here
        ):
            i, j = i + 1, j + 1
            continue
        if i < n and (cost[i + 1][j] + 1, matches[i + 1][j]) == here:
            i += 1
            continue
        j += 1
    matched_h = {i for i, _ in pairs}
    matched_r = {j for _, j in pairs}
    return WordMatching(
        pairs=pairs,
        hyp_unmatched=[i for i in range(n) if i not in matched_h],
        ref_unmatched=[j for j in range(m) if j not in matched_r],
        distance=cost[0][0],
    )


@dataclass
class TimestampReport:
    """Counts and error statistics for one utterance or a whole corpus.

    precision/recall are None when their denominator is zero, never 0;
    sd_ms/ed_ms are None when no matched pair has timestamps on both sides.
    """

    tp: int = 0
    fp: int = 0
    fn: int = 0
    precision: float | None = None
    recall: float | None = None
    sd_ms: float | None = None
    ed_ms: float | None = None
    matched_words: int = 0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "sd_ms": self.sd_ms,
            "ed_ms": self.ed_ms,
            "matched_words": self.matched_words,
        }


@dataclass
class _UttStats:
    """Threshold-independent per-utterance tallies, reused across sweeps."""

    timed_hyp: int
    timed_ref: int
    diffs_ms: list[tuple[int, int]]  # (|start diff|, |end diff|) per matched timed pair
    edit_distance: int
    ref_len: int

    def tp(self, threshold_ms: int) -> int:
        return sum(1 for ds, de in self.diffs_ms if ds < threshold_ms and de < threshold_ms)


def _utt_stats(
    hyp: TimedTranscript,
    ref: TimedTranscript,
    normalization: Normalization,
    frame_ms: int,
) -> _UttStats:
    matching = match_words(hyp.texts, ref.texts, normalization)
    diffs = []
    for i, j in matching.pairs:
        hw, rw = hyp.words[i], ref.words[j]
        if hw.is_timed and rw.is_timed:
            diffs.append(
                (abs(hw.start - rw.start) * frame_ms, abs(hw.end - rw.end) * frame_ms)
            )
    return _UttStats(
        timed_hyp=hyp.timed_count,
        timed_ref=ref.timed_count,
        diffs_ms=diffs,
        edit_distance=matching.distance,
        ref_len=len(ref.words),
    )


def _check_threshold(threshold_ms: int) -> None:
    if not isinstance(threshold_ms, int) or isinstance(threshold_ms, bool) or threshold_ms <= 0:
        raise InvariantViolation(
            f"threshold must be a positive whole number of ms, got {threshold_ms!r}"
        )


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


def _report(stats: _UttStats, threshold_ms: int) -> TimestampReport:
    tp = stats.tp(threshold_ms)
    fp = stats.timed_hyp - tp
    fn = stats.timed_ref - tp
    matched = len(stats.diffs_ms)
    sd_sum = sum(ds for ds, _ in stats.diffs_ms)
    ed_sum = sum(de for _, de in stats.diffs_ms)
    return TimestampReport(
        tp=tp,
        fp=fp,
        fn=fn,
        precision=_ratio(tp, tp + fp),
        recall=_ratio(tp, tp + fn),
        sd_ms=sd_sum / matched if matched else None,
        ed_ms=ed_sum / matched if matched else None,
        matched_words=matched,
    )


def timestamp_pr(
    hyp: TimedTranscript,
    ref: TimedTranscript,
    threshold_ms: int = DEFAULT_THRESHOLD_MS,
    *,
    normalization: Normalization = Normalization.NONE,
    frame_ms: int = FRAME_MS,
) -> TimestampReport:
    """Score one utterance: TP/FP/FN, precision/recall, SD/ED.

    Every timed hypothesis word is either a TP or an FP; every timed
    reference word not matched within threshold is an FN.  Untimed words
    never count as FP but do leave their reference counterpart as FN.
    """
    _check_threshold(threshold_ms)
    return _report(_utt_stats(hyp, ref, normalization, frame_ms), threshold_ms)


def timestamp_sd_ed(
    hyp: TimedTranscript,
    ref: TimedTranscript,
    *,
    normalization: Normalization = Normalization.NONE,
    frame_ms: int = FRAME_MS,
) -> tuple[float | None, float | None, int]:
    """Mean absolute start/end differences (ms) over matched timed pairs."""
    stats = _utt_stats(hyp, ref, normalization, frame_ms)
    matched = len(stats.diffs_ms)
    if not matched:
        return None, None, 0
    sd = sum(ds for ds, _ in stats.diffs_ms) / matched
    ed = sum(de for _, de in stats.diffs_ms) / matched
    return sd, ed, matched


def wer(
    hyp: list[str],
    ref: list[str],
    *,
    normalization: Normalization = Normalization.NONE,
) -> float:
    """(substitutions + insertions + deletions) / |ref|, timestamps ignored."""
    if not ref:
        raise EmptyReference("reference word list is empty")
    return match_words(hyp, ref, normalization).distance / len(ref)


@dataclass
class SweepRow:
    threshold_ms: int
    precision: float | None
    recall: float | None


@dataclass
class CorpusEvaluation:
    per_utt: list[TimestampReport]
    corpus: TimestampReport
    wer: float | None  # micro: total edit distance / total reference words
    wer_errors: int = 0
    ref_words: int = 0


def _corpus_report(stats: list[_UttStats], threshold_ms: int) -> TimestampReport:
    tp = sum(s.tp(threshold_ms) for s in stats)
    timed_hyp = sum(s.timed_hyp for s in stats)
    timed_ref = sum(s.timed_ref for s in stats)
    matched = sum(len(s.diffs_ms) for s in stats)
    sd_sum = sum(ds for s in stats for ds, _ in s.diffs_ms)
    ed_sum = sum(de for s in stats for _, de in s.diffs_ms)
    return TimestampReport(
        tp=tp,
        fp=timed_hyp - tp,
        fn=timed_ref - tp,
        precision=_ratio(tp, timed_hyp),
        recall=_ratio(tp, timed_ref),
        sd_ms=sd_sum / matched if matched else None,
        ed_ms=ed_sum / matched if matched else None,
        matched_words=matched,
    )


def evaluate_corpus(
    pairs: list[tuple[TimedTranscript, TimedTranscript]],
    threshold_ms: int = DEFAULT_THRESHOLD_MS,
    *,
    normalization: Normalization = Normalization.NONE,
    frame_ms: int = FRAME_MS,
) -> CorpusEvaluation:
    """Evaluate (hypothesis, reference) pairs; corpus counts are summed
    before the ratios are taken (micro average)."""
    _check_threshold(threshold_ms)
    stats = [_utt_stats(h, r, normalization, frame_ms) for h, r in pairs]
    per_utt = [_report(s, threshold_ms) for s in stats]
    errors = sum(s.edit_distance for s in stats)
    ref_words = sum(s.ref_len for s in stats)
    return CorpusEvaluation(
        per_utt=per_utt,
        corpus=_corpus_report(stats, threshold_ms),
        wer=errors / ref_words if ref_words else None,
        wer_errors=errors,
        ref_words=ref_words,
    )


def macro_summary(per_utt: list[TimestampReport]) -> dict:
    """Mean of per-utterance ratios, skipping undefined ones."""
    defined_p = [r.precision for r in per_utt if r.precision is not None]
    defined_r = [r.recall for r in per_utt if r.recall is not None]
    return {
        "precision": sum(defined_p) / len(defined_p) if defined_p else None,
        "recall": sum(defined_r) / len(defined_r) if defined_r else None,
        "precision_utts": len(defined_p),
        "recall_utts": len(defined_r),
        "utts": len(per_utt),
    }


def threshold_sweep(
    pairs: list[tuple[TimedTranscript, TimedTranscript]],
    thresholds: list[int] | None = None,
    *,
    normalization: Normalization = Normalization.NONE,
    frame_ms: int = FRAME_MS,
) -> list[SweepRow]:
    """Corpus precision/recall at each threshold; the word matching is
    computed once and reused across thresholds."""
    if thresholds is None:
        thresholds = list(_SWEEP_DEFAULT)
    if not thresholds:
        raise InvariantViolation("threshold sweep needs at least one threshold")
    for t in thresholds:
        _check_threshold(t)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InvariantViolation(f"thresholds must be strictly increasing: {thresholds}")
    stats = [_utt_stats(h, r, normalization, frame_ms) for h, r in pairs]
    rows = []
    for t in thresholds:
        report = _corpus_report(stats, t)
        rows.append(SweepRow(t, report.precision, report.recall))
    return rows
