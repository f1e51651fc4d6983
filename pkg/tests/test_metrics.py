import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import scored_transcripts
from wordstamps.errors import EmptyReference, InvariantViolation
from wordstamps.metrics import (
    Normalization,
    evaluate_corpus,
    macro_summary,
    match_words,
    threshold_sweep,
    timestamp_pr,
    timestamp_sd_ed,
    wer,
)
from wordstamps.types import Mode, TimedTranscript, TimedWord


def transcript(spans, mode=Mode.ASR):
    return TimedTranscript([TimedWord(w, s, e) for w, s, e in spans], mode)


def shift(t: TimedTranscript, frames: int) -> TimedTranscript:
    return TimedTranscript(
        [TimedWord(w.text, w.start + frames, w.end + frames) for w in t.words],
        t.mode,
        t.language,
    )


class TestMatchWords:
    def test_identity(self):
        m = match_words(["a", "b", "c"], ["a", "b", "c"])
        assert m.pairs == [(0, 0), (1, 1), (2, 2)]
        assert m.distance == 0

    def test_substitution(self):
        m = match_words(["a", "x", "c"], ["a", "b", "c"])
        assert m.pairs == [(0, 0), (2, 2)]
        assert m.hyp_unmatched == [1] and m.ref_unmatched == [1]
        assert m.distance == 1

    def test_empty_hypothesis(self):
        m = match_words([], ["a"])
        assert m.pairs == [] and m.ref_unmatched == [0]
        assert m.distance == 1

    def test_prefers_matches_over_fewer_edits_never(self):
        # swapped words: cost 2 either way, but one alignment keeps a match
        m = match_words(["a", "b"], ["b", "a"])
        assert m.distance == 2
        assert len(m.pairs) == 1

    def test_mirrored_matching_is_swap_consistent(self):
        hyp, ref = ["a", "b"], ["b", "a"]
        forward = match_words(hyp, ref)
        backward = match_words(ref, hyp)
        assert sorted((j, i) for i, j in forward.pairs) == sorted(backward.pairs)

    def test_normalization(self):
        assert match_words(["However,"], ["however"]).pairs == []
        m = match_words(["However,"], ["however"], Normalization.LOWER_STRIP_PUNCT)
        assert m.pairs == [(0, 0)]


class TestTimestampPr:
    def test_identical(self):
        t = transcript([("a", 0, 1), ("b", 2, 3), ("c", 5, 9)])
        r = timestamp_pr(t, t)
        assert (r.tp, r.fp, r.fn) == (3, 0, 0)
        assert r.precision == 1.0 and r.recall == 1.0

    def test_one_start_shifted_past_threshold(self):
        ref = transcript([("a", 0, 8), ("b", 10, 13), ("c", 14, 15), ("d", 16, 17)])
        hyp = transcript([("a", 4, 8), ("b", 10, 13), ("c", 14, 15), ("d", 16, 17)])
        r = timestamp_pr(hyp, ref, 240)
        assert (r.tp, r.fp, r.fn) == (3, 1, 1)
        assert r.precision == 0.75 == r.recall

    def test_empty_hypothesis(self):
        r = timestamp_pr(transcript([]), transcript([("a", 0, 1), ("b", 2, 3), ("c", 4, 5)]))
        assert r.precision is None
        assert r.recall == 0.0 and r.fn == 3

    def test_threshold_is_strict(self):
        ref = transcript([("a", 0, 10)])
        hyp = transcript([("a", 3, 13)])  # 240 ms on both boundaries
        assert timestamp_pr(hyp, ref, 240).tp == 0
        assert timestamp_pr(hyp, ref, 241).tp == 1

    def test_untimed_but_correct_word_is_fn_only(self):
        ref = transcript([("a", 0, 1)])
        hyp = TimedTranscript([TimedWord("a")])
        r = timestamp_pr(hyp, ref)
        assert (r.tp, r.fp, r.fn) == (0, 0, 1)
        assert r.precision is None and r.recall == 0.0

    def test_word_mismatch_is_fp_and_fn(self):
        r = timestamp_pr(transcript([("x", 0, 1)]), transcript([("a", 0, 1)]))
        assert (r.tp, r.fp, r.fn) == (0, 1, 1)
        assert r.precision == 0.0 and r.recall == 0.0

    def test_counts_account_for_every_timed_word(self):
        ref = transcript([("a", 0, 1), ("b", 4, 5)])
        hyp = TimedTranscript(
            [TimedWord("a", 0, 1), TimedWord("z", 2, 3), TimedWord("b")]
        )
        r = timestamp_pr(hyp, ref)
        assert r.tp + r.fp == 2  # timed hypothesis words
        assert r.tp + r.fn == 2  # timed reference words

    def test_bad_threshold(self):
        t = transcript([("a", 0, 1)])
        for bad in (0, -1, 2.5, True):
            with pytest.raises(InvariantViolation):
                timestamp_pr(t, t, bad)


class TestSdEd:
    def test_identical(self):
        t = transcript([("a", 0, 1), ("b", 2, 3)])
        assert timestamp_sd_ed(t, t) == (0.0, 0.0, 2)

    def test_one_frame_shift_is_80ms(self):
        ref = transcript([("a", 0, 1), ("b", 2, 3)])
        assert timestamp_sd_ed(shift(ref, 1), ref) == (80.0, 80.0, 2)

    def test_no_common_words_undefined(self):
        sd, ed, n = timestamp_sd_ed(transcript([("x", 0, 1)]), transcript([("y", 0, 1)]))
        assert sd is None and ed is None and n == 0

    def test_counts_errors_beyond_threshold(self):
        ref = transcript([("a", 0, 10)])
        hyp = transcript([("a", 10, 30)])  # 800/1600 ms, far past threshold
        assert timestamp_sd_ed(hyp, ref) == (800.0, 1600.0, 1)

    def test_custom_frame_duration(self):
        ref = transcript([("a", 0, 1)])
        sd, ed, _ = timestamp_sd_ed(shift(ref, 1), ref, frame_ms=40)
        assert sd == ed == 40.0


class TestWer:
    def test_identity(self):
        assert wer(["a", "b"], ["a", "b"]) == 0.0

    def test_one_substitution_in_four(self):
        assert wer(["a", "x", "c", "d"], ["a", "b", "c", "d"]) == 0.25

    def test_empty_reference(self):
        with pytest.raises(EmptyReference):
            wer(["a"], [])

    def test_insertions_can_exceed_one(self):
        assert wer(["a", "b", "c"], ["x"]) == 3.0

    def test_ignores_timestamps_by_construction(self):
        ref = transcript([("a", 0, 1), ("b", 2, 3)])
        hyp = shift(ref, 4)
        assert wer(hyp.texts, ref.texts) == 0.0


class TestSweep:
    def corpus(self, seed=7, n=40, jitter=5):
        rng = random.Random(seed)
        pairs = []
        for _ in range(n):
            words = [
                ("w%d" % k, 10 * k, 10 * k + 4) for k in range(rng.randint(1, 5))
            ]
            ref = transcript(words)
            jittered = []
            for w in ref.words:
                end = w.end + rng.randint(0, jitter)
                start = min(max(0, w.start + rng.randint(-jitter, jitter)), end)
                jittered.append(TimedWord(w.text, start, end))
            pairs.append((TimedTranscript(jittered), ref))
        return pairs

    def test_identical_corpus_all_ones(self):
        t = transcript([("a", 0, 1), ("b", 2, 3)])
        rows = threshold_sweep([(t, t)], [240, 320, 400, 480])
        assert [(r.precision, r.recall) for r in rows] == [(1.0, 1.0)] * 4

    def test_monotone_in_threshold(self):
        rows = threshold_sweep(self.corpus(), [240, 320, 400, 480])
        for a, b in zip(rows, rows[1:]):
            assert a.precision <= b.precision and a.recall <= b.recall

    def test_jitter_beyond_threshold_separates_rows(self):
        # every hypothesis start shifted by 300 ms: fails at 240, passes at 400
        ref = [transcript([("a", 10, 20), ("b", 30, 40)]) for _ in range(5)]
        pairs = []
        for r in ref:
            hyp = TimedTranscript(
                [TimedWord(w.text, w.start + 4, w.end + 4) for w in r.words]
            )
            pairs.append((hyp, r))
        rows = threshold_sweep(pairs, [240, 400])
        assert rows[0].precision < rows[1].precision
        assert rows[0].recall < rows[1].recall
        assert rows[1].precision == rows[1].recall == 1.0

    def test_thresholds_must_increase(self):
        t = transcript([("a", 0, 1)])
        with pytest.raises(InvariantViolation):
            threshold_sweep([(t, t)], [240, 240])
        with pytest.raises(InvariantViolation):
            threshold_sweep([(t, t)], [])


class TestCorpus:
    def test_micro_aggregation(self):
        ref1 = transcript([("a", 0, 1), ("b", 5, 6)])
        ref2 = transcript([("c", 0, 2)])
        hyp1 = transcript([("a", 0, 1), ("x", 5, 6)])
        evaluation = evaluate_corpus([(hyp1, ref1), (ref2, ref2)])
        assert (evaluation.corpus.tp, evaluation.corpus.fp, evaluation.corpus.fn) == (2, 1, 1)
        assert evaluation.corpus.precision == 2 / 3
        assert evaluation.wer == 1 / 3
        assert len(evaluation.per_utt) == 2

    def test_macro_summary_skips_undefined(self):
        ref = transcript([("a", 0, 1)])
        evaluation = evaluate_corpus([(ref, ref), (transcript([]), ref)])
        macro = macro_summary(evaluation.per_utt)
        assert macro["precision"] == 1.0  # the empty-hyp utterance is skipped
        assert macro["precision_utts"] == 1 and macro["recall_utts"] == 2
        assert macro["recall"] == 0.5


@settings(max_examples=150)
@given(scored_transcripts(), scored_transcripts())
def test_swap_symmetry(hyp, ref):
    forward = timestamp_pr(hyp, ref)
    backward = timestamp_pr(ref, hyp)
    assert forward.precision == backward.recall
    assert forward.recall == backward.precision
    assert (forward.tp, forward.fp, forward.fn) == (backward.tp, backward.fn, backward.fp)
    assert forward.sd_ms == backward.sd_ms and forward.ed_ms == backward.ed_ms


@settings(max_examples=100)
@given(scored_transcripts(allow_untimed=False), st.integers(min_value=0, max_value=5))
def test_global_shift_law(ref, k):
    hyp = shift(ref, k)
    if ref.timed_count == 0:
        return
    sd, ed, matched = timestamp_sd_ed(hyp, ref)
    assert sd == ed == 80 * k
    assert matched == len(ref.words)
    report = timestamp_pr(hyp, ref, 240)
    if 80 * k < 240:
        assert report.precision == report.recall == 1.0
    else:
        assert report.precision == report.recall == 0.0


@settings(max_examples=100)
@given(scored_transcripts(), scored_transcripts())
def test_ratio_identities(hyp, ref):
    report = timestamp_pr(hyp, ref)
    assert report.tp + report.fp == hyp.timed_count
    assert report.tp + report.fn == ref.timed_count
    for value in (report.precision, report.recall):
        assert value is None or 0.0 <= value <= 1.0
