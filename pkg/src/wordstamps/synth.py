"""Synthetic fixtures for exercising the pipeline without a neural model.

Character-level vocabularies pair each letter with a word-begin variant;
peaked emissions assign each target token a block of frames where its
log-probability dominates, so the Viterbi aligner recovers the blocks
exactly and every downstream stage has a known ground truth.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

import numpy as np

from .ctc import EmissionMatrix, TokenSpan, Vocabulary, VocabEntry, tokens_to_words
from .emat import write_emat
from .manifest import Utterance, write_manifest
from .types import Mode, TimedTranscript

BLANK_TEXT = "<b>"


def char_vocabulary(words: list[str]) -> Vocabulary:
    """Blank plus a word-begin and a continuation entry per character."""
    chars = sorted({c for w in words for c in w})
    entries = [VocabEntry(0, BLANK_TEXT, is_blank=True)]
    for c in chars:
        entries.append(VocabEntry(len(entries), c, word_begin=True))
        entries.append(VocabEntry(len(entries), c, word_begin=False))
    return Vocabulary(entries)


def char_lexicon(words: list[str], vocab: Vocabulary) -> dict[str, list[int]]:
    begin = {e.text: e.id for e in vocab.entries if e.word_begin}
    cont = {e.text: e.id for e in vocab.entries if not e.word_begin and not e.is_blank}
    lexicon = {}
    for word in dict.fromkeys(words):
        lexicon[word] = [begin[word[0]]] + [cont[c] for c in word[1:]]
    return lexicon


def peaked_emissions(
    target: list[int],
    vocab_size: int,
    blank_index: int = 0,
    *,
    frames_per_token: int = 2,
    peak_prob: float = 0.95,
    lead_blanks: int = 0,
    trail_blanks: int = 0,
) -> tuple[EmissionMatrix, list[TokenSpan]]:
    """Emissions where each target token owns a block of frames.

    A blank-peaked frame is inserted between repeated adjacent tokens (the
    CTC topology demands one).  Returns the matrix and the expected token
    spans the aligner should find.
    """
    blocks: list[tuple[int, int]] = []  # (column, n_frames)
    for k, token_id in enumerate(target):
        if k > 0 and target[k - 1] == token_id:
            blocks.append((blank_index, 1))
        blocks.append((token_id, frames_per_token))
    if lead_blanks:
        blocks.insert(0, (blank_index, lead_blanks))
    if trail_blanks:
        blocks.append((blank_index, trail_blanks))

    total = sum(n for _, n in blocks)
    off = math.log((1.0 - peak_prob) / (vocab_size - 1))
    matrix = np.full((total, vocab_size), off, dtype=np.float64)
    spans: list[TokenSpan] = []
    t = 0
    for column, n_frames in blocks:
        matrix[t : t + n_frames, column] = math.log(peak_prob)
        if column != blank_index:
            spans.append(TokenSpan(column, t, t + n_frames - 1))
        t += n_frames
    return EmissionMatrix(matrix, blank_index), spans


def expected_transcript(
    spans: list[TokenSpan], vocab: Vocabulary, language: str = "en"
) -> TimedTranscript:
    return tokens_to_words(spans, vocab, language=language)


_WORD_BANK = [
    "an", "be", "cab", "dade", "ebb", "fa", "gag", "hatch",
    "ice", "jab", "keel", "lull", "mime", "nil", "oak", "pipe",
]


def build_demo_corpus(
    out_dir: str | Path,
    n_utts: int = 5,
    seed: int = 13,
    *,
    words_per_utt: tuple[int, int] = (2, 5),
    frames_per_token: int = 2,
    attention_cols_per_frame: int = 4,
) -> dict:
    """Write a self-consistent demo corpus under ``out_dir``.

    Produces text manifests, peaked emissions, a ground-truth timed
    manifest, reversed-word translation targets with full-reversal
    alignments, and block-diagonal attention matrices with word-end rows.
    """
    out = Path(out_dir)
    (out / "emissions").mkdir(parents=True, exist_ok=True)
    (out / "attention").mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    utt_words = [
        [rng.choice(_WORD_BANK) for _ in range(rng.randint(*words_per_utt))]
        for _ in range(n_utts)
    ]
    vocab = char_vocabulary([w for words in utt_words for w in words])
    lexicon = char_lexicon([w for words in utt_words for w in words], vocab)
    vocab.save(out / "vocab.json")
    (out / "lexicon.json").write_text(json.dumps(lexicon, ensure_ascii=False, indent=1))

    plain, timed, ast_targets, dtw_inputs = [], [], [], []
    for n, words in enumerate(utt_words):
        utt_id = f"utt{n:04d}"
        target = [i for w in words for i in lexicon[w]]
        emissions, spans = peaked_emissions(
            target, len(vocab), vocab.blank_index, frames_per_token=frames_per_token
        )
        write_emat(out / "emissions" / f"{utt_id}.emat", emissions.log_probs, vocab.blank_index)
        reference = expected_transcript(spans, vocab)
        text = " ".join(words)
        plain.append(Utterance(utt_id=utt_id, text=text))
        timed.append(Utterance(utt_id=utt_id, text=text, words=list(reference.words)))

        # translation fixture: reversed word order, fully reversed alignment
        reversed_words = list(reversed(words))
        n_words = len(words)
        pharaoh = " ".join(f"{i}-{n_words - 1 - i}" for i in range(n_words))
        ast_targets.append(
            Utterance(
                utt_id=utt_id,
                text=" ".join(reversed_words),
                lang="xx",
                mode=Mode.AST,
                alignment=pharaoh,
            )
        )

        # attention fixture: one row per word, block-diagonal weights
        frames = emissions.frames * attention_cols_per_frame
        attention = np.full((n_words, frames), 0.01)
        word_spans = [(w.start, w.end) for w in reference.words]
        for row, (s, e) in enumerate(word_spans):
            attention[
                row,
                s * attention_cols_per_frame : (e + 1) * attention_cols_per_frame,
            ] = 1.0
        write_emat(out / "attention" / f"{utt_id}.emat", attention, 0)
        dtw_inputs.append(
            Utterance(
                utt_id=utt_id,
                text=text,
                word_end_rows=list(range(n_words)),
                attention_frame_s=0.020,
            )
        )

    write_manifest(out / "manifest.jsonl", plain)
    write_manifest(out / "ref_timed.jsonl", timed)
    write_manifest(out / "ast_targets.jsonl", ast_targets)
    write_manifest(out / "dtw_manifest.jsonl", dtw_inputs)
    return {
        "utts": n_utts,
        "words": sum(len(w) for w in utt_words),
        "vocab_size": len(vocab),
        "dir": str(out),
    }
