"""Teacher forced alignment: exact Viterbi over a blank-augmented target.

Given frame-wise log-probabilities from a CTC model and the reference
token sequence, the aligner finds the maximum-score path through the
expanded sequence (blank, y1, blank, y2, ..., blank) under the standard
CTC transitions, then reads word start/end frames off the path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import Rounding, seconds_to_frame
from .errors import (
    EmatError,
    InfeasibleTarget,
    InvalidTokenId,
    InvariantViolation,
    OrphanToken,
    UnlexicalizableWord,
)
from .emat import read_emat
from .types import FRAME_SECONDS, MAX_FRAME_INDEX, Mode, TimedTranscript, TimedWord

NEG_INF = -np.inf


@dataclass
class EmissionMatrix:
    """T x V natural-log probabilities with a designated blank column.

    Scores are accepted as-is; rows need not be normalized.  Use
    ``check_normalized`` when the producer claims proper log-softmax output.
    """

    log_probs: np.ndarray
    blank_index: int

    def __post_init__(self) -> None:
        self.log_probs = np.asarray(self.log_probs, dtype=np.float64)
        if self.log_probs.ndim != 2:
            raise InvariantViolation(
                f"emissions must be 2-D, got shape {self.log_probs.shape}"
            )
        frames, labels = self.log_probs.shape
        if frames < 1 or labels < 2:
            raise InvariantViolation(
                f"emissions need T >= 1 and V >= 2, got {frames}x{labels}"
            )
        if not np.isfinite(self.log_probs).all():
            raise InvariantViolation("emissions contain non-finite entries")
        if not 0 <= self.blank_index < labels:
            raise InvariantViolation(
                f"blank index {self.blank_index} outside [0, {labels})"
            )

    @property
    def frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def labels(self) -> int:
        return self.log_probs.shape[1]

    def check_normalized(self, tol: float = 1e-3) -> None:
        """Raise unless every row exponentiates to a probability distribution."""
        sums = np.exp(self.log_probs).sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) >= tol)[0]
        if bad.size:
            raise InvariantViolation(
                f"row {bad[0]} sums to {sums[bad[0]]:.6f}, not within {tol} of 1"
            )


def load_emissions(path: str | Path) -> EmissionMatrix:
    matrix, blank = read_emat(path)
    try:
        return EmissionMatrix(matrix, blank)
    except InvariantViolation as exc:
        raise EmatError(f"{path}: {exc}") from None


@dataclass
class VocabEntry:
    id: int
    text: str
    word_begin: bool = False
    is_blank: bool = False


@dataclass
class Vocabulary:
    """Token inventory mapping ids to surface text and word-boundary flags."""

    entries: list[VocabEntry]

    def __post_init__(self) -> None:
        ids = sorted(e.id for e in self.entries)
        if ids != list(range(len(self.entries))):
            raise InvariantViolation("vocabulary ids must be exactly 0..V-1, unique")
        blanks = [e for e in self.entries if e.is_blank]
        if len(blanks) != 1:
            raise InvariantViolation(
                f"vocabulary must have exactly one blank, found {len(blanks)}"
            )
        self._by_id = {e.id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, token_id: int) -> VocabEntry:
        return self._by_id[token_id]

    @property
    def blank_index(self) -> int:
        return next(e.id for e in self.entries if e.is_blank)

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise InvariantViolation(f"{path}: invalid vocabulary JSON ({exc})") from None
        try:
            entries = [
                VocabEntry(
                    id=e["id"],
                    text=e["text"],
                    word_begin=e.get("word_begin", False),
                    is_blank=e.get("is_blank", False),
                )
                for e in data
            ]
        except (TypeError, KeyError):
            raise InvariantViolation(
                f"{path}: vocabulary entries need id and text fields"
            ) from None
        return cls(entries)

    def save(self, path: str | Path) -> None:
        data = [
            {
                "id": e.id,
                "text": e.text,
                "word_begin": e.word_begin,
                "is_blank": e.is_blank,
            }
            for e in self.entries
        ]
        Path(path).write_text(json.dumps(data, ensure_ascii=False, indent=1))


def load_lexicon(path: str | Path) -> dict[str, list[int]]:
    """Word -> token-id list table, stored as a JSON object."""
    with open(path, encoding="utf-8") as f:
        try:
            table = json.load(f)
        except json.JSONDecodeError as exc:
            raise InvariantViolation(f"{path}: invalid lexicon JSON ({exc})") from None
    if not isinstance(table, dict) or not all(
        isinstance(v, list) and all(isinstance(i, int) for i in v)
        for v in table.values()
    ):
        raise InvariantViolation(f"{path}: lexicon must map words to id lists")
    return table


@dataclass
class AlignmentPath:
    """Per-frame positions into the expanded (blank-interleaved) sequence."""

    positions: list[int]
    score: float


@dataclass
class TokenSpan:
    token_id: int
    start: int  # first frame assigned to the token
    end: int  # last frame assigned to the token


def expanded_sequence(target: list[int], blank_index: int) -> list[int]:
    """Interleave blanks: (blank, y1, blank, y2, ..., blank)."""
    expanded = [blank_index]
    for token_id in target:
        expanded.append(token_id)
        expanded.append(blank_index)
    return expanded


def _check_target(emissions: EmissionMatrix, target: list[int]) -> None:
    if not target:
        raise InvalidTokenId("alignment target must be non-empty")
    for token_id in target:
        if not isinstance(token_id, (int, np.integer)):
            raise InvalidTokenId(f"token id {token_id!r} is not an integer")
        if not 0 <= token_id < emissions.labels:
            raise InvalidTokenId(
                f"token id {token_id} outside vocabulary of size {emissions.labels}"
            )
        if token_id == emissions.blank_index:
            raise InvalidTokenId("alignment target must not contain the blank")


def ctc_viterbi_align(emissions: EmissionMatrix, target: list[int]) -> AlignmentPath:
    """Best forced-alignment path for ``target`` through the emissions.

    Transitions from expanded position s reach s (stay), s+1 (advance), and
    s+2 (skip) — a skip only jumps the blank between two distinct labels.
    The path must start at position 0 or 1 and end at the last label or the
    final blank.  Ties are broken toward the lexicographically smallest
    position sequence, i.e. the path advances as late as possible, so equal
    scores favour staying over advancing.  The returned score is the plain
    left-to-right sum of the chosen per-frame log-probabilities.
    """
    _check_target(emissions, target)
    frames = emissions.frames
    expanded = expanded_sequence(target, emissions.blank_index)
    size = len(expanded)

    columns = np.asarray(expanded, dtype=np.intp)
    # skip_into[s]: a (s-2 -> s) transition is legal
    skip_into = np.zeros(size, dtype=bool)
    for s in range(3, size, 2):
        skip_into[s] = expanded[s] != expanded[s - 2]

    emit = emissions.log_probs[:, columns]  # (frames, size)

    # suffix scores: best[t][s] = best completion score from s at frame t,
    # including frame t's emission
    best = np.full((frames, size), NEG_INF)
    best[frames - 1, size - 1] = emit[frames - 1, size - 1]
    best[frames - 1, size - 2] = emit[frames - 1, size - 2]
    skip_targets = np.nonzero(skip_into)[0]
    skip_sources = skip_targets - 2
    for t in range(frames - 2, -1, -1):
        following = best[t + 1]
        reachable = following.copy()
        np.maximum(reachable[:-1], following[1:], out=reachable[:-1])
        if skip_targets.size:
            # fancy indexing: must assign back, out= would hit a copy
            reachable[skip_sources] = np.maximum(
                reachable[skip_sources], following[skip_targets]
            )
        best[t] = emit[t] + reachable

    start = 0 if best[0, 0] >= best[0, 1] else 1
    if best[0, start] == NEG_INF:
        raise InfeasibleTarget(
            f"no valid path: target needs more than {frames} frames"
        )

    positions = [start]
    for t in range(1, frames):
        current = positions[-1]
        chosen = None
        chosen_score = NEG_INF
        for nxt in (current, current + 1, current + 2):
            if nxt >= size:
                break
            if nxt == current + 2 and not skip_into[nxt]:
                continue
            if best[t, nxt] > chosen_score:
                chosen = nxt
                chosen_score = best[t, nxt]
        assert chosen is not None  # a finite suffix score always continues
        positions.append(chosen)

    assert positions[-1] in (size - 1, size - 2)
    score = 0.0
    for t, position in enumerate(positions):
        score += float(emit[t, position])
    return AlignmentPath(positions, score)


def validate_alignment_path(
    path: AlignmentPath, target: list[int], blank_index: int
) -> None:
    """Raise InvariantViolation unless the path obeys the CTC topology."""
    expanded = expanded_sequence(target, blank_index)
    size = len(expanded)
    positions = path.positions
    if not positions:
        raise InvariantViolation("empty path")
    if positions[0] not in (0, 1):
        raise InvariantViolation(f"path starts at {positions[0]}, not 0 or 1")
    if positions[-1] not in (size - 1, size - 2):
        raise InvariantViolation(f"path ends at {positions[-1]}, not the target end")
    for t in range(1, len(positions)):
        step = positions[t] - positions[t - 1]
        if step not in (0, 1, 2):
            raise InvariantViolation(f"illegal step {step} at frame {t}")
        if step == 2 and (
            expanded[positions[t]] == blank_index
            or expanded[positions[t]] == expanded[positions[t] - 2]
        ):
            raise InvariantViolation(f"illegal skip into position {positions[t]}")


def path_to_timed_tokens(path: AlignmentPath, target: list[int]) -> list[TokenSpan]:
    """First/last frame assigned to each target occurrence, in target order."""
    spans: list[TokenSpan] = []
    occurrence = {2 * k + 1: k for k in range(len(target))}
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for t, position in enumerate(path.positions):
        if position in occurrence:
            first.setdefault(position, t)
            last[position] = t
    for k, token_id in enumerate(target):
        position = 2 * k + 1
        spans.append(TokenSpan(token_id, first[position], last[position]))
    return spans


def tokens_to_words(
    spans: list[TokenSpan], vocab: Vocabulary, *, language: str = "en"
) -> TimedTranscript:
    """Group token spans into words at word_begin tokens.

    Word text is the concatenation of token texts; the word span runs from
    its first token's start to its last token's end.
    """
    if spans and not vocab[spans[0].token_id].word_begin:
        raise OrphanToken(
            f"first token {vocab[spans[0].token_id].text!r} does not begin a word"
        )
    words: list[TimedWord] = []
    group: list[TokenSpan] = []

    def flush() -> None:
        if group:
            text = "".join(vocab[s.token_id].text for s in group)
            words.append(TimedWord(text, group[0].start, group[-1].end))

    for span in spans:
        if vocab[span.token_id].word_begin:
            flush()
            group = [span]
        else:
            group.append(span)
    flush()
    return TimedTranscript(words, mode=Mode.ASR, language=language)


def rebucket_spans(
    spans: list[TokenSpan],
    *,
    emission_frame_s: float,
    frame_s: float = FRAME_SECONDS,
    rounding: Rounding = Rounding.FLOOR,
    max_frame: int = MAX_FRAME_INDEX,
    clamp: bool = False,
) -> list[TokenSpan]:
    """Convert spans from emission frames to the timestamp frame grid."""

    def convert(frame: int) -> int:
        return seconds_to_frame(
            frame * emission_frame_s,
            rounding,
            frame_s=frame_s,
            max_frame=max_frame,
            clamp=clamp,
        )

    return [TokenSpan(s.token_id, convert(s.start), convert(s.end)) for s in spans]


def force_align_utterance(
    emissions: EmissionMatrix,
    text: str,
    vocab: Vocabulary,
    lexicon: dict[str, list[int]],
    *,
    language: str = "en",
    emission_frame_s: float = FRAME_SECONDS,
    frame_s: float = FRAME_SECONDS,
    rounding: Rounding = Rounding.FLOOR,
    max_frame: int = MAX_FRAME_INDEX,
    clamp: bool = False,
) -> TimedTranscript:
    """Align a whole utterance: lexicalize, run Viterbi, group into words.

    Emission frames are re-bucketed onto the timestamp grid, so emissions
    from encoders with a different frame rate can serve as teachers.
    """
    words = text.split()
    if not words:
        return TimedTranscript([], mode=Mode.ASR, language=language)
    target: list[int] = []
    for word in words:
        ids = lexicon.get(word)
        if not ids:
            raise UnlexicalizableWord(f"no lexicon entry for {word!r}")
        target.extend(ids)
    path = ctc_viterbi_align(emissions, target)
    spans = rebucket_spans(
        path_to_timed_tokens(path, target),
        emission_frame_s=emission_frame_s,
        frame_s=frame_s,
        rounding=rounding,
        max_frame=max_frame,
        clamp=clamp,
    )
    return tokens_to_words(spans, vocab, language=language)
