"""Attention-based baseline aligner: monotone DTW over cross-attention.

The warping path aligns decoder token steps (rows) to encoder frames
(columns).  Consecutive words share a single boundary: the timestamp at a
word's final row ends that word and starts the next one.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import Rounding, seconds_to_frame
from .emat import read_emat
from .errors import EmatError, InvariantViolation, LengthMismatch, RowOutOfRange
from .types import FRAME_SECONDS, MAX_FRAME_INDEX, Mode, TimedTranscript, TimedWord

DEFAULT_ATTENTION_FRAME_SECONDS = 0.020


@dataclass
class AttentionMatrix:
    """N decoder steps x T encoder frames of non-negative attention weights."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2:
            raise InvariantViolation(
                f"attention must be 2-D, got shape {self.weights.shape}"
            )
        if self.weights.shape[0] < 1 or self.weights.shape[1] < 1:
            raise InvariantViolation("attention needs N >= 1 and T >= 1")
        if not np.isfinite(self.weights).all():
            raise InvariantViolation("attention contains non-finite entries")
        if (self.weights < 0).any():
            raise InvariantViolation("attention contains negative entries")

    @property
    def rows(self) -> int:
        return self.weights.shape[0]

    @property
    def cols(self) -> int:
        return self.weights.shape[1]


def load_attention(path: str | Path) -> AttentionMatrix:
    matrix, _ = read_emat(path)  # blank_index field is ignored for attention
    try:
        return AttentionMatrix(matrix)
    except InvariantViolation as exc:
        raise EmatError(f"{path}: {exc}") from None


@dataclass
class DtwPath:
    """Monotone (row, col) steps from (0, 0) to (N-1, T-1)."""

    steps: list[tuple[int, int]]


def dtw_align(attention: AttentionMatrix, *, renormalize_rows: bool = False) -> DtwPath:
    """Minimum-cost monotone path with cost(i, j) = -weights[i][j].

    Steps are (1,0), (0,1) and (1,1), all unit weight.  Ties prefer the
    diagonal step, then the column step (0,1), then the row step (1,0),
    applied while backtracking from the end of the path.  The optional
    per-row softmax renormalization is a preprocessing experiment and off
    by default.
    """
    weights = attention.weights
    if renormalize_rows:
        shifted = np.exp(weights - weights.max(axis=1, keepdims=True))
        weights = shifted / shifted.sum(axis=1, keepdims=True)
    cost = -weights
    rows, cols = cost.shape

    acc = np.empty((rows, cols), dtype=np.float64)
    acc[0, 0] = cost[0, 0]
    for j in range(1, cols):
        acc[0, j] = acc[0, j - 1] + cost[0, j]
    for i in range(1, rows):
        acc[i, 0] = acc[i - 1, 0] + cost[i, 0]
        row = acc[i]
        above = acc[i - 1]
        for j in range(1, cols):
            row[j] = cost[i, j] + min(above[j - 1], row[j - 1], above[j])

    steps = [(rows - 1, cols - 1)]
    i, j = rows - 1, cols - 1
    while (i, j) != (0, 0):
        here = acc[i, j]
        if i > 0 and j > 0 and acc[i - 1, j - 1] + cost[i, j] == here:
            i, j = i - 1, j - 1
        elif j > 0 and acc[i, j - 1] + cost[i, j] == here:
            j = j - 1
        else:
            i = i - 1
        steps.append((i, j))
    steps.reverse()
    return DtwPath(steps)


def validate_dtw_path(path: DtwPath, rows: int, cols: int) -> None:
    """Raise InvariantViolation unless the path is a legal warping path."""
    steps = path.steps
    if not steps:
        raise InvariantViolation("empty path")
    if steps[0] != (0, 0) or steps[-1] != (rows - 1, cols - 1):
        raise InvariantViolation(
            f"path must run (0,0) -> ({rows - 1},{cols - 1}), got "
            f"{steps[0]} -> {steps[-1]}"
        )
    for k in range(1, len(steps)):
        delta = (steps[k][0] - steps[k - 1][0], steps[k][1] - steps[k - 1][1])
        if delta not in ((1, 0), (0, 1), (1, 1)):
            raise InvariantViolation(f"illegal step {delta} at index {k}")


def path_to_boundaries(
    path: DtwPath,
    word_end_rows: list[int],
    *,
    attention_frame_s: float = DEFAULT_ATTENTION_FRAME_SECONDS,
    frame_s: float = FRAME_SECONDS,
    rounding: Rounding = Rounding.FLOOR,
    max_frame: int = MAX_FRAME_INDEX,
    clamp: bool = False,
) -> list[int]:
    """One boundary frame per word: the last column the path occupies at the
    word's final row, re-bucketed from encoder frames to the timestamp grid."""
    rows = path.steps[-1][0] + 1
    if any(r < 0 or r >= rows for r in word_end_rows):
        raise RowOutOfRange(f"word_end_rows {word_end_rows} outside [0, {rows})")
    if any(b <= a for a, b in zip(word_end_rows, word_end_rows[1:])):
        raise RowOutOfRange(f"word_end_rows must be strictly increasing: {word_end_rows}")
    last_col: dict[int, int] = {}
    for i, j in path.steps:
        last_col[i] = j
    return [
        seconds_to_frame(
            last_col[r] * attention_frame_s,
            rounding,
            frame_s=frame_s,
            max_frame=max_frame,
            clamp=clamp,
        )
        for r in word_end_rows
    ]


def boundaries_to_transcript(
    words: list[str], boundaries: list[int], *, language: str = "en"
) -> TimedTranscript:
    """Apply the shared-boundary convention: word k runs from boundary k-1
    (frame 0 for the first word) to boundary k."""
    if len(words) != len(boundaries):
        raise LengthMismatch(
            f"{len(words)} words but {len(boundaries)} boundaries"
        )
    timed = []
    previous = 0
    for word, boundary in zip(words, boundaries):
        timed.append(TimedWord(word, previous, boundary))
        previous = boundary
    transcript = TimedTranscript(timed, mode=Mode.ASR, language=language)
    transcript.validate()
    return transcript
