"""Core domain types: words and transcripts timed on an 80 ms frame grid.

Frame indices are integers in [0, 450]; one frame is 80 ms, so index 450
marks the 36 s ceiling.  A word may be "untimed" (both frames missing),
which happens when a hypothesis omits its timestamps or a translated word
has no aligned source word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import InvariantViolation

FRAME_SECONDS = 0.080  # duration of one frame bucket
MAX_FRAME_INDEX = 450  # 36 s of audio at 80 ms per frame

# any substring that would parse as a timestamp token
_TIMESTAMP_SYNTAX = re.compile(r"<\|\d+\|>")


class Mode(str, Enum):
    """Task a transcript belongs to; AST transcripts keep source-speech times."""

    ASR = "asr"
    AST = "ast"


class PromptStyle(str, Enum):
    """The two training-target renderings: with or without inline timestamps."""

    TIMESTAMP = "timestamp"
    NOTIMESTAMP = "notimestamp"


@dataclass
class TimedWord:
    """A single word with optional start/end frame indices."""

    text: str
    start: int | None = None  # frame index, None if unknown
    end: int | None = None

    def __post_init__(self) -> None:
        if not self.text or self.text.split() != [self.text]:
            raise InvariantViolation(
                f"word text must be non-empty with no whitespace: {self.text!r}"
            )
        if _TIMESTAMP_SYNTAX.search(self.text):
            raise InvariantViolation(
                f"word text contains timestamp-token syntax: {self.text!r}"
            )
        for name, value in (("start", self.start), ("end", self.end)):
            if value is None:
                continue
            if not isinstance(value, int):
                raise InvariantViolation(f"{name} frame must be an int, got {value!r}")
            if not 0 <= value <= MAX_FRAME_INDEX:
                raise InvariantViolation(
                    f"{name} frame {value} outside [0, {MAX_FRAME_INDEX}]"
                )
        if self.start is not None and self.end is not None and self.start > self.end:
            raise InvariantViolation(
                f"word {self.text!r} has start {self.start} after end {self.end}"
            )

    @property
    def is_timed(self) -> bool:
        """True when both boundaries are present."""
        return self.start is not None and self.end is not None

    @property
    def duration_frames(self) -> int | None:
        """Inclusive bucket count covered by the word (reporting only)."""
        if not self.is_timed:
            return None
        return self.end - self.start + 1


@dataclass
class TimedTranscript:
    """An ordered list of timed words plus task metadata.

    ASR transcripts must be monotone: each timed word ends no later than
    the next timed word starts.  AST transcripts carry source-speech
    times for translated words, which reordering makes non-monotone, so
    no cross-word constraint applies.
    """

    words: list[TimedWord] = field(default_factory=list)
    mode: Mode = Mode.ASR
    language: str = "en"

    def __len__(self) -> int:
        return len(self.words)

    @property
    def texts(self) -> list[str]:
        return [w.text for w in self.words]

    @property
    def timed_count(self) -> int:
        return sum(1 for w in self.words if w.is_timed)

    @property
    def untimed_indices(self) -> list[int]:
        return [i for i, w in enumerate(self.words) if not w.is_timed]

    def monotonicity_violations(self) -> list[int]:
        """Indices i where timed word i ends after the next timed word starts.

        Untimed words are skipped: the constraint applies between each timed
        word and the nearest timed word after it.
        """
        violations = []
        prev_idx: int | None = None
        for i, w in enumerate(self.words):
            if not w.is_timed:
                continue
            if prev_idx is not None and self.words[prev_idx].end > w.start:
                violations.append(prev_idx)
            prev_idx = i
        return violations

    def is_monotonic(self) -> bool:
        return not self.monotonicity_violations()

    def validate(self) -> None:
        """Raise InvariantViolation if the mode's ordering constraint fails."""
        if self.mode is Mode.ASR:
            bad = self.monotonicity_violations()
            if bad:
                w = self.words[bad[0]]
                raise InvariantViolation(
                    f"asr transcript is not monotone at word {bad[0]} "
                    f"({w.text!r} ends at {w.end})"
                )
