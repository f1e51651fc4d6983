"""Frame/second conversion and the inline timestamp-token transcript codec.

A timed transcript is rendered as a flat token sequence where each word is
wrapped by its boundaries: ``<|3|> classifying <|14|> <|15|> was <|16|>``.
The no-timestamp rendering keeps only the words.  Decoding is the robust
inverse: it tolerates missing timestamps (the word comes back untimed) and
reports, rather than rejects, non-monotone output.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .errors import FrameOutOfRange, InvalidTime, ParseError
from .types import (
    FRAME_SECONDS,
    MAX_FRAME_INDEX,
    _TIMESTAMP_SYNTAX,
    Mode,
    PromptStyle,
    TimedTranscript,
    TimedWord,
)

# anything delimited like a timestamp token, valid or not
_TOKEN_SHAPE = re.compile(r"<\|.*\|>", re.DOTALL)

# absorbs float error at bucket boundaries, e.g. 0.12 / 0.08 -> 1.4999...
_EPS = 1e-9


class Rounding(str, Enum):
    FLOOR = "floor"
    NEAREST = "nearest"  # round half up


def seconds_to_frame(
    t: float,
    rounding: Rounding = Rounding.FLOOR,
    *,
    frame_s: float = FRAME_SECONDS,
    max_frame: int = MAX_FRAME_INDEX,
    clamp: bool = False,
) -> int:
    """Convert a time in seconds to a frame index.

    Floor matches frame-bucket semantics and is the default; Nearest rounds
    half up.  Times beyond ``max_frame`` raise FrameOutOfRange unless
    ``clamp`` is set.
    """
    if not isinstance(t, (int, float)) or not math.isfinite(t) or t < 0:
        raise InvalidTime(f"time must be a finite non-negative number, got {t!r}")
    quotient = t / frame_s
    if rounding is Rounding.FLOOR:
        frame = math.floor(quotient + _EPS)
    else:
        frame = math.floor(quotient + 0.5 + _EPS)
    if frame > max_frame:
        if clamp:
            return max_frame
        raise FrameOutOfRange(
            f"{t} s falls in frame {frame}, beyond frame {max_frame} "
            f"({max_frame * frame_s:g} s)"
        )
    return frame


def frame_to_seconds(frame: int, *, frame_s: float = FRAME_SECONDS) -> float:
    """Left edge of a frame bucket, in seconds."""
    return frame * frame_s


def format_timestamp_token(frame: int) -> str:
    return f"<|{frame}|>"


def parse_timestamp_token(token: str, *, max_frame: int = MAX_FRAME_INDEX) -> int | None:
    """Return the frame index of a timestamp token, or None for a plain word.

    Raises ParseError when the token uses timestamp delimiters but does not
    hold a frame index in range, or embeds timestamp syntax inside a word.
    """
    if _TOKEN_SHAPE.fullmatch(token):
        inner = token[2:-2]
        if not (inner.isascii() and inner.isdigit()):
            raise ParseError(f"malformed timestamp token: {token!r}")
        frame = int(inner)
        if frame > max_frame:
            raise ParseError(
                f"timestamp token {token!r} beyond maximum frame {max_frame}"
            )
        return frame
    if _TIMESTAMP_SYNTAX.search(token):
        raise ParseError(f"timestamp syntax embedded in word: {token!r}")
    return None


def encode_transcript(
    transcript: TimedTranscript,
    style: PromptStyle,
    *,
    validate: bool = True,
) -> list[str]:
    """Render a transcript as a token sequence.

    Timestamp style wraps each word as ``<|start|> word <|end|>``; a missing
    boundary is simply not emitted, so untimed words come out bare.  The
    no-timestamp style keeps only the words.  Prompt tokens are manifest
    metadata and never appear in the output.
    """
    if validate:
        transcript.validate()
    tokens: list[str] = []
    for word in transcript.words:
        if style is PromptStyle.TIMESTAMP and word.start is not None:
            tokens.append(format_timestamp_token(word.start))
        tokens.append(word.text)
        if style is PromptStyle.TIMESTAMP and word.end is not None:
            tokens.append(format_timestamp_token(word.end))
    return tokens


@dataclass
class DecodeResult:
    """Decoded transcript plus malformation flags.

    ``monotonic`` is the ASR-mode ordering check (always True in AST mode);
    ``orphan_timestamps`` counts timestamp tokens that attached to no word;
    ``reversed_spans`` counts words whose timestamps arrived end-before-start
    and were therefore dropped (the word is kept, untimed).
    """

    transcript: TimedTranscript
    monotonic: bool = True
    orphan_timestamps: int = 0
    reversed_spans: int = 0


def decode_transcript(
    tokens: list[str],
    mode: Mode = Mode.ASR,
    language: str = "en",
    *,
    max_frame: int = MAX_FRAME_INDEX,
) -> DecodeResult:
    """Parse a token sequence back into a timed transcript.

    Binding is left to right: the first timestamp after a word is its end,
    and the last unclaimed timestamp before a word is its start.  A mixed
    sequence of timed and untimed words is inherently ambiguous under this
    format; well-formed output (every word fully timed, or fully bare)
    round-trips exactly.  Words missing either boundary are kept and
    flagged untimed.  Only malformed timestamp-token syntax raises.
    """
    words: list[TimedWord] = []
    pending_start: int | None = None
    awaiting_end: int | None = None  # index of the last word missing its end
    orphans = 0
    reversed_spans = 0
    for token in tokens:
        frame = parse_timestamp_token(token, max_frame=max_frame)
        if frame is None:
            words.append(TimedWord(token, start=pending_start))
            pending_start = None
            awaiting_end = len(words) - 1
        elif awaiting_end is not None:
            word = words[awaiting_end]
            if word.start is not None and frame < word.start:
                # end before start: drop both, keep the word untimed
                words[awaiting_end] = TimedWord(word.text)
                reversed_spans += 1
            else:
                words[awaiting_end] = TimedWord(word.text, word.start, frame)
            awaiting_end = None
        else:
            if pending_start is not None:
                orphans += 1
            pending_start = frame
    if pending_start is not None:
        orphans += 1

    transcript = TimedTranscript(words, mode=mode, language=language)
    monotonic = mode is not Mode.ASR or transcript.is_monotonic()
    return DecodeResult(transcript, monotonic, orphans, reversed_spans)


def tokens_to_text(tokens: list[str]) -> str:
    return " ".join(tokens)


def text_to_tokens(text: str) -> list[str]:
    return text.split()
