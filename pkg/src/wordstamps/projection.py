"""Cross-lingual timestamp projection for translation targets.

Source-word timestamps are copied onto the target words they align to.
When several source words map to one target word, the target span is the
min-start/max-end closure over them — the only order-independent choice.
Target words with no aligned source come out untimed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import IndexOutOfRange, ParseError
from .types import Mode, TimedTranscript, TimedWord

_PAIR = re.compile(r"(\d+)-(\d+)")


@dataclass(frozen=True)
class WordAlignment:
    """Pharaoh-style set of (source index, target index) links."""

    pairs: frozenset[tuple[int, int]]

    def sources_of(self, target_index: int) -> list[int]:
        return sorted(i for i, j in self.pairs if j == target_index)

    def check_lengths(self, src_len: int, tgt_len: int) -> None:
        for i, j in self.pairs:
            if i >= src_len or j >= tgt_len:
                raise IndexOutOfRange(
                    f"pair {i}-{j} outside sentence lengths {src_len}/{tgt_len}"
                )


def parse_pharaoh(s: str, src_len: int, tgt_len: int) -> WordAlignment:
    """Parse whitespace-separated ``i-j`` pairs and validate their ranges."""
    pairs = set()
    for token in s.split():
        match = _PAIR.fullmatch(token)
        if match is None:
            raise ParseError(f"malformed alignment pair: {token!r}")
        pairs.add((int(match.group(1)), int(match.group(2))))
    alignment = WordAlignment(frozenset(pairs))
    alignment.check_lengths(src_len, tgt_len)
    return alignment


def project_timestamps(
    src: TimedTranscript,
    tgt_words: list[str],
    alignment: WordAlignment,
    *,
    language: str | None = None,
    interpolate_untimed: bool = False,
) -> TimedTranscript:
    """Copy source-word spans onto target words through the alignment.

    Target word order is preserved and the result is AST mode: reordering
    between the languages makes the copied timestamps non-monotone.
    ``interpolate_untimed`` fills unaligned words from their timed
    neighbours; it is a heuristic extension to the copy rule, off by
    default.
    """
    alignment.check_lengths(len(src.words), len(tgt_words))
    words: list[TimedWord] = []
    for j, text in enumerate(tgt_words):
        sources = [
            src.words[i] for i in alignment.sources_of(j) if src.words[i].is_timed
        ]
        if sources:
            start = min(w.start for w in sources)
            end = max(w.end for w in sources)
            words.append(TimedWord(text, start, end))
        else:
            words.append(TimedWord(text))
    if interpolate_untimed:
        words = _interpolate(words)
    return TimedTranscript(
        words, mode=Mode.AST, language=language if language is not None else src.language
    )


def build_ast_reference(
    src: TimedTranscript,
    hyp_words: list[str],
    alignment: WordAlignment,
    *,
    language: str | None = None,
) -> TimedTranscript:
    """Project source spans onto a hypothesis's own words.

    Aligning against the hypothesis word sequence (timestamps removed)
    instead of an independent translation gives every hypothesis word a
    one-to-one reference counterpart, so timestamp accuracy can be scored
    without penalizing translation wording differences.
    """
    return project_timestamps(src, hyp_words, alignment, language=language)


def _interpolate(words: list[TimedWord]) -> list[TimedWord]:
    timed_idx = [i for i, w in enumerate(words) if w.is_timed]
    if not timed_idx:
        return words
    filled = list(words)
    for i, word in enumerate(words):
        if word.is_timed:
            continue
        prev_end = next(
            (words[k].end for k in reversed(timed_idx) if k < i), None
        )
        next_start = next((words[k].start for k in timed_idx if k > i), None)
        a = prev_end if prev_end is not None else next_start
        b = next_start if next_start is not None else prev_end
        filled[i] = TimedWord(word.text, min(a, b), max(a, b))
    return filled


@dataclass
class ProjectionDiagnostics:
    """Counters describing how the alignment fed the copy rule."""

    targets: int = 0
    untimed_targets: int = 0  # no aligned (timed) source word
    noncontiguous_targets: int = 0  # aligned to a non-consecutive source set


def projection_diagnostics(
    src: TimedTranscript, tgt_words: list[str], alignment: WordAlignment
) -> ProjectionDiagnostics:
    alignment.check_lengths(len(src.words), len(tgt_words))
    diag = ProjectionDiagnostics(targets=len(tgt_words))
    for j in range(len(tgt_words)):
        sources = alignment.sources_of(j)
        timed = [i for i in sources if src.words[i].is_timed]
        if not timed:
            diag.untimed_targets += 1
        if sources and sources[-1] - sources[0] + 1 != len(sources):
            diag.noncontiguous_targets += 1
    return diag
