"""Shared hypothesis strategies.

Scores and weights come from a coarse power-of-two grid (multiples of
1/64) so that any sum of a few dozen terms is exact in double precision:
score ties are then true ties regardless of summation order, which keeps
exact-equality oracle comparisons meaningful.
"""

from __future__ import annotations

import hypothesis.strategies as st

from wordstamps.types import MAX_FRAME_INDEX, Mode, TimedTranscript, TimedWord

word_texts = st.text(alphabet="abcdefgh", min_size=1, max_size=6)
languages = st.sampled_from(["en", "de", "es", "fr"])

grid_logprobs = st.integers(min_value=-320, max_value=0).map(lambda n: n / 64.0)
grid_weights = st.integers(min_value=0, max_value=64).map(lambda n: n / 64.0)


@st.composite
def asr_transcripts(draw, max_words: int = 8, max_frame: int = MAX_FRAME_INDEX):
    """Fully timed, monotone non-overlapping transcripts."""
    n = draw(st.integers(min_value=0, max_value=max_words))
    frames = sorted(
        draw(st.lists(st.integers(0, max_frame), min_size=2 * n, max_size=2 * n))
    )
    words = [
        TimedWord(draw(word_texts), frames[2 * i], frames[2 * i + 1]) for i in range(n)
    ]
    return TimedTranscript(words, Mode.ASR, draw(languages))


@st.composite
def ast_transcripts(draw, max_words: int = 8, max_frame: int = MAX_FRAME_INDEX):
    """Fully timed transcripts with no cross-word ordering."""
    n = draw(st.integers(min_value=0, max_value=max_words))
    words = []
    for _ in range(n):
        a = draw(st.integers(0, max_frame))
        b = draw(st.integers(0, max_frame))
        words.append(TimedWord(draw(word_texts), min(a, b), max(a, b)))
    return TimedTranscript(words, Mode.AST, draw(languages))


@st.composite
def scored_transcripts(draw, max_words: int = 6, allow_untimed: bool = True):
    """Transcripts for metric tests: tiny vocabulary, possibly untimed words."""
    n = draw(st.integers(min_value=0, max_value=max_words))
    words = []
    for _ in range(n):
        text = draw(st.sampled_from(["a", "b", "c", "d"]))
        if allow_untimed and draw(st.booleans()):
            words.append(TimedWord(text))
        else:
            a = draw(st.integers(0, 60))
            b = draw(st.integers(0, 60))
            words.append(TimedWord(text, min(a, b), max(a, b)))
    return TimedTranscript(words, Mode.AST, "en")


@st.composite
def ctc_instances(draw, max_frames: int = 6, max_labels: int = 4, max_target: int = 3):
    """(log_probs rows, blank, target) — the target may be infeasible."""
    frames = draw(st.integers(min_value=1, max_value=max_frames))
    labels = draw(st.integers(min_value=2, max_value=max_labels))
    blank = draw(st.integers(min_value=0, max_value=labels - 1))
    non_blank = [i for i in range(labels) if i != blank]
    target = draw(
        st.lists(st.sampled_from(non_blank), min_size=1, max_size=max_target)
    )
    log_probs = draw(
        st.lists(
            st.lists(grid_logprobs, min_size=labels, max_size=labels),
            min_size=frames,
            max_size=frames,
        )
    )
    return log_probs, blank, target


@st.composite
def attention_instances(draw, max_cells: int = 30):
    """Weight matrices with N*T small enough for path enumeration."""
    n = draw(st.integers(min_value=1, max_value=6))
    t = draw(st.integers(min_value=1, max_value=max(1, max_cells // n)))
    rows = draw(
        st.lists(
            st.lists(grid_weights, min_size=t, max_size=t), min_size=n, max_size=n
        )
    )
    return rows
