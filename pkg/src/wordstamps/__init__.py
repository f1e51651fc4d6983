"""Word-level timestamp tooling around sequence-to-sequence speech models:
teacher forced alignment, inline timestamp-token encoding, cross-lingual
timestamp projection, a DTW attention baseline, and the evaluation metrics.
"""

from .codec import (
    DecodeResult,
    Rounding,
    decode_transcript,
    encode_transcript,
    frame_to_seconds,
    seconds_to_frame,
)
from .ctc import (
    AlignmentPath,
    EmissionMatrix,
    TokenSpan,
    Vocabulary,
    VocabEntry,
    ctc_viterbi_align,
    force_align_utterance,
    path_to_timed_tokens,
    tokens_to_words,
)
from .dtw import (
    AttentionMatrix,
    DtwPath,
    boundaries_to_transcript,
    dtw_align,
    path_to_boundaries,
)
from .metrics import (
    Normalization,
    TimestampReport,
    WordMatching,
    evaluate_corpus,
    match_words,
    threshold_sweep,
    timestamp_pr,
    timestamp_sd_ed,
    wer,
)
from .projection import (
    WordAlignment,
    build_ast_reference,
    parse_pharaoh,
    project_timestamps,
)
from .types import (
    FRAME_SECONDS,
    MAX_FRAME_INDEX,
    Mode,
    PromptStyle,
    TimedTranscript,
    TimedWord,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentPath",
    "AttentionMatrix",
    "DecodeResult",
    "DtwPath",
    "EmissionMatrix",
    "FRAME_SECONDS",
    "MAX_FRAME_INDEX",
    "Mode",
    "Normalization",
    "PromptStyle",
    "Rounding",
    "TimedTranscript",
    "TimedWord",
    "TimestampReport",
    "TokenSpan",
    "VocabEntry",
    "Vocabulary",
    "WordAlignment",
    "WordMatching",
    "boundaries_to_transcript",
    "build_ast_reference",
    "ctc_viterbi_align",
    "decode_transcript",
    "dtw_align",
    "encode_transcript",
    "evaluate_corpus",
    "force_align_utterance",
    "frame_to_seconds",
    "match_words",
    "parse_pharaoh",
    "path_to_boundaries",
    "path_to_timed_tokens",
    "project_timestamps",
    "seconds_to_frame",
    "threshold_sweep",
    "timestamp_pr",
    "timestamp_sd_ed",
    "tokens_to_words",
    "wer",
]
