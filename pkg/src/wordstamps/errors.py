"""Exception hierarchy shared across the toolkit."""


class WordstampsError(Exception):
    """Base class for every error raised by this package."""


class InvalidTime(WordstampsError):
    """A time value is negative or not finite."""


class FrameOutOfRange(WordstampsError):
    """A computed frame index exceeds the maximum frame."""


class InvariantViolation(WordstampsError):
    """A domain object would violate one of its invariants."""


class ParseError(WordstampsError):
    """Malformed timestamp-token or alignment-pair syntax."""


class InvalidTokenId(WordstampsError):
    """An alignment target contains an id outside the vocabulary (or the blank)."""


class InfeasibleTarget(WordstampsError):
    """No valid alignment path exists (target too long for the frame count)."""


class OrphanToken(WordstampsError):
    """A token sequence does not start with a word-begin token."""


class UnlexicalizableWord(WordstampsError):
    """A word has no entry in the lexicon."""


class RowOutOfRange(WordstampsError):
    """A word-end row index is outside the attention matrix."""


class LengthMismatch(WordstampsError):
    """Parallel lists that must have equal length do not."""


class IndexOutOfRange(WordstampsError):
    """A word-alignment pair points outside its sentence."""


class EmptyReference(WordstampsError):
    """WER is undefined for an empty reference."""


class ManifestError(WordstampsError):
    """A manifest line is missing fields or carries the wrong types."""


class EmatError(WordstampsError):
    """An emission/attention matrix file is malformed."""


class ConfigError(WordstampsError):
    """Bad configuration file, value, or command-line usage."""
