"""JSON Lines manifests: one utterance record per line.

Schema per line::

    {"utt_id": str, "text": str?, "lang": str, "mode": "asr"|"ast",
     "prompt": "timestamp"|"notimestamp"?,
     "words": [{"w": str, "s": int?, "e": int?}]?,
     "alignment": "0-0 1-2 ..."?, "word_end_rows": [int]?,
     "emission_frame_s": float?, "attention_frame_s": float?}

Unknown keys are preserved and written back verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .errors import InvariantViolation, ManifestError
from .fileio import atomic_write_text
from .types import Mode, PromptStyle, TimedTranscript, TimedWord

_KNOWN_KEYS = {
    "utt_id",
    "text",
    "lang",
    "mode",
    "prompt",
    "words",
    "alignment",
    "word_end_rows",
    "emission_frame_s",
    "attention_frame_s",
}


@dataclass
class Utterance:
    """One manifest line."""

    utt_id: str
    text: str | None = None
    lang: str = "en"
    mode: Mode = Mode.ASR
    prompt: PromptStyle | None = None
    words: list[TimedWord] | None = None
    alignment: str | None = None
    word_end_rows: list[int] | None = None
    emission_frame_s: float | None = None
    attention_frame_s: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def transcript(self) -> TimedTranscript:
        if self.words is None:
            raise ManifestError(f"utterance {self.utt_id!r} carries no timed words")
        return TimedTranscript(list(self.words), mode=self.mode, language=self.lang)

    def to_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {"utt_id": self.utt_id}
        if self.text is not None:
            record["text"] = self.text
        record["lang"] = self.lang
        record["mode"] = self.mode.value
        if self.prompt is not None:
            record["prompt"] = self.prompt.value
        if self.words is not None:
            rendered = []
            for w in self.words:
                entry: dict[str, Any] = {"w": w.text}
                if w.start is not None:
                    entry["s"] = w.start
                if w.end is not None:
                    entry["e"] = w.end
                rendered.append(entry)
            record["words"] = rendered
        if self.alignment is not None:
            record["alignment"] = self.alignment
        if self.word_end_rows is not None:
            record["word_end_rows"] = list(self.word_end_rows)
        if self.emission_frame_s is not None:
            record["emission_frame_s"] = self.emission_frame_s
        if self.attention_frame_s is not None:
            record["attention_frame_s"] = self.attention_frame_s
        record.update(self.extra)
        return record

    @classmethod
    def from_dict(cls, record: dict[str, Any], *, where: str = "manifest") -> "Utterance":
        if not isinstance(record, dict):
            raise ManifestError(f"{where}: line is not a JSON object")
        utt_id = record.get("utt_id")
        if not isinstance(utt_id, str) or not utt_id:
            raise ManifestError(f"{where}: missing or empty utt_id")

        def fail(message: str) -> ManifestError:
            return ManifestError(f"{where} ({utt_id}): {message}")

        text = record.get("text")
        if text is not None and not isinstance(text, str):
            raise fail("text must be a string")
        lang = record.get("lang", "en")
        if not isinstance(lang, str) or not lang:
            raise fail("lang must be a non-empty string")
        try:
            mode = Mode(record.get("mode", "asr"))
        except ValueError:
            raise fail(f"unknown mode {record.get('mode')!r}") from None
        prompt = None
        if record.get("prompt") is not None:
            try:
                prompt = PromptStyle(record["prompt"])
            except ValueError:
                raise fail(f"unknown prompt {record.get('prompt')!r}") from None

        words = None
        if record.get("words") is not None:
            if not isinstance(record["words"], list):
                raise fail("words must be a list")
            words = []
            for entry in record["words"]:
                if not isinstance(entry, dict) or "w" not in entry:
                    raise fail(f"bad word entry {entry!r}")
                try:
                    words.append(TimedWord(entry["w"], entry.get("s"), entry.get("e")))
                except InvariantViolation as exc:
                    raise fail(str(exc)) from None

        alignment = record.get("alignment")
        if alignment is not None and not isinstance(alignment, str):
            raise fail("alignment must be a string of i-j pairs")
        rows = record.get("word_end_rows")
        if rows is not None:
            if not isinstance(rows, list) or not all(
                isinstance(r, int) and not isinstance(r, bool) for r in rows
            ):
                raise fail("word_end_rows must be a list of ints")
        for key in ("emission_frame_s", "attention_frame_s"):
            value = record.get(key)
            if value is not None and (
                not isinstance(value, (int, float)) or value <= 0
            ):
                raise fail(f"{key} must be a positive number")

        extra = {k: v for k, v in record.items() if k not in _KNOWN_KEYS}
        return cls(
            utt_id=utt_id,
            text=text,
            lang=lang,
            mode=mode,
            prompt=prompt,
            words=words,
            alignment=alignment,
            word_end_rows=rows,
            emission_frame_s=record.get("emission_frame_s"),
            attention_frame_s=record.get("attention_frame_s"),
            extra=extra,
        )


def read_manifest(path: str | Path) -> list[Utterance]:
    utterances = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            utterances.append(Utterance.from_dict(record, where=f"{path}:{lineno}"))
    return utterances


def write_manifest(path: str | Path, utterances: Iterable[Utterance]) -> int:
    lines = [json.dumps(u.to_dict(), ensure_ascii=False) for u in utterances]
    atomic_write_text(path, "".join(line + "\n" for line in lines))
    return len(lines)
