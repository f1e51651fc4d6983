"""The EMAT matrix file format for emissions and attention weights.

Binary layout: magic ``EMAT``, then four little-endian u32 fields
(version=1, T, V, blank_index), then T*V little-endian float32 values in
row-major (frame-major) order.  A whitespace text variant — header line
``T V blank_index`` followed by T rows — is accepted for fixtures.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import EmatError
from .fileio import atomic_write_bytes, atomic_write_text

MAGIC = b"EMAT"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def write_emat(
    path: str | Path,
    matrix: np.ndarray,
    blank_index: int = 0,
    *,
    text: bool = False,
) -> None:
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise EmatError(f"matrix must be 2-D, got shape {matrix.shape}")
    rows, cols = matrix.shape
    if text:
        lines = [f"{rows} {cols} {blank_index}"]
        for row in matrix:
            lines.append(" ".join(str(float(v)) for v in row))
        atomic_write_text(path, "\n".join(lines) + "\n")
        return
    header = _HEADER.pack(MAGIC, VERSION, rows, cols, blank_index)
    payload = matrix.astype("<f4", copy=False).tobytes()
    atomic_write_bytes(path, header + payload)


def read_emat(path: str | Path) -> tuple[np.ndarray, int]:
    """Load a matrix file; returns (float64 matrix, blank_index)."""
    raw = Path(path).read_bytes()
    if raw[:4] == MAGIC:
        return _read_binary(path, raw)
    return _read_text(path, raw)


def _read_binary(path: str | Path, raw: bytes) -> tuple[np.ndarray, int]:
    if len(raw) < _HEADER.size:
        raise EmatError(f"{path}: truncated header")
    _, version, rows, cols, blank = _HEADER.unpack_from(raw)
    if version != VERSION:
        raise EmatError(f"{path}: unsupported version {version}")
    if rows < 1 or cols < 1:
        raise EmatError(f"{path}: bad shape {rows}x{cols}")
    expected = _HEADER.size + 4 * rows * cols
    if len(raw) != expected:
        raise EmatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    matrix = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(rows, cols)
    return matrix.astype(np.float64), blank


def _read_text(path: str | Path, raw: bytes) -> tuple[np.ndarray, int]:
    try:
        content = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise EmatError(f"{path}: neither EMAT binary nor text") from None
    lines = [line for line in content.splitlines() if line.strip()]
    if not lines:
        raise EmatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 3:
        raise EmatError(f"{path}: header must be 'T V blank_index'")
    try:
        rows, cols, blank = (int(h) for h in header)
    except ValueError:
        raise EmatError(f"{path}: non-integer header {lines[0]!r}") from None
    if len(lines) - 1 != rows:
        raise EmatError(f"{path}: header promises {rows} rows, found {len(lines) - 1}")
    matrix = np.empty((rows, cols), dtype=np.float64)
    for i, line in enumerate(lines[1:]):
        values = line.split()
        if len(values) != cols:
            raise EmatError(f"{path}: row {i} has {len(values)} values, expected {cols}")
        try:
            matrix[i] = [float(v) for v in values]
        except ValueError:
            raise EmatError(f"{path}: non-numeric value in row {i}") from None
    # round-trip through float32 so both variants load identically
    return matrix.astype(np.float32).astype(np.float64), blank
