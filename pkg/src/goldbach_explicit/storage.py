"""Binary containers for cached arithmetic arrays.

Layout (little endian)::

    offset 0   4 bytes   magic, e.g. b"LAMB" or b"PSI2"
    offset 4   u32       format version
    offset 8   u64       T, number of stored entries
    offset 16  T * f64   payload, entry i holds the value at n = i + 1
    [optional] trailer bytes, format defined by the caller

A file is valid only if every section is present and the payload is finite.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

HEADER = struct.Struct("<4sIQ")
VERSION = 1


class CacheCorruption(ValueError):
    """A cache file failed validation.

    Attributes:
        path: offending file.
        offset: byte offset where the problem was detected.
    """

    def __init__(self, path: Path | str, offset: int, reason: str):
        self.path = Path(path)
        self.offset = offset
        self.reason = reason
        super().__init__(f"{self.path}: corrupt at byte offset {offset}: {reason}")


def write_container(path: Path | str, magic: bytes, values: np.ndarray,
                    trailer: bytes = b"") -> None:
    """Atomically write ``values`` (entries for n = 1..T) to ``path``."""
    path = Path(path)
    payload = np.ascontiguousarray(values, dtype="<f8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(HEADER.pack(magic, VERSION, payload.size))
        fh.write(payload.tobytes())
        fh.write(trailer)
    tmp.replace(path)


def read_container(path: Path | str, magic: bytes,
                   trailer_size: int = 0) -> tuple[np.ndarray, bytes]:
    """Read and validate a container written by :func:`write_container`.

    Returns:
        ``(values, trailer)`` where ``values[i]`` is the entry for n = i + 1.

    Raises:
        CacheCorruption: on any header, size or payload violation.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER.size:
        raise CacheCorruption(path, len(raw), "truncated header")
    got_magic, version, count = HEADER.unpack_from(raw, 0)
    if got_magic != magic:
        raise CacheCorruption(path, 0, f"bad magic {got_magic!r}, expected {magic!r}")
    if version != VERSION:
        raise CacheCorruption(path, 4, f"unsupported version {version}")
    expected = HEADER.size + 8 * count + trailer_size
    if len(raw) != expected:
        raise CacheCorruption(path, min(len(raw), expected),
                              f"file size {len(raw)} does not match header (expected {expected})")
    values = np.frombuffer(raw, dtype="<f8", count=count, offset=HEADER.size).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise CacheCorruption(path, HEADER.size + 8 * int(bad[0]), "non-finite payload entry")
    return values, raw[HEADER.size + 8 * count:]


def peek_count(path: Path | str, magic: bytes) -> int | None:
    """Return T from a container header, or None if the file is absent or foreign."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(HEADER.size)
    except FileNotFoundError:
        return None
    if len(head) < HEADER.size:
        return None
    got_magic, version, count = HEADER.unpack(head)
    if got_magic != magic or version != VERSION:
        return None
    return count
