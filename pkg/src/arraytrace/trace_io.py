"""Readers and writers for the three trace file formats.

All three formats are line-oriented ASCII, single-space separated, LF
terminated. Files ending in ``.gz`` are decompressed transparently.

Raw access log (one access per line, ``.atrace``)::

    <arrayId> <mode> <index> <length> <thread> <line> <classHash>

    [Ljava.lang.Integer;@6e0be858 w 0 4 1 18 1A0C9142

Grouped per-array log (``.agrp``)::

    <arrayId> <length> <nAccesses>
    <mode> <index> <thread> <line> <classHash>     (nAccesses of these)

Class map (``.cmap``)::

    <hexHash> <name>

Array id hash tokens render as lowercase hex without padding; class hashes
render as uppercase hex. Malformed raw lines and truncated grouped blocks are
counted and skipped, never raised; unreadable files raise OSError.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple

from .model import HASH_TOKEN_MAX, AccessRecord, ArrayKey, Mode
from .errors import ValidationError

_MODES = {"r": Mode.READ, "w": Mode.WRITE}

MAX_STORED_DIAGNOSTICS = 100


class RawTraceLine(NamedTuple):
    key: ArrayKey
    record: AccessRecord


@dataclass
class ParseSummary:
    """Counts accumulated while parsing; merge() combines shard summaries."""

    lines: int = 0
    records: int = 0
    malformed: int = 0
    blocks: int = 0
    dropped_blocks: int = 0
    diagnostics: list[str] = field(default_factory=list)

    def note(self, message: str) -> None:
        if len(self.diagnostics) < MAX_STORED_DIAGNOSTICS:
            self.diagnostics.append(message)

    def merge(self, other: "ParseSummary") -> None:
        self.lines += other.lines
        self.records += other.records
        self.malformed += other.malformed
        self.blocks += other.blocks
        self.dropped_blocks += other.dropped_blocks
        for d in other.diagnostics:
            self.note(d)


def open_text(path: str | Path, mode: str = "rt") -> IO[str]:
    """Open a trace file, decompressing ``.gz`` transparently."""
    p = Path(path)
    if p.suffix == ".gz":
        return gzip.open(p, mode, encoding="utf-8", newline="\n" if "w" in mode else None)
    newline = "\n" if "w" in mode else None
    return open(p, mode, encoding="utf-8", newline=newline)


def ordered_input_paths(inputs: Iterable[str | Path]) -> list[Path]:
    """Expand directories recursively; order all files by path text."""
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(child for child in p.rglob("*") if child.is_file())
        else:
            paths.append(p)
    return sorted(paths, key=lambda p: str(p))


def parse_raw_fields(line: str) -> tuple[str, str, int, int, int, int, int] | None:
    """Parse one raw line to plain fields, or None when malformed.

    Returns (id_text, mode, index, length, thread, line_no, class_hash).
    This is the hot path shared by every raw reader; it validates exactly
    what the format promises and nothing more.
    """
    parts = line.split()
    if len(parts) != 7:
        return None
    id_text, mode, idx_s, len_s, thr_s, line_s, cls_s = parts
    if mode not in _MODES:
        return None
    try:
        index = int(idx_s)
        length = int(len_s)
        thread = int(thr_s)
        line_no = int(line_s)
        class_hash = int(cls_s, 16)
    except ValueError:
        return None
    if length < 1 or thread < 0 or line_no < -1:
        return None
    if not 0 <= class_hash <= HASH_TOKEN_MAX:
        return None
    if "@" not in id_text or id_text[0] != "[":
        return None
    return (id_text, mode, index, length, thread, line_no, class_hash)


class _KeyCache:
    """Memo from raw id text to ArrayKey; traces repeat ids heavily."""

    def __init__(self) -> None:
        self._cache: dict[str, ArrayKey | None] = {}

    def get(self, id_text: str) -> ArrayKey | None:
        key = self._cache.get(id_text, _MISSING)
        if key is _MISSING:
            try:
                key = ArrayKey.parse(id_text)
            except ValidationError:
                key = None
            self._cache[id_text] = key
        return key


_MISSING: object = object()


def parse_raw(lines: Iterable[str], summary: ParseSummary | None = None) -> Iterator[RawTraceLine]:
    """Stream RawTraceLine values from raw log lines.

    Malformed lines (wrong arity, bad numbers, invalid id) are counted in
    ``summary`` and skipped. Blank lines are ignored without being counted
    as malformed.
    """
    if summary is None:
        summary = ParseSummary()
    cache = _KeyCache()
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        summary.lines += 1
        fields = parse_raw_fields(line)
        key = cache.get(fields[0]) if fields else None
        if fields is None or key is None:
            summary.malformed += 1
            summary.note(f"line {n}: malformed raw record: {line.strip()!r}")
            continue
        summary.records += 1
        yield RawTraceLine(
            key,
            AccessRecord(_MODES[fields[1]], fields[2], fields[3], fields[4], fields[5], fields[6]),
        )


def format_raw_line(key: ArrayKey, rec: AccessRecord) -> str:
    return (
        f"{key.type.raw}@{key.hash_token:x} {rec.mode.value} {rec.index} "
        f"{rec.length} {rec.thread} {rec.line} {rec.class_hash:X}"
    )


def write_raw(items: Iterable[RawTraceLine], sink: IO[str]) -> int:
    """Write raw lines; returns the number written."""
    n = 0
    for key, rec in items:
        sink.write(format_raw_line(key, rec))
        sink.write("\n")
        n += 1
    return n


# Grouped format. Records inside a block drop the length field: the header
# carries one length for the whole block.

GroupedRecord = tuple[Mode, int, int, int, int]  # mode, index, thread, line, class_hash


@dataclass
class GroupedArrayBlock:
    key: ArrayKey
    length: int
    records: list[GroupedRecord]

    @property
    def n_accesses(self) -> int:
        return len(self.records)

    def access_records(self) -> Iterator[AccessRecord]:
        """View records as AccessRecord using the header length throughout."""
        length = self.length
        for mode, index, thread, line, class_hash in self.records:
            yield AccessRecord(mode, index, length, thread, line, class_hash)


def _parse_grouped_header(line: str) -> tuple[ArrayKey, int, int] | None:
    parts = line.split()
    if len(parts) != 3:
        return None
    try:
        key = ArrayKey.parse(parts[0])
        length = int(parts[1])
        n = int(parts[2])
    except (ValidationError, ValueError):
        return None
    if length < 1 or n < 1:
        return None
    return key, length, n


def _parse_grouped_record(line: str) -> GroupedRecord | None:
    parts = line.split()
    if len(parts) != 5 or parts[0] not in _MODES:
        return None
    try:
        index = int(parts[1])
        thread = int(parts[2])
        line_no = int(parts[3])
        class_hash = int(parts[4], 16)
    except ValueError:
        return None
    if thread < 0 or line_no < -1 or not 0 <= class_hash <= HASH_TOKEN_MAX:
        return None
    return (_MODES[parts[0]], index, thread, line_no, class_hash)


def parse_grouped(lines: Iterable[str], summary: ParseSummary | None = None) -> Iterator[GroupedArrayBlock]:
    """Stream blocks from a grouped file.

    A block whose record lines are missing, malformed, or cut off by EOF is
    dropped whole with a diagnostic; parsing resumes at the offending line,
    which is retried as a header.
    """
    if summary is None:
        summary = ParseSummary()
    it = iter(lines)
    pending: str | None = None
    while True:
        if pending is not None:
            line, pending = pending, None
        else:
            line = next(it, None)
            if line is None:
                return
        if not line.strip():
            continue
        summary.lines += 1
        header = _parse_grouped_header(line)
        if header is None:
            summary.dropped_blocks += 1
            summary.note(f"unparseable grouped header: {line.strip()!r}")
            continue
        key, length, n = header
        records: list[GroupedRecord] = []
        broken = False
        for _ in range(n):
            rec_line = next(it, None)
            if rec_line is None:
                summary.dropped_blocks += 1
                summary.note(f"block {key.id_text}: EOF after {len(records)} of {n} records")
                return
            summary.lines += 1
            rec = _parse_grouped_record(rec_line)
            if rec is None:
                summary.dropped_blocks += 1
                summary.note(
                    f"block {key.id_text}: bad record after {len(records)} of {n}: {rec_line.strip()!r}"
                )
                # The line may be the next block's header; retry it as one.
                summary.lines -= 1
                pending = rec_line
                broken = True
                break
            records.append(rec)
        if broken:
            continue
        summary.blocks += 1
        summary.records += n
        yield GroupedArrayBlock(key=key, length=length, records=records)


def write_grouped(blocks: Iterable[GroupedArrayBlock], sink: IO[str]) -> int:
    """Write grouped blocks; returns the number of blocks written."""
    n = 0
    for block in blocks:
        if not block.records:
            raise ValidationError(f"grouped block {block.key.id_text} has no records")
        sink.write(f"{block.key.id_text} {block.length} {len(block.records)}\n")
        for mode, index, thread, line, class_hash in block.records:
            sink.write(f"{mode.value} {index} {thread} {line} {class_hash:X}\n")
        n += 1
    return n


@dataclass
class ClassMap:
    """Mapping from 32-bit class hash tokens to class names.

    Hash collisions are possible by design; colliding entries keep the first
    name and are recorded in ``collisions``.
    """

    entries: dict[int, str] = field(default_factory=dict)
    collisions: list[tuple[int, str, str]] = field(default_factory=list)

    def lookup(self, class_hash: int) -> str | None:
        return self.entries.get(class_hash)

    def add(self, class_hash: int, name: str) -> None:
        existing = self.entries.get(class_hash)
        if existing is None:
            self.entries[class_hash] = name
        elif existing != name:
            self.collisions.append((class_hash, existing, name))


def parse_class_map(lines: Iterable[str], summary: ParseSummary | None = None) -> ClassMap:
    if summary is None:
        summary = ParseSummary()
    cmap = ClassMap()
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        summary.lines += 1
        parts = line.split(None, 1)
        if len(parts) != 2:
            summary.malformed += 1
            summary.note(f"class map line {n}: expected '<hex> <name>'")
            continue
        try:
            class_hash = int(parts[0], 16)
        except ValueError:
            summary.malformed += 1
            summary.note(f"class map line {n}: bad hash {parts[0]!r}")
            continue
        if not 0 <= class_hash <= HASH_TOKEN_MAX:
            summary.malformed += 1
            summary.note(f"class map line {n}: hash out of range")
            continue
        cmap.add(class_hash, parts[1].strip())
    return cmap


def write_class_map(cmap: ClassMap, sink: IO[str]) -> int:
    n = 0
    for class_hash in sorted(cmap.entries):
        sink.write(f"{class_hash:X} {cmap.entries[class_hash]}\n")
        n += 1
    return n


def iter_raw_paths(paths: Iterable[str | Path], summary: ParseSummary | None = None) -> Iterator[RawTraceLine]:
    """Stream raw records from many files in lexicographic name order."""
    for path in ordered_input_paths(paths):
        with open_text(path) as f:
            yield from parse_raw(f, summary)


def grouped_byte_ranges(
    path: str | Path, n_chunks: int, min_chunk: int = 1 << 20
) -> list[tuple[int, int]]:
    """Even byte splits of a plain grouped file for range readers.

    Collapses to one range when the file is small or compressed (gz cannot
    be seeked into mid-stream).
    """
    p = Path(path)
    size = p.stat().st_size
    if p.suffix == ".gz" or n_chunks < 2 or size < 2 * min_chunk:
        return [(0, size)]
    n = min(n_chunks, max(2, size // min_chunk))
    step = size // n
    bounds = [0] + [step * i for i in range(1, n)] + [size]
    return list(zip(bounds, bounds[1:]))


def read_grouped_range(
    path: str | Path, start: int, end: int, summary: ParseSummary | None = None
) -> Iterator[GroupedArrayBlock]:
    """Stream the blocks whose header line starts within one byte range.

    Ranges follow the usual splitting convention: a range owns the lines
    whose first byte lies in (start, end], except the first range which
    also owns offset 0. A block's record lines may extend past ``end``;
    they are consumed here and skipped by the next range's reader. On
    well-formed files, concatenating all ranges equals parse_grouped();
    on malformed files only the diagnostics may differ.
    """
    if summary is None:
        summary = ParseSummary()
    with open(path, "rb") as f:
        f.seek(start)
        pos = start
        if start > 0:
            pos += len(f.readline())
        synced = start == 0
        pending: str | None = None
        while True:
            if pending is not None:
                text, pending = pending, None
            else:
                if pos > end:
                    return
                raw = f.readline()
                if not raw:
                    return
                pos += len(raw)
                text = raw.decode("ascii", "replace")
            if not text.strip():
                continue
            header = _parse_grouped_header(text)
            if header is None:
                if synced:
                    summary.lines += 1
                    summary.dropped_blocks += 1
                    summary.note(f"unparseable grouped header: {text.strip()!r}")
                continue
            synced = True
            summary.lines += 1
            key, length, n_records = header
            records: list[GroupedRecord] = []
            broken = False
            for _ in range(n_records):
                rec_start = pos
                raw = f.readline()
                if not raw:
                    summary.dropped_blocks += 1
                    summary.note(
                        f"block {key.id_text}: EOF after {len(records)} of {n_records} records"
                    )
                    return
                pos += len(raw)
                rec_text = raw.decode("ascii", "replace")
                rec = _parse_grouped_record(rec_text)
                if rec is None:
                    summary.dropped_blocks += 1
                    summary.note(
                        f"block {key.id_text}: bad record after "
                        f"{len(records)} of {n_records}: {rec_text.strip()!r}"
                    )
                    if rec_start <= end:
                        pending = rec_text
                    broken = True
                    break
                summary.lines += 1
                records.append(rec)
            if broken:
                continue
            summary.blocks += 1
            summary.records += n_records
            yield GroupedArrayBlock(key=key, length=length, records=records)
