"""Grouping raw access streams per array and deduplicating patterns.

The group-by is external: pass 1 fans raw lines out to hash partitions on
disk, pass 2 loads one partition at a time (enforcing the memory budget),
sorts its keys, and the partition streams are merged back into one stream
ordered by (type, hash token). Record order within an array is preserved.

The memory budget is approximate: a partition is rejected when its
serialized size times a fixed expansion factor exceeds the budget, since
parsed records cost several times their text form.
"""

from __future__ import annotations

import heapq
import os
import shutil
import tempfile
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from hashlib import blake2b
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ResourceBudgetError, ValidationError
from .model import AccessPattern, AccessRecord, ArrayKey
from .trace_io import (
    ParseSummary,
    _MODES,
    open_text,
    ordered_input_paths,
    parse_raw_fields,
)

DEFAULT_MEM_BUDGET = 256 * 1024 * 1024
DEFAULT_PARTITIONS = 64

# Parsed records occupy several times their serialized size; the budget
# check multiplies partition bytes by this before comparing.
MEM_EXPANSION_FACTOR = 4

SPILL_DIR_ENV = "ARRAYTRACE_TMP"


@dataclass(frozen=True)
class ArrayTrace:
    """All accesses attributed to one ArrayKey, in observed order."""

    key: ArrayKey
    records: tuple[AccessRecord, ...]

    @property
    def n_accesses(self) -> int:
        return len(self.records)

    @cached_property
    def lengths_seen(self) -> tuple[int, ...]:
        """Distinct observed lengths in order of first appearance."""
        seen: list[int] = []
        last = None
        known: set[int] = set()
        for rec in self.records:
            if rec.length != last:
                last = rec.length
                if rec.length not in known:
                    known.add(rec.length)
                    seen.append(rec.length)
        return tuple(seen)

    @cached_property
    def max_length(self) -> int:
        return max(rec.length for rec in self.records)

    @cached_property
    def distinct_threads(self) -> frozenset[int]:
        return frozenset(rec.thread for rec in self.records)

    @cached_property
    def distinct_classes(self) -> frozenset[int]:
        return frozenset(rec.class_hash for rec in self.records)

    def pattern(self) -> AccessPattern:
        return normalize_threads(self.records)


def normalize_threads(records: Iterable[AccessRecord]) -> AccessPattern:
    """Project records to (index, mode, thread) with threads renamed 1..k.

    Thread ids are assigned in order of first appearance, so the result is
    invariant under any relabeling of raw thread ids.
    """
    mapping: dict[int, int] = {}
    entries = []
    for rec in records:
        t = mapping.get(rec.thread)
        if t is None:
            t = len(mapping) + 1
            mapping[rec.thread] = t
        entries.append((rec.index, rec.mode, t))
    return AccessPattern(tuple(entries))


def pattern_to_bytes(pattern: AccessPattern) -> bytes:
    """Canonical byte form of a pattern; input to digests and equality."""
    return "\n".join(f"{i} {m.value} {t}" for i, m, t in pattern.entries).encode("ascii")


def pattern_from_bytes(data: bytes) -> AccessPattern:
    entries = []
    if data:
        for part in data.decode("ascii").split("\n"):
            i_s, m_s, t_s = part.split(" ")
            entries.append((int(i_s), _MODES[m_s], int(t_s)))
    return AccessPattern(tuple(entries))


def pattern_digest(data: bytes) -> str:
    """128-bit content digest of a pattern's canonical bytes, as hex."""
    return blake2b(data, digest_size=16).hexdigest()


@dataclass
class PatternGroup:
    """All arrays sharing one exact access pattern."""

    digest: str
    pattern: AccessPattern
    member_keys: list[ArrayKey]

    @property
    def member_count(self) -> int:
        return len(self.member_keys)

    @property
    def total_accesses(self) -> int:
        return len(self.pattern) * len(self.member_keys)


def dedup_patterns(pairs: Iterable[tuple[ArrayKey, AccessPattern]]) -> list[PatternGroup]:
    """Group arrays by exact pattern equality.

    Digests only index the table; a digest collision between distinct
    patterns is resolved by comparing canonical bytes, so it can never
    merge two different patterns. Output is ordered by (digest, bytes).
    """
    table: dict[str, list[tuple[bytes, AccessPattern, list[ArrayKey]]]] = {}
    for key, pattern in pairs:
        data = pattern_to_bytes(pattern)
        digest = pattern_digest(data)
        bucket = table.setdefault(digest, [])
        for entry in bucket:
            if entry[0] == data:
                entry[2].append(key)
                break
        else:
            bucket.append((data, pattern, [key]))
    groups = []
    for digest in sorted(table):
        for data, pattern, keys in sorted(table[digest], key=lambda e: e[0]):
            groups.append(PatternGroup(digest=digest, pattern=pattern, member_keys=keys))
    return groups


class LengthDirection(str, Enum):
    GROW_ONLY = "grow_only"
    SHRINK_ONLY = "shrink_only"
    MIXED = "mixed"


@dataclass(frozen=True)
class LengthChangeReport:
    """Observed length instability for one array key.

    Arrays cannot be resized in place, so a change means either reuse of a
    hash token by another allocation or an id collision.
    """

    n_lengths: int
    n_transitions: int
    direction: LengthDirection


def detect_length_changes(records: Iterable[AccessRecord]) -> LengthChangeReport | None:
    """Report length transitions across a record stream, or None if stable."""
    last: int | None = None
    lengths: set[int] = set()
    transitions = 0
    grew = shrank = False
    for rec in records:
        lengths.add(rec.length)
        if last is not None and rec.length != last:
            transitions += 1
            if rec.length > last:
                grew = True
            else:
                shrank = True
        last = rec.length
    if len(lengths) <= 1:
        return None
    if grew and shrank:
        direction = LengthDirection.MIXED
    elif grew:
        direction = LengthDirection.GROW_ONLY
    else:
        direction = LengthDirection.SHRINK_ONLY
    return LengthChangeReport(
        n_lengths=len(lengths), n_transitions=transitions, direction=direction
    )


# External group-by plumbing.


def make_spill_dir(base: str | Path | None = None) -> Path:
    """Create a private spill directory under base, $ARRAYTRACE_TMP, or tmp."""
    root = base or os.environ.get(SPILL_DIR_ENV) or None
    if root is not None:
        Path(root).mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix="arraytrace-", dir=root))


class _CanonCache:
    """Memo from raw id text to (canonical id, type raw, hash token)."""

    def __init__(self) -> None:
        self._cache: dict[str, tuple[str, str, int] | None] = {}

    def get(self, id_text: str) -> tuple[str, str, int] | None:
        hit = self._cache.get(id_text, _MISS)
        if hit is _MISS:
            type_raw, sep, token = id_text.rpartition("@")
            try:
                value = int(token, 16)
            except ValueError:
                value = -1
            if not sep or not type_raw or type_raw[0] != "[" or not 0 <= value <= 0xFFFFFFFF:
                hit = None
            else:
                hit = (f"{type_raw}@{value:x}", type_raw, value)
            self._cache[id_text] = hit
        return hit


_MISS: object = object()


def fan_out(
    inputs: Iterable[str | Path],
    spill_dir: Path,
    partitions: int = DEFAULT_PARTITIONS,
    summary: ParseSummary | None = None,
) -> list[Path]:
    """Pass 1: validate raw lines and scatter them into hash partitions.

    Lines are written verbatim; partition choice hashes the canonical array
    id so differently-rendered spellings of one key land together. Returns
    the partition paths (only those that received lines exist on disk).
    """
    if partitions < 1:
        raise ValidationError("partitions must be >= 1")
    if summary is None:
        summary = ParseSummary()
    paths = [spill_dir / f"part-{p:04d}.atrace" for p in range(partitions)]
    sinks = [None] * partitions
    cache = _CanonCache()
    try:
        for path in ordered_input_paths(inputs):
            with open_text(path) as f:
                for line in f:
                    if not line.strip():
                        continue
                    summary.lines += 1
                    fields = parse_raw_fields(line)
                    canon = cache.get(fields[0]) if fields else None
                    if fields is None or canon is None:
                        summary.malformed += 1
                        summary.note(f"{path.name}: malformed raw record: {line.strip()!r}")
                        continue
                    summary.records += 1
                    p = zlib.crc32(canon[0].encode("ascii")) % partitions
                    sink = sinks[p]
                    if sink is None:
                        sink = sinks[p] = open(paths[p], "w", encoding="utf-8", newline="\n")
                    if not line.endswith("\n"):
                        line += "\n"
                    sink.write(line)
    finally:
        for sink in sinks:
            if sink is not None:
                sink.close()
    return [p for p in paths if p.exists()]


def check_partition_budget(part_path: Path, mem_budget: int) -> None:
    size = os.path.getsize(part_path)
    if size * MEM_EXPANSION_FACTOR > mem_budget:
        raise ResourceBudgetError(
            f"partition {part_path.name} is {size} bytes; loading it needs about "
            f"{size * MEM_EXPANSION_FACTOR} bytes, over the {mem_budget}-byte budget. "
            "Raise --mem-budget or --partitions."
        )


def load_partition(
    part_path: Path, mem_budget: int = DEFAULT_MEM_BUDGET
) -> list[tuple[ArrayKey, list[AccessRecord]]]:
    """Pass 2 for one partition: group its lines per key, key-sorted."""
    check_partition_budget(part_path, mem_budget)
    cache = _CanonCache()
    groups: dict[tuple[str, int], list[AccessRecord]] = {}
    with open_text(part_path) as f:
        for line in f:
            fields = parse_raw_fields(line)
            if fields is None:
                continue  # pass 1 validated; unreachable for its output
            canon = cache.get(fields[0])
            if canon is None:
                continue
            rec = AccessRecord(
                _MODES[fields[1]], fields[2], fields[3], fields[4], fields[5], fields[6]
            )
            groups.setdefault((canon[1], canon[2]), []).append(rec)
    out = []
    for type_raw, token in sorted(groups):
        key = ArrayKey.parse(f"{type_raw}@{token:x}")
        out.append((key, groups[(type_raw, token)]))
    return out


def _sort_partition_to_file(args: tuple[str, str, int]) -> str:
    """Worker: rewrite one partition with lines contiguous and key-sorted."""
    part_path, out_path, mem_budget = args
    grouped = load_partition(Path(part_path), mem_budget)
    with open(out_path, "w", encoding="utf-8", newline="\n") as sink:
        for key, records in grouped:
            id_text = key.id_text
            for rec in records:
                sink.write(
                    f"{id_text} {rec.mode.value} {rec.index} {rec.length} "
                    f"{rec.thread} {rec.line} {rec.class_hash:X}\n"
                )
    return out_path


def _iter_sorted_file_traces(path: Path) -> Iterator[ArrayTrace]:
    """Yield ArrayTrace per contiguous key run of a key-sorted raw file."""
    cache = _CanonCache()
    current: tuple[str, int] | None = None
    current_id: str | None = None
    records: list[AccessRecord] = []
    with open_text(path) as f:
        for line in f:
            fields = parse_raw_fields(line)
            if fields is None:
                continue
            canon = cache.get(fields[0])
            if canon is None:
                continue
            ck = (canon[1], canon[2])
            if ck != current:
                if current is not None:
                    yield ArrayTrace(ArrayKey.parse(current_id), tuple(records))
                current = ck
                current_id = canon[0]
                records = []
            records.append(
                AccessRecord(
                    _MODES[fields[1]], fields[2], fields[3], fields[4], fields[5], fields[6]
                )
            )
    if current is not None:
        yield ArrayTrace(ArrayKey.parse(current_id), tuple(records))


def run_partition_jobs(jobs: list, worker, workers: int = 1) -> list:
    """Run per-partition jobs in submission order, optionally in processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, jobs))


def group_by_array(
    inputs: Iterable[str | Path],
    *,
    spill_dir: str | Path | None = None,
    mem_budget: int = DEFAULT_MEM_BUDGET,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    summary: ParseSummary | None = None,
) -> Iterator[ArrayTrace]:
    """Group raw input files into one ArrayTrace per key.

    Output is ordered by (type.raw, hash_token); record order within a key
    is the input arrival order. Bounded by ``mem_budget`` per partition;
    a partition that cannot fit raises ResourceBudgetError before any of
    its traces are emitted. The spill directory is removed afterwards.
    """
    tmpdir = make_spill_dir(spill_dir)
    try:
        parts = fan_out(inputs, tmpdir, partitions, summary)
        for p in parts:
            check_partition_budget(p, mem_budget)
        jobs = [
            (str(p), str(tmpdir / f"sorted-{p.name}"), mem_budget) for p in parts
        ]
        sorted_paths = run_partition_jobs(jobs, _sort_partition_to_file, workers)
        streams = [_iter_sorted_file_traces(Path(sp)) for sp in sorted_paths]
        for trace in heapq.merge(*streams, key=lambda t: t.key.sort_key):
            yield trace
    finally:
        shutil.rmtree(tmpdir, ignore_errors=True)
