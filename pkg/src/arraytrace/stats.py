"""Corpus statistics over grouped array traces.

Everything funnels through StatsAccumulator, a mergeable accumulator: feeding
it traces shard by shard and merging gives byte-for-byte the same report as
one sequential pass. Counts are exact integers; percentages are rendered to
one decimal place at output time only.

Array length for histogram and coverage purposes is the maximum observed
length for that key. Out of bounds means index < 0 or index >= the length
seen at that access.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import ValidationError
from .extract import (
    ArrayTrace,
    LengthDirection,
    detect_length_changes,
    pattern_digest,
    pattern_from_bytes,
    pattern_to_bytes,
)
from .model import ArrayKey, Mode, RwClass, ShapeKind, TypeDescriptor, classify_rw
from .sequencer import (
    DEFAULT_FRINGES_MAX_DISTINCT,
    ROUND2_KINDS,
    Round,
    sequence,
)
from .trace_io import ClassMap

JAVA_STDLIB_PREFIXES = ("java.", "javax.", "jdk.", "sun.")
SCALA_STDLIB_PREFIXES = ("scala.",)

PRIMITIVE_ELEMENTS = frozenset("ZBCDFIJS")

PATTERN_BUCKETS = ("1", "2", "3", "4", "5-100", "101-1000", "1001-10000", ">10000")

COVERAGE_BUCKETS = ("full", "ge50_lt100", "ge10_lt50", "lt10")

SHAPE_ORDER = tuple(k.value for k in ROUND2_KINDS) + (ShapeKind.UNIDENTIFIED.value,)


class Category(str, Enum):
    PRIMITIVE = "Primitive"
    JAVA_STDLIB = "JavaStdlib"
    SCALA_STDLIB = "ScalaStdlib"
    OTHER_OBJECT = "OtherObject"
    NESTED_ARRAY = "NestedArray"


CATEGORY_ORDER = (
    Category.PRIMITIVE,
    Category.JAVA_STDLIB,
    Category.SCALA_STDLIB,
    Category.OTHER_OBJECT,
    Category.NESTED_ARRAY,
)


@dataclass(frozen=True)
class TypeCategory:
    category: Category
    depth: int
    innermost: str


def categorize_type(
    desc: TypeDescriptor,
    java_prefixes: tuple[str, ...] = JAVA_STDLIB_PREFIXES,
    scala_prefixes: tuple[str, ...] = SCALA_STDLIB_PREFIXES,
) -> TypeCategory:
    """Bucket an array type; nesting wins over element classification."""
    innermost = desc.element_name()
    if desc.dims >= 2:
        return TypeCategory(Category.NESTED_ARRAY, desc.dims, innermost)
    if desc.element in PRIMITIVE_ELEMENTS:
        return TypeCategory(Category.PRIMITIVE, desc.dims, innermost)
    name = innermost
    if name.startswith(java_prefixes):
        return TypeCategory(Category.JAVA_STDLIB, desc.dims, innermost)
    if name.startswith(scala_prefixes):
        return TypeCategory(Category.SCALA_STDLIB, desc.dims, innermost)
    return TypeCategory(Category.OTHER_OBJECT, desc.dims, innermost)


@dataclass(frozen=True)
class CoverageStats:
    fraction: float
    distinct_inbounds: int
    oob_accesses: int
    max_length: int


def index_coverage(trace: ArrayTrace) -> CoverageStats:
    """Share of distinct in-bounds indices over the array's max length."""
    inbounds: set[int] = set()
    oob = 0
    max_length = 0
    for rec in trace.records:
        if rec.length > max_length:
            max_length = rec.length
        if 0 <= rec.index < rec.length:
            inbounds.add(rec.index)
        else:
            oob += 1
    fraction = min(1.0, max(0.0, len(inbounds) / max_length)) if max_length else 0.0
    return CoverageStats(fraction, len(inbounds), oob, max_length)


def trace_rw(trace: ArrayTrace) -> RwClass:
    saw_r = saw_w = False
    for rec in trace.records:
        if rec.mode is Mode.READ:
            saw_r = True
        else:
            saw_w = True
        if saw_r and saw_w:
            break
    return classify_rw(saw_r, saw_w)


def coverage_bucket(stats: CoverageStats) -> str:
    f = stats.fraction
    if f >= 1.0:
        return "full"
    if f >= 0.5:
        return "ge50_lt100"
    if f >= 0.1:
        return "ge10_lt50"
    return "lt10"


def pattern_bucket(size: int) -> str:
    if size <= 4:
        return str(size)
    if size <= 100:
        return "5-100"
    if size <= 1000:
        return "101-1000"
    if size <= 10000:
        return "1001-10000"
    return ">10000"


def pattern_distribution(sizes: Iterable[int]) -> tuple[dict[str, int], float]:
    """Bucketed arrays-per-pattern counts plus the mean group size."""
    buckets = {b: 0 for b in PATTERN_BUCKETS}
    total = 0
    n = 0
    for size in sizes:
        buckets[pattern_bucket(size)] += 1
        total += size
        n += 1
    return buckets, (total / n if n else 0.0)


class UnresolvedPolicy(str, Enum):
    """What to do with arrays touching class hashes absent from the map."""

    INCLUDE = "include"
    EXCLUDE = "exclude"
    SEPARATE = "separate"


@dataclass
class FilterStats:
    kept: int = 0
    dropped: int = 0
    unresolved: int = 0


def _scope_match(
    trace: ArrayTrace, class_map: ClassMap, prefix: str, policy: UnresolvedPolicy
) -> bool | None:
    """True/False for match/no-match; None when routed by unresolved policy."""
    names = []
    unresolved = False
    for class_hash in trace.distinct_classes:
        name = class_map.lookup(class_hash)
        if name is None:
            unresolved = True
        else:
            names.append(name)
    if unresolved:
        if policy is not UnresolvedPolicy.INCLUDE:
            return None
        if not names:
            return False
    return all(name.startswith(prefix) for name in names)


def class_scope_filter(
    traces: Iterable[ArrayTrace],
    class_map: ClassMap,
    prefix: str,
    complement: bool = False,
    policy: UnresolvedPolicy = UnresolvedPolicy.EXCLUDE,
    stats: FilterStats | None = None,
) -> Iterator[ArrayTrace]:
    """Keep arrays whose every access comes from a class under ``prefix``.

    Complement mode keeps the rest instead. An array with any unmapped class
    hash is routed by ``policy``: INCLUDE decides on its resolvable accesses
    only, EXCLUDE and SEPARATE drop it from this output (SEPARATE exists so
    a caller can account for those arrays explicitly via ``stats``).
    """
    if stats is None:
        stats = FilterStats()
    for trace in traces:
        verdict = _scope_match(trace, class_map, prefix, policy)
        if verdict is None:
            stats.unresolved += 1
            continue
        if verdict != complement:
            stats.kept += 1
            yield trace
        else:
            stats.dropped += 1


@dataclass
class _TypeRow:
    count: int = 0
    len_sum: int = 0
    len_min: int | None = None
    len_max: int | None = None

    def add(self, length: int) -> None:
        self.count += 1
        self.len_sum += length
        self.len_min = length if self.len_min is None else min(self.len_min, length)
        self.len_max = length if self.len_max is None else max(self.len_max, length)

    def merge(self, other: "_TypeRow") -> None:
        self.count += other.count
        self.len_sum += other.len_sum
        for attr, pick in (("len_min", min), ("len_max", max)):
            a, b = getattr(self, attr), getattr(other, attr)
            setattr(self, attr, b if a is None else (a if b is None else pick(a, b)))


def _pct(num: int, den: int) -> float:
    return round(100.0 * num / den, 1) if den else 0.0


@dataclass
class StatsAccumulator:
    """Mergeable corpus statistics; merge() is associative and commutative."""

    fringes_max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT
    n_arrays: int = 0
    n_accesses: int = 0
    rw: dict[str, int] = field(
        default_factory=lambda: {"read_only": 0, "write_only": 0, "read_write": 0}
    )
    length_hist: dict[int, int] = field(default_factory=dict)
    coverage_hist: dict[str, int] = field(
        default_factory=lambda: {b: 0 for b in COVERAGE_BUCKETS}
    )
    oob_arrays: int = 0
    type_rows: dict[str, _TypeRow] = field(
        default_factory=lambda: {c.value: _TypeRow() for c in CATEGORY_ORDER}
    )
    threads_hist: dict[int, int] = field(default_factory=dict)
    classes_hist: dict[int, int] = field(default_factory=dict)
    callsites: set[tuple[int, int]] = field(default_factory=set)
    classes_touched: set[int] = field(default_factory=set)
    # digest -> list of [pattern bytes, member count]; list resolves collisions
    patterns: dict[str, list[list]] = field(default_factory=dict)
    length_change_arrays: int = 0
    length_change_dirs: dict[str, int] = field(
        default_factory=lambda: {d.value: 0 for d in LengthDirection}
    )

    def add_trace(self, trace: ArrayTrace) -> None:
        self.n_arrays += 1
        self.n_accesses += trace.n_accesses

        rw = trace_rw(trace)
        if rw is RwClass.READ_ONLY:
            self.rw["read_only"] += 1
        elif rw is RwClass.WRITE_ONLY:
            self.rw["write_only"] += 1
        else:
            self.rw["read_write"] += 1

        cov = index_coverage(trace)
        self.coverage_hist[coverage_bucket(cov)] += 1
        if cov.oob_accesses:
            self.oob_arrays += 1

        self.length_hist[cov.max_length] = self.length_hist.get(cov.max_length, 0) + 1
        self.type_rows[categorize_type(trace.key.type).category.value].add(cov.max_length)

        self.threads_hist[len(trace.distinct_threads)] = (
            self.threads_hist.get(len(trace.distinct_threads), 0) + 1
        )
        self.classes_hist[len(trace.distinct_classes)] = (
            self.classes_hist.get(len(trace.distinct_classes), 0) + 1
        )
        for rec in trace.records:
            self.callsites.add((rec.class_hash, rec.line))
        self.classes_touched.update(trace.distinct_classes)

        change = detect_length_changes(trace.records)
        if change is not None:
            self.length_change_arrays += 1
            self.length_change_dirs[change.direction.value] += 1

        data = pattern_to_bytes(trace.pattern())
        bucket = self.patterns.setdefault(pattern_digest(data), [])
        for entry in bucket:
            if entry[0] == data:
                entry[1] += 1
                break
        else:
            bucket.append([data, 1])

    def merge(self, other: "StatsAccumulator") -> None:
        if other.fringes_max_distinct != self.fringes_max_distinct:
            raise ValidationError("cannot merge accumulators with different shape settings")
        self.n_arrays += other.n_arrays
        self.n_accesses += other.n_accesses
        for k, v in other.rw.items():
            self.rw[k] += v
        for length, n in other.length_hist.items():
            self.length_hist[length] = self.length_hist.get(length, 0) + n
        for b, n in other.coverage_hist.items():
            self.coverage_hist[b] += n
        self.oob_arrays += other.oob_arrays
        for cat, row in other.type_rows.items():
            self.type_rows[cat].merge(row)
        for k, v in other.threads_hist.items():
            self.threads_hist[k] = self.threads_hist.get(k, 0) + v
        for k, v in other.classes_hist.items():
            self.classes_hist[k] = self.classes_hist.get(k, 0) + v
        self.callsites.update(other.callsites)
        self.classes_touched.update(other.classes_touched)
        for digest, entries in other.patterns.items():
            bucket = self.patterns.setdefault(digest, [])
            for data, count in entries:
                for entry in bucket:
                    if entry[0] == data:
                        entry[1] += count
                        break
                else:
                    bucket.append([data, count])
        self.length_change_arrays += other.length_change_arrays
        for k, v in other.length_change_dirs.items():
            self.length_change_dirs[k] += v

    def _shape_access_counts(self) -> dict[int, dict[str, int]]:
        """Accesses per shape name for round 1 and round 2."""
        out = {1: {name: 0 for name in SHAPE_ORDER}, 2: {name: 0 for name in SHAPE_ORDER}}
        for entries in self.patterns.values():
            for data, count in entries:
                pattern = pattern_from_bytes(data)
                for round_ in (Round.ROUND1, Round.ROUND2):
                    enc = sequence(pattern, round_, self.fringes_max_distinct)
                    table = out[int(round_)]
                    for s in enc.slices:
                        table[s.shape.kind.value] += s.len * count
        return out

    def n_patterns(self) -> int:
        return sum(len(entries) for entries in self.patterns.values())

    def to_report(self, diagnostics: dict | None = None, lengths_reliable: bool = True,
                  scope: dict | None = None) -> dict:
        """Render the full report as a plain dict with stable field order."""
        n_patterns = self.n_patterns()
        buckets, mean = pattern_distribution(
            count for entries in self.patterns.values() for _, count in entries
        )
        shapes = self._shape_access_counts()

        length_keys = sorted(self.length_hist)
        type_table = {}
        for cat in CATEGORY_ORDER:
            row = self.type_rows[cat.value]
            type_table[cat.value] = {
                "count": row.count,
                "avg_len": round(row.len_sum / row.count, 2) if row.count else 0.0,
                "min_len": row.len_min,
                "max_len": row.len_max,
            }

        def shape_section(table: dict[str, int]) -> dict:
            total = sum(table.values())
            return {
                name: {"accesses": table[name], "share_pct": _pct(table[name], total)}
                for name in SHAPE_ORDER
            }

        report = {
            "totals": {
                "n_accesses": self.n_accesses,
                "n_arrays": self.n_arrays,
                "n_patterns": n_patterns,
                "n_callsites": len(self.callsites),
                "n_classes_touched": len(self.classes_touched),
            },
            "diagnostics": diagnostics or {"malformed_lines": 0, "dropped_blocks": 0},
            "rw_counts": dict(self.rw),
            "length_hist": {str(k): self.length_hist[k] for k in length_keys},
            "coverage_hist": {
                **{b: self.coverage_hist[b] for b in COVERAGE_BUCKETS},
                "oob_arrays": self.oob_arrays,
            },
            "type_table": type_table,
            "threads_hist": {str(k): self.threads_hist[k] for k in sorted(self.threads_hist)},
            "classes_hist": {str(k): self.classes_hist[k] for k in sorted(self.classes_hist)},
            "pattern_table": {
                "buckets": {b: buckets[b] for b in PATTERN_BUCKETS},
                "mean_arrays_per_pattern": round(mean, 1),
            },
            "shape_shares": {
                "round1": shape_section(shapes[1]),
                "round2": shape_section(shapes[2]),
            },
            "length_changes": (
                {
                    "arrays_with_changes": self.length_change_arrays,
                    **{d.value: self.length_change_dirs[d.value] for d in LengthDirection},
                }
                if lengths_reliable
                else None
            ),
            "scope_filter": scope,
        }
        return report


def accumulate_traces(
    traces: Iterable[ArrayTrace],
    fringes_max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT,
) -> StatsAccumulator:
    acc = StatsAccumulator(fringes_max_distinct=fringes_max_distinct)
    for trace in traces:
        acc.add_trace(trace)
    return acc


def report_json_bytes(report: dict) -> bytes:
    import json

    return (json.dumps(report, indent=2) + "\n").encode("utf-8")


def _csv_line(*cells) -> str:
    return ",".join(str(c) for c in cells) + "\n"


def write_report_csvs(report: dict, out_dir, corpus_label: str) -> list[str]:
    """Write the five derived CSVs next to report.json; returns their names."""
    from pathlib import Path

    out = Path(out_dir)
    names = []

    with open(out / "length_cdf.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(_csv_line("length", "count", "cumulative", "cumulative_share_pct"))
        total = sum(report["length_hist"].values())
        cum = 0
        for key, count in report["length_hist"].items():
            cum += count
            f.write(_csv_line(key, count, cum, _pct(cum, total)))
    names.append("length_cdf.csv")

    with open(out / "rw_by_corpus.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(
            _csv_line(
                "corpus", "read_only", "write_only", "read_write",
                "read_only_pct", "write_only_pct", "read_write_pct",
            )
        )
        rw = report["rw_counts"]
        total = sum(rw.values())
        f.write(
            _csv_line(
                corpus_label, rw["read_only"], rw["write_only"], rw["read_write"],
                _pct(rw["read_only"], total), _pct(rw["write_only"], total),
                _pct(rw["read_write"], total),
            )
        )
    names.append("rw_by_corpus.csv")

    with open(out / "coverage_hist.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(_csv_line("bucket", "count", "share_pct"))
        total = sum(report["coverage_hist"][b] for b in COVERAGE_BUCKETS)
        for b in COVERAGE_BUCKETS:
            f.write(_csv_line(b, report["coverage_hist"][b], _pct(report["coverage_hist"][b], total)))
        f.write(_csv_line("oob_arrays", report["coverage_hist"]["oob_arrays"], ""))
    names.append("coverage_hist.csv")

    with open(out / "pattern_buckets.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(_csv_line("bucket", "count"))
        for b in PATTERN_BUCKETS:
            f.write(_csv_line(b, report["pattern_table"]["buckets"][b]))
    names.append("pattern_buckets.csv")

    with open(out / "shape_shares.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(_csv_line("round", "shape", "accesses", "share_pct"))
        for round_label in ("round1", "round2"):
            for name in SHAPE_ORDER:
                row = report["shape_shares"][round_label][name]
                f.write(_csv_line(round_label, name, row["accesses"], row["share_pct"]))
    names.append("shape_shares.csv")

    return names
