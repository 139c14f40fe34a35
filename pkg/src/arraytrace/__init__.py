"""Mining access patterns from array access logs.

The toolkit reads per-access logs emitted by an instrumented runtime,
groups them by array identity, compresses each array's accesses into a
normalized pattern, sequences patterns into shape-tagged slices, and
aggregates corpus-level statistics. A deterministic generator produces
synthetic logs with known truth for calibration.
"""

from .errors import (
    ArrayTraceError,
    EncodingParseError,
    ResourceBudgetError,
    ValidationError,
)
from .extract import (
    ArrayTrace,
    LengthChangeReport,
    PatternGroup,
    dedup_patterns,
    detect_length_changes,
    group_by_array,
    normalize_threads,
    pattern_digest,
    pattern_from_bytes,
    pattern_to_bytes,
)
from .model import (
    AccessPattern,
    AccessRecord,
    ArrayKey,
    Coverage,
    Mode,
    RwClass,
    SequenceEncoding,
    ShapeKind,
    ShapeTag,
    SliceCode,
    TypeDescriptor,
)
from .sequencer import (
    Round,
    access_shares,
    classify_whole,
    parse_encoding,
    render,
    sequence,
    split_slices,
)
from .stats import (
    StatsAccumulator,
    UnresolvedPolicy,
    accumulate_traces,
    categorize_type,
    class_scope_filter,
    index_coverage,
    report_json_bytes,
    write_report_csvs,
)
from .trace_io import (
    ClassMap,
    GroupedArrayBlock,
    ParseSummary,
    parse_class_map,
    parse_grouped,
    parse_raw,
    write_class_map,
    write_grouped,
    write_raw,
)

__version__ = "0.1.0"

__all__ = [
    "AccessPattern",
    "AccessRecord",
    "ArrayKey",
    "ArrayTrace",
    "ArrayTraceError",
    "ClassMap",
    "Coverage",
    "EncodingParseError",
    "GroupedArrayBlock",
    "LengthChangeReport",
    "Mode",
    "ParseSummary",
    "PatternGroup",
    "ResourceBudgetError",
    "Round",
    "RwClass",
    "SequenceEncoding",
    "ShapeKind",
    "ShapeTag",
    "SliceCode",
    "StatsAccumulator",
    "TypeDescriptor",
    "UnresolvedPolicy",
    "ValidationError",
    "access_shares",
    "accumulate_traces",
    "categorize_type",
    "class_scope_filter",
    "classify_whole",
    "dedup_patterns",
    "detect_length_changes",
    "group_by_array",
    "index_coverage",
    "normalize_threads",
    "parse_class_map",
    "parse_encoding",
    "parse_grouped",
    "parse_raw",
    "pattern_digest",
    "pattern_from_bytes",
    "pattern_to_bytes",
    "render",
    "report_json_bytes",
    "sequence",
    "split_slices",
    "write_class_map",
    "write_grouped",
    "write_raw",
    "write_report_csvs",
]
