"""Tour of the three trace file formats: raw logs, grouped blocks, class maps.

Run from the repo root after `pip install -e .`:
    python3 demos/01_trace_formats.py
"""

import io
import tempfile
from pathlib import Path

from arraytrace import (
    GroupedArrayBlock,
    ParseSummary,
    group_by_array,
    parse_class_map,
    parse_grouped,
    parse_raw,
    write_grouped,
)
from arraytrace.trace_io import open_text

work = Path(tempfile.mkdtemp(prefix="arraytrace-demo-"))

# A raw log is one ASCII line per access:
#   <arrayId> <mode> <index> <length> <thread> <line> <classHash>
# The array id is a JVM type descriptor plus a hex identity token. Two arrays
# interleave here exactly as a tracing agent would emit them, and one line is
# garbage on purpose.
raw_text = """\
[I@1f2a r 0 8 12 40 C0FFEE42
[I@1f2a r 1 8 12 40 C0FFEE42
[D@77 w 0 4 13 88 1BADB002
[I@1f2a r 2 8 12 40 C0FFEE42
[D@77 w 1 4 13 88 1BADB002
[I@1f2a r 3 8 12 41 C0FFEE42
not a trace line at all
[D@77 w 2 4 13 88 1BADB002
"""

raw_path = work / "run.atrace"
raw_path.write_text(raw_text)

summary = ParseSummary()
records = list(parse_raw(io.StringIO(raw_text), summary))
print(f"raw: {summary.records} records from {summary.lines} lines, "
      f"{summary.malformed} malformed (skipped, not fatal)")
for diag in summary.diagnostics:
    print("  diagnostic:", diag)

# Grouping collects the interleaved lines into one trace per array identity,
# ordered by (type, token). This is what the sequencing and stats stages read.
traces = list(group_by_array([raw_path]))
blocks = [
    GroupedArrayBlock(
        key=t.key,
        length=t.max_length,
        records=[(r.mode, r.index, r.thread, r.line, r.class_hash) for r in t.records],
    )
    for t in traces
]

grouped_path = work / "run.agrp"
with open(grouped_path, "w", encoding="utf-8", newline="\n") as sink:
    write_grouped(blocks, sink)

print("\ngrouped file (header = id, length, access count):")
print(grouped_path.read_text())

with open_text(grouped_path) as f:
    for block in parse_grouped(f):
        print(f"block {block.key.id_text}: length {block.length}, "
              f"{block.n_accesses} accesses")

# Class maps resolve the hex class hashes back to source class names.
cmap_text = "C0FFEE42 com/example/Hot.class\n1BADB002 scala/util/Sorting.class\n"
cmap = parse_class_map(io.StringIO(cmap_text))
print()
for t in traces:
    names = sorted(cmap.lookup(h) or "<unresolved>" for h in t.distinct_classes)
    print(f"{t.key.id_text}: touched from {names}")

# Any of these files may be gzip-compressed; open_text() sniffs the .gz
# suffix, so the same parsing code reads both.
import gzip

gz_path = work / "run.atrace.gz"
with gzip.open(gz_path, "wt") as f:
    f.write(raw_text)
with open_text(gz_path) as f:
    n = sum(1 for _ in parse_raw(f))
print(f"\nsame log via gzip: {n} records")
print("scratch dir:", work)
