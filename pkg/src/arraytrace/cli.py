"""Command line front end.

Subcommands::

    group     raw access logs -> one grouped block per array
    sequence  grouped log -> slice encodings per distinct pattern
    stats     grouped logs -> report.json plus derived CSVs
    synth     corpus spec -> synthetic raw log with known truth

Diagnostics go to stderr; data is written only to explicitly named paths.
Exit codes: 0 success, 1 bad input or usage, 2 I/O failure, 3 resource
budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import ResourceBudgetError, ValidationError
from .extract import (
    DEFAULT_MEM_BUDGET,
    DEFAULT_PARTITIONS,
    SPILL_DIR_ENV,
    ArrayTrace,
    group_by_array,
    pattern_digest,
    pattern_from_bytes,
    pattern_to_bytes,
)
from .sequencer import (
    DEFAULT_FRINGES_MAX_DISTINCT,
    Round,
    access_shares,
    render,
    sequence,
)
from .stats import (
    FilterStats,
    StatsAccumulator,
    UnresolvedPolicy,
    class_scope_filter,
    report_json_bytes,
    write_report_csvs,
)
from .trace_io import (
    GroupedArrayBlock,
    ParseSummary,
    grouped_byte_ranges,
    open_text,
    ordered_input_paths,
    parse_class_map,
    parse_grouped,
    read_grouped_range,
    write_grouped,
)

log = logging.getLogger("arraytrace")

_SIZE_SUFFIXES = {"": 1, "K": 1 << 10, "M": 1 << 20, "G": 1 << 30}


def parse_size(text: str) -> int:
    """Parse a byte size like '256M' or '1073741824'."""
    t = text.strip().upper().removesuffix("IB").removesuffix("B")
    suffix = t[-1:] if t[-1:] in _SIZE_SUFFIXES else ""
    digits = t[: len(t) - len(suffix)] if suffix else t
    try:
        value = int(digits)
    except ValueError:
        raise ValidationError(f"cannot parse size {text!r}") from None
    if value < 0:
        raise ValidationError(f"size must be >= 0: {text!r}")
    return value * _SIZE_SUFFIXES[suffix]


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):  # noqa: D102 - argparse override
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _grouped_jobs(paths: list[Path], workers: int) -> list[tuple[str, int | None, int | None]]:
    """Byte-range jobs over grouped files; gz files become single jobs."""
    jobs: list[tuple[str, int | None, int | None]] = []
    for path in paths:
        if path.suffix == ".gz":
            jobs.append((str(path), None, None))
            continue
        for start, end in grouped_byte_ranges(path, workers):
            jobs.append((str(path), start, end))
    return jobs


def _iter_job_blocks(job: tuple[str, int | None, int | None], summary: ParseSummary):
    path, start, end = job
    if start is None:
        with open_text(path) as f:
            yield from parse_grouped(f, summary)
    else:
        yield from read_grouped_range(path, start, end, summary)


def _run_jobs(jobs: list, worker, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, jobs))
    return [worker(job) for job in jobs]


def _merge_pattern_tables(dst: dict, src: dict) -> None:
    for digest, entries in src.items():
        bucket = dst.setdefault(digest, [])
        for data, count in entries:
            for mine in bucket:
                if mine[0] == data:
                    mine[1] += count
                    break
            else:
                bucket.append([data, count])


# Worker entry points must be module level for process pools.


def _sequence_chunk(job) -> tuple[dict, ParseSummary]:
    summary = ParseSummary()
    table: dict[str, list[list]] = {}
    for block in _iter_job_blocks(job, summary):
        trace = ArrayTrace(block.key, tuple(block.access_records()))
        data = pattern_to_bytes(trace.pattern())
        _merge_pattern_tables(table, {pattern_digest(data): [[data, 1]]})
    return table, summary


def _stats_chunk(job_args) -> tuple[StatsAccumulator, ParseSummary, FilterStats | None]:
    job, fringes, scope = job_args
    summary = ParseSummary()
    blocks = _iter_job_blocks(job, summary)
    traces = (ArrayTrace(b.key, tuple(b.access_records())) for b in blocks)
    filter_stats = None
    if scope is not None:
        with open_text(scope["class_map"]) as f:
            cmap = parse_class_map(f)
        filter_stats = FilterStats()
        traces = class_scope_filter(
            traces,
            cmap,
            scope["prefix"],
            complement=scope["complement"],
            policy=UnresolvedPolicy(scope["policy"]),
            stats=filter_stats,
        )
    acc = StatsAccumulator(fringes_max_distinct=fringes)
    for trace in traces:
        acc.add_trace(trace)
    return acc, summary, filter_stats


def cmd_group(args) -> int:
    paths = ordered_input_paths(args.inputs)
    if not paths:
        raise ValidationError("no input files found")
    summary = ParseSummary()
    traces = group_by_array(
        paths,
        spill_dir=args.spill_dir,
        mem_budget=args.mem_budget,
        partitions=args.partitions,
        workers=args.workers,
        summary=summary,
    )
    blocks = (
        GroupedArrayBlock(
            key=t.key,
            length=t.max_length,
            records=[(r.mode, r.index, r.thread, r.line, r.class_hash) for r in t.records],
        )
        for t in traces
    )
    with open(args.output, "w", encoding="utf-8", newline="\n") as sink:
        n_blocks = write_grouped(blocks, sink)
    log.info(
        "grouped %d records from %d lines into %d arrays (%d malformed lines)",
        summary.records,
        summary.lines,
        n_blocks,
        summary.malformed,
    )
    for message in summary.diagnostics:
        log.warning("input: %s", message)
    if args.summary:
        payload = {
            "lines": summary.lines,
            "records": summary.records,
            "malformed_lines": summary.malformed,
            "arrays": n_blocks,
            "diagnostics": summary.diagnostics,
        }
        with open(args.summary, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    return 0


def cmd_sequence(args) -> int:
    paths = ordered_input_paths(args.inputs)
    if not paths:
        raise ValidationError("no input files found")
    jobs = _grouped_jobs(paths, args.workers)
    table: dict[str, list[list]] = {}
    summary = ParseSummary()
    for part, part_summary in _run_jobs(jobs, _sequence_chunk, args.workers):
        _merge_pattern_tables(table, part)
        summary.merge(part_summary)

    round_ = Round(args.round)
    groups = sorted(
        (digest, data, count)
        for digest, bucket in table.items()
        for data, count in bucket
    )
    n_arrays = 0
    n_accesses = 0
    coverage_patterns = {"full": 0, "partial": 0, "none": 0}
    coverage_arrays = {"full": 0, "partial": 0, "none": 0}
    shares_r1 = []
    shares_r2 = []
    with open(args.output, "w", encoding="utf-8", newline="\n") as sink:
        for digest, data, count in groups:
            pattern = pattern_from_bytes(data)
            encoding = sequence(pattern, round_, args.fringes_max_distinct)
            if round_ is Round.ROUND1:
                enc1 = encoding
                enc2 = sequence(pattern, Round.ROUND2, args.fringes_max_distinct)
            else:
                enc1 = sequence(pattern, Round.ROUND1, args.fringes_max_distinct)
                enc2 = encoding
            shares_r1.append((enc1, count))
            shares_r2.append((enc2, count))
            n_arrays += count
            n_accesses += len(pattern.entries) * count
            coverage_patterns[encoding.coverage.value] += 1
            coverage_arrays[encoding.coverage.value] += count
            sink.write(
                json.dumps(
                    {
                        "pattern_digest": digest,
                        "encoding_text": render(encoding, args.whole_pattern_lengths),
                        "coverage": encoding.coverage.value,
                        "member_count": count,
                        "total_accesses": len(pattern.entries) * count,
                    }
                )
            )
            sink.write("\n")
    log.info(
        "sequenced %d distinct patterns across %d arrays (round %d)",
        len(groups),
        n_arrays,
        args.round,
    )
    if args.summary:
        t1 = access_shares(shares_r1)
        t2 = access_shares(shares_r2)
        payload = {
            "totals": {
                "n_arrays": n_arrays,
                "n_accesses": n_accesses,
                "n_patterns": len(groups),
            },
            "round": args.round,
            "coverage": {"patterns": coverage_patterns, "arrays": coverage_arrays},
            "shape_access_shares": {
                "round1": {k: t1.share(k) for k in sorted(t1.accesses)},
                "round2": {k: t2.share(k) for k in sorted(t2.accesses)},
            },
            "diagnostics": {
                "malformed_lines": summary.malformed,
                "dropped_blocks": summary.dropped_blocks,
            },
        }
        with open(args.summary, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    return 0


def cmd_stats(args) -> int:
    paths = ordered_input_paths(args.inputs)
    if not paths:
        raise ValidationError("no input files found")
    scope = None
    if args.class_scope is not None:
        if not args.class_map:
            raise ValidationError("--class-scope requires --class-map")
        scope = {
            "class_map": args.class_map,
            "prefix": args.class_scope,
            "complement": args.complement,
            "policy": args.unresolved,
        }
    jobs = [
        (job, args.fringes_max_distinct, scope)
        for job in _grouped_jobs(paths, args.workers)
    ]
    acc = StatsAccumulator(fringes_max_distinct=args.fringes_max_distinct)
    summary = ParseSummary()
    filters = FilterStats()
    for part, part_summary, part_filter in _run_jobs(jobs, _stats_chunk, args.workers):
        acc.merge(part)
        summary.merge(part_summary)
        if part_filter is not None:
            filters.kept += part_filter.kept
            filters.dropped += part_filter.dropped
            filters.unresolved += part_filter.unresolved

    scope_report = None
    if scope is not None:
        scope_report = {
            "prefix": scope["prefix"],
            "complement": scope["complement"],
            "unresolved_policy": scope["policy"],
            "kept": filters.kept,
            "dropped": filters.dropped,
            "unresolved": filters.unresolved,
        }
    report = acc.to_report(
        diagnostics={
            "malformed_lines": summary.malformed,
            "dropped_blocks": summary.dropped_blocks,
        },
        lengths_reliable=False,
        scope=scope_report,
    )
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_bytes(report_json_bytes(report))
    names = write_report_csvs(report, out_dir, args.corpus_label)
    log.info(
        "report for %d arrays / %d accesses written to %s (csv: %s)",
        acc.n_arrays,
        acc.n_accesses,
        out_dir,
        ", ".join(names),
    )
    return 0


def cmd_synth(args) -> int:
    from .synth import generate

    try:
        with open(args.spec, encoding="utf-8") as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"corpus spec is not valid JSON: {e}") from None
    gen = generate(spec, args.output, args.truth)
    log.info(
        "wrote %d lines for %d arrays from %d templates (seed %d)",
        gen.n_lines,
        gen.n_arrays,
        gen.n_templates,
        gen.seed,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arraytrace", description=__doc__.splitlines()[0])
    parser.add_argument(
        "-q", "--quiet", action="store_true", help="suppress informational logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="group raw access logs by array")
    p.add_argument("inputs", nargs="+", help="raw log files or directories")
    p.add_argument("-o", "--output", required=True, help="grouped output path")
    p.add_argument(
        "--spill-dir",
        default=os.environ.get(SPILL_DIR_ENV),
        help=f"partition spill directory (default: ${SPILL_DIR_ENV} or system tmp)",
    )
    p.add_argument(
        "--mem-budget",
        type=parse_size,
        default=DEFAULT_MEM_BUDGET,
        help="max estimated bytes held in memory per partition (e.g. 256M)",
    )
    p.add_argument("--partitions", type=int, default=DEFAULT_PARTITIONS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", help="write a parse summary JSON here")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("sequence", help="sequence grouped arrays into slice encodings")
    p.add_argument("inputs", nargs="+", help="grouped log files or directories")
    p.add_argument("-o", "--output", required=True, help="JSONL output path")
    p.add_argument("--summary", help="write a corpus summary JSON here")
    p.add_argument("--round", type=int, choices=(1, 2), default=2)
    p.add_argument(
        "--fringes-max-distinct", type=int, default=DEFAULT_FRINGES_MAX_DISTINCT
    )
    p.add_argument(
        "--whole-pattern-lengths",
        action="store_true",
        help="render each slice with the whole pattern length instead of its own",
    )
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("stats", help="summarize grouped arrays into a report")
    p.add_argument("inputs", nargs="+", help="grouped log files or directories")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--corpus-label", default="corpus")
    p.add_argument(
        "--fringes-max-distinct", type=int, default=DEFAULT_FRINGES_MAX_DISTINCT
    )
    p.add_argument("--class-scope", help="keep arrays accessed only under this class-name prefix")
    p.add_argument("--complement", action="store_true")
    p.add_argument(
        "--unresolved",
        choices=[u.value for u in UnresolvedPolicy],
        default=UnresolvedPolicy.EXCLUDE.value,
    )
    p.add_argument("--class-map", help="class hash map for --class-scope")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic raw log from a corpus spec")
    p.add_argument("spec", help="corpus spec JSON path")
    p.add_argument("-o", "--output", required=True, help="raw log output path")
    p.add_argument("--truth", help="write per-array truth JSONL here")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except ResourceBudgetError as e:
        log.error("%s", e)
        return 3
    except ValidationError as e:
        log.error("%s", e)
        return 1
    except OSError as e:
        log.error("%s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
