import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arraytrace.errors import ResourceBudgetError
from arraytrace.extract import (
    ArrayTrace,
    LengthDirection,
    dedup_patterns,
    detect_length_changes,
    group_by_array,
    normalize_threads,
    pattern_digest,
    pattern_from_bytes,
    pattern_to_bytes,
)
from arraytrace.model import AccessRecord, ArrayKey, Mode
from arraytrace.trace_io import ParseSummary


def rec(mode="r", index=0, length=8, thread=1, line=0, class_hash=0):
    return AccessRecord(Mode(mode), index, length, thread, line, class_hash)


def trace(id_text, records):
    return ArrayTrace(ArrayKey.parse(id_text), tuple(records))


class TestPatternBytes:
    def test_canonical_form(self):
        p = normalize_threads([rec("r", 0, thread=9), rec("w", 2, thread=5)])
        assert pattern_to_bytes(p) == b"0 r 1\n2 w 2"

    def test_round_trip(self):
        p = normalize_threads([rec("r", 3), rec("w", -1), rec("r", 3, thread=7)])
        assert pattern_from_bytes(pattern_to_bytes(p)) == p

    def test_digest_is_stable(self):
        p = normalize_threads([rec("r", 0)])
        d = pattern_digest(pattern_to_bytes(p))
        assert d == pattern_digest(pattern_to_bytes(p))
        assert len(d) == 32  # 128-bit hex

    def test_thread_relabeling_does_not_change_pattern(self):
        a = normalize_threads([rec(thread=100), rec(thread=200), rec(thread=100)])
        b = normalize_threads([rec(thread=7), rec(thread=3), rec(thread=7)])
        assert pattern_to_bytes(a) == pattern_to_bytes(b)


class TestDedup:
    def test_same_pattern_groups_together(self):
        t1 = trace("[I@1", [rec("r", 0), rec("r", 1)])
        t2 = trace("[I@2", [rec("r", 0), rec("r", 1)])
        t3 = trace("[I@3", [rec("w", 0), rec("w", 1)])
        groups = dedup_patterns((t.key, t.pattern()) for t in (t1, t2, t3))
        assert len(groups) == 2
        by_size = sorted(groups, key=lambda g: g.member_count)
        assert list(by_size[0].member_keys) == [t3.key]
        assert set(by_size[1].member_keys) == {t1.key, t2.key}

    def test_total_accesses(self):
        t1 = trace("[I@1", [rec(index=i) for i in range(5)])
        t2 = trace("[I@2", [rec(index=i) for i in range(5)])
        groups = dedup_patterns((t.key, t.pattern()) for t in (t1, t2))
        assert groups[0].total_accesses == 10

    def test_matches_brute_force(self):
        import random

        rng = random.Random(5)
        traces = []
        for i in range(300):
            n = rng.randrange(1, 6)
            records = [
                rec(("r", "w")[rng.randrange(2)], rng.randrange(3)) for _ in range(n)
            ]
            traces.append(trace(f"[I@{i:x}", records))
        groups = dedup_patterns((t.key, t.pattern()) for t in traces)

        brute: dict = {}
        for t in traces:
            brute.setdefault(t.pattern().entries, []).append(t.key)
        assert len(groups) == len(brute)
        got = {g.pattern.entries: sorted(k.id_text for k in g.member_keys) for g in groups}
        want = {e: sorted(k.id_text for k in keys) for e, keys in brute.items()}
        assert got == want


class TestLengthChanges:
    def test_stable_length_reports_none(self):
        assert detect_length_changes([rec(length=8), rec(length=8)]) is None

    def test_grow_only(self):
        report = detect_length_changes([rec(length=4), rec(length=8), rec(length=8)])
        assert report.direction is LengthDirection.GROW_ONLY
        assert report.n_lengths == 2
        assert report.n_transitions == 1

    def test_shrink_only(self):
        report = detect_length_changes([rec(length=8), rec(length=2)])
        assert report.direction is LengthDirection.SHRINK_ONLY

    def test_mixed_counts_every_transition(self):
        report = detect_length_changes(
            [rec(length=4), rec(length=8), rec(length=4), rec(length=8)]
        )
        assert report.direction is LengthDirection.MIXED
        assert report.n_transitions == 3
        assert report.n_lengths == 2  # distinct lengths, not visits


class TestGroupByArray:
    def _write_raw(self, tmp_path, name, lines):
        p = tmp_path / name
        p.write_text("".join(line + "\n" for line in lines))
        return p

    def test_groups_across_files_in_name_order(self, tmp_path, relay_log_text):
        lines = relay_log_text.splitlines()
        # Interleave across two files; records for one key must come back
        # in file order then line order.
        self._write_raw(tmp_path, "b.atrace", lines[1::2])
        self._write_raw(tmp_path, "a.atrace", lines[0::2])
        got = list(group_by_array([tmp_path]))
        assert [t.key.id_text for t in got] == [
            "[I@232204a1",
            "[I@5cad8086",
            "[I@60e53b93",
            "[Ljava.lang.Integer;@6e0be858",
        ]
        by_id = {t.key.id_text: t for t in got}
        # a.atrace holds even input lines (indices 0,2), b.atrace odd ones.
        assert [r.index for r in by_id["[I@232204a1"].records] == [0, 2, 1, 3]

    def test_order_is_type_then_token(self, tmp_path):
        self._write_raw(
            tmp_path,
            "t.atrace",
            ["[J@1 r 0 4 1 0 0", "[I@10 r 0 4 1 0 0", "[I@2 r 0 4 1 0 0"],
        )
        got = [t.key.id_text for t in group_by_array([tmp_path / "t.atrace"])]
        assert got == ["[I@2", "[I@10", "[J@1"]

    def test_malformed_lines_counted_not_grouped(self, tmp_path):
        self._write_raw(
            tmp_path, "t.atrace", ["[I@1 r 0 4 1 0 0", "broken", "[I@1 w 1 4 1 0 0"]
        )
        summary = ParseSummary()
        got = list(group_by_array([tmp_path / "t.atrace"], summary=summary))
        assert len(got) == 1
        assert got[0].n_accesses == 2
        assert summary.malformed == 1

    def test_budget_violation_raises_before_yield(self, tmp_path):
        lines = [f"[I@{i:x} r 0 4 1 0 0" for i in range(200)]
        self._write_raw(tmp_path, "t.atrace", lines)
        with pytest.raises(ResourceBudgetError) as err:
            list(group_by_array([tmp_path / "t.atrace"], mem_budget=64, partitions=2))
        msg = str(err.value)
        assert "budget" in msg
        assert "partitions" in msg  # remedy is named

    def test_spill_dir_cleaned_up(self, tmp_path):
        self._write_raw(tmp_path, "t.atrace", ["[I@1 r 0 4 1 0 0"])
        spill = tmp_path / "spill"
        spill.mkdir()
        list(group_by_array([tmp_path / "t.atrace"], spill_dir=spill))
        assert list(spill.iterdir()) == []  # per-run subdirectory removed

    def test_workers_do_not_change_output(self, tmp_path):
        import random

        rng = random.Random(17)
        lines = []
        for i in range(500):
            key = rng.randrange(40)
            lines.append(f"[I@{key:x} r {rng.randrange(8)} 8 1 0 0")
        self._write_raw(tmp_path, "t.atrace", lines)
        one = [
            (t.key.id_text, tuple(t.records))
            for t in group_by_array([tmp_path / "t.atrace"], workers=1, partitions=8)
        ]
        many = [
            (t.key.id_text, tuple(t.records))
            for t in group_by_array([tmp_path / "t.atrace"], workers=4, partitions=8)
        ]
        assert one == many

    def test_equal_keys_with_different_types_stay_apart(self, tmp_path):
        self._write_raw(
            tmp_path, "t.atrace", ["[I@7 r 0 4 1 0 0", "[J@7 r 0 4 1 0 0"]
        )
        got = [t.key.id_text for t in group_by_array([tmp_path / "t.atrace"])]
        assert got == ["[I@7", "[J@7"]


@given(
    st.lists(
        st.tuples(st.integers(0, 3), st.integers(0, 5), st.sampled_from("rw")),
        min_size=1,
        max_size=60,
    )
)
def test_grouping_preserves_per_key_record_order(tmp_path_factory, rows):
    tmp_path = tmp_path_factory.mktemp("prop")
    lines = [f"[I@{k:x} {m} {i} 8 1 0 0" for k, i, m in rows]
    p = tmp_path / "t.atrace"
    p.write_text("".join(line + "\n" for line in lines))
    got = {t.key.hash_token: [r.index for r in t.records] for t in group_by_array([p])}
    want: dict = {}
    for k, i, _ in rows:
        want.setdefault(k, []).append(i)
    assert got == want
