import json

import pytest

from arraytrace.trace_io import open_text, parse_grouped


def read_blocks(path):
    with open_text(path) as f:
        return list(parse_grouped(f))


@pytest.fixture
def raw_log(tmp_path, relay_log_text):
    p = tmp_path / "run.atrace"
    p.write_text(relay_log_text)
    return p


@pytest.fixture
def grouped_relay(tmp_path, raw_log, cli):
    out = tmp_path / "run.agrp"
    assert cli("group", str(raw_log), "-o", str(out)) == 0
    return out


class TestExitCodes:
    def test_usage_error_is_1(self, cli_proc):
        assert cli_proc("frobnicate", check=False).returncode == 1

    def test_missing_subcommand_is_1(self, cli_proc):
        assert cli_proc(check=False).returncode == 1

    def test_missing_input_is_2(self, cli_proc, tmp_path):
        proc = cli_proc(
            "group", str(tmp_path / "absent.atrace"),
            "-o", str(tmp_path / "o.agrp"), check=False,
        )
        assert proc.returncode == 2

    def test_budget_exhaustion_is_3(self, cli_proc, tmp_path, relay_log_text):
        p = tmp_path / "run.atrace"
        p.write_text(relay_log_text * 64)
        proc = cli_proc(
            "group", str(p), "-o", str(tmp_path / "o.agrp"),
            "--mem-budget", "1K", "--partitions", "1", check=False,
        )
        assert proc.returncode == 3
        assert "budget" in proc.stderr.lower()

    def test_bad_spec_json_is_1(self, cli_proc, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text("{nope")
        proc = cli_proc(
            "synth", str(spec), "-o", str(tmp_path / "o.atrace"), check=False
        )
        assert proc.returncode == 1

    def test_bad_mem_budget_string_is_1(self, cli_proc, tmp_path, raw_log):
        proc = cli_proc(
            "group", str(raw_log), "-o", str(tmp_path / "o.agrp"),
            "--mem-budget", "12Q", check=False,
        )
        assert proc.returncode == 1


class TestGroup:
    def test_groups_relay_log(self, grouped_relay):
        blocks = read_blocks(grouped_relay)
        assert len(blocks) == 4
        ids = [b.key.id_text for b in blocks]
        assert ids == sorted(ids) == [
            "[I@232204a1", "[I@5cad8086", "[I@60e53b93",
            "[Ljava.lang.Integer;@6e0be858",
        ]
        assert all(len(b.records) == 4 for b in blocks)

    def test_summary_json(self, tmp_path, raw_log, cli):
        out = tmp_path / "o.agrp"
        summary_path = tmp_path / "group.json"
        assert cli(
            "group", str(raw_log), "-o", str(out), "--summary", str(summary_path)
        ) == 0
        summary = json.loads(summary_path.read_text())
        assert summary["lines"] == 16
        assert summary["records"] == 16
        assert summary["malformed_lines"] == 0
        assert summary["arrays"] == 4

    def test_directory_input(self, tmp_path, relay_log_text, cli):
        d = tmp_path / "corpus"
        (d / "sub").mkdir(parents=True)
        lines = relay_log_text.splitlines(keepends=True)
        (d / "b.atrace").write_text("".join(lines[8:]))
        (d / "sub" / "a.atrace").write_text("".join(lines[:8]))
        out = tmp_path / "o.agrp"
        assert cli("group", str(d), "-o", str(out)) == 0
        assert len(read_blocks(out)) == 4

    def test_malformed_lines_counted_not_fatal(self, tmp_path, cli):
        p = tmp_path / "run.atrace"
        p.write_text("[I@1 r 0 4 1 2 0\nbogus line\n[I@1 w 1 4 1 2 0\n")
        out = tmp_path / "o.agrp"
        summary_path = tmp_path / "s.json"
        assert cli("group", str(p), "-o", str(out), "--summary", str(summary_path)) == 0
        summary = json.loads(summary_path.read_text())
        assert summary["malformed_lines"] == 1
        assert summary["records"] == 2
        assert summary["arrays"] == 1


class TestSequence:
    def test_jsonl_output(self, tmp_path, grouped_relay, cli):
        out = tmp_path / "seq.jsonl"
        assert cli("sequence", str(grouped_relay), "-o", str(out)) == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        # Pattern identity ignores the array type: the two write-only arrays
        # share one pattern, the two read-only arrays the other.
        assert sorted(r["member_count"] for r in rows) == [2, 2]
        for r in rows:
            assert set(r) == {
                "pattern_digest", "encoding_text", "coverage",
                "member_count", "total_accesses",
            }
            assert r["coverage"] == "full"
            assert "SLi" in r["encoding_text"]
            assert len(r["pattern_digest"]) == 32

    def test_summary_and_round_flag(self, tmp_path, grouped_relay, cli):
        out = tmp_path / "seq.jsonl"
        s1 = tmp_path / "s1.json"
        assert cli(
            "sequence", str(grouped_relay), "-o", str(out),
            "--round", "1", "--summary", str(s1),
        ) == 0
        summary = json.loads(s1.read_text())
        assert summary["round"] == 1
        assert summary["totals"]["n_arrays"] == 4
        assert summary["totals"]["n_patterns"] == 2
        shares = summary["shape_access_shares"]
        assert shares["round1"]["LinearInc"] == pytest.approx(1.0)
        assert summary["coverage"]["arrays"]["full"] == 4

    def test_workers_do_not_change_output(self, tmp_path, cli):
        from arraytrace.synth import coverage_corpus_spec, generate

        raw = tmp_path / "c.atrace"
        generate(coverage_corpus_spec(arrays_per_template=4), raw)
        grouped = tmp_path / "c.agrp"
        assert cli("group", str(raw), "-o", str(grouped)) == 0
        outs = []
        for w in ("1", "3"):
            out = tmp_path / f"seq{w}.jsonl"
            assert cli(
                "sequence", str(grouped), "-o", str(out), "--workers", w
            ) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestStats:
    def test_report_on_grouped_block(self, tmp_path, table_block_text, cli):
        grouped = tmp_path / "t.agrp"
        grouped.write_text(table_block_text)
        out = tmp_path / "report"
        out.mkdir()
        assert cli("stats", str(grouped), "-o", str(out)) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["totals"]["n_arrays"] == 1
        assert report["totals"]["n_accesses"] == 12
        assert report["rw_counts"] == {"read_only": 0, "write_only": 0, "read_write": 1}
        assert report["coverage_hist"]["ge10_lt50"] == 1
        assert report["coverage_hist"]["oob_arrays"] == 0
        assert report["length_changes"] is None  # grouped input: single length
        for name in (
            "length_cdf.csv", "rw_by_corpus.csv", "coverage_hist.csv",
            "pattern_buckets.csv", "shape_shares.csv",
        ):
            assert (out / name).exists()

    def test_class_scope_requires_map(self, cli_proc, tmp_path, table_block_text):
        grouped = tmp_path / "t.agrp"
        grouped.write_text(table_block_text)
        out = tmp_path / "report"
        out.mkdir()
        proc = cli_proc(
            "stats", str(grouped), "-o", str(out),
            "--class-scope", "scala/", check=False,
        )
        assert proc.returncode == 1

    def test_class_scope_filters(
        self, tmp_path, table_block_text, class_map_text, cli
    ):
        grouped = tmp_path / "t.agrp"
        grouped.write_text(table_block_text)
        cmap = tmp_path / "classes.cmap"
        cmap.write_text(class_map_text)
        out = tmp_path / "in_scope"
        out.mkdir()
        assert cli(
            "stats", str(grouped), "-o", str(out),
            "--class-scope", "scala/", "--class-map", str(cmap),
        ) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["totals"]["n_arrays"] == 1
        assert report["scope_filter"]["kept"] == 1

        out2 = tmp_path / "out_scope"
        out2.mkdir()
        assert cli(
            "stats", str(grouped), "-o", str(out2),
            "--class-scope", "scala/", "--complement", "--class-map", str(cmap),
        ) == 0
        report2 = json.loads((out2 / "report.json").read_text())
        assert report2["totals"]["n_arrays"] == 0
        assert report2["scope_filter"]["dropped"] == 1


class TestSynth:
    def test_synth_writes_deterministic_corpus(self, tmp_path, cli):
        spec = {
            "seed": 3,
            "templates": [
                {
                    "name": "t",
                    "type": "[I",
                    "length": 8,
                    "count": 2,
                    "slices": [
                        {"shape": "LinearInc", "start": 0, "n": 5, "step": 1, "mode": "r"}
                    ],
                }
            ],
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        a, b = tmp_path / "a.atrace", tmp_path / "b.atrace"
        truth = tmp_path / "truth.jsonl"
        assert cli("synth", str(spec_path), "-o", str(a), "--truth", str(truth)) == 0
        assert cli("synth", str(spec_path), "-o", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(truth.read_text().splitlines()) == 2

    def test_invalid_template_is_validation_error(self, cli_proc, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps({"seed": 1, "templates": [{"name": "x", "length": 4,
                        "slices": [{"shape": "Nope"}]}]})
        )
        proc = cli_proc(
            "synth", str(spec_path), "-o", str(tmp_path / "o.atrace"), check=False
        )
        assert proc.returncode == 1
        assert "shape" in proc.stderr.lower()


class TestPipelineParity:
    def test_quiet_flag_silences_info(self, cli_proc, tmp_path, relay_log_text):
        p = tmp_path / "run.atrace"
        p.write_text(relay_log_text)
        loud = cli_proc("group", str(p), "-o", str(tmp_path / "a.agrp"))
        quiet = cli_proc("-q", "group", str(p), "-o", str(tmp_path / "b.agrp"))
        assert loud.stderr != ""
        assert quiet.stderr == ""

    def test_stdout_stays_clean(self, cli_proc, tmp_path, relay_log_text):
        p = tmp_path / "run.atrace"
        p.write_text(relay_log_text)
        proc = cli_proc("group", str(p), "-o", str(tmp_path / "a.agrp"))
        assert proc.stdout == ""
