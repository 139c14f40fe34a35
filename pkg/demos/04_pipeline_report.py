"""End-to-end pipeline through the command line: synthesize a corpus, group
it, sequence it, and build the statistics report.

Run from the repo root after `pip install -e .`:
    python3 demos/04_pipeline_report.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="arraytrace-demo-"))


def cli(*args):
    # same as the installed `arraytrace` script
    cmd = [sys.executable, "-m", "arraytrace", "-q", *map(str, args)]
    subprocess.run(cmd, check=True)


# A mixed corpus: sequential sweeps, a fill-then-reread walk, single hot
# cells, and one template the classifier is not supposed to name.
spec = {
    "seed": 99,
    "interleave": True,
    "interleave_window": 64,
    "templates": [
        {"name": "scan", "type": "[I", "length": 64, "count": 300,
         "slices": [{"shape": "LinearInc", "start": 0, "n": 48, "step": 1, "mode": "r"}]},
        {"name": "fill-then-sweep", "type": "[D", "length": 32, "count": 150,
         "slices": [
             {"shape": "LinearInc", "start": 0, "n": 32, "step": 1, "mode": "w"},
             {"shape": "Saws", "start": 0, "runs": 3, "run_len": 4, "step": 2,
              "restart_step": 1, "mode": "r"},
         ]},
        {"name": "hot-cell", "type": "[Lscala.collection.mutable.ArrayBuffer;",
         "length": 8, "count": 80,
         "slices": [{"shape": "Constant", "start": 3, "n": 25, "mode": "rw_alt"}]},
        {"name": "scatter", "type": "[J", "length": 128, "count": 40,
         "slices": [{"shape": "Unidentified", "base": 2, "n": 30, "mode": "w"}]},
    ],
}
spec_path = work / "spec.json"
spec_path.write_text(json.dumps(spec) + "\n")

raw = work / "corpus.atrace"
grouped = work / "corpus.agrp"
patterns = work / "patterns.jsonl"
seq_summary = work / "sequence_summary.json"
report_dir = work / "report"

# The four stages chain through files, so any of them can run on another
# machine or another day. Grouping tolerates .gz inputs and directories.
cli("synth", spec_path, "-o", raw)
cli("group", raw, "-o", grouped)
cli("sequence", grouped, "-o", patterns, "--summary", seq_summary, "--round", "2")
cli("stats", grouped, "-o", report_dir, "--corpus-label", "demo")

# Sequencing dedups identical patterns: the arrays collapse to one row per
# distinct pattern, each with its member count.
rows = [json.loads(line) for line in patterns.read_text().splitlines()]
print(f"{len(rows)} distinct patterns across the corpus:")
for row in sorted(rows, key=lambda r: -r["member_count"]):
    print(f"  {row['member_count']:4d} arrays x {row['encoding_text']}")

summary = json.loads(seq_summary.read_text())
print("\ncoverage over arrays:", summary["coverage"]["arrays"])

# The stats stage writes report.json plus CSV extracts ready for plotting.
report = json.loads((report_dir / "report.json").read_text())
print("\nreport totals:", report["totals"])
print("read/write mix:", report["rw_counts"])
print("type mix:      ", {k: v["count"] for k, v in report["type_table"].items()
                          if v["count"]})

shares = report["shape_shares"]["round2"]
print("\naccess share by shape (round 2):")
for name, cell in shares.items():
    if cell["accesses"]:
        print(f"  {name:22s} {cell['share_pct']:5.1f}%  ({cell['accesses']} accesses)")

print("\nCSV extracts:")
for p in sorted(report_dir.glob("*.csv")):
    print(" ", p.name)

print("\nscratch dir:", work)
