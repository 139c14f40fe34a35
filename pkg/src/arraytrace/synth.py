"""Grammar-driven generation of synthetic raw traces with known truth.

A corpus spec is a JSON document::

    {
      "seed": 42,                  # 64-bit master seed
      "interleave": false,         # round-robin lines across a window of arrays
      "interleave_window": 256,
      "noise": 0.0,                # fraction of accesses hit by random index jumps
      "templates": [
        {
          "name": "sli-x3",
          "type": "[I",            # array type descriptor
          "length": 16,            # array length (all indices must fit)
          "count": 200,            # number of array instances
          "slices": [
            {"shape": "LinearInc", "start": 0, "n": 14, "step": 1,
             "mode": "w", "threads": 1, "repeat": 1},
            ...
          ]
        }
      ]
    }

Slice shapes take shape-specific parameters (documented per builder below).
``mode`` is ``r``, ``w`` or ``rw_alt`` (alternating read/write); ``threads``
emits normalized ids 1..k round-robin. All instances of a template share one
index/mode/thread structure, so they form exactly one pattern group; raw
thread ids and (under noise) perturbed indices vary per instance.

Every built template is self-checked against the real sequencer: the split
boundaries and per-slice classifications must equal the declared intent, or
generation fails with a ValidationError naming the constraint. Reruns with
the same spec are byte-identical.

The truth file is JSONL, one record per array::

    {"id": ..., "template": ..., "type": ..., "length": ..., "n": ...,
     "noise": ..., "slices": [{"start": ..., "len": ..., "shape": ...,
     "tag": ..., "mode": ..., "threads": ..., "round": 1|2,
     "perturbed": false}, ...]}
"""

from __future__ import annotations

import json
import random
import zlib
from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path
from typing import Iterable

from .errors import ValidationError
from .extract import normalize_threads
from .model import AccessRecord, Mode, ShapeKind
from .sequencer import (
    DEFAULT_FRINGES_MAX_DISTINCT,
    ROUND1_KINDS,
    Round,
    classify_whole,
    split_slices,
)
from .trace_io import open_text

MAX_HASH_TOKEN = 0xFFFFFFFF


def _fail(template: str, constraint: str) -> ValidationError:
    return ValidationError(f"template {template!r}: {constraint}")


# Index builders. Each returns the slice's index list.


def _build_constant(p: dict, rng: random.Random, t: str) -> list[int]:
    n, start = p.get("n", 1), p.get("start", 0)
    if n < 1:
        raise _fail(t, "Constant needs n >= 1")
    return [start] * n


def _build_linear(p: dict, rng: random.Random, t: str, sign: int) -> list[int]:
    n, start, step = p.get("n", 2), p.get("start", 0), p.get("step", 1)
    if n < 2:
        raise _fail(t, "Linear needs n >= 2")
    if step < 1:
        raise _fail(t, "Linear needs step >= 1")
    return [start + sign * step * k for k in range(n)]


def _build_rep_step(p: dict, rng: random.Random, t: str, sign: int) -> list[int]:
    n, start, step = p.get("n", 3), p.get("start", 0), p.get("step", 1)
    lead = p.get("lead", "repeat")
    if n < 3:
        raise _fail(t, "RepStep needs n >= 3")
    if step < 1:
        raise _fail(t, "RepStep needs step >= 1")
    if lead not in ("repeat", "step"):
        raise _fail(t, "RepStep lead must be 'repeat' or 'step'")
    out = [start]
    v = start
    for k in range(n - 1):
        move = (k % 2 == 0) == (lead == "step")
        if move:
            v += sign * step
        out.append(v)
    return out


def _build_var_step(p: dict, rng: random.Random, t: str, sign: int) -> list[int]:
    n, start = p.get("n", 3), p.get("start", 0)
    steps = p.get("steps", [1, 2])
    if n < 3:
        raise _fail(t, "VarStep needs n >= 3")
    if len(set(steps)) < 2 or any(s < 1 for s in steps):
        raise _fail(t, "VarStep needs >= 2 distinct positive steps")
    if len(set(steps[: min(len(steps), n - 1)])) < 2 and n - 1 < len(steps):
        raise _fail(t, "VarStep n too small to use two distinct steps")
    out = [start]
    v = start
    for k in range(n - 1):
        v += sign * steps[k % len(steps)]
        out.append(v)
    return out


def _build_fringes(p: dict, rng: random.Random, t: str) -> list[int]:
    n, base = p.get("n", 4), p.get("base", 2)
    d, gap = p.get("distinct", 2), p.get("gap", 5)
    if n < d + 2 or n < 4:
        raise _fail(t, "Fringes needs n >= max(4, distinct + 2)")
    if not 2 <= d <= DEFAULT_FRINGES_MAX_DISTINCT:
        raise _fail(t, "Fringes distinct must be in [2, 4]")
    if gap < 2:
        raise _fail(t, "Fringes gap must be >= 2 (gap 1 collides with LinRepUpDown)")
    values = [base + j * gap for j in range(d)]
    return [values[k % d] for k in range(n)]


def _build_peaks(p: dict, rng: random.Random, t: str) -> list[int]:
    start, up, down = p.get("start", 0), p.get("up", 2), p.get("down", 2)
    if up < 2 or down < 2:
        raise _fail(t, "Peaks needs up >= 2 and down >= 2")
    apex = start + up - 1
    if apex - (down - 1) < 0:
        raise _fail(t, "Peaks descends below 0")
    return list(range(start, apex + 1)) + list(range(apex - 1, apex - down, -1))


def _build_saws(p: dict, rng: random.Random, t: str) -> list[int]:
    start, runs, run_len = p.get("start", 0), p.get("runs", 2), p.get("run_len", 2)
    step, restart = p.get("step", 1), p.get("restart_step", 1)
    if runs < 2 or run_len < 2:
        raise _fail(t, "Saws needs runs >= 2 and run_len >= 2")
    if restart < 1:
        raise _fail(t, "Saws restart_step must be >= 1 (later runs start above the first)")
    rise = (run_len - 1) * step
    if restart >= rise:
        raise _fail(t, "Saws restart_step must be < run rise or runs merge")
    if step == 1 and rise - restart == 1:
        raise _fail(t, "Saws with all +-1 moves degenerates to LinRepUpDown")
    out = []
    for j in range(runs):
        base = start + j * restart
        out.extend(base + k * step for k in range(run_len))
    return out


def _build_parallel(p: dict, rng: random.Random, t: str) -> list[int]:
    low, high, k = p.get("low_start", 2), p.get("high_start"), p.get("k", 3)
    if k < 3:
        raise _fail(t, "ParallelTrav needs k >= 3 (distinct indices must exceed 4)")
    if high is None:
        high = low + 4 * k
    if high <= low + k:
        raise _fail(t, "ParallelTrav high_start must clear the low chain")
    lows = [low + j for j in range(k)]
    highs = [high + j for j in range(k)]
    out = [lows[0], highs[0], highs[1]]
    for j in range(1, k - 1):
        out.append(lows[j])
        out.append(highs[j + 1])
    out.append(lows[k - 1])
    return out


def _build_lin_rep_up_down(p: dict, rng: random.Random, t: str) -> list[int]:
    n, start = p.get("n", 5), p.get("start", 0)
    if n < 5:
        raise _fail(t, "LinRepUpDown needs n >= 5 for two direction changes")
    moves = (1, 1, -1)
    out = [start]
    v = start
    for k in range(n - 1):
        v += moves[k % 3]
        out.append(v)
    return out


def _build_unidentified(p: dict, rng: random.Random, t: str) -> list[int]:
    n, base = p.get("n", 6), p.get("base", 2)
    if n < 6 or n % 2:
        raise _fail(t, "Unidentified jumble needs even n >= 6")
    # Fixed non-matching core; any suffix keeps every predicate failing.
    highs = [7, 9, 6]
    lows = [2, 3, 4]
    for j in range(3, n // 2):
        highs.append(8 if j % 2 else 6)
        lows.append(2 + j)
    out = []
    for h, l in zip(highs, lows):
        out.extend((base + h, base + l))
    return out[:n]


_BUILDERS = {
    ShapeKind.CONSTANT: _build_constant,
    ShapeKind.LINEAR_INC: lambda p, r, t: _build_linear(p, r, t, 1),
    ShapeKind.LINEAR_DEC: lambda p, r, t: _build_linear(p, r, t, -1),
    ShapeKind.REP_STEP_INC: lambda p, r, t: _build_rep_step(p, r, t, 1),
    ShapeKind.REP_STEP_DEC: lambda p, r, t: _build_rep_step(p, r, t, -1),
    ShapeKind.VAR_STEP_INC: lambda p, r, t: _build_var_step(p, r, t, 1),
    ShapeKind.VAR_STEP_DEC: lambda p, r, t: _build_var_step(p, r, t, -1),
    ShapeKind.FRINGES: _build_fringes,
    ShapeKind.PEAKS: _build_peaks,
    ShapeKind.SAWS: _build_saws,
    ShapeKind.PARALLEL_TRAV: _build_parallel,
    ShapeKind.LIN_REP_UP_DOWN: _build_lin_rep_up_down,
    ShapeKind.UNIDENTIFIED: _build_unidentified,
}

_MODE_PLANS = ("r", "w", "rw_alt")


@dataclass
class _SliceIntent:
    start: int
    indices: list[int]
    modes: list[str]
    threads: list[int]
    kind: ShapeKind
    tag_text: str
    mode_plan: str
    round_: int


@dataclass
class _BuiltTemplate:
    name: str
    type_raw: str
    length: int
    count: int
    indices: list[int]
    modes: list[str]
    threads: list[int]
    slices: list[_SliceIntent]
    class_hash: int
    line_of: list[int]


def _template_rng(master_seed: int, template_name: str) -> random.Random:
    digest = blake2b(f"{master_seed}:{template_name}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _instance_rng(master_seed: int, template_name: str, instance: int) -> random.Random:
    digest = blake2b(
        f"{master_seed}:{template_name}:{instance}".encode(), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _build_template(tpl: dict, master_seed: int) -> _BuiltTemplate:
    name = tpl.get("name")
    if not name or not isinstance(name, str):
        raise ValidationError("every template needs a string 'name'")
    type_raw = tpl.get("type", "[I")
    length = tpl.get("length")
    count = tpl.get("count", 1)
    if not isinstance(length, int) or length < 1:
        raise _fail(name, "length must be a positive integer")
    if not isinstance(count, int) or count < 1:
        raise _fail(name, "count must be a positive integer")
    slice_specs = tpl.get("slices")
    if not slice_specs:
        raise _fail(name, "needs at least one slice")

    rng = _template_rng(master_seed, name)
    intents: list[_SliceIntent] = []
    indices: list[int] = []
    modes: list[str] = []
    threads: list[int] = []
    for spec in slice_specs:
        try:
            kind = ShapeKind(spec.get("shape"))
        except ValueError:
            raise _fail(name, f"unknown shape {spec.get('shape')!r}") from None
        repeat = spec.get("repeat", 1)
        if not isinstance(repeat, int) or repeat < 1:
            raise _fail(name, "repeat must be a positive integer")
        mode_plan = spec.get("mode", "r")
        if mode_plan not in _MODE_PLANS:
            raise _fail(name, f"mode must be one of {_MODE_PLANS}")
        k_threads = spec.get("threads", 1)
        if not isinstance(k_threads, int) or k_threads < 1:
            raise _fail(name, "threads must be a positive integer")
        for _ in range(repeat):
            idx = _BUILDERS[kind](spec, rng, name)
            if mode_plan == "rw_alt" and len(idx) < 2:
                raise _fail(name, "rw_alt needs a slice of length >= 2")
            slice_modes = (
                ["r" if j % 2 == 0 else "w" for j in range(len(idx))]
                if mode_plan == "rw_alt"
                else [mode_plan] * len(idx)
            )
            slice_threads = [1 + (j % k_threads) for j in range(len(idx))]
            tag = classify_whole(idx, Round.ROUND2)
            if tag.kind is not kind:
                raise _fail(
                    name,
                    f"built {kind.value} slice classifies as {tag.kind.value}: {idx}",
                )
            intents.append(
                _SliceIntent(
                    start=len(indices),
                    indices=idx,
                    modes=slice_modes,
                    threads=slice_threads,
                    kind=kind,
                    tag_text=tag.text,
                    mode_plan=mode_plan,
                    round_=1 if kind in ROUND1_KINDS else 2,
                )
            )
            indices.extend(idx)
            modes.extend(slice_modes)
            threads.extend(slice_threads)

    for i in indices:
        if not 0 <= i < length:
            raise _fail(name, f"index {i} outside array length {length}")

    # Self-check against the real sequencer: boundaries and tags must match.
    spans = [(s.start, s.start + len(s.indices)) for s in intents]
    if len(intents) == 1:
        # Round-1 whole matches never reach the splitter; round-2-only
        # shapes do, so their pattern must survive splitting in one piece.
        if intents[0].kind not in ROUND1_KINDS and split_slices(indices) != [
            (0, len(indices))
        ]:
            raise _fail(
                name,
                "single-slice pattern would be split before its round-2 "
                "shape is tried (index 0 or 1 repeats); adjust starts",
            )
    else:
        whole = classify_whole(indices, Round.ROUND1)
        if whole.kind is not ShapeKind.UNIDENTIFIED:
            raise _fail(
                name,
                f"multi-slice pattern whole-matches {whole.kind.value}; it would "
                "never be split",
            )
        if split_slices(indices) != spans:
            raise _fail(
                name,
                "declared slices disagree with the split rule (later slices must "
                "start at the split index, which may appear nowhere else)",
            )

    # Normalization sanity: emitted thread ids must already be normalized.
    fake_records = [
        AccessRecord(Mode(m), i, length, t, 0, 0)
        for i, m, t in zip(indices, modes, threads)
    ]
    normalize_threads(fake_records).validate_normalized()

    return _BuiltTemplate(
        name=name,
        type_raw=type_raw,
        length=length,
        count=count,
        indices=indices,
        modes=modes,
        threads=threads,
        slices=intents,
        class_hash=zlib.crc32(name.encode()) & 0xFFFFFFFF,
        line_of=[10 + _slice_ordinal(intents, pos) for pos in range(len(indices))],
    )


def _slice_ordinal(intents: list[_SliceIntent], pos: int) -> int:
    for ordinal, s in enumerate(intents):
        if s.start <= pos < s.start + len(s.indices):
            return ordinal
    raise ValueError(f"position {pos} outside all slices")


def validate_spec(spec: dict) -> None:
    if not isinstance(spec, dict):
        raise ValidationError("corpus spec must be a JSON object")
    if not isinstance(spec.get("seed"), int):
        raise ValidationError("corpus spec needs an integer 'seed'")
    noise = spec.get("noise", 0.0)
    if not isinstance(noise, (int, float)) or not 0.0 <= noise <= 1.0:
        raise ValidationError("noise must be a fraction in [0, 1]")
    templates = spec.get("templates")
    if not isinstance(templates, list) or not templates:
        raise ValidationError("corpus spec needs a non-empty 'templates' list")
    names = [t.get("name") for t in templates]
    if len(set(names)) != len(names):
        raise ValidationError("template names must be unique")
    for tpl in templates:
        _build_template(tpl, spec["seed"])


def perturb(spec: dict, noise: float) -> dict:
    """A copy of the spec with the given noise fraction."""
    if not 0.0 <= noise <= 1.0:
        raise ValidationError("noise must be a fraction in [0, 1]")
    out = dict(spec)
    out["noise"] = noise
    return out


@dataclass
class GenSummary:
    n_templates: int
    n_arrays: int
    n_lines: int
    seed: int


def _array_lines(
    built: _BuiltTemplate,
    instance: int,
    hash_token: int,
    master_seed: int,
    noise: float,
) -> tuple[list[str], set[int]]:
    """Raw lines for one array instance plus the perturbed positions."""
    rng = _instance_rng(master_seed, built.name, instance)
    thread_base = rng.randrange(0, 1 << 20) * 8
    n = len(built.indices)
    indices = built.indices
    perturbed: set[int] = set()
    if noise > 0:
        k = round(noise * n)
        if k:
            perturbed = set(rng.sample(range(n), k))
            indices = list(indices)
            for pos in perturbed:
                indices[pos] = rng.randrange(0, built.length)
    id_text = f"{built.type_raw}@{hash_token:x}"
    cls = f"{built.class_hash:X}"
    lines = [
        f"{id_text} {built.modes[j]} {indices[j]} {built.length} "
        f"{thread_base + built.threads[j]} {built.line_of[j]} {cls}"
        for j in range(n)
    ]
    return lines, perturbed


def _truth_record(
    built: _BuiltTemplate, id_text: str, noise: float, perturbed: set[int]
) -> dict:
    slices = []
    for s in built.slices:
        hit = any(s.start <= p < s.start + len(s.indices) for p in perturbed)
        slices.append(
            {
                "start": s.start,
                "len": len(s.indices),
                "shape": s.kind.value,
                "tag": s.tag_text,
                "mode": s.mode_plan,
                "threads": len(set(s.threads)),
                "round": s.round_,
                "perturbed": hit,
            }
        )
    return {
        "id": id_text,
        "template": built.name,
        "type": built.type_raw,
        "length": built.length,
        "n": len(built.indices),
        "noise": noise,
        "slices": slices,
    }


def generate(
    spec: dict, out_path: str | Path, truth_path: str | Path | None = None
) -> GenSummary:
    """Write the corpus (and optionally its truth file). Deterministic."""
    validate_spec(spec)
    master_seed = spec["seed"]
    noise = float(spec.get("noise", 0.0))
    interleave = bool(spec.get("interleave", False))
    window_size = int(spec.get("interleave_window", 256))
    if window_size < 2:
        raise ValidationError("interleave_window must be >= 2")

    built_templates = [_build_template(t, master_seed) for t in spec["templates"]]

    n_arrays = 0
    n_lines = 0
    token = 0
    truth_sink = None
    out = open_text(out_path, "wt")
    try:
        if truth_path is not None:
            truth_sink = open_text(truth_path, "wt")

        def arrays() -> Iterable[list[str]]:
            nonlocal n_arrays, token
            for built in built_templates:
                for instance in range(built.count):
                    token += 1
                    if token > MAX_HASH_TOKEN:
                        raise ValidationError("corpus exceeds 2^32 array instances")
                    lines, perturbed = _array_lines(
                        built, instance, token, master_seed, noise
                    )
                    if truth_sink is not None:
                        record = _truth_record(
                            built, f"{built.type_raw}@{token:x}", noise, perturbed
                        )
                        truth_sink.write(json.dumps(record, sort_keys=True))
                        truth_sink.write("\n")
                    n_arrays += 1
                    yield lines

        if not interleave:
            for lines in arrays():
                out.write("\n".join(lines))
                out.write("\n")
                n_lines += len(lines)
        else:
            window: list[list[str]] = []

            def flush(window: list[list[str]]) -> int:
                written = 0
                depth = max(len(ls) for ls in window)
                for j in range(depth):
                    for ls in window:
                        if j < len(ls):
                            out.write(ls[j])
                            out.write("\n")
                            written += 1
                return written

            for lines in arrays():
                window.append(lines)
                if len(window) >= window_size:
                    n_lines += flush(window)
                    window = []
            if window:
                n_lines += flush(window)
    finally:
        out.close()
        if truth_sink is not None:
            truth_sink.close()

    return GenSummary(
        n_templates=len(built_templates),
        n_arrays=n_arrays,
        n_lines=n_lines,
        seed=master_seed,
    )


def load_truth(path: str | Path) -> list[dict]:
    with open_text(path) as f:
        return [json.loads(line) for line in f if line.strip()]


@dataclass
class RecoveryReport:
    slices_total: int = 0
    slices_recovered: int = 0
    arrays_total: int = 0
    arrays_fully_recovered: int = 0

    @property
    def slice_fraction(self) -> float:
        return self.slices_recovered / self.slices_total if self.slices_total else 0.0

    @property
    def array_fraction(self) -> float:
        return self.arrays_fully_recovered / self.arrays_total if self.arrays_total else 0.0


def evaluate_recovery(truth_records: Iterable[dict], encodings: dict) -> RecoveryReport:
    """Compare sequencer output against planted truth.

    ``encodings`` maps array id text to a SequenceEncoding. A planted slice
    counts as recovered when the output contains a slice with the same
    start, length and tag; an array is fully recovered when its whole slice
    list matches exactly.
    """
    report = RecoveryReport()
    for record in truth_records:
        encoding = encodings.get(record["id"])
        report.arrays_total += 1
        expected = [(s["start"], s["len"], s["tag"]) for s in record["slices"]]
        report.slices_total += len(expected)
        if encoding is None:
            continue
        starts = encoding.slice_starts()
        actual = {
            (starts[i], s.len, s.shape.text) for i, s in enumerate(encoding.slices)
        }
        hits = sum(1 for e in expected if e in actual)
        report.slices_recovered += hits
        if hits == len(expected) and len(encoding.slices) == len(expected):
            report.arrays_fully_recovered += 1
    return report


def coverage_corpus_spec(arrays_per_template: int = 500, seed: int = 20240814) -> dict:
    """A spec exercising every shape tag, single- and multi-slice.

    All slices are at least 5 accesses long and array lengths at least 16,
    so a fully randomized index stream has no realistic chance of matching
    any planted slice span with its original shape.
    """
    c = arrays_per_template
    templates = [
        {"name": "const-w", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "Constant", "start": 5, "n": 12, "mode": "w"}]},
        {"name": "const-mt", "type": "[J", "length": 32, "count": c, "slices": [
            {"shape": "Constant", "start": 8, "n": 9, "mode": "rw_alt", "threads": 3}]},
        {"name": "sli-r", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 16, "step": 1, "mode": "r"}]},
        {"name": "li3-rw", "type": "[D", "length": 64, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 12, "step": 3, "mode": "rw_alt"}]},
        {"name": "sld-r", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "LinearDec", "start": 15, "n": 16, "step": 1, "mode": "r"}]},
        {"name": "ld2-w", "type": "[F", "length": 64, "count": c, "slices": [
            {"shape": "LinearDec", "start": 40, "n": 12, "step": 2, "mode": "w"}]},
        {"name": "rsi-rw", "type": "[Ljava.lang.Integer;", "length": 64, "count": c,
         "slices": [{"shape": "RepStepInc", "start": 0, "n": 12, "step": 2,
                     "mode": "rw_alt", "threads": 2}]},
        {"name": "rsd-r", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "RepStepDec", "start": 30, "n": 12, "step": 3, "mode": "r"}]},
        {"name": "vsi-w", "type": "[S", "length": 64, "count": c, "slices": [
            {"shape": "VarStepInc", "start": 0, "n": 12, "steps": [1, 3], "mode": "w"}]},
        {"name": "vsd-r", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "VarStepDec", "start": 50, "n": 12, "steps": [2, 1], "mode": "r"}]},
        {"name": "lud-r", "type": "[B", "length": 32, "count": c, "slices": [
            {"shape": "LinRepUpDown", "start": 2, "n": 15, "mode": "r"}]},
        {"name": "peaks-w", "type": "[I", "length": 32, "count": c, "slices": [
            {"shape": "Peaks", "start": 2, "up": 8, "down": 8, "mode": "w"}]},
        {"name": "saws-r", "type": "[I", "length": 32, "count": c, "slices": [
            {"shape": "Saws", "start": 2, "runs": 3, "run_len": 4, "step": 2, "mode": "r"}]},
        {"name": "pt-rw", "type": "[Lscala.collection.Seq;", "length": 32, "count": c,
         "slices": [{"shape": "ParallelTrav", "low_start": 2, "high_start": 20, "k": 6,
                     "mode": "rw_alt"}]},
        {"name": "fringes-w", "type": "[Z", "length": 16, "count": c, "slices": [
            {"shape": "Fringes", "base": 3, "n": 10, "distinct": 2, "gap": 5, "mode": "w"}]},
        {"name": "unid-r", "type": "[I", "length": 16, "count": c, "slices": [
            {"shape": "Unidentified", "base": 2, "n": 12, "mode": "r"}]},
        {"name": "sli-x3", "type": "[I", "length": 16, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "w"},
            {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "r"},
            {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "w"}]},
        {"name": "multi-mixed", "type": "[C", "length": 32, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 10, "step": 1, "mode": "r"},
            {"shape": "RepStepInc", "start": 0, "n": 9, "step": 3, "lead": "step",
             "mode": "w"},
            {"shape": "Peaks", "start": 0, "up": 5, "down": 4, "mode": "r"}]},
        {"name": "multi-split1", "type": "[I", "length": 32, "count": c, "slices": [
            {"shape": "LinearDec", "start": 9, "n": 8, "step": 1, "mode": "r"},
            {"shape": "VarStepInc", "start": 1, "n": 5, "steps": [1, 2], "mode": "w"},
            {"shape": "RepStepInc", "start": 1, "n": 6, "step": 3, "lead": "step",
             "mode": "w"}]},
        {"name": "multi-lud-sub", "type": "[I", "length": 16, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 8, "step": 1, "mode": "w"},
            {"shape": "LinRepUpDown", "start": 0, "n": 9, "mode": "r"}]},
        {"name": "multi-dec-first", "type": "[I", "length": 16, "count": c, "slices": [
            {"shape": "LinearDec", "start": 9, "n": 6, "step": 1, "mode": "r"},
            {"shape": "LinearInc", "start": 0, "n": 6, "step": 1, "mode": "w"},
            {"shape": "LinearInc", "start": 0, "n": 6, "step": 1, "mode": "w"}]},
    ]
    return {"seed": seed, "interleave": False, "noise": 0.0, "templates": templates}


def noise_probe_spec(arrays_per_template: int = 900, seed: int = 20240815) -> dict:
    """Single-slice templates for destructive-noise runs.

    Every template plants one identified shape (no Unidentified, whose tag
    survives randomization vacuously) spanning the whole pattern, with
    n >= 10 and length >= 32 so a fully randomized index stream has
    negligible probability of reproducing any planted (start, len, tag).
    """
    c = arrays_per_template
    templates = [
        {"name": "np-const", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "Constant", "start": 5, "n": 12, "mode": "w"}]},
        {"name": "np-sli", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 16, "step": 1, "mode": "r"}]},
        {"name": "np-li3", "type": "[D", "length": 64, "count": c, "slices": [
            {"shape": "LinearInc", "start": 0, "n": 12, "step": 3, "mode": "rw_alt"}]},
        {"name": "np-sld", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "LinearDec", "start": 15, "n": 16, "step": 1, "mode": "r"}]},
        {"name": "np-ld2", "type": "[F", "length": 64, "count": c, "slices": [
            {"shape": "LinearDec", "start": 40, "n": 12, "step": 2, "mode": "w"}]},
        {"name": "np-rsi", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "RepStepInc", "start": 0, "n": 12, "step": 2, "mode": "rw_alt"}]},
        {"name": "np-rsd", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "RepStepDec", "start": 30, "n": 12, "step": 3, "mode": "r"}]},
        {"name": "np-vsi", "type": "[S", "length": 64, "count": c, "slices": [
            {"shape": "VarStepInc", "start": 0, "n": 12, "steps": [1, 3], "mode": "w"}]},
        {"name": "np-vsd", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "VarStepDec", "start": 50, "n": 12, "steps": [2, 1], "mode": "r"}]},
        {"name": "np-lud", "type": "[B", "length": 32, "count": c, "slices": [
            {"shape": "LinRepUpDown", "start": 2, "n": 15, "mode": "r"}]},
        {"name": "np-peaks", "type": "[I", "length": 32, "count": c, "slices": [
            {"shape": "Peaks", "start": 2, "up": 8, "down": 8, "mode": "w"}]},
        {"name": "np-saws", "type": "[I", "length": 32, "count": c, "slices": [
            {"shape": "Saws", "start": 2, "runs": 5, "run_len": 6, "step": 2,
             "mode": "r"}]},
        {"name": "np-pt", "type": "[I", "length": 64, "count": c, "slices": [
            {"shape": "ParallelTrav", "low_start": 2, "high_start": 20, "k": 6,
             "mode": "rw_alt"}]},
        {"name": "np-fringes", "type": "[Z", "length": 32, "count": c, "slices": [
            {"shape": "Fringes", "base": 3, "n": 10, "distinct": 2, "gap": 5,
             "mode": "w"}]},
    ]
    return {"seed": seed, "interleave": False, "noise": 0.0, "templates": templates}


def three_runs_spec(count: int = 1, seed: int = 7) -> dict:
    """Three step-1 rising runs (w/r/w), 42 accesses, rejoined at index 0."""
    return {
        "seed": seed,
        "templates": [
            {
                "name": "three-runs",
                "type": "[I",
                "length": 16,
                "count": count,
                "slices": [
                    {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "w"},
                    {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "r"},
                    {"shape": "LinearInc", "start": 0, "n": 14, "step": 1, "mode": "w"},
                ],
            }
        ],
    }
