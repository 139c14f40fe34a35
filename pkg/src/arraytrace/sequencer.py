"""Shape classification and sequencing of access patterns.

A pattern is first matched whole against the shape list. If nothing matches,
it is split at every later occurrence of index 0 (when 0 occurs at least
twice), else index 1, else kept as a single slice; each slice is then
classified independently. One split level only: slices are never re-split.

Round 1 knows the monotone shapes (Constant, Linear, RepStep, VarStep).
Round 2 adds LinRepUpDown, Peaks, Saws, Fringes and ParallelTrav, and is
defined as a refinement: slices identified in round 1 are kept as-is, only
Unidentified slices are re-tried against the extended list. This keeps
round-1 attributions stable by construction.

Precedence (first match wins)::

    Constant > LinearInc > LinearDec > RepStepInc > RepStepDec
    > VarStepInc > VarStepDec > LinRepUpDown > Peaks > Saws
    > Fringes > ParallelTrav > Unidentified

Shape predicates look at indices only; modes and threads never influence
classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

from .errors import EncodingParseError
from .model import (
    AccessPattern,
    Coverage,
    Mode,
    RwClass,
    SequenceEncoding,
    ShapeKind,
    ShapeTag,
    SliceCode,
    coverage_of,
    mode_of_slice,
)

DEFAULT_FRINGES_MAX_DISTINCT = 4


class Round(IntEnum):
    ROUND1 = 1
    ROUND2 = 2


# Shape predicates. Each takes the index sequence of a slice.

def is_constant(idx: Sequence[int]) -> bool:
    """n >= 1, all indices equal. Singletons are Constant."""
    if not idx:
        return False
    first = idx[0]
    return all(v == first for v in idx)


def linear_step(idx: Sequence[int]) -> int | None:
    """The signed common difference when the sequence is arithmetic, else None.

    Zero steps are not linear (that is Constant territory).
    """
    if len(idx) < 2:
        return None
    step = idx[1] - idx[0]
    if step == 0:
        return None
    for k in range(1, len(idx) - 1):
        if idx[k + 1] - idx[k] != step:
            return None
    return step


def is_linear_inc(idx: Sequence[int]) -> bool:
    s = linear_step(idx)
    return s is not None and s > 0


def is_linear_dec(idx: Sequence[int]) -> bool:
    s = linear_step(idx)
    return s is not None and s < 0


def is_rep_step_inc(idx: Sequence[int]) -> bool:
    """n >= 3, nondecreasing, with at least one repeat and one rise."""
    if len(idx) < 3:
        return False
    has_eq = has_up = False
    for a, b in zip(idx, idx[1:]):
        if b < a:
            return False
        if b == a:
            has_eq = True
        else:
            has_up = True
    return has_eq and has_up


def is_rep_step_dec(idx: Sequence[int]) -> bool:
    if len(idx) < 3:
        return False
    has_eq = has_down = False
    for a, b in zip(idx, idx[1:]):
        if b > a:
            return False
        if b == a:
            has_eq = True
        else:
            has_down = True
    return has_eq and has_down


def is_var_step_inc(idx: Sequence[int]) -> bool:
    """n >= 3, strictly increasing, at least two distinct step sizes."""
    if len(idx) < 3:
        return False
    steps = set()
    for a, b in zip(idx, idx[1:]):
        if b <= a:
            return False
        steps.add(b - a)
    return len(steps) >= 2


def is_var_step_dec(idx: Sequence[int]) -> bool:
    if len(idx) < 3:
        return False
    steps = set()
    for a, b in zip(idx, idx[1:]):
        if b >= a:
            return False
        steps.add(a - b)
    return len(steps) >= 2


def is_lin_rep_up_down(idx: Sequence[int]) -> bool:
    """Moves are all +-1, both directions occur, direction changes >= 2."""
    if len(idx) < 4:
        return False
    prev = 0
    changes = 0
    for a, b in zip(idx, idx[1:]):
        d = b - a
        if d != 1 and d != -1:
            return False
        if prev and d != prev:
            changes += 1
        prev = d
    return changes >= 2


def is_peaks(idx: Sequence[int]) -> bool:
    """One rising run then one falling run, sharing the apex.

    Repeats are allowed inside either run; both runs need >= 2 elements,
    a net rise and a net fall.
    """
    n = len(idx)
    if n < 3:
        return False
    m = 0
    while m + 1 < n and idx[m + 1] >= idx[m]:
        m += 1
    if m == 0 or m == n - 1:
        return False
    if idx[m] <= idx[0] or idx[m] <= idx[n - 1]:
        return False
    for k in range(m, n - 1):
        if idx[k + 1] > idx[k]:
            return False
    return True


def _nondecreasing_runs(idx: Sequence[int]) -> list[tuple[int, int]]:
    """Maximal nondecreasing segments as half-open (start, end) spans."""
    runs = []
    start = 0
    for k in range(len(idx) - 1):
        if idx[k + 1] < idx[k]:
            runs.append((start, k + 1))
            start = k + 1
    runs.append((start, len(idx)))
    return runs


def is_saws(idx: Sequence[int]) -> bool:
    """>= 2 rising runs, each >= 2 long, later runs restarting above the first.

    Runs are the maximal nondecreasing segments; each must have a net rise.
    """
    runs = _nondecreasing_runs(idx)
    if len(runs) < 2:
        return False
    for s, e in runs:
        if e - s < 2 or idx[e - 1] <= idx[s]:
            return False
    first_start = idx[runs[0][0]]
    return all(idx[s] > first_start for s, e in runs[1:])


def is_fringes(idx: Sequence[int], max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT) -> bool:
    """Alternation over a handful of indices.

    n >= 4, between 2 and max_distinct distinct indices, and some index is
    left and later revisited (a non-adjacent reappearance).
    """
    if len(idx) < 4:
        return False
    if not 2 <= len(set(idx)) <= max_distinct:
        return False
    last_pos: dict[int, int] = {}
    for pos, v in enumerate(idx):
        p = last_pos.get(v)
        if p is not None and p < pos - 1:
            return True
        last_pos[v] = pos
    return False


def is_parallel_trav(idx: Sequence[int]) -> bool:
    """Two interleaved increasing traversals, found greedily.

    Each element extends the chain whose last value is the nearest
    predecessor (<= current, ties to the first chain); an element neither
    chain can take starts the second chain if still empty, otherwise the
    shape fails. No backtracking. Both chains must themselves match one of
    the increasing traversal shapes and must overlap in time.
    """
    if len(idx) < 4:
        return False
    a: list[int] = []
    b: list[int] = []
    a_pos: list[int] = []
    b_pos: list[int] = []
    for pos, x in enumerate(idx):
        can_a = bool(a) and a[-1] <= x
        can_b = bool(b) and b[-1] <= x
        if can_a and can_b:
            if a[-1] >= b[-1]:
                a.append(x)
                a_pos.append(pos)
            else:
                b.append(x)
                b_pos.append(pos)
        elif can_a:
            a.append(x)
            a_pos.append(pos)
        elif can_b:
            b.append(x)
            b_pos.append(pos)
        elif not a:
            a.append(x)
            a_pos.append(pos)
        elif not b:
            b.append(x)
            b_pos.append(pos)
        else:
            return False
    for chain in (a, b):
        if not (is_linear_inc(chain) or is_rep_step_inc(chain) or is_var_step_inc(chain)):
            return False
    return a_pos[0] < b_pos[-1] and b_pos[0] < a_pos[-1]


ROUND1_KINDS: tuple[ShapeKind, ...] = (
    ShapeKind.CONSTANT,
    ShapeKind.LINEAR_INC,
    ShapeKind.LINEAR_DEC,
    ShapeKind.REP_STEP_INC,
    ShapeKind.REP_STEP_DEC,
    ShapeKind.VAR_STEP_INC,
    ShapeKind.VAR_STEP_DEC,
)

ROUND2_ONLY_KINDS: tuple[ShapeKind, ...] = (
    ShapeKind.LIN_REP_UP_DOWN,
    ShapeKind.PEAKS,
    ShapeKind.SAWS,
    ShapeKind.FRINGES,
    ShapeKind.PARALLEL_TRAV,
)

ROUND2_KINDS: tuple[ShapeKind, ...] = ROUND1_KINDS + ROUND2_ONLY_KINDS


def kinds_for(round_: Round) -> tuple[ShapeKind, ...]:
    return ROUND1_KINDS if round_ is Round.ROUND1 else ROUND2_KINDS


def match_shape(
    indices: Sequence[int],
    kind: ShapeKind,
    fringes_max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT,
) -> bool:
    """Does this index sequence satisfy one shape's predicate, in isolation?"""
    if kind is ShapeKind.CONSTANT:
        return is_constant(indices)
    if kind is ShapeKind.LINEAR_INC:
        return is_linear_inc(indices)
    if kind is ShapeKind.LINEAR_DEC:
        return is_linear_dec(indices)
    if kind is ShapeKind.REP_STEP_INC:
        return is_rep_step_inc(indices)
    if kind is ShapeKind.REP_STEP_DEC:
        return is_rep_step_dec(indices)
    if kind is ShapeKind.VAR_STEP_INC:
        return is_var_step_inc(indices)
    if kind is ShapeKind.VAR_STEP_DEC:
        return is_var_step_dec(indices)
    if kind is ShapeKind.LIN_REP_UP_DOWN:
        return is_lin_rep_up_down(indices)
    if kind is ShapeKind.PEAKS:
        return is_peaks(indices)
    if kind is ShapeKind.SAWS:
        return is_saws(indices)
    if kind is ShapeKind.FRINGES:
        return is_fringes(indices, fringes_max_distinct)
    if kind is ShapeKind.PARALLEL_TRAV:
        return is_parallel_trav(indices)
    if kind is ShapeKind.UNIDENTIFIED:
        return not any(
            match_shape(indices, k, fringes_max_distinct) for k in ROUND2_KINDS
        )
    raise ValueError(f"unknown shape kind: {kind}")


def classify_whole(
    indices: Sequence[int],
    round_: Round = Round.ROUND2,
    fringes_max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT,
) -> ShapeTag:
    """First matching shape in precedence order, or Unidentified."""
    for kind in kinds_for(round_):
        if match_shape(indices, kind, fringes_max_distinct):
            if kind is ShapeKind.LINEAR_INC or kind is ShapeKind.LINEAR_DEC:
                step = linear_step(indices)
                assert step is not None
                return ShapeTag(kind, abs(step))
            return ShapeTag(kind)
    return ShapeTag(ShapeKind.UNIDENTIFIED)


def split_points(indices: Sequence[int]) -> tuple[int, list[int]]:
    """(split index value, slice start positions beyond 0) for a pattern.

    Split at every occurrence of 0 when 0 occurs at least twice, else at
    every occurrence of 1 under the same condition, else no split. The
    first slice always starts at position 0.
    """
    for value in (0, 1):
        positions = [p for p, v in enumerate(indices) if v == value]
        if len(positions) >= 2:
            return value, [p for p in positions if p > 0]
    return -1, []


def split_slices(indices: Sequence[int]) -> list[tuple[int, int]]:
    """Half-open (start, end) slice spans covering the whole pattern."""
    _, starts = split_points(indices)
    bounds = [0] + starts + [len(indices)]
    spans = []
    for a, b in zip(bounds, bounds[1:]):
        if b > a:
            spans.append((a, b))
    return spans


def _slice_code(
    entries: tuple[tuple[int, Mode, int], ...],
    round_: Round,
    fringes_max_distinct: int,
) -> SliceCode:
    indices = [e[0] for e in entries]
    tag = classify_whole(indices, round_, fringes_max_distinct)
    return SliceCode(
        shape=tag,
        mode=mode_of_slice(entries),
        thread_count=len({e[2] for e in entries}),
        len=len(entries),
    )


def sequence(
    pattern: AccessPattern,
    round_: Round = Round.ROUND1,
    fringes_max_distinct: int = DEFAULT_FRINGES_MAX_DISTINCT,
) -> SequenceEncoding:
    """Sequence one pattern into slice codes plus a coverage verdict."""
    entries = pattern.entries
    if not entries:
        raise EncodingParseError("cannot sequence an empty pattern")
    indices = [e[0] for e in entries]
    min_index = min(indices)

    whole = classify_whole(indices, Round.ROUND1, fringes_max_distinct)
    if whole.kind is not ShapeKind.UNIDENTIFIED:
        code = SliceCode(
            shape=whole,
            mode=mode_of_slice(entries),
            thread_count=len({e[2] for e in entries}),
            len=len(entries),
        )
        return SequenceEncoding(min_index, (code,), Coverage.FULL)

    spans = split_slices(indices)
    codes = [
        _slice_code(entries[a:b], Round.ROUND1, fringes_max_distinct) for a, b in spans
    ]
    if round_ is Round.ROUND2:
        refined = []
        for (a, b), code in zip(spans, codes):
            if code.shape.kind is ShapeKind.UNIDENTIFIED:
                refined.append(_slice_code(entries[a:b], Round.ROUND2, fringes_max_distinct))
            else:
                refined.append(code)
        codes = refined
    slices = tuple(codes)
    return SequenceEncoding(min_index, slices, coverage_of(slices))


def render(encoding: SequenceEncoding, whole_pattern_lengths: bool = False) -> str:
    """Render an encoding to its text form.

    Default slice length is the slice's own length. With
    ``whole_pattern_lengths`` every slice shows the whole-pattern length
    instead; that rendering is for display parity with tooling that prints
    totals per slice, and is not parseable back to the same encoding.
    """
    total = encoding.pattern_len
    parts = []
    for s in encoding.slices:
        shown = total if whole_pattern_lengths else s.len
        parts.append(f"{s.shape.text} {s.mode.value} {s.thread_count} {shown}")
    return f"{encoding.min_index}: |" + "|".join(parts) + "|"


def parse_encoding(text: str) -> SequenceEncoding:
    """Exact inverse of the default render()."""
    head, sep, body = text.partition(": ")
    if not sep:
        raise EncodingParseError(f"missing ': ' separator: {text!r}")
    try:
        min_index = int(head)
    except ValueError:
        raise EncodingParseError(f"bad min index: {head!r}") from None
    if not body.startswith("|") or not body.endswith("|") or len(body) < 2:
        raise EncodingParseError(f"slice list must be |-delimited: {body!r}")
    slices = []
    for field in body[1:-1].split("|"):
        parts = field.split(" ")
        if len(parts) != 4:
            raise EncodingParseError(f"slice needs 'TAG mode threads len': {field!r}")
        tag_s, mode_s, threads_s, len_s = parts
        try:
            mode = RwClass(mode_s)
        except ValueError:
            raise EncodingParseError(f"bad slice mode: {mode_s!r}") from None
        try:
            thread_count = int(threads_s)
            slice_len = int(len_s)
        except ValueError:
            raise EncodingParseError(f"bad slice numbers: {field!r}") from None
        slices.append(
            SliceCode(
                shape=ShapeTag.from_text(tag_s),
                mode=mode,
                thread_count=thread_count,
                len=slice_len,
            )
        )
    if not slices:
        raise EncodingParseError("encoding has no slices")
    codes = tuple(slices)
    return SequenceEncoding(min_index, codes, coverage_of(codes))


@dataclass(frozen=True)
class ShareTable:
    """Access counts per shape name, plus the grand total."""

    accesses: dict[str, int]
    total: int

    def share(self, name: str) -> float:
        return self.accesses.get(name, 0) / self.total if self.total else 0.0


def access_shares(items: Iterable[tuple[SequenceEncoding, int]]) -> ShareTable:
    """Aggregate access counts per shape over (encoding, member_count) pairs.

    A slice of length L in a pattern shared by m arrays contributes L*m
    accesses to its shape. Linear shapes aggregate under one name per
    direction regardless of step.
    """
    counts: dict[str, int] = {}
    total = 0
    for encoding, members in items:
        for s in encoding.slices:
            name = s.shape.kind.value
            counts[name] = counts.get(name, 0) + s.len * members
            total += s.len * members
    return ShareTable(accesses=counts, total=total)
