"""Core value types for array access traces.

Everything in this module is immutable. Identity of an array within a trace
is an (element type, 32-bit hash token) pair; two distinct runtime arrays may
collide on the same pair, and nothing downstream may assume otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import ValidationError

HASH_TOKEN_MAX = 0xFFFFFFFF

_PRIMITIVE_NAMES = {
    "Z": "boolean",
    "B": "byte",
    "C": "char",
    "D": "double",
    "F": "float",
    "I": "int",
    "J": "long",
    "S": "short",
}


class Mode(str, Enum):
    """Access mode of a single array operation."""

    READ = "r"
    WRITE = "w"


class RwClass(str, Enum):
    """Read/write classification of a trace or of one slice."""

    READ_ONLY = "r"
    WRITE_ONLY = "w"
    READ_WRITE = "rw"


@dataclass(frozen=True)
class TypeDescriptor:
    """Array type in descriptor syntax, e.g. ``[I`` or ``[Ljava.lang.Integer;``.

    ``raw`` is preserved verbatim so printing always round-trips. ``dims`` is
    the number of leading ``[`` characters and ``element`` the remainder.
    Object elements normally end with ``;`` but real logs contain truncated
    forms, so that is tolerated rather than rejected.
    """

    raw: str
    dims: int
    element: str

    @classmethod
    def parse(cls, raw: str) -> "TypeDescriptor":
        dims = 0
        for ch in raw:
            if ch != "[":
                break
            dims += 1
        if dims == 0:
            raise ValidationError(f"not an array descriptor (no leading '['): {raw!r}")
        element = raw[dims:]
        if not element:
            raise ValidationError(f"array descriptor has empty element type: {raw!r}")
        return cls(raw=raw, dims=dims, element=element)

    def element_name(self) -> str:
        """Human name of the element: 'int', 'java.lang.Integer', ..."""
        el = self.element
        if el in _PRIMITIVE_NAMES:
            return _PRIMITIVE_NAMES[el]
        if el.startswith("L"):
            return el[1:-1] if el.endswith(";") else el[1:]
        return el

    def __str__(self) -> str:
        return self.raw


@dataclass(frozen=True, order=True)
class ArrayKey:
    """Identity of one traced array: element type plus 32-bit hash token.

    Ordering is (type.raw, hash_token); this is the deterministic output
    order used everywhere a set of arrays is listed.
    """

    type: TypeDescriptor
    hash_token: int

    def __post_init__(self) -> None:
        if not 0 <= self.hash_token <= HASH_TOKEN_MAX:
            raise ValidationError(f"hash token out of 32-bit range: {self.hash_token:#x}")

    @classmethod
    def parse(cls, id_text: str) -> "ArrayKey":
        type_raw, sep, token = id_text.rpartition("@")
        if not sep or not type_raw or not token:
            raise ValidationError(f"array id must be '<type>@<hex>': {id_text!r}")
        try:
            value = int(token, 16)
        except ValueError:
            raise ValidationError(f"array id hash token is not hex: {id_text!r}") from None
        return cls(type=TypeDescriptor.parse(type_raw), hash_token=value)

    @property
    def id_text(self) -> str:
        return f"{self.type.raw}@{self.hash_token:x}"

    @property
    def sort_key(self) -> tuple[str, int]:
        return (self.type.raw, self.hash_token)

    def __str__(self) -> str:
        return self.id_text


class AccessRecord(NamedTuple):
    """One array access as logged by an agent.

    ``length`` is the array length observed at this access (>= 1).
    ``line`` is the source line, -1 when unknown. ``class_hash`` is the
    32-bit token of the class performing the access.
    """

    mode: Mode
    index: int
    length: int
    thread: int
    line: int
    class_hash: int


@dataclass(frozen=True)
class AccessPattern:
    """Ordered (index, mode, thread) view of one array's accesses.

    Threads are normalized: ids form {1..k} in order of first appearance.
    Source line and class are deliberately not part of pattern identity.
    """

    entries: tuple[tuple[int, Mode, int], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def indices(self) -> tuple[int, ...]:
        return tuple(e[0] for e in self.entries)

    def validate_normalized(self) -> None:
        """Raise unless thread ids are exactly {1..k} in first-appearance order."""
        next_new = 1
        seen: set[int] = set()
        for _, _, t in self.entries:
            if t in seen:
                continue
            if t != next_new:
                raise ValidationError(f"thread ids not normalized: saw {t}, expected {next_new}")
            seen.add(t)
            next_new += 1


class ShapeKind(str, Enum):
    """The index-shape vocabulary, including the no-match sentinel."""

    CONSTANT = "Constant"
    LINEAR_INC = "LinearInc"
    LINEAR_DEC = "LinearDec"
    REP_STEP_INC = "RepStepInc"
    REP_STEP_DEC = "RepStepDec"
    VAR_STEP_INC = "VarStepInc"
    VAR_STEP_DEC = "VarStepDec"
    FRINGES = "Fringes"
    PEAKS = "Peaks"
    SAWS = "Saws"
    PARALLEL_TRAV = "ParallelTrav"
    LIN_REP_UP_DOWN = "LinRepUpDown"
    UNIDENTIFIED = "Unidentified"


_LINEAR_KINDS = frozenset({ShapeKind.LINEAR_INC, ShapeKind.LINEAR_DEC})

# Tag text for the non-linear kinds; linear tags depend on the step.
_KIND_TAG = {
    ShapeKind.CONSTANT: "C",
    ShapeKind.REP_STEP_INC: "RSi",
    ShapeKind.REP_STEP_DEC: "RSd",
    ShapeKind.VAR_STEP_INC: "VSi",
    ShapeKind.VAR_STEP_DEC: "VSd",
    ShapeKind.FRINGES: "F",
    ShapeKind.PEAKS: "P",
    ShapeKind.SAWS: "S",
    ShapeKind.PARALLEL_TRAV: "PT",
    ShapeKind.LIN_REP_UP_DOWN: "LUD",
    ShapeKind.UNIDENTIFIED: "U",
}
_TAG_KIND = {v: k for k, v in _KIND_TAG.items()}


@dataclass(frozen=True)
class ShapeTag:
    """A shape kind, plus the step size for the linear kinds only."""

    kind: ShapeKind
    step: int | None = None

    def __post_init__(self) -> None:
        if self.kind in _LINEAR_KINDS:
            if self.step is None or self.step < 1:
                raise ValidationError(f"{self.kind.value} requires step >= 1")
        elif self.step is not None:
            raise ValidationError(f"{self.kind.value} does not take a step")

    @property
    def text(self) -> str:
        if self.kind is ShapeKind.LINEAR_INC:
            return "SLi" if self.step == 1 else f"Li{self.step}"
        if self.kind is ShapeKind.LINEAR_DEC:
            return "SLd" if self.step == 1 else f"Ld{self.step}"
        return _KIND_TAG[self.kind]

    @classmethod
    def from_text(cls, text: str) -> "ShapeTag":
        if text in _TAG_KIND:
            return cls(_TAG_KIND[text])
        if text == "SLi":
            return cls(ShapeKind.LINEAR_INC, 1)
        if text == "SLd":
            return cls(ShapeKind.LINEAR_DEC, 1)
        for prefix, kind in (("Li", ShapeKind.LINEAR_INC), ("Ld", ShapeKind.LINEAR_DEC)):
            if text.startswith(prefix) and text[len(prefix):].isdigit():
                return cls(kind, int(text[len(prefix):]))
        raise ValidationError(f"unknown shape tag: {text!r}")

    def __str__(self) -> str:
        return self.text


class Coverage(str, Enum):
    """How much of a pattern the identified slices cover."""

    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


@dataclass(frozen=True)
class SliceCode:
    """Summary of one slice: shape, slice mode, thread count, length."""

    shape: ShapeTag
    mode: RwClass
    thread_count: int
    len: int

    def __post_init__(self) -> None:
        if self.len < 1:
            raise ValidationError("slice length must be >= 1")
        if self.thread_count < 1:
            raise ValidationError("slice thread count must be >= 1")


@dataclass(frozen=True)
class SequenceEncoding:
    """Sequenced form of one pattern: min index, slice codes, coverage.

    Slices are contiguous and in pattern order; their lengths sum to the
    pattern length. Slice start offsets are therefore the prefix sums.
    """

    min_index: int
    slices: tuple[SliceCode, ...]
    coverage: Coverage

    @property
    def pattern_len(self) -> int:
        return sum(s.len for s in self.slices)

    def slice_starts(self) -> tuple[int, ...]:
        starts = []
        pos = 0
        for s in self.slices:
            starts.append(pos)
            pos += s.len
        return tuple(starts)


def coverage_of(slices: tuple[SliceCode, ...]) -> Coverage:
    """Full if no slice is Unidentified, None if all are, else Partial."""
    unid = [s.shape.kind is ShapeKind.UNIDENTIFIED for s in slices]
    if not any(unid):
        return Coverage.FULL
    if all(unid):
        return Coverage.NONE
    return Coverage.PARTIAL


def mode_of_slice(entries: tuple[tuple[int, Mode, int], ...]) -> RwClass:
    """Read/write class of a run of pattern entries. Empty input is a bug."""
    if not entries:
        raise ValidationError("mode_of_slice: empty slice")
    saw_r = saw_w = False
    for _, mode, _ in entries:
        if mode is Mode.READ:
            saw_r = True
        else:
            saw_w = True
        if saw_r and saw_w:
            return RwClass.READ_WRITE
    return RwClass.READ_ONLY if saw_r else RwClass.WRITE_ONLY


def classify_rw(modes_seen_r: bool, modes_seen_w: bool) -> RwClass:
    """RwClass from two booleans; at least one must be set."""
    if modes_seen_r and modes_seen_w:
        return RwClass.READ_WRITE
    if modes_seen_r:
        return RwClass.READ_ONLY
    if modes_seen_w:
        return RwClass.WRITE_ONLY
    raise ValidationError("classify_rw: no accesses")
