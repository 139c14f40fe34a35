import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arraytrace.errors import EncodingParseError
from arraytrace.extract import normalize_threads
from arraytrace.model import (
    AccessRecord,
    Coverage,
    Mode,
    RwClass,
    ShapeKind,
)
from arraytrace.sequencer import (
    ROUND1_KINDS,
    ROUND2_KINDS,
    Round,
    access_shares,
    classify_whole,
    is_constant,
    is_fringes,
    is_lin_rep_up_down,
    is_linear_dec,
    is_linear_inc,
    is_parallel_trav,
    is_peaks,
    is_rep_step_dec,
    is_rep_step_inc,
    is_saws,
    is_var_step_dec,
    is_var_step_inc,
    linear_step,
    match_shape,
    parse_encoding,
    render,
    sequence,
    split_points,
    split_slices,
)


def pattern_of(indices, modes=None, threads=None):
    n = len(indices)
    modes = modes or ["r"] * n
    threads = threads or [1] * n
    records = [
        AccessRecord(Mode(m), i, 64, t, 0, 0)
        for i, m, t in zip(indices, modes, threads)
    ]
    return normalize_threads(records)


class TestPredicates:
    def test_constant(self):
        assert is_constant([5])
        assert is_constant([5, 5, 5])
        assert not is_constant([5, 6])
        assert not is_constant([])

    def test_linear(self):
        assert linear_step([0, 1, 2]) == 1
        assert linear_step([3, 6, 9]) == 3
        assert linear_step([9, 7, 5]) == -2
        assert linear_step([4]) is None
        assert linear_step([2, 2]) is None  # zero step is constant, not linear
        assert linear_step([0, 1, 3]) is None
        assert is_linear_inc([0, 1, 2])
        assert not is_linear_inc([2, 1, 0])
        assert is_linear_dec([9, 8, 7])
        assert not is_linear_dec([0, 1, 2])

    def test_rep_step(self):
        assert is_rep_step_inc([0, 0, 2, 2, 4, 4])
        assert is_rep_step_inc([0, 0, 1, 2, 2, 5])  # irregular but monotone
        assert not is_rep_step_inc([0, 0, 0])  # never moves
        assert not is_rep_step_inc([0, 1, 2])  # never repeats
        assert not is_rep_step_inc([0, 0])  # too short
        assert is_rep_step_dec([4, 4, 2, 2, 0, 0])
        assert not is_rep_step_dec([0, 0, 2])

    def test_var_step(self):
        assert is_var_step_inc([0, 1, 3])
        assert not is_var_step_inc([0, 1, 2])  # single step is linear
        assert not is_var_step_inc([0, 0, 3])  # repeat breaks strictness
        assert not is_var_step_inc([3, 1, 0])
        assert is_var_step_dec([9, 8, 5])
        assert not is_var_step_dec([9, 7, 5])

    def test_lin_rep_up_down(self):
        assert is_lin_rep_up_down([0, 1, 0, 1])
        assert is_lin_rep_up_down([0, 1, 2, 1, 2])
        assert not is_lin_rep_up_down([0, 1, 2, 1])  # one direction change
        assert not is_lin_rep_up_down([0, 1, 1, 0])  # zero move
        assert not is_lin_rep_up_down([0, 2, 0, 2])  # step two
        assert not is_lin_rep_up_down([0, 1, 0])  # too short

    def test_peaks(self):
        assert is_peaks([0, 1, 2, 1, 0])
        assert is_peaks([0, 2, 2, 1])
        assert not is_peaks([0, 1, 2])  # no descent
        assert not is_peaks([3, 2, 1])  # no ascent
        assert not is_peaks([0, 1, 0, 1])  # suffix rises again
        assert not is_peaks([2, 1, 2])  # apex not above first

    def test_saws(self):
        assert is_saws([2, 4, 6, 3, 5, 7])
        assert is_saws([2, 4, 3, 5, 7])
        assert not is_saws([0, 1, 2, 3])  # single run
        assert not is_saws([5, 6, 0, 1])  # later run starts below the first

    def test_fringes(self):
        assert is_fringes([3, 8, 3, 8])
        assert is_fringes([0, 1, 2, 3, 0, 1, 2, 3])
        assert not is_fringes([0, 1, 2, 3, 4, 0], max_distinct=4)  # five values
        assert is_fringes([0, 1, 2, 3, 4, 0], max_distinct=5)
        assert not is_fringes([0, 1, 2, 3])  # no revisit
        assert not is_fringes([3, 3, 8, 8])  # only adjacent repeats
        assert not is_fringes([3, 8, 3])  # too short

    def test_parallel_trav(self):
        assert is_parallel_trav([0, 10, 11, 1, 12, 2, 13, 3])
        assert not is_parallel_trav([0, 1, 2, 3, 4, 5])  # one chain only
        assert not is_parallel_trav([0, 10, 1, 9])  # second chain descends


class TestClassification:
    CASES = [
        ([5, 5, 5], "C"),
        ([0, 1, 2, 3], "SLi"),
        ([0, 3, 6], "Li3"),
        ([5, 4, 3], "SLd"),
        ([9, 7, 5], "Ld2"),
        ([0, 0, 2, 2, 4, 4], "RSi"),
        ([4, 4, 2, 2, 0, 0], "RSd"),
        ([0, 1, 3, 4, 6], "VSi"),
        ([9, 8, 5, 4, 1], "VSd"),
        ([2, 3, 2, 3, 4], "LUD"),
        ([2, 3, 4, 3, 2], "P"),
        ([2, 4, 6, 3, 5, 7], "S"),
        ([3, 8, 3, 8, 3], "F"),
        ([2, 12, 13, 3, 14, 4, 15, 5], "PT"),
        ([7, 2, 9, 3, 6, 4], "U"),
    ]

    @pytest.mark.parametrize("indices,tag", CASES)
    def test_whole_classification(self, indices, tag):
        assert classify_whole(indices, Round.ROUND2).text == tag

    def test_precedence_constant_beats_everything(self):
        # A constant sequence is also nondecreasing/nonincreasing, yet the
        # repeated-step predicates require movement, so only C matches.
        assert classify_whole([5, 5, 5, 5], Round.ROUND2).text == "C"

    def test_precedence_lud_beats_saws(self):
        # All +-1 moves with two direction changes: both LUD and Saws-like,
        # LUD wins by order.
        assert classify_whole([0, 1, 2, 1, 2, 3], Round.ROUND2).text == "LUD"

    def test_precedence_peaks_beats_fringes(self):
        # Two distinct values revisited non-adjacently also rise then fall.
        assert classify_whole([0, 9, 0], Round.ROUND2).text == "P"

    def test_round1_never_yields_round2_shapes(self):
        tag = classify_whole([2, 3, 2, 3, 4], Round.ROUND1)
        assert tag.kind is ShapeKind.UNIDENTIFIED

    def test_match_shape_unidentified_means_nothing_matches(self):
        assert match_shape([7, 2, 9, 3, 6, 4], ShapeKind.UNIDENTIFIED)
        assert not match_shape([0, 1, 2], ShapeKind.UNIDENTIFIED)


class TestSplitting:
    def test_split_on_repeated_zero(self):
        value, starts = split_points([0, 1, 0, 1])
        assert value == 0
        assert starts == [2]
        assert split_slices([0, 1, 0, 1]) == [(0, 2), (2, 4)]

    def test_zero_repeats_beat_one_repeats(self):
        assert split_slices([0, 1, 1, 0, 1]) == [(0, 3), (3, 5)]

    def test_split_on_repeated_one_when_zero_single(self):
        assert split_slices([5, 9, 1, 2, 1, 9]) == [(0, 2), (2, 4), (4, 6)]

    def test_first_slice_starts_at_zero_even_if_split_value_absent_there(self):
        # Pattern starts at 9; the split index 0 first occurs at position 2.
        assert split_slices([9, 8, 0, 1, 0, 1]) == [(0, 2), (2, 4), (4, 6)]

    def test_no_repeats_yields_single_slice(self):
        assert split_slices([5, 9, 4]) == [(0, 3)]
        assert split_slices([0, 9, 1]) == [(0, 3)]


class TestSequencing:
    def test_round1_whole_match(self):
        enc = sequence(pattern_of([0, 0, 2, 2, 4, 4]), Round.ROUND1)
        assert len(enc.slices) == 1
        assert enc.slices[0].shape.text == "RSi"
        assert enc.coverage is Coverage.FULL

    def test_round2_refines_only_unidentified_slices(self):
        # Round 1: split at 0s -> two SLi slices, both identified.
        # Round 2 must keep them rather than re-matching the whole pattern
        # (which would be LUD).
        p = pattern_of([0, 1, 0, 1])
        r1 = sequence(p, Round.ROUND1)
        r2 = sequence(p, Round.ROUND2)
        assert [s.shape.text for s in r1.slices] == ["SLi", "SLi"]
        assert r1 == r2

    def test_round2_upgrades_none_to_full(self):
        p = pattern_of([0, 9, 1, 0, 9, 1])
        r1 = sequence(p, Round.ROUND1)
        r2 = sequence(p, Round.ROUND2)
        assert r1.coverage is Coverage.NONE
        assert [s.shape.text for s in r1.slices] == ["U", "U"]
        assert r2.coverage is Coverage.FULL
        assert [s.shape.text for s in r2.slices] == ["P", "P"]

    def test_slice_modes_and_threads(self):
        p = pattern_of(
            [0, 1, 0, 1],
            modes=["r", "r", "w", "w"],
            threads=[9, 9, 4, 7],
        )
        enc = sequence(p, Round.ROUND2)
        assert [s.mode for s in enc.slices] == [RwClass.READ_ONLY, RwClass.WRITE_ONLY]
        assert [s.thread_count for s in enc.slices] == [1, 2]

    def test_min_index_is_pattern_minimum(self):
        enc = sequence(pattern_of([5, 6, 7]), Round.ROUND2)
        assert enc.min_index == 5


class TestRendering:
    def test_render_default(self):
        enc = sequence(pattern_of([0, 1, 0, 1], modes=["w", "w", "r", "r"]), Round.ROUND2)
        assert render(enc) == "0: |SLi w 1 2|SLi r 1 2|"

    def test_render_whole_pattern_lengths(self):
        enc = sequence(pattern_of([0, 1, 0, 1], modes=["w", "w", "r", "r"]), Round.ROUND2)
        assert render(enc, whole_pattern_lengths=True) == "0: |SLi w 1 4|SLi r 1 4|"

    def test_parse_encoding_round_trip(self):
        enc = sequence(pattern_of([0, 9, 1, 0, 9, 1]), Round.ROUND2)
        text = render(enc)
        assert parse_encoding(text) == enc

    @pytest.mark.parametrize(
        "bad",
        ["", "0:", "0: |", "x: |C r 1 1|", "0: |C r 1|", "0: |C z 1 1|", "0: C r 1 1"],
    )
    def test_parse_encoding_rejects(self, bad):
        with pytest.raises(EncodingParseError):
            parse_encoding(bad)


class TestAccessShares:
    def test_slice_length_times_members(self):
        p1 = pattern_of([0, 1, 2, 3])  # SLi, 4 accesses
        p2 = pattern_of([0, 9, 1, 0, 9, 1])  # two P slices of 3 under round 2
        e1 = sequence(p1, Round.ROUND2)
        e2 = sequence(p2, Round.ROUND2)
        table = access_shares([(e1, 10), (e2, 5)])
        assert table.total == 4 * 10 + 6 * 5
        assert table.accesses["LinearInc"] == 40
        assert table.accesses["Peaks"] == 30
        assert table.share("LinearInc") == pytest.approx(40 / 70)


indices_st = st.lists(st.integers(0, 6), min_size=1, max_size=28)
entries_st = st.lists(
    st.tuples(
        st.integers(0, 6),
        st.sampled_from([Mode.READ, Mode.WRITE]),
        st.integers(1, 3),
    ),
    min_size=1,
    max_size=28,
)


@given(indices_st)
def test_classification_is_total_and_respects_precedence(indices):
    tag = classify_whole(indices, Round.ROUND2)
    assert tag.kind in ROUND2_KINDS or tag.kind is ShapeKind.UNIDENTIFIED
    matched = [k for k in ROUND2_KINDS if match_shape(indices, k)]
    if matched:
        assert tag.kind is matched[0]
    else:
        assert tag.kind is ShapeKind.UNIDENTIFIED


@given(indices_st)
def test_round1_predicates_pairwise_exclusive(indices):
    matches = [k for k in ROUND1_KINDS if match_shape(indices, k)]
    assert len(matches) <= 1


@given(entries_st)
@settings(max_examples=300)
def test_round2_is_a_refinement_of_round1(entries):
    records = [AccessRecord(m, i, 64, t, 0, 0) for i, m, t in entries]
    p = normalize_threads(records)
    r1 = sequence(p, Round.ROUND1)
    r2 = sequence(p, Round.ROUND2)
    assert len(r1.slices) == len(r2.slices)
    assert [s.len for s in r1.slices] == [s.len for s in r2.slices]
    for a, b in zip(r1.slices, r2.slices):
        if a.shape.kind is not ShapeKind.UNIDENTIFIED:
            assert a == b  # identified slices are immutable across rounds
        assert a.mode == b.mode
        assert a.thread_count == b.thread_count
    rank = {Coverage.NONE: 0, Coverage.PARTIAL: 1, Coverage.FULL: 2}
    assert rank[r2.coverage] >= rank[r1.coverage]


@given(entries_st)
def test_slices_partition_the_pattern(entries):
    records = [AccessRecord(m, i, 64, t, 0, 0) for i, m, t in entries]
    p = normalize_threads(records)
    enc = sequence(p, Round.ROUND2)
    assert enc.pattern_len == len(entries)
    assert enc.min_index == min(i for i, _, _ in entries)


@given(entries_st)
def test_render_parse_round_trip_property(entries):
    records = [AccessRecord(m, i, 64, t, 0, 0) for i, m, t in entries]
    enc = sequence(normalize_threads(records), Round.ROUND2)
    assert parse_encoding(render(enc)) == enc
