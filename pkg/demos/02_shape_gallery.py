"""Gallery of index-sequence shapes and the two classification rounds.

Run from the repo root after `pip install -e .`:
    python3 demos/02_shape_gallery.py
"""

from arraytrace import (
    AccessPattern,
    Mode,
    Round,
    classify_whole,
    parse_encoding,
    render,
    sequence,
)

# classify_whole() tags one index sequence with the first matching shape.
# Round 1 knows only the step-regular shapes; round 2 adds five more that
# describe common loop idioms (up-down walks, peaks, saws, alternation over
# a few slots, interleaved traversals).
gallery = [
    ("constant slot",          [5, 5, 5, 5]),
    ("linear, stride 1",       [0, 1, 2, 3, 4, 5]),
    ("linear, stride 3",       [0, 3, 6, 9, 12]),
    ("linear, descending",     [9, 8, 7, 6, 5]),
    ("repeated step",          [0, 0, 1, 1, 2, 2]),
    ("varied step",            [0, 1, 3, 4, 6, 7]),
    ("up-down walk",           [0, 1, 2, 1, 0, 1, 2, 1, 0]),
    ("one peak",               [0, 2, 4, 6, 4, 2, 0]),
    ("saw teeth",              [0, 2, 4, 1, 3, 5, 2, 4, 6]),
    ("two-slot alternation",   [2, 9, 2, 9, 2, 9, 2]),
    ("interleaved traversals", [10, 0, 11, 1, 12, 2]),
    ("no structure",           [4, 17, 2, 9, 3]),
]

print(f"{'sequence':24s} {'round 1':8s} round 2")
for name, idx in gallery:
    t1 = classify_whole(idx, Round.ROUND1)
    t2 = classify_whole(idx, Round.ROUND2)
    print(f"{name:24s} {t1.text:8s} {t2.text}")

# Everything round 1 leaves as U gets a second chance in round 2. Matching
# is first-hit in a fixed order, so a sequence satisfying several predicates
# always gets the same tag.

# sequence() works on whole access patterns instead of bare indices. When the
# pattern as a whole has no single shape it is split into slices at repeated
# occurrences of index 0 (the usual traversal restart), and each slice is
# tagged on its own. Entries are (index, mode, thread) triples.
idx1 = [0, 1, 2, 3]            # plain read sweep
idx2 = [0, 2, 4, 6]            # write sweep, stride 2
idx3 = [0, 9, 9, 2, 9, 2]      # bouncing between a few hot slots
entries = (
    tuple((i, Mode.READ, 1) for i in idx1)
    + tuple((i, Mode.WRITE, 1) for i in idx2)
    + tuple((i, Mode.READ if k % 2 else Mode.WRITE, 1) for k, i in enumerate(idx3))
)
pattern = AccessPattern(entries)

e1 = sequence(pattern, Round.ROUND1)
e2 = sequence(pattern, Round.ROUND2)
print()
print("round 1:", render(e1), "-> coverage", e1.coverage.value)
print("round 2:", render(e2), "-> coverage", e2.coverage.value)

# Round 2 only re-examines slices round 1 could not name; identified slices
# are carried over untouched. Here the hot-slot tail turns from U into F and
# lifts the pattern from partial to full coverage.

# The text form is a stable interchange format: parse_encoding() is the
# exact inverse of render().
text = render(e2)
assert parse_encoding(text) == e2
print("round-tripped:", text)

# Each slice code is shape, mode (r/w/rw), distinct thread count, length.
# With whole_pattern_lengths=True every slice reports the pattern length
# instead of its own; that view is for display only and does not parse back.
print("display view: ", render(e2, whole_pattern_lengths=True))

# The alternation shape takes a knob: how many distinct slots still count
# as bouncing. The default is 4; tighter settings push such slices back to U.
wide = [2, 9, 4, 2, 9, 4]
print()
print("distinct-slot knob on", wide)
for limit in (4, 2):
    tag = classify_whole(wide, Round.ROUND2, fringes_max_distinct=limit)
    print(f"  fringes_max_distinct={limit}: {tag.text}")
