from hypothesis import given, settings, strategies as st

from colorsets.builder import RECT, SQUARE, build, enumerate_locations
from colorsets.image import Image
from colorsets.oracle import brute_force_locations, brute_force_squares

from _shared import by_fingerprint


@st.composite
def images(draw, max_side=6, max_sigma=5):
    m = draw(st.integers(1, max_side))
    n = draw(st.integers(1, max_side))
    colors = draw(st.sets(st.integers(1, 1000), min_size=1, max_size=max_sigma))
    palette = sorted(colors)
    rows = [[draw(st.sampled_from(palette)) for _ in range(n)] for _ in range(m)]
    return Image.from_rows(rows)


@settings(max_examples=150, deadline=None)
@given(images())
def test_rectangles_match_oracle(img):
    got = {(f.key, f.colors) for f in enumerate_locations(img, RECT)}
    assert got == brute_force_locations(img)


@settings(max_examples=150, deadline=None)
@given(images())
def test_squares_match_oracle(img):
    got = {(f.key, f.colors) for f in enumerate_locations(img, SQUARE)}
    assert got == brute_force_squares(img)


@settings(max_examples=80, deadline=None)
@given(images(), st.integers(0, 2**64 - 1))
def test_index_answers_like_oracle(img, seed):
    index = build(img, report=True, seed=seed).index
    for f, rects in by_fingerprint(brute_force_locations(img)).items():
        assert index.query_report(f) == rects
    assert index.scratch_checksum() == 0


@settings(max_examples=100, deadline=None)
@given(images())
def test_cardinality_bounds(img):
    rects = enumerate_locations(img, RECT)
    squares = enumerate_locations(img, SQUARE)
    sigma = len({c for row in img.grid for c in row})
    F = {f.colors for f in rects}
    assert len(F) <= len(rects) <= img.n * img.m ** 2 * sigma
    assert len(squares) <= img.n * img.m * sigma
