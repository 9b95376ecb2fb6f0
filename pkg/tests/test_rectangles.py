import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from colorsets.image import Image, Rect, colors_of, mask_of
from colorsets.intervals import IntervalSet
from colorsets.locations import LocationList
from colorsets.oracle import brute_force_locations
from colorsets.rectangles import (COLUMN_INDEX, PARALLEL_ROWS, VARIANTS, ColorAdd, EndMarker,
                                  RowPairState, column_fingerprint, enumerate_maximal_rectangles)
from colorsets.sequences import SLL

from _shared import rect_example, random_image


def located(image, variant=PARALLEL_ROWS, **kw):
    return {(loc.rect, loc.fingerprint)
            for loc in enumerate_maximal_rectangles(image, variant, **kw).locations}


@pytest.mark.parametrize("variant", VARIANTS)
def test_trivial_images(variant):
    assert located(Image.from_rows([[1]]), variant) == {(Rect(1, 1, 1, 1), (1,))}
    assert located(Image.from_rows([[2] * 4] * 3), variant) == {(Rect(1, 3, 1, 4), (2,))}
    assert located(Image.from_rows([[1, 2]]), variant) == {
        (Rect(1, 1, 1, 2), (1, 2)), (Rect(1, 1, 1, 1), (1,)), (Rect(1, 1, 2, 2), (2,))}
    img = Image.from_rows([[1, 2], [2, 1]])
    assert located(img, variant) == brute_force_locations(img)


@pytest.mark.parametrize("variant", VARIANTS)
def test_rect_example_matches_oracle(variant):
    assert located(rect_example(), variant) == brute_force_locations(rect_example())


def sweep_pair(image, i0, i1, hook=None):
    """Run one row pair by hand; ``hook(state, j, f)`` sees each column first."""
    sigma, n = image.sigma, image.n
    below = SLL(sigma) if i0 > 1 else None
    above = SLL(sigma) if i1 < image.m else None
    out = LocationList()
    st = RowPairState(i0, i1, sigma, n, below, above, out, keep_phi=True)
    for j in range(1, n + 1):
        f = mask_of(image.cell(i, j) for i in range(i0, i1 + 1))
        if hook:
            hook(st, j, f)
        st.step(j, f)
        if below is not None:
            below.extend(image.cell(i0 - 1, j), j)
        if above is not None:
            above.extend(image.cell(i1 + 1, j), j)
    st.finalize_row_pair()
    return st, out


def test_row_pairs_union_equals_oracle_rect_example():
    img = rect_example()
    got = set()
    for i0 in range(1, img.m + 1):
        for i1 in range(i0, img.m + 1):
            _, out = sweep_pair(img, i0, i1)
            got |= {(loc.rect, loc.fingerprint) for loc in out}
    assert got == brute_force_locations(img)


def test_stage1_single_row_aba():
    img = Image.from_rows([[1, 2, 1]])
    seen = {}

    def hook(st, j, f):
        if j == 3:
            seen["markers"] = st.stage1_emit_end_markers(j, f)
            st.out.clear()

    st, _ = sweep_pair(img, 1, 1, hook)
    # stage 1 at column 3 reports the maximal rectangles ending at column 2
    want = {r for r, _ in brute_force_locations(img) if r.j1 == 2}
    assert set(seen["markers"]) == want


def test_finalize_uniform():
    img = Image.from_rows([[3] * 5] * 2)
    st, out = sweep_pair(img, 1, 2)
    assert [loc.rect for loc in out] == [Rect(1, 2, 1, 5)]


def test_finalize_single_row_matches_oracle():
    rng = random.Random(4)
    for _ in range(30):
        n, s = rng.randint(1, 9), rng.randint(1, 4)
        img = Image.from_rows([[rng.randint(1, s) for _ in range(n)]], sigma=s)
        _, out = sweep_pair(img, 1, 1)
        assert {loc.rect for loc in out if loc.rect.j1 == n} == \
            {r for r, _ in brute_force_locations(img) if r.j1 == n}


def test_bottom_top_border_case():
    img = rect_example()

    def hook(st, j, f):
        assert st.bottom_top_intervals(j) == IntervalSet.span(1, j - 1)

    sweep_pair(img, 1, img.m, hook)


def test_grows_equals_interval_membership():
    rng = random.Random(8)
    for _ in range(40):
        img = random_image(rng, 6, 8, 5)
        for i0 in range(1, img.m + 1):
            for i1 in range(i0, img.m + 1):
                def hook(st, j, f):
                    inter = st.bottom_top_intervals(j)
                    # stage 1 candidates: one past each SLC item but the last
                    for col, _ in st.slc.items()[:-1]:
                        j0 = col + 1
                        fp = st.fp[j0]
                        assert fp == mask_of(img.cell(i, jj) for i in range(i0, i1 + 1)
                                             for jj in range(j0, j))
                        fast = st._grows(st.below, j0, fp) and st._grows(st.above, j0, fp)
                        assert fast == (j0 in inter)
                sweep_pair(img, i0, i1, hook)


def test_column_fingerprint():
    img = rect_example()
    for mode in VARIANTS:
        got = column_fingerprint(img, 2, 5, 10, mode)
        assert "".join(img.token(c) for c in got) == "efi"
        assert column_fingerprint(img, 3, 3, 4, mode) == (img.cell(3, 4),)


def test_phi_sequences():
    img = rect_example()
    res = enumerate_maximal_rectangles(img, keep_phi=True)
    by_rect = {loc.rect: loc.fingerprint for loc in res.locations}
    markers = 0
    for seq in res.sequences:
        assert isinstance(seq.events[0], ColorAdd)
        for rect, colors in seq.prefixes():
            assert (rect.i0, rect.i1, rect.j0) == (seq.i0, seq.i1, seq.j0)
            assert tuple(sorted(colors)) == by_rect[rect]
            assert len(colors) == len(set(colors))
            markers += 1
    assert markers == len(res.locations)
    assert all(isinstance(e, (ColorAdd, EndMarker)) for s in res.sequences for e in s.events)


def test_phi_order_respects_leftmost_occurrence():
    img = rect_example()
    res = enumerate_maximal_rectangles(img, keep_phi=True)
    for seq in res.sequences:
        added = [e.color for e in seq.events if isinstance(e, ColorAdd)]

        def leftmost(c):
            return min(j for j in range(seq.j0, img.n + 1)
                       for i in range(seq.i0, seq.i1 + 1) if img.cell(i, j) == c)
        keys = [(leftmost(c), c) for c in added]
        assert keys == sorted(keys)


def test_workers_and_signatures_do_not_change_output():
    rng = random.Random(2)
    powers = [pow(7, c, 1009) for c in range(7)]
    with ThreadPoolExecutor(3) as pool:
        for _ in range(30):
            img = random_image(rng, 7, 8, 6)
            base = enumerate_maximal_rectangles(img).locations
            for variant in VARIANTS:
                par = enumerate_maximal_rectangles(img, variant, workers=3, executor=pool).locations
                assert [l.key for l in par] == [l.key for l in base]
                signed = enumerate_maximal_rectangles(img, variant, powers=powers, modulus=1009)
                for loc in signed.locations:
                    assert loc.signature == sum(powers[c] for c in colors_of(loc.mask)) % 1009


def test_grouping_needs_signatures():
    with pytest.raises(ValueError):
        enumerate_maximal_rectangles(rect_example(), group="exists")
    with pytest.raises(ValueError):
        enumerate_maximal_rectangles(rect_example(), "bogus")
