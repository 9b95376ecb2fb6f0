import random

import pytest

from colorsets.image import Image, Square, colors_of
from colorsets.oracle import (brute_force_squares, condition_disagreements, rect_masks,
                              square_conditions)
from colorsets.squares import (COLUMN_INDEX, PARALLEL_DIAGONALS, SQUARE_VARIANTS, SquareAdd,
                               SquareSweep, enumerate_maximal_squares)

from _shared import square_example, random_image


def squares(image, variant=PARALLEL_DIAGONALS):
    return {(loc.key, loc.fingerprint) for loc in enumerate_maximal_squares(image, variant).locations}


@pytest.mark.parametrize("variant", SQUARE_VARIANTS)
def test_trivial(variant):
    assert squares(Image.from_rows([[1]]), variant) == {(Square(1, 1, 1), (1,))}
    assert squares(Image.from_rows([[4] * 3] * 3), variant) == {(Square(1, 1, 3), (4,))}
    assert squares(Image.from_rows([[1, 1], [1, 1]]), variant) == {(Square(1, 1, 2), (1,))}
    img = Image.from_rows([[1, 2], [2, 1]])
    assert squares(img, variant) == brute_force_squares(img)


@pytest.mark.parametrize("variant", SQUARE_VARIANTS)
def test_square_example_matches_oracle(variant):
    assert squares(square_example(), variant) == brute_force_squares(square_example())


@pytest.mark.parametrize("variant", SQUARE_VARIANTS)
def test_random_match_oracle(variant):
    rng = random.Random(17)
    for _ in range(150):
        img = random_image(rng, 7, 7, 5)
        assert squares(img, variant) == brute_force_squares(img)


def snapshot(image, at):
    got = {}

    def obs(i, j, st):
        if (i, j) == at:
            got.update(sct=st.sct(), pct=st.pct(), slt=st.slt(), plt=st.plt(), sld=st.sld(),
                       pld=st.pld())
    enumerate_maximal_squares(image, observer=obs)
    return got


def named(d):
    return {chr(96 + c): v for c, v in d.items()}


def test_square_example_triangles_and_diagonal():
    snap = snapshot(square_example(), (8, 8))
    assert snap["sct"] == [(3, 1), (4, 1), (6, 2), (7, 1)]
    assert named(snap["pct"]) == {"b": (4, 1), "d": (3, 1), "f": (6, 2), "i": (7, 1), "j": (6, 2)}
    assert snap["slt"] == [(1, 1), (4, 1), (5, 1), (7, 1)]
    assert named(snap["plt"]) == {"b": (4, 1), "e": (1, 1), "h": (5, 1), "i": (7, 1)}
    assert [(chr(96 + c), r) for c, r in snap["sld"]] == [("b", 4), ("g", 6), ("a", 7), ("c", 8)]
    assert {chr(96 + c): (chr(96 + a), r) for c, (a, r) in snap["pld"].items()} == {
        "a": ("a", 7), "b": ("b", 4), "c": ("c", 8), "g": ("g", 6)}


@pytest.mark.parametrize("variant", SQUARE_VARIANTS)
def test_k_values(variant):
    rng = random.Random(3)
    for _ in range(40):
        img = random_image(rng, 6, 6, 4)
        table = rect_masks(img)

        def obs(i, j, st):
            for c in range(1, img.sigma + 1):
                want = 0
                for k in range(1, min(i, j) + 1):
                    if (table[Square(i - k + 1, j - k + 1, k).rect] >> c) & 1:
                        break
                    want = k
                assert st.K(c) == want
            assert st.K(img.cell(i, j)) == 0
        enumerate_maximal_squares(img, variant, observer=obs)


def test_absent_color_is_capped_by_geometry():
    img = Image.from_rows([[1, 1, 1], [1, 1, 1]], sigma=2)

    def obs(i, j, st):
        assert st.K(2) == min(i, j)
    enumerate_maximal_squares(img, observer=obs)


def test_characteristic_sets_match_conditions(monkeypatch):
    rng = random.Random(9)
    seen = []
    original = SquareSweep.chi_sets

    def spy(self, st, K, i, j, row_sll, col_sll):
        chi = original(self, st, K, i, j, row_sll, col_sll)
        seen.append((i - 1, j - 1, chi))
        return chi
    monkeypatch.setattr(SquareSweep, "chi_sets", spy)
    for _ in range(60):
        img = random_image(rng, 6, 6, 4)
        table = rect_masks(img)
        maximal = {sq for sq, _ in brute_force_squares(img)}
        seen.clear()
        enumerate_maximal_squares(img)
        for I, J, chi in seen:
            for k in range(1, chi.G + 1):
                sq = Square(I - k + 1, J - k + 1, k)
                cond = square_conditions(table, img, sq)
                for name in ("L", "R", "U", "D"):
                    assert bool((getattr(chi, name) >> k) & 1) == cond[name], (name, sq)
                assert bool((chi.M >> k) & 1) == (sq in maximal)


def test_condition_formula_agrees_with_containment():
    rng = random.Random(21)
    for _ in range(100):
        assert condition_disagreements(random_image(rng, 6, 6, 4)) == []
    assert condition_disagreements(square_example()) == []


def test_hat_phi_sequences():
    img = square_example()
    res = enumerate_maximal_squares(img, keep_phi=True)
    want = {loc.key: loc.fingerprint for loc in res.locations}
    count = 0
    for seq in res.sequences:
        for sq, colors in seq.prefixes():
            assert tuple(sorted(colors)) == want[sq]
            count += 1
    assert count == len(want)
    assert all(isinstance(e, SquareAdd) or hasattr(e, "square") for s in res.sequences
               for e in s.events)


def test_signatures_on_squares():
    powers = [pow(5, c, 10007) for c in range(11)]
    res = enumerate_maximal_squares(square_example(), COLUMN_INDEX, powers=powers, modulus=10007)
    for loc in res.locations:
        assert loc.signature == sum(powers[c] for c in colors_of(loc.mask)) % 10007


def test_bad_variant():
    with pytest.raises(ValueError):
        enumerate_maximal_squares(square_example(), "rows")
