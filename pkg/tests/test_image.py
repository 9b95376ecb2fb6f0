import pytest

from colorsets.image import (Image, ImageFormatError, Rect, Square, fingerprint_of, iter_rects,
                             load_image, remap_colors)

from _shared import rect_example, rect_example_text


def test_load_rect_example_orientation():
    img = load_image(rect_example_text())
    assert (img.m, img.n, img.sigma) == (6, 10, 10)
    assert img.token(img.cell(1, 1)) == "c"
    assert img.token(img.cell(6, 1)) == "b"
    assert img.letters


def test_load_smallest():
    img = load_image("1 1 1\n1\n")
    assert (img.m, img.n) == (1, 1) and img.cell(1, 1) == 1


def test_color_out_of_range():
    text = "3 5 6\n" + "1 2 3 4 5\n" * 2 + "1 2 7 4 5\n"
    with pytest.raises(ImageFormatError, match="color out of range"):
        load_image(text)


@pytest.mark.parametrize("text, msg", [
    ("", "empty"),
    ("2 2\n1 1\n1 1\n", "header"),
    ("2 2 2\n1 1\n", "expected 2 rows"),
    ("2 2 2\n1 1\n1\n", "ragged"),
    ("1 2 2\n1 x7\n", "bad color"),
])
def test_malformed(text, msg):
    with pytest.raises(ImageFormatError, match=msg):
        load_image(text)


def test_comments_and_round_trip():
    img = load_image("# note\n2 3 3\n1 2 3\n# between\n3 2 1\n")
    assert img.rows_top_down() == [(1, 2, 3), (3, 2, 1)]
    assert load_image(img.to_text()) == img


def test_remap_first_seen_order():
    img = Image.from_rows([[42, 3], [3, 9]])  # bottom row is (3, 9)
    dense, remap = remap_colors(img)
    assert remap.forward == {3: 1, 9: 2, 42: 3}
    assert dense.sigma == 3
    assert dense.rows_top_down() == [(3, 1), (1, 2)]
    assert [remap.to_original(c) for c in (1, 2, 3)] == [3, 9, 42]
    assert remap.to_dense(5) is None


def test_remap_identity_and_rect_example():
    _, remap = remap_colors(Image.from_rows([[3, 2], [1, 2]]))
    assert remap.forward == {1: 1, 2: 2, 3: 3}
    _, remap = remap_colors(rect_example())
    assert remap.sigma == 10


def test_fingerprints():
    img = rect_example()
    assert "".join(img.token(c) for c in fingerprint_of(img, Rect(2, 5, 10, 10))) == "efi"
    uniform = Image.from_rows([[5] * 4] * 4)
    assert all(fingerprint_of(uniform, r) == (5,) for r in iter_rects(4, 4))
    assert fingerprint_of(Image.from_rows([[1, 2, 3], [3, 2, 1]]), Rect(1, 2, 1, 3)) == (1, 2, 3)


def test_transpose_and_keys():
    img = rect_example()
    t = img.transpose()
    assert (t.m, t.n) == (10, 6)
    assert all(t.cell(j, i) == img.cell(i, j) for i in range(1, 7) for j in range(1, 11))
    r = Rect(1, 2, 3, 5)
    assert r.transposed() == Rect(3, 5, 1, 2) and r.transposed().transposed() == r
    assert Square(2, 3, 2).rect == Rect(2, 3, 3, 4)
    assert Square(2, 3, 2).transposed() == Square(3, 2, 2)
    assert Rect(1, 3, 1, 3).contains(Rect(2, 2, 1, 3))
    assert len(list(iter_rects(2, 3))) == 3 * 6
