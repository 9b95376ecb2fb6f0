import random
import struct
import zlib
from concurrent.futures import ThreadPoolExecutor

import pytest

from colorsets.builder import DET, SQUARE, build, prepare
from colorsets.image import Image, Rect, Square, fingerprint_of
from colorsets.index import (IndexBuildError, IndexFormatError, VerifierGrid, build_index,
                             distinct_colors_in_rect, dumps_index, load_index, loads_index,
                             save_index)
from colorsets.naming import PolynomialSignature
from colorsets.oracle import brute_force_fingerprints, brute_force_locations, brute_force_squares

from _shared import by_fingerprint, rect_example, square_example, random_image


def test_uniform_image():
    img = Image.from_rows([[2] * 4] * 3)
    index = build(img, report=True, seed=0).index
    assert len(index) == 1
    assert index.query_exists([2])
    assert not index.query_exists([1]) and not index.query_exists([1, 2])
    assert index.query_report([2]) == [Rect(1, 3, 1, 4)]
    assert index.scratch_checksum() == 0


def test_rect_example_entries_and_queries():
    img = rect_example()
    index = build(img, report=True, seed=3).index
    F = brute_force_fingerprints(img)
    assert len(index) == len(F)
    expected = by_fingerprint(brute_force_locations(img))
    for f, rects in expected.items():
        assert index.query_exists(f)
        assert index.query_report(f) == rects
    assert index.query_report([99]) == []
    assert index.scratch_checksum() == 0


def test_report_totals_random():
    rng = random.Random(1)
    for _ in range(20):
        img = random_image(rng, 5, 5, 5)
        index = build(img, report=True, seed=1).index
        L = brute_force_locations(img)
        assert sum(e.count for e in index.entries.values()) == len(L) == index.total_locations


def test_non_members_false():
    rng = random.Random(6)
    for _ in range(10):
        img = random_image(rng, 6, 6, 6)
        index = build(img, seed=2).index
        F = brute_force_fingerprints(img)
        asked = 0
        while asked < 100:
            f = tuple(sorted(rng.sample(range(1, img.sigma + 2), rng.randint(1, img.sigma + 1))))
            if f in F:
                continue
            assert not index.query_exists(f)
            asked += 1
        assert index.scratch_checksum() == 0


def test_verifier_grid():
    img = rect_example()
    grid = VerifierGrid(img)
    got = distinct_colors_in_rect(grid, Rect(2, 5, 10, 10), 5)
    assert sorted(img.token(c) for c in got) == ["e", "f", "i"]
    assert len(grid.distinct_colors_in_rect(Rect(3, 3, 4, 4), 1)) == 1
    # stops after limit + 1 colors
    assert len(grid.distinct_colors_in_rect(Rect(1, 6, 1, 10), 2)) == 3
    rng = random.Random(0)
    for _ in range(100):
        i0, j0 = rng.randint(1, 6), rng.randint(1, 10)
        r = Rect(i0, rng.randint(i0, 6), j0, rng.randint(j0, 10))
        assert tuple(sorted(grid.distinct_colors_in_rect(r, 10))) == fingerprint_of(img, r)
    assert not any(grid._seen)
    with pytest.raises(IndexError):
        grid.distinct_colors_in_rect(Rect(1, 7, 1, 1), 3)


def test_tall_image_reports_original_coordinates():
    rng = random.Random(4)
    img = Image.from_rows([[rng.randint(1, 4) for _ in range(3)] for _ in range(7)])
    index = build(img, report=True, seed=5).index
    assert index.transposed
    for f, rects in by_fingerprint(brute_force_locations(img)).items():
        assert index.query_report(f) == rects


def test_square_index():
    img = square_example()
    index = build(img, SQUARE, report=True, seed=1).index
    want = by_fingerprint((sq.rect, f) for sq, f in brute_force_squares(img))
    assert len(index) == len(want)
    for f, rects in want.items():
        assert index.query_report(f) == rects
    assert index.query_exists(tuple(range(1, 11)))
    assert not index.query_exists([1, 99])


def test_deterministic_build_matches_mc():
    for img in (rect_example(), square_example()):
        mc = build(img, seed=1).index
        det = build(img, naming=DET, seed=1).index
        assert det.deterministic and set(det.entries) == set(mc.entries)


def test_build_index_from_triples():
    img = Image.from_rows([[1, 2], [2, 1]])
    prep = prepare(img)
    signer = PolynomialSignature(77)
    triples = [(r, signer.of(f), len(f)) for r, f in brute_force_locations(prep.image)]
    index = build_index(triples, prep.image, prep.remap, 77, report=True)
    assert len(index) == 3
    for f, rects in by_fingerprint(brute_force_locations(img)).items():
        assert index.query_report(f) == rects
    with pytest.raises(IndexBuildError):
        build_index([(Rect(1, 1, 1, 1), 5, 1), (Rect(1, 1, 2, 2), 5, 2)], prep.image, prep.remap, 77)
    sq = build_index([(Square(1, 1, 1), 9, 1)], prep.image, prep.remap, 77, square=True)
    assert sq.entries[9].rep == Rect(1, 1, 1, 1)


def test_concurrent_queries_with_own_scratch():
    img = rect_example()
    index = build(img, seed=2).index
    F = sorted(brute_force_fingerprints(img))

    def worker(k):
        scratch = index.new_scratch()
        ok = all(index.query_exists(f, scratch) for f in F[k::4])
        return ok and scratch.checksum() == 0

    with ThreadPoolExecutor(4) as pool:
        assert all(pool.map(worker, range(4)))


def roundtrip_answers(index, queries):
    return [(index.query_exists(q), index.query_report(q) if index.report else None) for q in queries]


def test_save_load_round_trip(tmp_path):
    img = rect_example()
    index = build(img, report=True, seed=7).index
    path = tmp_path / "rect_example.idx"
    save_index(index, str(path))
    loaded = load_index(str(path))
    rng = random.Random(1)
    queries = sorted(brute_force_fingerprints(img))
    queries += [tuple(rng.sample(range(1, 12), rng.randint(1, 5))) for _ in range(50)]
    assert roundtrip_answers(loaded, queries) == roundtrip_answers(index, queries)
    assert dumps_index(loaded) == path.read_bytes()
    assert loaded.r == index.r and loaded.total_locations == index.total_locations


def test_same_seed_same_bytes():
    a = dumps_index(build(rect_example(), seed=7).index)
    b = dumps_index(build(rect_example(), seed=7).index)
    assert a == b


def test_empty_path():
    with pytest.raises(OSError):
        load_index("")
    with pytest.raises(OSError):
        save_index(build(rect_example(), seed=0).index, "")


def test_corruption_detected():
    data = dumps_index(build(rect_example(), report=True, seed=1).index)
    for pos in (0, 5, 30, len(data) // 2, len(data) - 1):
        bad = bytearray(data)
        bad[pos] ^= 0x40
        with pytest.raises(IndexFormatError):
            loads_index(bytes(bad))
    for cut in (0, 3, 40, len(data) - 1):
        with pytest.raises(IndexFormatError):
            loads_index(data[:cut])


def test_version_and_trailing_bytes():
    data = dumps_index(build(rect_example(), seed=1).index)
    body = bytearray(data[:-4])
    struct.pack_into("<H", body, 4, 99)
    with pytest.raises(IndexFormatError, match="version"):
        loads_index(bytes(body) + struct.pack("<I", zlib.crc32(body)))
    body = data[:-4] + b"\0"
    with pytest.raises(IndexFormatError, match="trailing"):
        loads_index(body + struct.pack("<I", zlib.crc32(body)))
