"""Queryable fingerprint index and its file format.

An index maps the signature of every distinct fingerprint to one
representative location (and, in report mode, to all locations). A query
computes the signature of the asked color set, probes the table, and
confirms the hit by listing the distinct colors of the representative.
"""
from __future__ import annotations

import struct
import zlib
from array import array
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .image import ColorRemap, Image, Rect, Square, colors_of
from .locations import FingerprintGroups, pack, unpack
from .naming import MERSENNE_61, PolynomialSignature
from .sequences import DistinctColorIndex1D

MAGIC = b"FPIX"
VERSION = 1

FLAG_REPORT = 1
FLAG_DET = 2
FLAG_SQUARE = 4
FLAG_TRANSPOSED = 8
FLAG_LETTERS = 16


class IndexBuildError(RuntimeError):
    """Two fingerprints of different sizes share a signature."""


class IndexFormatError(ValueError):
    """An index file is truncated, corrupted or of another format."""


class VerifierGrid:
    """Distinct colors of any rectangle, from one 1D index per row."""

    def __init__(self, image: Image):
        self.image = image
        self.rows = [DistinctColorIndex1D(row) for row in image.grid]
        self._seen = bytearray(image.sigma + 1)

    def distinct_colors_in_rect(self, rect: Rect, limit: int,
                                seen: Optional[bytearray] = None) -> List[int]:
        """Distinct colors of ``rect``, stopping once ``limit + 1`` are found.

        ``seen`` is a zeroed ``sigma + 1`` byte vector, left zeroed on return;
        concurrent callers must each pass their own.
        """
        if not self.image.in_bounds(rect):
            raise IndexError(f"rectangle {rect} outside {self.image.m}x{self.image.n} image")
        if limit < 1:
            raise ValueError("limit must be at least 1")
        if seen is None:
            seen = self._seen
        found: List[int] = []
        try:
            for i in range(rect.i0, rect.i1 + 1):
                for c, _ in self.rows[i - 1].query(rect.j0, rect.j1):
                    if not seen[c]:
                        seen[c] = 1
                        found.append(c)
                        if len(found) > limit:
                            return found
            return found
        finally:
            for c in found:
                seen[c] = 0


def distinct_colors_in_rect(grid: VerifierGrid, rect: Rect, limit: int) -> List[int]:
    return grid.distinct_colors_in_rect(rect, limit)


class QueryScratch:
    """Per-caller scratch vectors; both are all zero between queries."""

    def __init__(self, sigma: int):
        self.wanted = bytearray(sigma + 1)
        self.seen = bytearray(sigma + 1)

    def checksum(self) -> int:
        return sum(self.wanted) + sum(self.seen)


@dataclass
class IndexEntry:
    signature: int
    size: int
    rep: Rect
    count: int
    locations: Optional[array] = None  # packed rects, report mode only


@dataclass
class FingerprintIndex:
    """Signature-keyed table over the distinct fingerprints of an image.

    ``image`` is the internal (dense, ``m <= n``) image; coordinates are
    mapped back through ``transposed`` when reported.
    """

    image: Image
    remap: ColorRemap
    r: int
    square: bool = False
    report: bool = False
    deterministic: bool = False
    transposed: bool = False
    entries: Dict[int, IndexEntry] = field(default_factory=dict)
    total_locations: int = 0
    modulus: int = MERSENNE_61

    def __post_init__(self):
        self.signer = PolynomialSignature(self.r, self.modulus)
        self.verifier = VerifierGrid(self.image)
        self.scratch = QueryScratch(self.image.sigma)

    @property
    def sigma(self) -> int:
        return self.image.sigma

    def __len__(self) -> int:
        return len(self.entries)

    def scratch_checksum(self) -> int:
        return self.scratch.checksum()

    def new_scratch(self) -> QueryScratch:
        return QueryScratch(self.image.sigma)

    def dense(self, colors: Iterable[int]) -> Optional[List[int]]:
        """Query colors in the dense alphabet, ``None`` if any is absent."""
        out = set()
        for c in colors:
            d = self.remap.to_dense(c)
            if d is None:
                return None
            out.add(d)
        return sorted(out)

    def _probe(self, colors: Iterable[int], scratch: Optional[QueryScratch]) -> Optional[IndexEntry]:
        f = self.dense(colors)
        if not f:
            return None
        entry = self.entries.get(self.signer.of(f))
        if entry is None or entry.size != len(f):
            return None
        scratch = scratch or self.scratch
        reported = self.verifier.distinct_colors_in_rect(entry.rep, len(f), scratch.seen)
        if len(reported) != len(f):
            return None
        wanted = scratch.wanted
        for c in f:
            wanted[c] = 1
        try:
            if all(wanted[c] for c in reported):
                return entry
            return None
        finally:
            # reset whatever the outcome
            for c in f:
                wanted[c] = 0

    def query_exists(self, colors: Iterable[int], scratch: Optional[QueryScratch] = None) -> bool:
        """Whether some rectangle (square) has exactly these original colors."""
        return self._probe(colors, scratch) is not None

    def query_report(self, colors: Iterable[int],
                     scratch: Optional[QueryScratch] = None) -> List[Rect]:
        """All maximal locations with exactly these colors, original orientation."""
        if not self.report:
            raise ValueError("index was built without --report")
        entry = self._probe(colors, scratch)
        if entry is None:
            return []
        out = [self._external(Rect(*unpack(v, 4))) for v in entry.locations]
        return sorted(out)

    def _external(self, rect: Rect) -> Rect:
        return rect.transposed() if self.transposed else rect

    def representative(self, entry: IndexEntry) -> Rect:
        return self._external(entry.rep)

    def fingerprint(self, entry: IndexEntry) -> Tuple[int, ...]:
        """Original colors of an entry, read off its representative."""
        dense = self.verifier.distinct_colors_in_rect(entry.rep, entry.size)
        return tuple(sorted(self.remap.to_original(c) for c in dense))


def _as_rect(key) -> Rect:
    return key.rect if isinstance(key, Square) else key


def build_index(locations: Iterable[Tuple[Rect, int, int]], image: Image, remap: ColorRemap,
                r: int, *, report: bool = False, square: bool = False,
                deterministic: bool = False, transposed: bool = False) -> FingerprintIndex:
    """Index from ``(rect, signature, size)`` triples of an internal image.

    The representative of a fingerprint is its smallest rectangle.
    """
    index = FingerprintIndex(image, remap, r, square=square, report=report,
                             deterministic=deterministic, transposed=transposed)
    entries = index.entries
    total = 0
    for rect, sig, size in locations:
        rect = _as_rect(rect)
        total += 1
        e = entries.get(sig)
        if e is None:
            entries[sig] = IndexEntry(sig, size, rect, 1, array("Q") if report else None)
            e = entries[sig]
        else:
            if e.size != size:
                raise IndexBuildError(f"signature {sig} shared by fingerprints of sizes {e.size} and {size}")
            e.count += 1
            if rect < e.rep:
                e.rep = rect
        if report:
            e.locations.append(pack(rect))
    if report:
        for e in entries.values():
            e.locations = array("Q", sorted(e.locations))
    index.total_locations = total
    return index


def index_from_groups(groups: FingerprintGroups, image: Image, remap: ColorRemap, r: int, *,
                      square: bool = False, deterministic: bool = False,
                      transposed: bool = False) -> FingerprintIndex:
    """Index from signature groups collected by a sweep."""
    if groups.collisions:
        sig, a, b = groups.collisions[0]
        raise IndexBuildError(f"signature {sig} shared by {colors_of(a)} and {colors_of(b)}")
    report = groups.keep_locations
    index = FingerprintIndex(image, remap, r, square=square, report=report,
                             deterministic=deterministic, transposed=transposed)
    for sig, g in groups:
        locs = None
        if report:
            if square:
                locs = array("Q", sorted(pack(Square(*unpack(v, 3)).rect) for v in g.packed))
            else:
                locs = g.packed
        index.entries[sig] = IndexEntry(sig, bin(g.mask).count("1"), _as_rect(g.rep), g.count, locs)
    index.total_locations = groups.total
    return index


# file format (little-endian):
#   magic, version u16, flags u16, sigma u32, m u32, n u32, r u64, |L| u64
#   remap: sigma x u32 original colors; grid: m*n x u32, bottom row first
#   entry count u32; per entry: signature u64, size u16, rep 4 x u32,
#   k u32, k x 4 x u32 rects; trailing CRC32 of all preceding bytes
_HEADER = struct.Struct("<4sHHIIIQQ")
_ENTRY = struct.Struct("<QH4II")


def dumps_index(index: FingerprintIndex) -> bytes:
    img = index.image
    flags = ((FLAG_REPORT if index.report else 0) | (FLAG_DET if index.deterministic else 0)
             | (FLAG_SQUARE if index.square else 0) | (FLAG_TRANSPOSED if index.transposed else 0)
             | (FLAG_LETTERS if img.letters else 0))
    parts = [_HEADER.pack(MAGIC, VERSION, flags, img.sigma, img.m, img.n, index.r,
                          index.total_locations)]
    parts.append(struct.pack(f"<{img.sigma}I", *index.remap.backward))
    parts.append(struct.pack(f"<{img.m * img.n}I", *(c for row in img.grid for c in row)))
    parts.append(struct.pack("<I", len(index.entries)))
    for sig in sorted(index.entries):
        e = index.entries[sig]
        locs = e.locations if index.report else ()
        parts.append(_ENTRY.pack(sig, e.size, *e.rep, len(locs) if index.report else e.count))
        if index.report:
            flat = [v for packed in locs for v in unpack(packed, 4)]
            parts.append(struct.pack(f"<{len(flat)}I", *flat))
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def loads_index(data: bytes) -> FingerprintIndex:
    if len(data) < _HEADER.size + 4:
        raise IndexFormatError("index file truncated")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    magic, version, flags, sigma, m, n, r, total = _HEADER.unpack_from(body, 0)
    if magic != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    if zlib.crc32(body) != crc:
        raise IndexFormatError("index checksum mismatch")
    try:
        at = _HEADER.size
        backward = struct.unpack_from(f"<{sigma}I", body, at)
        at += 4 * sigma
        cells = struct.unpack_from(f"<{m * n}I", body, at)
        at += 4 * m * n
        (count,) = struct.unpack_from("<I", body, at)
        at += 4
        report = bool(flags & FLAG_REPORT)
        grid = tuple(tuple(cells[i * n:(i + 1) * n]) for i in range(m))
        image = Image(m, n, sigma, grid, bool(flags & FLAG_LETTERS))
        remap = ColorRemap({c: k + 1 for k, c in enumerate(backward)}, tuple(backward))
        index = FingerprintIndex(image, remap, r, square=bool(flags & FLAG_SQUARE), report=report,
                                 deterministic=bool(flags & FLAG_DET),
                                 transposed=bool(flags & FLAG_TRANSPOSED), total_locations=total)
        for _ in range(count):
            sig, size, i0, i1, j0, j1, k = _ENTRY.unpack_from(body, at)
            at += _ENTRY.size
            locs = None
            if report:
                flat = struct.unpack_from(f"<{4 * k}I", body, at)
                at += 16 * k
                locs = array("Q", (pack(flat[x:x + 4]) for x in range(0, len(flat), 4)))
            index.entries[sig] = IndexEntry(sig, size, Rect(i0, i1, j0, j1), len(locs) if report else k, locs)
    except struct.error as exc:
        raise IndexFormatError(f"index file truncated: {exc}") from None
    if at != len(body):
        raise IndexFormatError("trailing bytes in index file")
    return index


def save_index(index: FingerprintIndex, path: str) -> None:
    if not path:
        raise OSError("empty index path")
    with open(path, "wb") as fh:
        fh.write(dumps_index(index))


def load_index(path: str) -> FingerprintIndex:
    if not path:
        raise OSError("empty index path")
    with open(path, "rb") as fh:
        return loads_index(fh.read())
