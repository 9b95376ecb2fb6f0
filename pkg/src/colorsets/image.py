"""Color matrices, rectangle/square geometry and naive fingerprints.

Rows are numbered bottom-up: row 1 is the last data line of a text
image, row ``m`` the first. Columns run left to right. All coordinates
are 1-based and ranges are closed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

Fingerprint = Tuple[int, ...]


class ImageFormatError(ValueError):
    """Raised when a text image cannot be parsed or fails validation."""


class Rect(NamedTuple):
    """The rectangle bounded by rows ``i0..i1`` and columns ``j0..j1``."""

    i0: int
    i1: int
    j0: int
    j1: int

    def transposed(self) -> "Rect":
        return Rect(self.j0, self.j1, self.i0, self.i1)

    def contains(self, other: "Rect") -> bool:
        return (self.i0 <= other.i0 and other.i1 <= self.i1
                and self.j0 <= other.j0 and other.j1 <= self.j1)


class Square(NamedTuple):
    """Square of size ``k`` whose bottom-left corner is cell ``(i, j)``."""

    i: int
    j: int
    k: int

    @property
    def rect(self) -> Rect:
        return Rect(self.i, self.i + self.k - 1, self.j, self.j + self.k - 1)

    def transposed(self) -> "Square":
        return Square(self.j, self.i, self.k)


def letter_color(token: str) -> int:
    return ord(token) - ord("a") + 1


def color_token(color: int, letters: bool) -> str:
    if letters and 1 <= color <= 26:
        return chr(ord("a") + color - 1)
    return str(color)


def parse_color(token: str) -> int:
    """Parse a decimal color or a single letter ``a``..``z`` (a -> 1)."""
    token = token.strip()
    if len(token) == 1 and "a" <= token <= "z":
        return letter_color(token)
    try:
        value = int(token)
    except ValueError:
        raise ImageFormatError(f"bad color token {token!r}") from None
    return value


def mask_of(colors: Iterable[int]) -> int:
    mask = 0
    for c in colors:
        mask |= 1 << c
    return mask


def colors_of(mask: int) -> Fingerprint:
    """Sorted colors whose bits are set in ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class Image:
    """An ``m`` x ``n`` matrix of colors in ``[1, sigma]``.

    ``grid[i - 1][j - 1]`` holds cell ``(i, j)``, i.e. ``grid[0]`` is the
    bottom row.
    """

    m: int
    n: int
    sigma: int
    grid: Tuple[Tuple[int, ...], ...]
    letters: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ImageFormatError("image must have at least one row and column")
        if len(self.grid) != self.m or any(len(row) != self.n for row in self.grid):
            raise ImageFormatError("grid shape does not match m x n")
        for row in self.grid:
            for c in row:
                if not 1 <= c <= self.sigma:
                    raise ImageFormatError(f"color out of range: {c} not in [1, {self.sigma}]")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], sigma: Optional[int] = None,
                  top_down: bool = True, letters: bool = False) -> "Image":
        """Build an image from a list of rows.

        By default ``rows[0]`` is the TOP row, as the matrix is printed.
        """
        rows = [tuple(int(c) for c in row) for row in rows]
        if top_down:
            rows = rows[::-1]
        if sigma is None:
            sigma = max((max(r) for r in rows if r), default=1)
        return cls(len(rows), len(rows[0]) if rows else 0, sigma, tuple(rows), letters)

    @classmethod
    def from_strings(cls, lines: Sequence[str], sigma: Optional[int] = None) -> "Image":
        """Letter image written top row first, e.g. ``["ab", "ba"]``."""
        rows = [[letter_color(ch) for ch in line.split()] if " " in line
                else [letter_color(ch) for ch in line] for line in lines]
        return cls.from_rows(rows, sigma=sigma, letters=True)

    def cell(self, i: int, j: int) -> int:
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexError(f"cell ({i}, {j}) outside {self.m}x{self.n} image")
        return self.grid[i - 1][j - 1]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.grid[i - 1]

    def column(self, j: int) -> Tuple[int, ...]:
        """Column ``j`` read bottom-up."""
        return tuple(row[j - 1] for row in self.grid)

    def transpose(self) -> "Image":
        cols = tuple(tuple(self.grid[i][j] for i in range(self.m)) for j in range(self.n))
        return Image(self.n, self.m, self.sigma, cols, self.letters)

    def rows_top_down(self) -> List[Tuple[int, ...]]:
        return list(self.grid[::-1])

    def in_bounds(self, rect: Rect) -> bool:
        return 1 <= rect.i0 <= rect.i1 <= self.m and 1 <= rect.j0 <= rect.j1 <= self.n

    def token(self, color: int) -> str:
        return color_token(color, self.letters)

    def to_text(self) -> str:
        lines = [f"{self.m} {self.n} {self.sigma}"]
        for row in self.rows_top_down():
            lines.append(" ".join(self.token(c) for c in row))
        return "\n".join(lines) + "\n"


def load_image(raw: Union[bytes, str]) -> Image:
    """Parse the text image format.

    Line 1 is ``m n sigma``; the next ``m`` non-comment lines hold ``n``
    tokens each, top row first. Lines starting with ``#`` are ignored.
    """
    text = raw.decode("ascii") if isinstance(raw, (bytes, bytearray)) else raw
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ImageFormatError("empty image file")
    header = lines[0].split()
    if len(header) != 3:
        raise ImageFormatError("malformed header: expected 'm n sigma'")
    try:
        m, n, sigma = (int(x) for x in header)
    except ValueError:
        raise ImageFormatError("malformed header: expected three integers") from None
    if m < 1 or n < 1 or sigma < 1:
        raise ImageFormatError("malformed header: m, n and sigma must be positive")
    body = lines[1:]
    if len(body) != m:
        raise ImageFormatError(f"expected {m} rows, found {len(body)}")
    rows = []
    saw_letter = saw_digit = False
    for k, line in enumerate(body, start=2):
        tokens = line.split()
        if len(tokens) != n:
            raise ImageFormatError(f"ragged row on line {k}: expected {n} tokens, found {len(tokens)}")
        row = []
        for tok in tokens:
            if tok.isalpha():
                saw_letter = True
            else:
                saw_digit = True
            c = parse_color(tok)
            if not 1 <= c <= sigma:
                raise ImageFormatError(f"color out of range: {tok} on line {k} (sigma={sigma})")
            row.append(c)
        rows.append(row)
    return Image.from_rows(rows, sigma=sigma, letters=saw_letter and not saw_digit)


@dataclass(frozen=True)
class ColorRemap:
    """Dense relabelling of the colors present in an image."""

    forward: Dict[int, int]
    backward: Tuple[int, ...]  # backward[dense - 1] = original

    @property
    def sigma(self) -> int:
        return len(self.backward)

    def to_dense(self, color: int) -> Optional[int]:
        return self.forward.get(color)

    def to_original(self, color: int) -> int:
        return self.backward[color - 1]


def remap_colors(image: Image) -> Tuple[Image, ColorRemap]:
    """Relabel colors densely in first-seen order (row 1 left to right, upward)."""
    forward: Dict[int, int] = {}
    for row in image.grid:
        for c in row:
            if c not in forward:
                forward[c] = len(forward) + 1
    backward = tuple(sorted(forward, key=forward.__getitem__))
    grid = tuple(tuple(forward[c] for c in row) for row in image.grid)
    return Image(image.m, image.n, len(forward), grid, image.letters), ColorRemap(forward, backward)


def fingerprint_of(image: Image, rect: Rect) -> Fingerprint:
    """Distinct colors of ``rect`` by direct scan."""
    if not image.in_bounds(rect):
        raise IndexError(f"rectangle {rect} outside {image.m}x{image.n} image")
    seen = set()
    for i in range(rect.i0 - 1, rect.i1):
        seen.update(image.grid[i][rect.j0 - 1:rect.j1])
    return tuple(sorted(seen))


def iter_rects(m: int, n: int) -> Iterator[Rect]:
    for i0 in range(1, m + 1):
        for i1 in range(i0, m + 1):
            for j0 in range(1, n + 1):
                for j1 in range(j0, n + 1):
                    yield Rect(i0, i1, j0, j1)
