"""Brute-force ground truth for maximal rectangles and squares.

Everything here enumerates all O(m^2 n^2) rectangles explicitly; it is
meant for small images only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .image import Fingerprint, Image, Rect, Square, colors_of

DEFAULT_GUARD = 400


class OracleSizeError(ValueError):
    pass


def _check_guard(image: Image, guard: Optional[int]) -> None:
    limit = DEFAULT_GUARD if guard is None else guard
    if limit and image.m * image.n > limit:
        raise OracleSizeError(f"image has {image.m * image.n} cells, oracle guard is {limit}")


def rect_masks(image: Image) -> Dict[Rect, int]:
    """Color bit mask of every rectangle.

    Each rectangle is the union of a previously computed one and its last
    column, so the table costs O(m^2 n^2) set unions.
    """
    m, n, grid = image.m, image.n, image.grid
    table: Dict[Rect, int] = {}
    for i0 in range(1, m + 1):
        col = [0] * (n + 1)
        for i1 in range(i0, m + 1):
            row = grid[i1 - 1]
            for j in range(1, n + 1):
                col[j] |= 1 << row[j - 1]
            for j0 in range(1, n + 1):
                acc = 0
                for j1 in range(j0, n + 1):
                    acc |= col[j1]
                    table[Rect(i0, i1, j0, j1)] = acc
    return table


def _is_maximal_rect(table: Dict[Rect, int], rect: Rect, m: int, n: int) -> bool:
    i0, i1, j0, j1 = rect
    f = table[rect]
    for ext in ((i0 - 1, i1, j0, j1), (i0, i1 + 1, j0, j1),
                (i0, i1, j0 - 1, j1), (i0, i1, j0, j1 + 1)):
        a, b, c, d = ext
        if 1 <= a and b <= m and 1 <= c and d <= n and table[Rect(*ext)] == f:
            return False
    return True


def brute_force_locations(image: Image, guard: Optional[int] = None) -> Set[Tuple[Rect, Fingerprint]]:
    """All maximal rectangles with their fingerprints.

    A rectangle is maximal iff each one-step extension either leaves the
    image or changes the fingerprint: any larger rectangle with the same
    fingerprint contains a one-step extension with that fingerprint too.
    """
    _check_guard(image, guard)
    table = rect_masks(image)
    return {(rect, colors_of(mask)) for rect, mask in table.items()
            if _is_maximal_rect(table, rect, image.m, image.n)}


def brute_force_fingerprints(image: Image, guard: Optional[int] = None) -> Set[Fingerprint]:
    _check_guard(image, guard)
    return {colors_of(mask) for mask in rect_masks(image).values()}


def square_containers(sq: Square, m: int, n: int) -> List[Square]:
    """In-bounds squares of size ``k + 1`` containing ``sq``."""
    i, j, k = sq
    out = []
    for di in (-1, 0):
        for dj in (-1, 0):
            a, b = i + di, j + dj
            if a >= 1 and b >= 1 and a + k <= m and b + k <= n:
                out.append(Square(a, b, k + 1))
    return out


def brute_force_squares(image: Image, guard: Optional[int] = None,
                        table: Optional[Dict[Rect, int]] = None) -> Set[Tuple[Square, Fingerprint]]:
    """All maximal squares with their fingerprints.

    Only containers one size larger are checked: if a square sits inside a
    bigger one with the same fingerprint, every square in between along a
    chain of one-step growths has that fingerprint as well.
    """
    _check_guard(image, guard)
    m, n = image.m, image.n
    table = table if table is not None else rect_masks(image)
    out = set()
    for k in range(1, min(m, n) + 1):
        for i in range(1, m - k + 2):
            for j in range(1, n - k + 2):
                sq = Square(i, j, k)
                f = table[sq.rect]
                if all(table[c.rect] != f for c in square_containers(sq, m, n)):
                    out.add((sq, colors_of(f)))
    return out


def square_conditions(table: Dict[Rect, int], image: Image, sq: Square) -> Dict[str, bool]:
    """The eight directional conditions of a square, evaluated directly.

    An extension that would leave the image counts as satisfied, and so
    does a corner cell outside the image.
    """
    m, n, grid = image.m, image.n, image.grid
    i, j, k = sq
    f = table[sq.rect]

    def differs(i0, i1, j0, j1):
        if i0 < 1 or j0 < 1 or i1 > m or j1 > n:
            return True
        return table[Rect(i0, i1, j0, j1)] != f

    def corner_absent(a, b):
        if not (1 <= a <= m and 1 <= b <= n):
            return True
        return not (f >> grid[a - 1][b - 1]) & 1

    top, right = i + k - 1, j + k - 1
    cond = {
        "L": differs(i, top, j - 1, right),
        "R": differs(i, top, j, right + 1),
        "U": differs(i, top + 1, j, right),
        "D": differs(i - 1, top, j, right),
        "LD": corner_absent(i - 1, j - 1),
        "RU": corner_absent(top + 1, right + 1),
    }
    cond["LU"] = corner_absent(top + 1, j - 1) and not cond["U"]
    cond["RD"] = corner_absent(i - 1, right + 1) and not cond["R"]
    return cond


def condition_formula(cond: Dict[str, bool]) -> bool:
    return ((cond["L"] or cond["U"] or cond["LU"]) and (cond["L"] or cond["D"] or cond["LD"])
            and (cond["R"] or cond["U"] or cond["RU"]) and (cond["R"] or cond["D"] or cond["RD"]))


def condition_disagreements(image: Image, guard: Optional[int] = None) -> List[Square]:
    """Squares where the eight-condition formula and containment disagree."""
    _check_guard(image, guard)
    table = rect_masks(image)
    maximal = {sq for sq, _ in brute_force_squares(image, guard, table)}
    bad = []
    for k in range(1, min(image.m, image.n) + 1):
        for i in range(1, image.m - k + 2):
            for j in range(1, image.n - k + 2):
                sq = Square(i, j, k)
                if condition_formula(square_conditions(table, image, sq)) != (sq in maximal):
                    bad.append(sq)
    return bad


@dataclass
class OracleReport:
    locations: Set[Tuple[Rect, Fingerprint]] = field(default_factory=set)
    squares: Set[Tuple[Square, Fingerprint]] = field(default_factory=set)

    @property
    def fingerprints(self) -> Set[Fingerprint]:
        return {f for _, f in self.locations} | {f for _, f in self.squares}


@dataclass
class Diff:
    oracle_only: List[tuple]
    fast_only: List[tuple]

    def __bool__(self) -> bool:
        return bool(self.oracle_only or self.fast_only)

    def lines(self) -> List[str]:
        out = [f"oracle-only {item}" for item in self.oracle_only]
        out += [f"fast-only {item}" for item in self.fast_only]
        return out


def compare(oracle: OracleReport, fast: OracleReport) -> Diff:
    """Symmetric difference of two reports; an empty diff means agreement."""
    a = oracle.locations | oracle.squares
    b = fast.locations | fast.squares
    return Diff(sorted(a - b), sorted(b - a))


def oracle_report(image: Image, squares: bool = False, guard: Optional[int] = None) -> OracleReport:
    if squares:
        return OracleReport(squares=brute_force_squares(image, guard))
    return OracleReport(locations=brute_force_locations(image, guard))
