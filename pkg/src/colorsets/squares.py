"""Enumeration of all maximal squares with their fingerprints.

Squares are found per diagonal. While the sweep walks a diagonal, the
state of that diagonal describes every square whose upper right corner is
the current cell ``(I, J)``; its size ``k`` ranges over ``1..G`` with
``G = min(I, J)``. The Chebyshev distance ``max(I - a, J - b)`` of a cell
``(a, b)`` tells the smallest such square containing it (size distance+1).

For each color the state stores an *anchor* ``I - d`` where ``d`` is the
smallest distance of the color inside the current region, and flags saying
where that distance is attained: in the column triangle above the
diagonal (SCT/PCT), the row triangle below it (SLT/PLT), or on the
diagonal itself (SLD/PLD). Anchors do not change when the corner moves
one step along the diagonal, so updating costs O(sigma) per cell.

``phi_hat(a, b)`` collects the colors of the squares with lower left
corner ``(a, b)`` in order of distance from that corner, with an end
marker after the prefix of every maximal square.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from .image import Image, Square, colors_of
from .intervals import IntervalSet
from .locations import FingerprintGroups, LocationList
from .sequences import SLL, DistinctColorIndex1D

PARALLEL_DIAGONALS = "parallel-diagonals"
COLUMN_INDEX = "column-index"
SQUARE_VARIANTS = (PARALLEL_DIAGONALS, COLUMN_INDEX)

COL, ROW, DIAG = 1, 2, 4
_NONE = -(1 << 40)


class SquareAdd(NamedTuple):
    color: int


class SquareMarker(NamedTuple):
    square: Square


@dataclass
class HatPhiSequence:
    """Events of ``phi_hat(i; j)`` in order."""

    i: int
    j: int
    events: list = field(default_factory=list)

    def prefixes(self):
        seen: List[int] = []
        for ev in self.events:
            if isinstance(ev, SquareAdd):
                seen.append(ev.color)
            else:
                yield ev.square, tuple(sorted(seen))


def _span(lo: int, hi: int) -> int:
    """Bitset of the sizes ``lo..hi``."""
    return (1 << (hi + 1)) - (1 << lo) if lo <= hi else 0


def bits_to_intervals(bits: int) -> IntervalSet:
    out = []
    k = 0
    while bits:
        if bits & 1:
            lo = k
            while bits & 1:
                bits >>= 1
                k += 1
            out.append((lo, k - 1))
        else:
            low = (bits & -bits).bit_length() - 1
            bits >>= low
            k += low
    return IntervalSet(out)


class DiagonalState:
    """Square structures of one diagonal at corner ``(I, J)``."""

    __slots__ = ("I", "J", "G", "sigma", "anchor", "flags", "present")

    def __init__(self, I: int, J: int, sigma: int):
        # the corner starts just outside the image, with an empty region
        self.I, self.J, self.G = I, J, 0
        self.sigma = sigma
        self.anchor = [_NONE] * (sigma + 1)
        self.flags = [0] * (sigma + 1)
        self.present = 0

    def K(self, c: int) -> int:
        """Largest size of a square at the corner avoiding color ``c``."""
        return min(self.G, self.I - self.anchor[c])

    def ks(self) -> List[int]:
        G, I = self.G, self.I
        return [min(G, I - a) for a in self.anchor]

    def absorb(self, corner: int, row_sll, col_sll) -> None:
        """Move the corner to ``(I + 1, J + 1)`` whose color is ``corner``.

        ``row_sll`` covers row ``I + 1`` up to column ``J`` and ``col_sll``
        column ``J + 1`` up to row ``I``. New cells closer than a color's
        current anchor replace it; equally close ones add a flag.
        """
        I, J = self.I + 1, self.J + 1
        G = min(I, J)
        A, F = self.anchor, self.flags
        present = self.present
        r = I - J
        pos, prev = row_sll.pos, row_sll.prev
        lo = J - G + 1
        c = prev[0]
        while c and pos[c] >= lo:
            a = pos[c] + r
            if a > A[c]:
                A[c] = a
                F[c] = COL
                present |= 1 << c
            elif a == A[c]:
                F[c] |= COL
            c = prev[c]
        pos, prev = col_sll.pos, col_sll.prev
        lo = I - G + 1
        c = prev[0]
        while c and pos[c] >= lo:
            a = pos[c]
            if a > A[c]:
                A[c] = a
                F[c] = ROW
                present |= 1 << c
            elif a == A[c]:
                F[c] |= ROW
            c = prev[c]
        A[corner] = I
        F[corner] = DIAG
        self.present = present | (1 << corner)
        self.I, self.J, self.G = I, J, G

    # views in the shape of the two-way queues

    def _items(self, flag: int, offset: int) -> List[Tuple[int, int]]:
        counts: Dict[int, int] = {}
        for c in range(1, self.sigma + 1):
            if self.flags[c] & flag:
                key = self.anchor[c] - offset
                counts[key] = counts.get(key, 0) + 1
        return sorted(counts.items())

    def sct(self) -> List[Tuple[int, int]]:
        """``(column, count)`` items of the column triangle, ascending."""
        return self._items(COL, self.I - self.J)

    def slt(self) -> List[Tuple[int, int]]:
        """``(row, count)`` items of the row triangle, ascending."""
        return self._items(ROW, 0)

    def sld(self) -> List[Tuple[int, int]]:
        """``(color, row)`` items of the diagonal, by ascending row."""
        items = [(c, self.anchor[c]) for c in range(1, self.sigma + 1) if self.flags[c] & DIAG]
        return sorted(items, key=lambda it: it[1])

    def _pointers(self, items: List[Tuple[int, int]], flag: int, offset: int) -> Dict[int, Tuple[int, int]]:
        by_key = dict(items)
        return {c: (self.anchor[c] - offset, by_key[self.anchor[c] - offset])
                for c in range(1, self.sigma + 1) if self.flags[c] & flag}

    def pct(self) -> Dict[int, Tuple[int, int]]:
        return self._pointers(self.sct(), COL, self.I - self.J)

    def plt(self) -> Dict[int, Tuple[int, int]]:
        return self._pointers(self.slt(), ROW, 0)

    def pld(self) -> Dict[int, Tuple[int, int]]:
        return {c: (c, row) for c, row in self.sld()}


@dataclass
class ChiSets:
    """Characteristic size sets of one corner, as bitsets over ``k``."""

    G: int
    L: int = 0
    R: int = 0
    U: int = 0
    D: int = 0
    LU: int = 0
    LD: int = 0
    RU: int = 0
    RD: int = 0

    @property
    def M(self) -> int:
        full = _span(1, self.G)
        return (full & (self.L | self.U | self.LU) & (self.L | self.D | self.LD)
                & (self.R | self.U | self.RU) & (self.R | self.D | self.RD))

    def interval(self, name: str) -> IntervalSet:
        return bits_to_intervals(getattr(self, name) & _span(1, self.G))


class _PrefixView:
    """SLL-shaped view (``pos`` and tail-linked ``prev``) of a reported
    list of ``(color, last)`` pairs in ascending order of ``last``."""

    __slots__ = ("pos", "prev")

    def __init__(self, sigma: int, items: Sequence[Tuple[int, int]]):
        self.pos = [0] * (sigma + 1)
        self.prev = [0] * (sigma + 1)
        last = 0
        for c, p in items:
            self.pos[c] = p
            self.prev[c] = last
            last = c
        self.prev[0] = last


class SquareSweep:
    """Shared machinery of both square schedules."""

    def __init__(self, image: Image, out, powers=None, modulus=0, keep_phi=False,
                 observer: Optional[Callable[[int, int, DiagonalState], None]] = None):
        self.image = image
        m, n, sigma = image.m, image.n, image.sigma
        self.m, self.n, self.sigma = m, n, sigma
        self.out = out
        self.powers, self.modulus = powers, modulus
        self.width = n + 2
        self.fp = [0] * ((m + 2) * (n + 2))
        self.sig = [0] * ((m + 2) * (n + 2))
        self.phi: Optional[Dict[Tuple[int, int], HatPhiSequence]] = {} if keep_phi else None
        self.observer = observer
        grid = image.grid
        # prefix colors of rows and columns, for the size-G border checks
        self.row_prefix = []
        for a in range(m):
            acc, pre = 0, [0]
            for b in range(n):
                acc |= 1 << grid[a][b]
                pre.append(acc)
            self.row_prefix.append(pre)
        self.col_prefix = []
        for b in range(n):
            acc, pre = 0, [0]
            for a in range(m):
                acc |= 1 << grid[a][b]
                pre.append(acc)
            self.col_prefix.append(pre)

    def chi_sets(self, st: DiagonalState, K: List[int], i: int, j: int, row_sll, col_sll) -> ChiSets:
        """Characteristic sets for the squares with corner ``(i-1, j-1)``.

        ``row_sll`` is row ``i`` up to column ``j - 1`` (``None`` above the
        image) and ``col_sll`` column ``j`` up to row ``i - 1`` (``None``
        right of the image).
        """
        G, I, J = st.G, st.I, st.J
        full = _span(1, G)
        chi = ChiSets(G)
        inside = row_sll is not None and col_sll is not None
        chi.RU = _span(1, K[self.image.grid[i - 1][j - 1]]) if inside else full
        if row_sll is None:
            chi.U = full
        else:
            pos, prev = row_sll.pos, row_sll.prev
            U = LU = 0
            c = prev[0]
            bound = j - 1 - G
            while c and pos[c] >= bound:
                kc = K[c]
                lo = j - pos[c]
                if lo <= kc:
                    U |= (1 << (kc + 1)) - (1 << lo)
                if 1 <= lo - 1 <= kc:
                    LU |= 1 << (lo - 1)
                c = prev[c]
            chi.U, chi.LU = U, LU
        if col_sll is None:
            chi.R = full
        else:
            pos, prev = col_sll.pos, col_sll.prev
            R = RD = 0
            c = prev[0]
            bound = i - 1 - G
            while c and pos[c] >= bound:
                kc = K[c]
                lo = i - pos[c]
                if lo <= kc:
                    R |= (1 << (kc + 1)) - (1 << lo)
                if 1 <= lo - 1 <= kc:
                    RD |= 1 << (lo - 1)
                c = prev[c]
            chi.R, chi.RD = R, RD
        L = D = 0
        LD = 1 << G  # the diagonal cell past size G lies outside the image
        A, F = st.anchor, st.flags
        for c in range(1, self.sigma + 1):
            fl = F[c]
            if fl:
                bit = 1 << (I - A[c])
                if fl & COL:
                    L |= bit
                if fl & ROW:
                    D |= bit
                if fl & DIAG:
                    LD |= bit
        LD &= ~1
        # size G: the left column or bottom row either leaves the image or
        # lies just outside the region
        if G == J:
            L |= 1 << G
        elif self.col_prefix[J - G - 1][I] & ~st.present:
            L |= 1 << G
        if G == I:
            D |= 1 << G
        elif self.row_prefix[I - G - 1][J] & ~st.present:
            D |= 1 << G
        chi.L, chi.D, chi.LD = L, D, LD
        return chi

    def stage1(self, st: DiagonalState, K: List[int], i: int, j: int, row_sll, col_sll) -> List[Square]:
        """End markers for the maximal squares with corner ``(i-1, j-1)``."""
        if st.G == 0:
            return []
        bits = self.chi_sets(st, K, i, j, row_sll, col_sll).M
        found = []
        width, fp, sig, out = self.width, self.fp, self.sig, self.out
        while bits:
            low = bits & -bits
            bits ^= low
            k = low.bit_length() - 1
            sq = Square(i - k, j - k, k)
            at = sq.i * width + sq.j
            out.add(sq, fp[at], sig[at])
            if self.phi is not None:
                self.phi[(sq.i, sq.j)].events.append(SquareMarker(sq))
            found.append(sq)
        return found

    def stage2(self, K: List[int], Khat: List[int], i: int, j: int) -> None:
        """Add the colors first met at distance ``k`` from ``(i-k, j-k)``."""
        width, fp, sig = self.width, self.fp, self.sig
        powers, modulus, phi = self.powers, self.modulus, self.phi
        for c in range(1, self.sigma + 1):
            lo, hi = Khat[c], K[c]
            if lo > hi:
                continue
            bit = 1 << c
            at = (i - lo) * width + (j - lo)
            for k in range(lo, hi + 1):
                fp[at] |= bit
                if powers is not None:
                    sig[at] = (sig[at] + powers[c]) % modulus
                if phi is not None:
                    key = (i - k, j - k)
                    seq = phi.get(key)
                    if seq is None:
                        seq = phi[key] = HatPhiSequence(*key)
                    seq.events.append(SquareAdd(c))
                at -= width + 1

    def cell(self, st: DiagonalState, i: int, j: int, row_sll, col_sll) -> None:
        """Process image cell ``(i, j)`` on the diagonal of ``st``."""
        K = st.ks()
        self.stage1(st, K, i, j, row_sll, col_sll)
        st.absorb(self.image.grid[i - 1][j - 1], row_sll, col_sll)
        if self.observer is not None:
            self.observer(i, j, st)
        self.stage2(K, st.ks(), i, j)

    def virtual(self, st: DiagonalState, i: int, j: int, row_sll, col_sll) -> None:
        """Close a diagonal at the first cell past the image border."""
        self.stage1(st, st.ks(), i, j, row_sll, col_sll)

    def sequences(self) -> List[HatPhiSequence]:
        if self.phi is None:
            raise ValueError("sweep was created without keep_phi")
        return [self.phi[k] for k in sorted(self.phi)]


def _run_parallel_diagonals(sw: SquareSweep) -> None:
    """Columns left to right, each column bottom to top; every diagonal
    advances by one cell per column, sharing row and column SLLs."""
    m, n, sigma, grid = sw.m, sw.n, sw.sigma, sw.image.grid
    rows = [SLL(sigma) for _ in range(m + 1)]
    diagonals: Dict[int, DiagonalState] = {}
    for j in range(1, n + 2):
        col = SLL(sigma) if j <= n else None
        for i in range(1, m + 2):
            st = diagonals.get(i - j)
            if i <= m and j <= n:
                if st is None:
                    st = diagonals[i - j] = DiagonalState(i - 1, j - 1, sigma)
                sw.cell(st, i, j, rows[i], col)
                color = grid[i - 1][j - 1]
                rows[i].extend(color, j)
                col.extend(color, i)
            elif st is not None:
                sw.virtual(st, i, j, rows[i] if i <= m else None, col if i - 1 <= m else None)


def _run_column_index(sw: SquareSweep) -> None:
    """Diagonal by diagonal; the row and column prefixes come from
    per-row and per-column distinct-color indexes."""
    m, n, sigma = sw.m, sw.n, sw.sigma
    row_index = [None] + [DistinctColorIndex1D(sw.image.row(i)) for i in range(1, m + 1)]
    col_index = [None] + [DistinctColorIndex1D(sw.image.column(j)) for j in range(1, n + 1)]
    empty = _PrefixView(sigma, ())

    def prefix(index, lo, hi):
        return _PrefixView(sigma, index.query(max(1, lo), hi)) if hi >= 1 else empty

    for r in range(m - 1, -n, -1):
        i, j = (1 + r, 1) if r >= 0 else (1, 1 - r)
        st = DiagonalState(i - 1, j - 1, sigma)
        while i <= m and j <= n:
            G = min(i, j)
            sw.cell(st, i, j, prefix(row_index[i], j - G - 1, j - 1),
                    prefix(col_index[j], i - G - 1, i - 1))
            i += 1
            j += 1
        G = st.G
        row = prefix(row_index[i], j - G - 1, j - 1) if i <= m else None
        col = prefix(col_index[j], i - G - 1, i - 1) if j <= n else None
        sw.virtual(st, i, j, row, col)


@dataclass
class SquareResult:
    locations: Optional[list] = None
    groups: Optional[FingerprintGroups] = None
    sequences: Optional[List[HatPhiSequence]] = None


def enumerate_maximal_squares(image: Image, variant: str = PARALLEL_DIAGONALS, *,
                              powers: Optional[Sequence[int]] = None, modulus: int = 0,
                              keep_phi: bool = False, group: Optional[str] = None,
                              observer: Optional[Callable[[int, int, DiagonalState], None]] = None
                              ) -> SquareResult:
    """All maximal squares of a densely colored image, sorted by ``(i, j, k)``.

    ``observer(i, j, state)`` is called after the structures of each
    diagonal absorb cell ``(i, j)``.
    """
    if variant not in SQUARE_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if group is None:
        out = LocationList()
    elif powers is None:
        raise ValueError("grouping needs signatures")
    else:
        out = FingerprintGroups(keep_locations=group == "report")
    sw = SquareSweep(image, out, powers, modulus, keep_phi, observer)
    (_run_parallel_diagonals if variant == PARALLEL_DIAGONALS else _run_column_index)(sw)
    res = SquareResult(sequences=sw.sequences() if keep_phi else None)
    if group is None:
        out.sort(key=lambda loc: loc.key)
        res.locations = out
    else:
        res.groups = out.finish()
    return res
