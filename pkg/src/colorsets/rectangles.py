"""Enumeration of all maximal rectangles with their fingerprints.

For every row pair ``(i0, i1)`` the columns are swept left to right. The
sweep keeps, for every left column ``j0``, the sequence ``phi(i0, i1; j0)``
of color additions and end markers: the colors added before an end
marker are exactly the fingerprint of the maximal rectangle it stands for.

Column fingerprints are obtained either from per-column distinct-color
indexes (``"column-index"``) or incrementally from the row pair one row lower
(``"parallel-rows"``), which also sweeps all ``i1`` of one ``i0`` at once.
"""
from __future__ import annotations

import os
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .image import Image, Rect, colors_of
from .intervals import IntervalSet
from .locations import FingerprintGroups, Location, LocationList
from .sequences import SLL, DistinctColorIndex1D, LastColumns

COLUMN_INDEX = "column-index"
PARALLEL_ROWS = "parallel-rows"
VARIANTS = (COLUMN_INDEX, PARALLEL_ROWS)


class ColorAdd(NamedTuple):
    color: int


class EndMarker(NamedTuple):
    rect: Rect


PhiEvent = Union[ColorAdd, EndMarker]


@dataclass
class PhiSequence:
    """Events of ``phi(i0, i1; j0)`` in order."""

    i0: int
    i1: int
    j0: int
    events: List[PhiEvent] = field(default_factory=list)

    def prefixes(self) -> Iterator[Tuple[Rect, Tuple[int, ...]]]:
        """``(rect, colors added before its marker)`` for every end marker."""
        seen: List[int] = []
        for ev in self.events:
            if isinstance(ev, ColorAdd):
                seen.append(ev.color)
            else:
                yield ev.rect, tuple(sorted(seen))


class RowPairState:
    """Sweep state of the row pair ``(i0, i1)``.

    ``below`` and ``above`` are the SLL of rows ``i0 - 1`` and ``i1 + 1``
    (``None`` when the row lies outside the image); the owner advances them
    after each column so that they cover columns ``1..j-1`` while column
    ``j`` is processed. ``out`` is a location sink (see ``locations``).
    """

    def __init__(self, i0: int, i1: int, sigma: int, n: int,
                 below: Optional[SLL], above: Optional[SLL],
                 out, powers: Optional[Sequence[int]] = None,
                 modulus: int = 0, keep_phi: bool = False):
        self.i0, self.i1, self.n = i0, i1, n
        self.slc = LastColumns(sigma, n)
        self.below, self.above = below, above
        self.j = 0
        self.fp = [0] * (n + 2)
        self.sig = [0] * (n + 2)
        self.powers = powers
        self.modulus = modulus
        self.out = out
        self.phi: Optional[Dict[int, PhiSequence]] = {} if keep_phi else None

    def bottom_top_intervals(self, j: int) -> IntervalSet:
        """Left columns of rectangles ``<i0, i1; *, j-1>`` that are maximal
        to the bottom and to the top."""
        return self._side(self.below, j) & self._side(self.above, j)

    def _side(self, sll: Optional[SLL], j: int) -> IntervalSet:
        if sll is None:
            return IntervalSet.span(1, j - 1)
        llp = self.slc.llp
        spans = []
        for c, p in sll:
            lc = llp[c]
            if lc < p:
                spans.append((lc + 1, p))
        return IntervalSet.of(spans)

    def _leftmost_item(self, f: int) -> int:
        slc = self.slc
        head = slc.n + 1
        mask, nxt = slc.mask, slc.nxt
        col = nxt[head]
        while not mask[col] & f:
            col = nxt[col]
        return col

    def _emit(self, j0: int, j1: int) -> None:
        rect = Rect(self.i0, self.i1, j0, j1)
        self.out.add(rect, self.fp[j0], self.sig[j0])
        if self.phi is not None:
            self.phi[j0].events.append(EndMarker(rect))

    def _add(self, j0: int, new: int) -> None:
        self.fp[j0] |= new
        powers = self.powers
        if powers is not None:
            s = self.sig[j0]
            bits = new
            while bits:
                low = bits & -bits
                bits ^= low
                s += powers[low.bit_length() - 1]
            self.sig[j0] = s % self.modulus
        if self.phi is not None:
            seq = self.phi.get(j0)
            if seq is None:
                seq = self.phi[j0] = PhiSequence(self.i0, self.i1, j0)
            seq.events.extend(ColorAdd(c) for c in colors_of(new))

    @staticmethod
    def _grows(sll: Optional[SLL], j0: int, fp: int) -> bool:
        """Whether row ``sll`` has a color outside ``fp`` in columns ``j0..``.

        Same answer as membership of ``j0`` in that side's intervals, found
        by walking the SLL back from its tail.
        """
        if sll is None:
            return True
        pos, prev = sll.pos, sll.prev
        c = prev[0]
        while c and pos[c] >= j0:
            if not (fp >> c) & 1:
                return True
            c = prev[c]
        return False

    def _stage1(self, j: int, q: int) -> None:
        slc = self.slc
        tail = slc.prev[slc.n + 1]
        nxt, fp, grows = slc.nxt, self.fp, self._grows
        below, above = self.below, self.above
        while q != tail:
            j0 = q + 1
            if grows(below, j0, fp[j0]) and grows(above, j0, fp[j0]):
                self._emit(j0, j - 1)
            q = nxt[q]

    def _stage2(self, f: int, q: int, advance: bool = False) -> None:
        # with ``advance`` the same walk also moves the colors of ``f``
        # out of their old items (all of them lie at or after ``q``)
        slc = self.slc
        head = slc.n + 1
        mask, nxt, prev = slc.mask, slc.nxt, slc.prev
        powers, modulus = self.powers, self.modulus
        slow = self.phi is not None
        fp, sig = self.fp, self.sig
        prefix = 0
        while q != head:
            mq = mask[q]
            nq = nxt[q]
            prefix |= mq
            # column 0 is the image border: sequences starting at 1 never die
            if q == 0 or mq & ~f:
                new = f & prefix
                if slow:
                    self._add(q + 1, new)
                else:
                    j0 = q + 1
                    fp[j0] |= new
                    if powers is not None:
                        if new & (new - 1):
                            s = sig[j0]
                            while new:
                                low = new & -new
                                new ^= low
                                s += powers[low.bit_length() - 1]
                            sig[j0] = s % modulus
                        else:
                            sig[j0] = (sig[j0] + powers[new.bit_length() - 1]) % modulus
            if advance:
                hit = mq & f
                if hit:
                    mask[q] = mq ^ hit
                    if mq == hit:
                        p = prev[q]
                        nxt[p] = nq
                        prev[nq] = p
            q = nq
        if advance:
            slc.append(f)

    def stage1_emit_end_markers(self, j: int, f: int) -> Optional[List[Rect]]:
        """End markers for the maximal rectangles with right column ``j - 1``.

        Candidates are the left columns ``l_q + 1`` for the SLC items from
        the leftmost one holding a color of ``f`` up to (excluding) the
        last; survivors must also be maximal to the bottom and top.
        """
        before = len(self.out)
        self._stage1(j, self._leftmost_item(f))
        return self._emitted_since(before)

    def stage2_add_colors(self, j: int, f: int) -> List[Tuple[int, int]]:
        """Append the colors of column ``j`` to the sequences they extend.

        Returns ``(j0, color)`` pairs. Only call after stage 1 of the same
        column; does not advance the SLC.
        """
        snapshot = list(self.fp)
        self._stage2(f, self._leftmost_item(f))
        return [(j0, c) for j0 in range(1, self.n + 1)
                for c in colors_of(self.fp[j0] & ~snapshot[j0])]

    def advance(self, j: int, f: int) -> None:
        self.slc.advance_mask(f)
        self.j = j

    def step(self, j: int, f: int) -> None:
        """Process column ``j`` with column fingerprint mask ``f``."""
        q = self._leftmost_item(f)
        self._stage1(j, q)
        self._stage2(f, q, advance=True)
        self.j = j

    def finalize_row_pair(self) -> Optional[List[Rect]]:
        """End markers for the maximal rectangles with right column ``n``."""
        before = len(self.out)
        n = self.n
        starts = {1}
        for col, _ in self.slc:
            if col < n:
                starts.add(col + 1)
        for j0 in sorted(starts):
            fp = self.fp[j0]
            if self._grows(self.below, j0, fp) and self._grows(self.above, j0, fp):
                self._emit(j0, n)
        return self._emitted_since(before)

    def _emitted_since(self, before: int) -> Optional[List[Rect]]:
        # only a location list remembers what was emitted
        if isinstance(self.out, list):
            return [loc.rect for loc in self.out[before:]]
        return None

    def sequences(self) -> List[PhiSequence]:
        if self.phi is None:
            raise ValueError("state was created without keep_phi")
        return [self.phi[j0] for j0 in sorted(self.phi)]


def column_fingerprint(image: Image, i0: int, i1: int, j: int, mode: str = COLUMN_INDEX,
                       column_index: Optional[DistinctColorIndex1D] = None,
                       lower: Optional[int] = None) -> Tuple[int, ...]:
    """Distinct colors of cells ``(i0..i1, j)``.

    ``column-index`` queries a distinct-color index over column ``j``;
    ``parallel-rows`` extends the mask ``lower`` of ``(i0..i1-1, j)`` by
    one cell (computed from scratch when ``lower`` is not given).
    """
    if mode == COLUMN_INDEX:
        index = column_index or DistinctColorIndex1D(image.column(j))
        return colors_of(index.colors_mask(i0, i1))
    if mode == PARALLEL_ROWS:
        if lower is None:
            lower = 0
            for i in range(i0, i1):
                lower |= 1 << image.grid[i - 1][j - 1]
        return colors_of(lower | 1 << image.grid[i1 - 1][j - 1])
    raise ValueError(f"unknown variant {mode!r}")


@dataclass
class SweepResult:
    """Output of a sweep: a location list, or signature groups when the
    sweep was asked to group."""

    locations: Optional[List[Location]] = None
    groups: Optional[FingerprintGroups] = None
    sequences: Optional[list] = None

    def merge(self, other: "SweepResult") -> None:
        if self.locations is not None:
            self.locations.extend(other.locations)
        if self.groups is not None:
            self.groups.merge(other.groups)
        if self.sequences is not None:
            self.sequences.extend(other.sequences)

    def finish(self, key) -> "SweepResult":
        if self.locations is not None:
            self.locations.sort(key=lambda loc: loc.key)
        if self.groups is not None:
            self.groups.finish()
        if self.sequences is not None:
            self.sequences.sort(key=key)
        return self


def new_sink(group: Optional[str]):
    """A :class:`LocationList`, or signature groups for ``"exists"`` /
    ``"report"`` (the latter keeping every location)."""
    if group is None:
        return LocationList()
    if group not in ("exists", "report"):
        raise ValueError(f"unknown grouping {group!r}")
    return FingerprintGroups(keep_locations=group == "report")


def _result(out, seqs, keep_phi) -> SweepResult:
    if isinstance(out, FingerprintGroups):
        return SweepResult(groups=out, sequences=seqs if keep_phi else None)
    return SweepResult(locations=out, sequences=seqs if keep_phi else None)


def _sweep_column_index(image: Image, i0s: Sequence[int], powers, modulus, keep_phi, group) -> SweepResult:
    m, n, sigma, grid = image.m, image.n, image.sigma, image.grid
    columns = [DistinctColorIndex1D(image.column(j)) for j in range(1, n + 1)]
    out = new_sink(group)
    seqs: List[PhiSequence] = []
    for i0 in i0s:
        for i1 in range(i0, m + 1):
            below = SLL(sigma) if i0 > 1 else None
            above = SLL(sigma) if i1 < m else None
            st = RowPairState(i0, i1, sigma, n, below, above, out, powers, modulus, keep_phi)
            for j in range(1, n + 1):
                st.step(j, columns[j - 1].colors_mask(i0, i1))
                if below is not None:
                    below.extend(grid[i0 - 2][j - 1], j)
                if above is not None:
                    above.extend(grid[i1][j - 1], j)
            st.finalize_row_pair()
            if keep_phi:
                seqs.extend(st.sequences())
    return _result(out, seqs, keep_phi)


def _sweep_parallel_rows(image: Image, i0s: Sequence[int], powers, modulus, keep_phi,
                         group) -> SweepResult:
    m, n, sigma, grid = image.m, image.n, image.sigma, image.grid
    out = new_sink(group)
    seqs: List[PhiSequence] = []
    for i0 in i0s:
        # rows[i] is SLL<i; j-1> for i0-1 <= i <= m; index m+1 stays None
        rows: List[Optional[SLL]] = [None] * (m + 2)
        for i in range(max(1, i0 - 1), m + 1):
            rows[i] = SLL(sigma)
        states = [RowPairState(i0, i1, sigma, n, rows[i0 - 1], rows[i1 + 1], out,
                               powers, modulus, keep_phi)
                  for i1 in range(i0, m + 1)]
        live_rows = [(rows[i], grid[i - 1]) for i in range(max(1, i0 - 1), m + 1)]
        for j in range(1, n + 1):
            f = 0
            jj = j - 1
            for st, i1 in zip(states, range(i0 - 1, m)):
                f |= 1 << grid[i1][jj]
                st.step(j, f)
            for sll, row in live_rows:
                sll.extend(row[jj], j)
        for st in states:
            st.finalize_row_pair()
            if keep_phi:
                seqs.extend(st.sequences())
    return _result(out, seqs, keep_phi)


def _sweep(image: Image, i0s: Sequence[int], variant: str, powers=None, modulus=0,
           keep_phi=False, group=None) -> SweepResult:
    if variant == COLUMN_INDEX:
        return _sweep_column_index(image, i0s, powers, modulus, keep_phi, group)
    if variant == PARALLEL_ROWS:
        return _sweep_parallel_rows(image, i0s, powers, modulus, keep_phi, group)
    raise ValueError(f"unknown variant {variant!r}")


def _chunks(m: int, parts: int) -> List[List[int]]:
    # round-robin balances the O((m - i0) n sigma) cost of each i0
    return [list(range(1 + k, m + 1, parts)) for k in range(parts) if 1 + k <= m]


def enumerate_maximal_rectangles(image: Image, variant: str = PARALLEL_ROWS, *,
                                 powers: Optional[Sequence[int]] = None, modulus: int = 0,
                                 keep_phi: bool = False, group: Optional[str] = None,
                                 workers: int = 1,
                                 executor: Optional[Executor] = None) -> SweepResult:
    """All maximal locations of a densely colored image with ``m <= n``.

    Locations come back sorted by ``(i0, i1, j0, j1)`` whatever the worker
    count. ``powers``/``modulus`` switch on incremental polynomial
    signatures; ``keep_phi`` also materializes every ``phi`` sequence;
    ``group`` collects signature groups instead of a location list.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if group is not None and powers is None:
        raise ValueError("grouping needs signatures")
    if workers <= 1 and executor is None:
        res = _sweep(image, range(1, image.m + 1), variant, powers, modulus, keep_phi, group)
    else:
        parts = _chunks(image.m, max(2, workers))
        own = executor is None
        pool = executor or ProcessPoolExecutor(max_workers=max(1, workers))
        try:
            futures = [pool.submit(_sweep, image, part, variant, powers, modulus, keep_phi, group)
                       for part in parts]
            partial = [fut.result() for fut in futures]
        finally:
            if own:
                pool.shutdown()
        res = partial[0]
        for p in partial[1:]:
            res.merge(p)
    return res.finish(key=lambda s: (s.i0, s.i1, s.j0))


def default_workers() -> int:
    return os.cpu_count() or 1
