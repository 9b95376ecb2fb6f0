"""One-dimensional building blocks of the sweeps.

* :class:`SLL` -- the sequence of last colors of a string prefix.
* :class:`LastColumns` -- the sequence of last columns of a rectangle
  (SLC) together with its per-color pointer array (LLP).
* :class:`DistinctColorIndex1D` -- distinct-color reporting over ranges
  of a sequence in time proportional to the output.
"""
from __future__ import annotations

from typing import Iterator, List, Optional, Sequence, Tuple


class SLL:
    """Colors of a string prefix keyed by their rightmost position.

    A doubly linked list threaded through per-color arrays, so a color is
    its own list node and the locator table is implicit. Index 0 is the
    sentinel (colors are >= 1).
    """

    __slots__ = ("sigma", "pos", "prev", "nxt", "length")

    def __init__(self, sigma: int):
        self.sigma = sigma
        self.pos = [0] * (sigma + 1)
        self.prev = [0] * (sigma + 1)
        self.nxt = [0] * (sigma + 1)
        self.length = 0

    @classmethod
    def from_string(cls, sigma: int, colors: Sequence[int]) -> "SLL":
        sll = cls(sigma)
        for c in colors:
            sll.extend(c)
        return sll

    def extend(self, color: int, position: Optional[int] = None) -> "SLL":
        """Append ``color`` at ``position`` (must be the next position)."""
        if position is None:
            position = self.length + 1
        elif position != self.length + 1:
            raise ValueError(f"position {position} does not extend prefix of length {self.length}")
        if not 1 <= color <= self.sigma:
            raise ValueError(f"color {color} outside [1, {self.sigma}]")
        prev, nxt = self.prev, self.nxt
        if self.pos[color]:
            p, q = prev[color], nxt[color]
            nxt[p] = q
            prev[q] = p
        tail = prev[0]
        nxt[tail] = color
        prev[color] = tail
        nxt[color] = 0
        prev[0] = color
        self.pos[color] = position
        self.length = position
        return self

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        nxt, pos = self.nxt, self.pos
        c = nxt[0]
        while c:
            yield c, pos[c]
            c = nxt[c]

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def items(self) -> List[Tuple[int, int]]:
        return list(self)

    def last(self, color: int) -> int:
        """Rightmost position of ``color`` in the prefix, 0 if absent."""
        return self.pos[color]


class LastColumns:
    """SLC and LLP of the rectangle ``<i0, i1; 1, j>``.

    Items are identified by their column number ``l`` (column 0 holds the
    colors absent so far). ``mask[l]`` is the bit set of the colors whose
    rightmost occurrence lies in column ``l``; its size is the item count.
    Items form a doubly linked list in increasing column order with
    sentinel ``n + 1``. The LLP pointer of a color is the item whose mask
    holds it, so it is read off the masks instead of being stored.
    """

    __slots__ = ("sigma", "n", "j", "mask", "prev", "nxt")

    def __init__(self, sigma: int, n: int):
        self.sigma = sigma
        self.n = n
        self.j = 0
        head = n + 1
        self.mask = [0] * (n + 2)
        self.prev = [head] * (n + 2)
        self.nxt = [head] * (n + 2)
        self.mask[0] = ((1 << (sigma + 1)) - 1) ^ 1
        self.nxt[head] = self.prev[head] = 0
        self.prev[0] = self.nxt[0] = head

    @property
    def head(self) -> int:
        return self.n + 1

    def count(self, col: int) -> int:
        return self.mask[col].bit_count()

    @property
    def llp(self) -> List[int]:
        """``llp[c]``: column of the item holding color ``c``."""
        out = [0] * (self.sigma + 1)
        for col, _ in self:
            bits = self.mask[col]
            while bits:
                low = bits & -bits
                bits ^= low
                out[low.bit_length() - 1] = col
        return out

    def advance(self, column_colors: Sequence[int]) -> "LastColumns":
        """Account for column ``j + 1`` whose cells carry ``column_colors``."""
        f = 0
        for c in column_colors:
            if not 1 <= c <= self.sigma:
                raise ValueError(f"color {c} outside [1, {self.sigma}]")
            f |= 1 << c
        self.advance_mask(f)
        return self

    def advance_mask(self, f: int) -> None:
        mask, prev, nxt = self.mask, self.prev, self.nxt
        head = self.n + 1
        rest = f
        col = nxt[head]
        while rest:
            nc = nxt[col]
            hit = mask[col] & rest
            if hit:
                rest ^= hit
                left = mask[col] ^ hit
                mask[col] = left
                if not left:
                    p = prev[col]
                    nxt[p] = nc
                    prev[nc] = p
            col = nc
        self.append(f)

    def append(self, f: int) -> None:
        """Link the item of the new column ``j + 1`` holding ``f``."""
        prev, nxt = self.prev, self.nxt
        head = self.n + 1
        j = self.j + 1
        tail = prev[head]
        nxt[tail] = j
        prev[j] = tail
        nxt[j] = head
        prev[head] = j
        self.mask[j] = f
        self.j = j

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        """Items ``(l, k)`` in increasing column order."""
        head = self.n + 1
        nxt, mask = self.nxt, self.mask
        col = nxt[head]
        while col != head:
            yield col, mask[col].bit_count()
            col = nxt[col]

    def items(self) -> List[Tuple[int, int]]:
        return list(self)

    def item_of(self, color: int) -> Tuple[int, int]:
        """The SLC item the LLP entry of ``color`` points to."""
        col = self.last_column(color)
        return col, self.mask[col].bit_count()

    def last_column(self, color: int) -> int:
        bit = 1 << color
        for col, _ in self:
            if self.mask[col] & bit:
                return col
        raise ValueError(f"color {color} outside [1, {self.sigma}]")


_REPORT = -2


def _ilog2(value: int) -> int:
    return value.bit_length() - 1


class SparseTableArgMax:
    """Position of a maximum over any range in O(1) after O(N log N) setup."""

    def __init__(self, values: Sequence[int]):
        self.values = list(values)
        n = len(self.values)
        self.table: List[List[int]] = [list(range(n))]
        depth = 1
        while (1 << depth) <= n:
            prev = self.table[-1]
            half = 1 << (depth - 1)
            vals = self.values
            row = []
            for i in range(n - (1 << depth) + 1):
                a, b = prev[i], prev[i + half]
                row.append(a if vals[a] >= vals[b] else b)
            self.table.append(row)
            depth += 1

    def __call__(self, lo: int, hi: int) -> int:
        """Index of a maximum of ``values[lo..hi]`` (inclusive, 0-based)."""
        depth = _ilog2(hi - lo + 1)
        row = self.table[depth]
        a, b = row[lo], row[hi - (1 << depth) + 1]
        return a if self.values[a] >= self.values[b] else b


class DistinctColorIndex1D:
    """Reports the distinct colors of ``T[i..j]`` with their last occurrences.

    ``next[p]`` is the next position holding ``T[p]`` (``N + 1`` if none).
    A position is the last occurrence of its color inside ``[i, j]`` iff
    its ``next`` exceeds ``j``; those positions are found by repeatedly
    splitting the range at a position of maximum ``next``.
    """

    def __init__(self, seq: Sequence[int]):
        self.seq = list(seq)
        n = len(self.seq)
        self.n = n
        last_seen = {}
        nxt = [0] * n
        for p in range(n - 1, -1, -1):
            c = self.seq[p]
            nxt[p] = last_seen.get(c, n) + 1
            last_seen[c] = p
        self.next = nxt  # 1-based values, 0-based storage
        self._rmq = SparseTableArgMax(nxt) if n else None

    def query(self, i: int, j: int) -> List[Tuple[int, int]]:
        """Distinct colors of ``T[i..j]`` (1-based) as ``(color, last)``
        pairs in increasing order of last occurrence."""
        if not 1 <= i <= j <= self.n:
            raise ValueError(f"invalid range [{i}, {j}] for sequence of length {self.n}")
        out: List[Tuple[int, int]] = []
        seq, nxt, rmq = self.seq, self.next, self._rmq
        stack = [(i - 1, j - 1)]
        while stack:
            lo, hi = stack.pop()
            if hi == _REPORT:
                out.append((seq[lo], lo + 1))
                continue
            if lo > hi:
                continue
            p = rmq(lo, hi)
            if nxt[p] <= j:
                continue
            stack.append((p + 1, hi))
            stack.append((p, _REPORT))
            stack.append((lo, p - 1))
        return out

    def colors_mask(self, i: int, j: int) -> int:
        mask = 0
        for c, _ in self.query(i, j):
            mask |= 1 << c
        return mask


def build_distinct_1d(seq: Sequence[int]) -> DistinctColorIndex1D:
    return DistinctColorIndex1D(seq)


def query_distinct_1d(index: DistinctColorIndex1D, i: int, j: int) -> List[Tuple[int, int]]:
    return index.query(i, j)
