"""Normalized sets of closed integer intervals."""
from __future__ import annotations

from bisect import bisect_right
from typing import Iterable, Iterator, List, Sequence, Tuple

Interval = Tuple[int, int]


class IntervalSet:
    """Sorted, disjoint, non-adjacent closed intervals ``[lo, hi]``.

    Union and intersection run in time linear in the number of intervals.
    """

    __slots__ = ("spans",)

    def __init__(self, spans: Sequence[Interval] = ()):
        # trusted constructor: callers pass normalized spans
        self.spans: List[Interval] = list(spans)

    @classmethod
    def of(cls, intervals: Iterable[Interval]) -> "IntervalSet":
        """Normalize arbitrary (possibly overlapping or empty) intervals."""
        items = sorted((lo, hi) for lo, hi in intervals if lo <= hi)
        spans: List[Interval] = []
        for lo, hi in items:
            if spans and lo <= spans[-1][1] + 1:
                if hi > spans[-1][1]:
                    spans[-1] = (spans[-1][0], hi)
            else:
                spans.append((lo, hi))
        return cls(spans)

    @classmethod
    def points(cls, values: Iterable[int]) -> "IntervalSet":
        return cls.of((v, v) for v in values)

    @classmethod
    def span(cls, lo: int, hi: int) -> "IntervalSet":
        return cls([(lo, hi)] if lo <= hi else [])

    def __contains__(self, value: int) -> bool:
        k = bisect_right(self.spans, (value, float("inf"))) - 1
        return k >= 0 and self.spans[k][1] >= value

    def __iter__(self) -> Iterator[int]:
        for lo, hi in self.spans:
            yield from range(lo, hi + 1)

    def __len__(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.spans)

    def __bool__(self) -> bool:
        return bool(self.spans)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.spans == other.spans

    def __repr__(self) -> str:
        return f"IntervalSet({self.spans})"

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        a, b = self.spans, other.spans
        merged: List[Interval] = []
        x = y = 0
        while x < len(a) or y < len(b):
            if y >= len(b) or (x < len(a) and a[x][0] <= b[y][0]):
                lo, hi = a[x]
                x += 1
            else:
                lo, hi = b[y]
                y += 1
            if merged and lo <= merged[-1][1] + 1:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        return IntervalSet(merged)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        a, b = self.spans, other.spans
        out: List[Interval] = []
        x = y = 0
        while x < len(a) and y < len(b):
            lo = max(a[x][0], b[y][0])
            hi = min(a[x][1], b[y][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[x][1] < b[y][1]:
                x += 1
            else:
                y += 1
        return IntervalSet(out)

    def clip(self, lo: int, hi: int) -> "IntervalSet":
        return self & IntervalSet.span(lo, hi)
