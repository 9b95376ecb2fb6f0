"""Sinks receiving maximal locations from the sweeps.

A sweep calls ``sink.add(key, mask, signature)`` once per maximal
location, where ``key`` is a :class:`Rect` or :class:`Square`.
"""
from __future__ import annotations

from array import array
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple, Union

from .image import Rect, Square, colors_of

Key = Union[Rect, Square]


class Location(NamedTuple):
    """A maximal location: rectangle or square, fingerprint mask, signature."""

    key: Key
    mask: int
    signature: int

    @property
    def rect(self) -> Rect:
        return self.key.rect if isinstance(self.key, Square) else self.key

    @property
    def fingerprint(self) -> Tuple[int, ...]:
        return colors_of(self.mask)


class LocationList(list):
    """Collects every location as a :class:`Location`."""

    def add(self, key: Key, mask: int, signature: int) -> None:
        self.append(Location(key, mask, signature))


def pack(key: Tuple[int, ...]) -> int:
    """Pack up to four 16-bit coordinates into one sortable integer."""
    out = 0
    for v in key:
        out = (out << 16) | v
    return out


def unpack(value: int, width: int) -> Tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(value & 0xFFFF)
        value >>= 16
    return tuple(reversed(out))


class Group:
    """All locations sharing one signature."""

    __slots__ = ("rep", "mask", "count", "packed")

    def __init__(self, rep: Key, mask: int, packed: Optional[array]):
        self.rep = rep
        self.mask = mask
        self.count = 1
        self.packed = packed


class FingerprintGroups:
    """Locations grouped by signature, one representative per group.

    The representative is the smallest key, which does not depend on the
    order in which workers deliver locations. With ``keep_locations`` every
    key is also kept, packed into an unsigned 64-bit array. A signature
    reached by two different masks is recorded in ``collisions``.
    """

    def __init__(self, keep_locations: bool = False):
        self.keep_locations = keep_locations
        self.table: Dict[int, Group] = {}
        self.collisions: List[Tuple[int, int, int]] = []
        self.total = 0

    def add(self, key: Key, mask: int, signature: int) -> None:
        self.total += 1
        g = self.table.get(signature)
        if g is None:
            self.table[signature] = Group(
                key, mask, array("Q", (pack(key),)) if self.keep_locations else None)
            return
        if g.mask != mask:
            self.collisions.append((signature, g.mask, mask))
        g.count += 1
        if key < g.rep:
            g.rep = key
        if g.packed is not None:
            g.packed.append(pack(key))

    def merge(self, other: "FingerprintGroups") -> None:
        self.total += other.total
        self.collisions.extend(other.collisions)
        for sig, h in other.table.items():
            g = self.table.get(sig)
            if g is None:
                self.table[sig] = h
                continue
            if g.mask != h.mask:
                self.collisions.append((sig, g.mask, h.mask))
            g.count += h.count
            if h.rep < g.rep:
                g.rep = h.rep
            if g.packed is not None:
                g.packed.extend(h.packed)

    def finish(self) -> "FingerprintGroups":
        """Sort every location list so output is independent of scheduling."""
        for g in self.table.values():
            if g.packed is not None:
                g.packed = array("Q", sorted(g.packed))
        return self

    def __len__(self) -> int:
        return len(self.table)

    def __iter__(self) -> Iterator[Tuple[int, Group]]:
        return iter(self.table.items())
