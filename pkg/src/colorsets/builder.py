"""End-to-end construction: orient, remap, sweep, name, index."""
from __future__ import annotations

import gc
import random
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .image import ColorRemap, Image, Rect, Square, colors_of, remap_colors
from .index import FingerprintIndex, index_from_groups
from .naming import (MERSENNE_61, RETRY_BUDGET, PolynomialSignature, SignatureCollisionError,
                     draw_base, name_deterministic)
from .rectangles import PARALLEL_ROWS, enumerate_maximal_rectangles
from .squares import PARALLEL_DIAGONALS, enumerate_maximal_squares

RECT = "rect"
SQUARE = "square"
MODES = (RECT, SQUARE)
MC = "mc"
DET = "det"
NAMINGS = (MC, DET)


class NamingMismatchError(RuntimeError):
    """Deterministic names and verified signatures disagree."""


@dataclass
class Prepared:
    """Internal image (dense colors, ``m <= n``) and how to undo it."""

    image: Image
    remap: ColorRemap
    transposed: bool

    def external(self, key):
        return key.transposed() if self.transposed else key

    def original_colors(self, mask: int) -> Tuple[int, ...]:
        return tuple(sorted(self.remap.to_original(c) for c in colors_of(mask)))


def prepare(image: Image) -> Prepared:
    transposed = image.m > image.n
    if transposed:
        image = image.transpose()
    dense, remap = remap_colors(image)
    return Prepared(dense, remap, transposed)


@contextmanager
def gc_paused() -> Iterator[None]:
    """The sweeps allocate many small objects and free almost none."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def sweep(prep: Prepared, mode: str, *, variant: Optional[str] = None, powers=None,
          modulus: int = MERSENNE_61, keep_phi: bool = False, group: Optional[str] = None,
          workers: int = 1, executor=None):
    if mode == RECT:
        return enumerate_maximal_rectangles(
            prep.image, variant or PARALLEL_ROWS, powers=powers, modulus=modulus if powers else 0,
            keep_phi=keep_phi, group=group, workers=workers, executor=executor)
    if mode == SQUARE:
        return enumerate_maximal_squares(
            prep.image, variant or PARALLEL_DIAGONALS, powers=powers,
            modulus=modulus if powers else 0, keep_phi=keep_phi, group=group)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class BuildReport:
    index: FingerprintIndex
    attempts: int


def build(image: Image, mode: str = RECT, *, naming: str = MC, seed: Optional[int] = None,
          report: bool = False, variant: Optional[str] = None, workers: int = 1, executor=None,
          budget: int = RETRY_BUDGET, first_r: Optional[int] = None,
          modulus: int = MERSENNE_61) -> BuildReport:
    """Index of the maximal rectangles (or squares) of ``image``.

    The signature base is drawn from ``random.Random(seed)`` (``first_r``
    overrides the first draw) and redrawn whenever two distinct
    fingerprints collide, up to ``budget`` attempts. With ``naming="det"``
    the deterministic names are computed too and must induce the same
    partition as the signatures.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if naming not in NAMINGS:
        raise ValueError(f"unknown naming {naming!r}")
    prep = prepare(image)
    rng = random.Random(seed)
    group = "report" if report else "exists"
    for attempt in range(1, budget + 1):
        r = first_r if attempt == 1 and first_r is not None else draw_base(rng, modulus)
        powers = PolynomialSignature(r, modulus).powers(prep.image.sigma)
        with gc_paused():
            res = sweep(prep, mode, variant=variant, powers=powers, modulus=modulus,
                        group=group, workers=workers, executor=executor)
        if res.groups.collisions:
            continue
        index = index_from_groups(res.groups, prep.image, prep.remap, r, square=mode == SQUARE,
                                  deterministic=naming == DET, transposed=prep.transposed)
        if naming == DET:
            check_deterministic(prep, mode, variant, powers, modulus)
        return BuildReport(index, attempt)
    raise SignatureCollisionError(f"no collision-free base after {budget} attempts")


def check_deterministic(prep: Prepared, mode: str, variant: Optional[str], powers, modulus) -> None:
    """Deterministic names partition the locations exactly like their
    fingerprints, and the verified signatures agree with both."""
    with gc_paused():
        res = sweep(prep, mode, variant=variant, powers=powers, modulus=modulus, keep_phi=True)
    names = name_deterministic(res.sequences, prep.image.sigma).names
    by_name: Dict[int, int] = {}
    by_mask: Dict[int, int] = {}
    by_sig: Dict[int, int] = {}
    for loc in res.locations:
        nm = names[loc.key]
        if by_name.setdefault(nm, loc.mask) != loc.mask or by_mask.setdefault(loc.mask, nm) != nm:
            raise NamingMismatchError(f"name {nm} does not match fingerprint of {loc.key}")
        if by_sig.setdefault(loc.signature, nm) != nm:
            raise NamingMismatchError(f"signature {loc.signature} spans two names")


@dataclass(frozen=True)
class Found:
    """A maximal location in original orientation and colors."""

    key: object  # Rect or Square
    colors: Tuple[int, ...]


def enumerate_locations(image: Image, mode: str = RECT, *, variant: Optional[str] = None,
                        workers: int = 1, executor=None) -> List[Found]:
    """Every maximal location with its fingerprint, sorted by coordinates."""
    prep = prepare(image)
    with gc_paused():
        res = sweep(prep, mode, variant=variant, workers=workers, executor=executor)
    out = [Found(prep.external(loc.key), prep.original_colors(loc.mask)) for loc in res.locations]
    out.sort(key=lambda f: f.key)
    return out


def as_table(found: List[Found]) -> Dict[object, Tuple[int, ...]]:
    return {f.key: f.colors for f in found}


def fingerprint_set(found: List[Found]) -> set:
    return {f.colors for f in found}
