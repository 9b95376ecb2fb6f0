"""Canonical names for fingerprints.

Two schemes are provided:

* Monte Carlo: the signature ``H(f) = sum(r**c for c in f) mod p`` with
  ``p = 2**61 - 1``. It is a sum over the set, so it can be maintained
  incrementally in any order of color additions. Builders verify that
  distinct fingerprints got distinct signatures and redraw ``r`` if not.
* Deterministic: names built level by level over a stack of halving
  arrays. Level ``i`` names pairs of level ``i-1`` names, so after
  ``log2(sigma_hat)`` levels equal fingerprints and only those share a name.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from .image import colors_of
from .rectangles import ColorAdd
from .squares import SquareAdd

MERSENNE_61 = (1 << 61) - 1
RETRY_BUDGET = 16

_ADDS = (ColorAdd, SquareAdd)


class SignatureCollisionError(RuntimeError):
    """No base ``r`` within the retry budget separated all fingerprints."""


def draw_base(rng: random.Random, modulus: int = MERSENNE_61) -> int:
    return rng.randint(2, modulus - 2)


@dataclass(frozen=True)
class PolynomialSignature:
    """``H(f) = sum(r**c for c in f) mod modulus``."""

    r: int
    modulus: int = MERSENNE_61

    def powers(self, sigma: int) -> List[int]:
        """``powers[c] = r**c mod p`` for ``0 <= c <= sigma``."""
        out = [1] * (sigma + 1)
        for c in range(1, sigma + 1):
            out[c] = out[c - 1] * self.r % self.modulus
        return out

    def of(self, colors: Iterable[int]) -> int:
        return sum(pow(self.r, c, self.modulus) for c in set(colors)) % self.modulus

    def of_mask(self, mask: int) -> int:
        return self.of(colors_of(mask))

    def add(self, signature: int, color: int) -> int:
        """Signature after adding a color not yet in the set."""
        return (signature + pow(self.r, color, self.modulus)) % self.modulus


def name_probabilistic(sequences: Iterable, signer: PolynomialSignature,
                       sigma: Optional[int] = None) -> Dict[Hashable, int]:
    """Signature of every end marker, updated once per added color."""
    names: Dict[Hashable, int] = {}
    p = signer.modulus
    powers = signer.powers(sigma) if sigma is not None else None
    for seq in sequences:
        s = 0
        for ev in seq.events:
            if isinstance(ev, _ADDS):
                s = (s + (powers[ev.color] if powers else pow(signer.r, ev.color, p))) % p
            else:
                names[ev[0]] = s
    return names


def find_collision(fingerprints: Iterable[Union[int, Sequence[int]]],
                   signer: PolynomialSignature) -> Optional[Tuple[tuple, tuple]]:
    """Two distinct fingerprints sharing a signature, if any.

    Fingerprints are bit masks or color sequences.
    """
    seen: Dict[int, tuple] = {}
    for f in fingerprints:
        colors = colors_of(f) if isinstance(f, int) else tuple(sorted(set(f)))
        s = signer.of(colors)
        other = seen.setdefault(s, colors)
        if other != colors:
            return other, colors
    return None


@dataclass
class Verified:
    r: int
    attempts: int


def verify_and_retry(fingerprints: Iterable[Union[int, Sequence[int]]], seed: Optional[int] = None,
                     budget: int = RETRY_BUDGET, first_r: Optional[int] = None,
                     modulus: int = MERSENNE_61) -> Verified:
    """A base ``r`` giving distinct signatures to distinct fingerprints.

    The first candidate is ``first_r`` when given, otherwise drawn from
    ``random.Random(seed)``; later candidates always come from that RNG.
    """
    fps = list(fingerprints)
    rng = random.Random(seed)
    r = first_r if first_r is not None else draw_base(rng, modulus)
    for attempt in range(1, budget + 1):
        if find_collision(fps, PolynomialSignature(r, modulus)) is None:
            return Verified(r, attempt)
        r = draw_base(rng, modulus)
    raise SignatureCollisionError(f"no collision-free base after {budget} attempts")


def sigma_hat(sigma: int) -> int:
    """Alphabet size rounded up to a power of two (at least 2)."""
    return max(2, 1 << (max(sigma, 1) - 1).bit_length())


def radix_sort(values: Sequence[int], base: int = 256) -> List[int]:
    """LSD radix sort of non-negative integers."""
    out = list(values)
    if len(out) < 2:
        return out
    top = max(out)
    shift = 0
    while top >> shift:
        buckets: List[List[int]] = [[] for _ in range(base)]
        for v in out:
            buckets[(v >> shift) % base].append(v)
        out = [v for b in buckets for v in b]
        shift += base.bit_length() - 1
    return out


class NameStack:
    """Arrays ``B_0 .. B_h``; ``B_l`` has ``sigma_hat >> l`` cells."""

    def __init__(self, sigma_hat_: int):
        self.levels = sigma_hat_.bit_length() - 1
        self.B = [[0] * (sigma_hat_ >> l) for l in range(self.levels + 1)]

    def is_clear(self) -> bool:
        return not any(any(b) for b in self.B)


def _dedup_parents(positions: Sequence[int]) -> List[int]:
    out: List[int] = []
    for x in positions:
        y = x >> 1
        if not out or out[-1] != y:
            out.append(y)
    return out


@dataclass
class DeterministicNames:
    """Result of :func:`name_deterministic`."""

    sigma_hat: int
    names: Dict[Hashable, int] = field(default_factory=dict)
    records: Dict[Hashable, int] = field(default_factory=dict)
    added: Dict[Hashable, int] = field(default_factory=dict)
    tables: List[Dict[Tuple[int, int], int]] = field(default_factory=list)
    final_stack: Optional[List[List[int]]] = None


def record_bound(t: int, sigma_hat_: int) -> int:
    """Upper bound on the pairs generated for a location adding ``t`` colors."""
    h = sigma_hat_.bit_length() - 1
    return 2 * t + t * (h - (t - 1).bit_length())


def name_deterministic(sequences: Iterable, sigma: int, check_stack: bool = True,
                       trace: bool = False) -> DeterministicNames:
    """Names for every end marker such that equal names mean equal fingerprints.

    Each phase scans all sequences with the global counters ``(C1, C0)``
    (subsequence number, pair number within it), writes the previous
    level's names into the stack, emits one pair of child names per
    touched cell of the next level, and names the distinct pairs
    sequentially in sorted order. Name 0 stands for an untouched cell.
    With ``trace`` the arrays ``B_0 .. B_h`` as filled for the first
    subsequence are kept in ``final_stack``.
    """
    shat = sigma_hat(sigma)
    stack = NameStack(shat)
    levels = stack.levels
    result = DeterministicNames(shat, final_stack=[] if trace else None)

    # subsequences between end markers, radix sorted, 0-based colors
    seqs: List[List[Tuple[List[int], Hashable]]] = []
    for seq in sequences:
        subs, cur = [], []
        for ev in seq.events:
            if isinstance(ev, _ADDS):
                cur.append(ev.color - 1)
            else:
                subs.append((radix_sort(cur), ev[0]))
                cur = []
        seqs.append(subs)
    flat_keys = [key for subs in seqs for _, key in subs]
    records = [0] * len(flat_keys)

    names_prev: List[List[int]] = []
    for level in range(1, levels + 1):
        B = stack.B[level - 1]
        pairs: List[Tuple[int, int, Tuple[int, int]]] = []
        c1 = 0
        for subs in seqs:
            touched: List[int] = []
            for colors, _ in subs:
                positions = colors
                for _ in range(level - 1):
                    positions = _dedup_parents(positions)
                if level == 1:
                    for x in positions:
                        B[x] = 1
                else:
                    for x, nm in zip(positions, names_prev[c1]):
                        B[x] = nm
                touched.extend(positions)
                if trace and c1 == 0:
                    result.final_stack.append(list(B))
                parents = _dedup_parents(positions)
                for c0, y in enumerate(parents):
                    pairs.append((c1, c0, (B[2 * y], B[2 * y + 1])))
                records[c1] += len(parents)
                c1 += 1
            for x in touched:
                B[x] = 0
            if check_stack and any(B):
                raise AssertionError("name stack not restored after a sequence")
        # sort the pairs of names, name them sequentially, regroup by C1
        table: Dict[Tuple[int, int], int] = {}
        for pair in sorted({p for _, _, p in pairs}):
            table[pair] = len(table) + 1
        result.tables.append(table)
        names_prev = [[] for _ in range(c1)]
        for k, _, pair in pairs:
            names_prev[k].append(table[pair])

    k = 0
    for subs in seqs:
        last = 0
        for colors, key in subs:
            if names_prev[k]:
                last = names_prev[k][0]
            result.names[key] = last
            result.records[key] = records[k]
            result.added[key] = len(colors)
            k += 1
    if trace and flat_keys:
        result.final_stack.append([result.names[flat_keys[0]]])
    if check_stack and not stack.is_clear():
        raise AssertionError("name stack not restored")
    return result
