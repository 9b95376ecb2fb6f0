"""Seeded random images and build-time measurements."""
from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .builder import build
from .image import Image


def generate_image(m: int, n: int, sigma: int, seed: int, letters: bool = False) -> Image:
    """Uniformly random colors in ``[1, sigma]`` from ``random.Random(seed)``."""
    if letters and sigma > 26:
        raise ValueError("letter images need sigma <= 26")
    rng = random.Random(seed)
    rows = [[rng.randint(1, sigma) for _ in range(n)] for _ in range(m)]
    return Image.from_rows(rows, sigma=sigma, letters=letters)


@dataclass
class Timing:
    mode: str
    m: int
    n: int
    sigma: int
    runs: int
    median: float
    best: float
    fingerprints: int
    locations: int

    CSV_HEADER = "mode,m,n,sigma,runs,median_seconds,min_seconds,fingerprints,locations"

    def csv(self) -> str:
        return (f"{self.mode},{self.m},{self.n},{self.sigma},{self.runs},"
                f"{self.median:.4f},{self.best:.4f},{self.fingerprints},{self.locations}")


def measure(mode: str, m: int, n: int, sigma: int, runs: int = 5, seed: int = 1,
            workers: int = 1, image: Optional[Image] = None) -> Timing:
    """Median wall-clock time of full index builds on one seeded image."""
    if image is None:
        image = generate_image(m, n, sigma, seed)
    times: List[float] = []
    index = None
    for k in range(runs):
        start = time.perf_counter()
        index = build(image, mode, seed=seed + k, workers=workers).index
        times.append(time.perf_counter() - start)
    return Timing(mode, m, n, sigma, runs, statistics.median(times), min(times),
                  len(index), index.total_locations)


def grid(mode: str, ms: Sequence[int], ns: Sequence[Optional[int]], sigmas: Sequence[int],
         runs: int = 5, seed: int = 1, workers: int = 1) -> List[Timing]:
    """Timings over every ``(m, n, sigma)``; ``n=None`` means ``n = m``."""
    out = []
    for m in ms:
        for n in ns:
            for sigma in sigmas:
                out.append(measure(mode, m, n or m, sigma, runs, seed, workers))
    return out

