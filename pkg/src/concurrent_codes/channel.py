"""Seeded corruption models: OR-noise marks, bit-flip noise and burst erasure.

``seed`` arguments accept anything :func:`numpy.random.default_rng` does,
including an existing ``Generator``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import Codeword, GapRegion

RANDOM = "random"


def fraction_count(fraction: float, length: int) -> int:
    """round(fraction * length), halves rounded up."""
    return int(np.floor(fraction * length + 0.5))


def _noise_positions(length: int, mu: float, seed) -> np.ndarray:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"noise fraction {mu} outside [0, 1]")
    rng = np.random.default_rng(seed)
    return rng.choice(length, size=fraction_count(mu, length), replace=False)


def add_noise(codeword: Codeword, mu: float, seed=None) -> Codeword:
    """Set exactly round(mu*L) uniformly chosen distinct positions to 1.

    Positions already holding a mark stay marked; nothing is ever cleared.
    """
    bits = codeword.bits.copy()
    bits[_noise_positions(len(bits), mu, seed)] = True
    return Codeword(bits)


def add_flip_noise(codeword: Codeword, mu: float, seed=None) -> Codeword:
    """Invert exactly round(mu*L) uniformly chosen distinct positions."""
    bits = codeword.bits.copy()
    pos = _noise_positions(len(bits), mu, seed)
    bits[pos] = ~bits[pos]
    return Codeword(bits)


def burst_region(length: int, gap_fraction: float, start: int | str = RANDOM, seed=None) -> GapRegion:
    """Where a burst of round(gf*L) bits lands; a random start always fits."""
    if not 0.0 <= gap_fraction <= 1.0:
        raise ValueError(f"gap fraction {gap_fraction} outside [0, 1]")
    size = fraction_count(gap_fraction, length)
    if start == RANDOM or start is None:
        start = int(np.random.default_rng(seed).integers(0, length - size + 1))
    start = int(start)
    if start < 0 or start + size > length:
        raise ValueError(f"burst [{start}, {start + size}) does not fit in {length} bits")
    return GapRegion(start, size)


def burst_erase(codeword: Codeword, gap_fraction: float, start: int | str = RANDOM, seed=None) -> Codeword:
    """Zero a contiguous block of round(gf*L) bits; other bits are untouched."""
    region = burst_region(len(codeword), gap_fraction, start, seed)
    bits = codeword.bits.copy()
    bits[region.start:region.stop] = False
    return Codeword(bits)


@dataclass(frozen=True)
class ChannelSpec:
    noise_fraction: float = 0.0
    gap_fraction: float = 0.0
    burst_start: int | str = RANDOM
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise_fraction <= 1.0:
            raise ValueError("noise_fraction must lie in [0, 1]")
        if not 0.0 <= self.gap_fraction <= 1.0:
            raise ValueError("gap_fraction must lie in [0, 1]")

    def apply(self, codeword: Codeword, flip: bool = False) -> tuple[Codeword, GapRegion]:
        """Noise first, then the burst. Returns the result and the burst region."""
        noise_seed, burst_seed = np.random.SeedSequence(self.seed).spawn(2)
        noisy = (add_flip_noise if flip else add_noise)(codeword, self.noise_fraction, noise_seed)
        region = burst_region(len(codeword), self.gap_fraction, self.burst_start, burst_seed)
        return burst_erase(noisy, self.gap_fraction, region.start), region
