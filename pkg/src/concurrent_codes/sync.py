"""Inherent synchronisation from the six principle marks.

Every encoded message marks H(x0) and H(x1 x0), so a codeword carrying a few
messages reliably holds marks at some of H(0), H(1), H(00), H(01), H(10),
H(11). A receiver that knows the hash slides this six-tap pattern along the
received stream and treats well-scoring offsets as candidate codeword starts.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .codec import gap_threshold
from .core import CodeParams, HashFunction, Prefix

PRINCIPLE_PREFIXES = (
    Prefix(1, 0b0),
    Prefix(1, 0b1),
    Prefix(2, 0b00),
    Prefix(2, 0b01),
    Prefix(2, 0b10),
    Prefix(2, 0b11),
)

# P(to | from): principle marks after one more random message.
TRANSITIONS = {
    2: {2: 0.25, 3: 0.25, 4: 0.5},
    3: {3: 0.5, 4: 0.0, 5: 0.5},
    4: {4: 0.5, 5: 0.5},
    5: {5: 0.75, 6: 0.25},
    6: {6: 1.0},
}


@dataclass(frozen=True)
class PrincipleMarkPattern:
    addresses: tuple[int, ...]

    @property
    def primary(self) -> tuple[int, int]:
        return self.addresses[:2]

    @property
    def secondary(self) -> tuple[int, ...]:
        return self.addresses[2:]


@dataclass(frozen=True, order=True)
class SyncCandidate:
    offset: int
    score: int


def principle_marks(hash_fn: HashFunction) -> PrincipleMarkPattern:
    return PrincipleMarkPattern(tuple(hash_fn.address(p) for p in PRINCIPLE_PREFIXES))


def correlation_scores(stream: np.ndarray, pattern: PrincipleMarkPattern, offsets) -> np.ndarray:
    """Vectorised scores; taps beyond the stream read as zeros."""
    stream = np.asarray(stream, dtype=bool)
    offsets = np.asarray(offsets, dtype=np.int64)
    idx = offsets[:, None] + np.asarray(pattern.addresses, dtype=np.int64)[None, :]
    inside = (idx >= 0) & (idx < stream.size)
    hits = np.zeros(idx.shape, dtype=bool)
    hits[inside] = stream[idx[inside]]
    return hits.sum(axis=1)


def correlate(stream, pattern: PrincipleMarkPattern, offsets) -> list[SyncCandidate]:
    offsets = np.asarray(offsets, dtype=np.int64)
    scores = correlation_scores(_as_bits(stream), pattern, offsets)
    return [SyncCandidate(int(o), int(s)) for o, s in zip(offsets, scores)]


def _as_bits(stream) -> np.ndarray:
    bits = getattr(stream, "bits", stream)
    return np.asarray(bits, dtype=bool)


def _zero_run_bounds(bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each position, start and stop of the zero run containing it."""
    n = bits.size
    pos = np.arange(n)
    last_one = np.maximum.accumulate(np.where(bits, pos, -1))
    run_start = last_one + 1
    next_one = np.minimum.accumulate(np.where(bits, pos, n)[::-1])[::-1]
    return run_start, next_one


def _taps_in_gaps(bits, pattern, offsets, length, target) -> np.ndarray:
    """Pattern taps falling inside a detected gap of each candidate window.

    The window's own mark density sets the gap threshold, and zero runs are
    clipped to the window before they are measured.
    """
    n = bits.size
    cum = np.concatenate(([0], np.cumsum(bits)))
    run_start, run_stop = _zero_run_bounds(bits)
    out = np.zeros(offsets.size, dtype=np.int64)
    for i, off in enumerate(offsets):
        lo, hi = off, min(off + length, n)
        marks = cum[hi] - cum[lo]
        density = marks / length
        if not 0.0 < density < 1.0:
            continue
        g = gap_threshold(density, target, length)
        for a in pattern.addresses:
            p = off + a
            if p >= n or bits[p]:
                continue
            run = min(run_stop[p], hi) - max(run_start[p], lo)
            if run >= g:
                out[i] += 1
    return out


def synchronize(
    stream,
    hash_fn: HashFunction,
    params: CodeParams,
    q_threshold: int = 5,
    gap_aware: bool = False,
    gap_false_positive_target: float = 0.01,
    offsets=None,
) -> list[SyncCandidate]:
    """Candidate codeword starts, best first.

    Every offset of the stream is scored (taps past the end read as zeros).
    Offsets scoring at least ``q_threshold`` are returned by descending score
    then ascending offset. With ``gap_aware`` the threshold at an offset drops
    by the number of taps lying in a detected gap of that window.
    """
    if not 1 <= q_threshold <= 6:
        raise ValueError("q_threshold must lie in 1..6")
    bits = _as_bits(stream)
    pattern = principle_marks(hash_fn)
    if offsets is None:
        offsets = np.arange(bits.size)
    offsets = np.asarray(offsets, dtype=np.int64)
    scores = correlation_scores(bits, pattern, offsets)
    need = np.full(offsets.size, q_threshold)
    if gap_aware:
        need = need - _taps_in_gaps(bits, pattern, offsets, params.codeword_len, gap_false_positive_target)
    sel = np.flatnonzero(scores >= need)
    order = np.lexsort((offsets[sel], -scores[sel]))
    return [SyncCandidate(int(offsets[sel][i]), int(scores[sel][i])) for i in order]


def principle_mark_distribution(m: int) -> dict[int, float]:
    """P(a principle marks filled) after ``m`` random messages, a = 2..6."""
    if m < 1:
        raise ValueError("m must be >= 1")
    dist = {a: 0.0 for a in range(2, 7)}
    dist[2] = 1.0
    for _ in range(m - 1):
        nxt = {a: 0.0 for a in range(2, 7)}
        for src, p in dist.items():
            for dst, t in TRANSITIONS[src].items():
                nxt[dst] += p * t
        dist = nxt
    return dist


def expected_principle_marks(m: int) -> float:
    """Mean correlation score at the true offset for ``m`` random messages."""
    return sum(a * p for a, p in principle_mark_distribution(m).items())


def false_correlation_rate(q: int, mu: float, length: int) -> float:
    """Expected q-fold chance correlations, ``L * mu^q``."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    if not 1 <= q <= 6:
        raise ValueError("q must lie in 1..6")
    return length * mu**q


def chance_candidates(q: int, mu: float, length: int, taps: int = 6) -> float:
    """Expected offsets scoring at least ``q`` of ``taps`` in pure noise.

    Exact binomial tail; ``false_correlation_rate`` keeps only its leading
    ``mu^q`` factor and ignores the choice of which taps hit.
    """
    tail = sum(comb(taps, j) * mu**j * (1.0 - mu) ** (taps - j) for j in range(q, taps + 1))
    return length * tail


def acceptable_noise(q: int, f_target: float, length: int) -> float:
    """Noise fraction at which ``L * mu^q`` equals ``f_target``."""
    if f_target <= 0:
        raise ValueError("f_target must be positive")
    return (f_target / length) ** (1.0 / q)
