"""Encoding message sets into codewords and tree decoding them back."""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import MAX_INT64_BITS, CodeParams, HashFunction, prefix_addresses


@dataclass(frozen=True, eq=False)
class Codeword:
    """An immutable bit array; ones are marks."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool).ravel()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, length: int) -> "Codeword":
        return cls(np.zeros(length, dtype=bool))

    @classmethod
    def from_marks(cls, length: int, marks: Iterable[int]) -> "Codeword":
        bits = np.zeros(length, dtype=bool)
        bits[np.fromiter(marks, dtype=np.int64)] = True
        return cls(bits)

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Codeword):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __or__(self, other: "Codeword") -> "Codeword":
        return Codeword(self.bits | other.bits)

    @property
    def mark_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def density(self) -> float:
        return self.mark_count / len(self)

    @property
    def marks(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    # text format: one line of 0/1, index 0 first
    def to_text(self) -> str:
        return "".join("1" if b else "0" for b in self.bits) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Codeword":
        text = text.strip()
        if not text or any(ch not in "01" for ch in text):
            raise ValueError("codeword text must be a single line of '0'/'1'")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) == ord("1"))

    # binary format: uint32 LE length, then bits packed LSB-first per byte
    def to_bytes(self) -> bytes:
        return struct.pack("<I", len(self)) + np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Codeword":
        (length,) = struct.unpack_from("<I", data)
        body = np.frombuffer(data, dtype=np.uint8, offset=4)
        if body.size * 8 < length:
            raise ValueError("binary codeword is truncated")
        return cls(np.unpackbits(body, bitorder="little")[:length].astype(bool))


@dataclass(frozen=True)
class GapRegion:
    start: int
    length: int

    @property
    def stop(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class DecodeOptions:
    """Knobs for :func:`decode`.

    ``probe_checksum_tails`` makes the checksum round hash every k-bit tail of
    a surviving branch, not just the fixed checksum. Only the fixed tail can
    keep a branch alive; marks found under the other tails are necessarily
    noise and are reported as ``checksum_rejects``. The cost is 2^k calls per
    branch, so switch it off for large k.
    """

    bridge_gaps: bool = False
    gap_false_positive_target: float = 0.01
    explicit_gaps: tuple[GapRegion, ...] | None = None
    probe_checksum_tails: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.gap_false_positive_target < 1.0:
            raise ValueError("gap_false_positive_target must lie in (0, 1)")
        if self.explicit_gaps is not None:
            object.__setattr__(self, "explicit_gaps", tuple(self.explicit_gaps))


@dataclass(frozen=True)
class DecodeResult:
    messages: tuple[int, ...]
    hash_calls: int
    gaps_used: tuple[GapRegion, ...] = ()
    live_branch_counts: tuple[int, ...] = ()
    checksum_rejects: int = 0

    def hallucinations(self, truth: Iterable[int]) -> list[int]:
        truth = set(truth)
        return [m for m in self.messages if m not in truth]


def encode(messages: Iterable[int], hash_fn: HashFunction, params: CodeParams) -> Codeword:
    """Superimpose the marks of every message into one codeword."""
    bits = np.zeros(params.codeword_len, dtype=bool)
    addrs = prefix_addresses(sorted(set(messages)), hash_fn, params)
    bits[addrs] = True
    return Codeword(bits)


def gap_threshold(mark_density: float, false_positive_target: float, length: int) -> int:
    """Smallest run length ``g`` with ``length * (1 - density)^g <= target``.

    A run of zeros at least this long is unlikely (expected count below
    ``false_positive_target``) to occur by chance in a codeword of the given
    mark density.
    """
    if not 0.0 < mark_density < 1.0:
        raise ValueError(f"degenerate mark density {mark_density}")
    if false_positive_target >= length:
        return 1
    g = math.ceil(math.log(false_positive_target / length) / math.log1p(-mark_density))
    g = max(g, 1)
    # guard the float estimate against off-by-one
    while g > 1 and length * (1.0 - mark_density) ** (g - 1) <= false_positive_target:
        g -= 1
    while length * (1.0 - mark_density) ** g > false_positive_target:
        g += 1
    return g


def find_gaps(codeword: Codeword | np.ndarray, min_gap_len: int) -> list[GapRegion]:
    """Maximal zero runs of at least ``min_gap_len`` bits, in address order.

    Runs touching either end of the codeword count; nothing wraps around.
    """
    if min_gap_len < 1:
        raise ValueError("min_gap_len must be >= 1")
    bits = codeword.bits if isinstance(codeword, Codeword) else np.asarray(codeword, dtype=bool)
    zero = np.concatenate(([False], ~bits, [False])).astype(np.int8)
    edges = np.diff(zero)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    lengths = stops - starts
    keep = lengths >= min_gap_len
    return [GapRegion(int(s), int(n)) for s, n in zip(starts[keep], lengths[keep])]


def detect_gaps(codeword: Codeword, false_positive_target: float = 0.01) -> list[GapRegion]:
    """Gaps judged against the codeword's mark density.

    The density is measured outside the longest zero run so that a burst
    does not dilute the very statistic used to detect it.
    """
    runs = find_gaps(codeword, 1)
    if not runs or codeword.mark_count == 0:
        return []
    longest = max(r.length for r in runs)
    density = codeword.mark_count / (len(codeword) - longest)
    if density >= 1.0:
        return []
    return find_gaps(codeword, gap_threshold(density, false_positive_target, len(codeword)))


def gap_mask(length: int, gaps: Sequence[GapRegion]) -> np.ndarray:
    mask = np.zeros(length, dtype=bool)
    for g in gaps:
        if g.start < 0 or g.stop > length:
            raise ValueError(f"gap {g} outside codeword of length {length}")
        mask[g.start:g.stop] = True
    return mask


def decode(
    codeword: Codeword,
    hash_fn: HashFunction,
    params: CodeParams,
    options: DecodeOptions | None = None,
) -> DecodeResult:
    """Walk the prefix tree, keeping branches whose hashes land on marks.

    Round ``j`` (0-based) extends every live branch by bit ``j`` set to 0 and
    to 1 and keeps a child when its address holds a mark, or lies in a bridged
    gap. With checksum bits a final round checks the full (N+k)-bit string.
    Every hash evaluation is counted in ``hash_calls``.
    """
    options = options or DecodeOptions()
    if len(codeword) != params.codeword_len:
        raise ValueError(f"codeword has {len(codeword)} bits, expected {params.codeword_len}")

    gaps: tuple[GapRegion, ...] = ()
    if options.bridge_gaps:
        if options.explicit_gaps is not None:
            gaps = options.explicit_gaps
        else:
            gaps = tuple(detect_gaps(codeword, options.gap_false_positive_target))
    alive = codeword.bits
    if gaps:
        alive = alive | gap_mask(len(codeword), gaps)

    dtype = np.int64 if params.total_bits <= MAX_INT64_BITS else object
    live = np.zeros(1, dtype=dtype)
    calls = 0
    counts: list[int] = []
    for j in range(params.n_data):
        children = np.concatenate((live, live | (1 << j)))
        addrs = hash_fn.addresses(j + 1, children)
        calls += children.size
        live = children[alive[addrs]]
        counts.append(int(live.size))
        if live.size == 0:
            break

    rejects = 0
    if params.n_checksum and live.size:
        k, n = params.n_checksum, params.n_data
        tails = range(1 << k) if options.probe_checksum_tails else (params.checksum_value,)
        keep = None
        for tail in tails:
            hit = alive[hash_fn.addresses(params.total_bits, live | (tail << n))]
            calls += live.size
            if tail == params.checksum_value:
                keep = hit
            else:
                rejects += int(np.count_nonzero(hit))
        live = live[keep]
        counts.append(int(live.size))

    messages = tuple(sorted(int(v) for v in live))
    return DecodeResult(messages, calls, gaps, tuple(counts), rejects)
