"""CDMA comparison baseline.

Each 8-bit message is split into two nibbles, each nibble is protected by an
extended (8,4) Hamming code, the blocks are cross interleaved and every
resulting bit is spread over a G-chip slot by XOR with that slot's balanced
spreading code. Despreading is a majority vote per slot (ties read as 0).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .codec import Codeword

BLOCK = 8
NIBBLE = 4


class HammingStatus(str, enum.Enum):
    CLEAN = "clean"
    CORRECTED = "corrected"
    UNCORRECTABLE = "detected-uncorrectable"


def hamming84_encode(nibble: Sequence[int]) -> list[int]:
    """(d0,d1,d2,d3) -> (p1,p2,d0,p3,d1,d2,d3,P)."""
    if len(nibble) != NIBBLE:
        raise ValueError("nibble must have 4 bits")
    d0, d1, d2, d3 = (int(b) & 1 for b in nibble)
    p1 = d0 ^ d1 ^ d3
    p2 = d0 ^ d2 ^ d3
    p3 = d1 ^ d2 ^ d3
    word = [p1, p2, d0, p3, d1, d2, d3]
    return word + [sum(word) & 1]


def _data_bits(word: Sequence[int]) -> list[int]:
    return [word[2], word[4], word[5], word[6]]


def hamming84_decode(received: Sequence[int]) -> tuple[list[int], HammingStatus]:
    """SECDED decode.

    Double errors are flagged; the returned nibble is then whatever the
    syndrome correction of the inner (7,4) word produces.
    """
    if len(received) != BLOCK:
        raise ValueError("received word must have 8 bits")
    r = [int(b) & 1 for b in received]
    # positions are 1-based within the inner 7-bit word
    s = (
        (r[0] ^ r[2] ^ r[4] ^ r[6])
        | (r[1] ^ r[2] ^ r[5] ^ r[6]) << 1
        | (r[3] ^ r[4] ^ r[5] ^ r[6]) << 2
    )
    parity_ok = sum(r) % 2 == 0
    fixed = list(r)
    if s:
        fixed[s - 1] ^= 1
    if s == 0 and parity_ok:
        status = HammingStatus.CLEAN
    elif not parity_ok:
        status = HammingStatus.CORRECTED
    else:
        status = HammingStatus.UNCORRECTABLE
    return _data_bits(fixed), status


def _int_bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


def _bits_int(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


# lookup tables; rows are LSB-first bit vectors
_ENC = np.array([hamming84_encode(_int_bits(v, NIBBLE)) for v in range(16)], dtype=np.uint8)
_DEC = np.array([_bits_int(hamming84_decode(_int_bits(w, BLOCK))[0]) for w in range(256)], dtype=np.int64)
_WEIGHTS = 1 << np.arange(BLOCK)


def interleave(bits, block_count: int) -> np.ndarray:
    """Column-major block interleaver: out[j*B + b] = in[b*8 + j]."""
    bits = np.asarray(bits)
    if bits.size != BLOCK * block_count:
        raise ValueError(f"expected {BLOCK * block_count} bits, got {bits.size}")
    return bits.reshape(block_count, BLOCK).T.ravel()


def deinterleave(bits, block_count: int) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.size != BLOCK * block_count:
        raise ValueError(f"expected {BLOCK * block_count} bits, got {bits.size}")
    return bits.reshape(BLOCK, block_count).T.ravel()


@dataclass(frozen=True)
class CdmaParams:
    """Layout of a CDMA codeword.

    ``chip_len`` is L // (m*N*f). For powers of two m this divides L exactly;
    otherwise the chips left over at the end of the codeword stay zero.
    """

    m: int
    n_bits: int = 8
    f: int = 2
    codeword_len: int = 2048
    spreading_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_bits % NIBBLE:
            raise ValueError("message length must be a whole number of nibbles")
        if self.f != BLOCK // NIBBLE:
            raise ValueError("only the (8,4) Hamming code (f=2) is supported")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.chip_len < 1:
            raise ValueError(
                f"{self.m} messages need {self.coded_bits} bit slots, "
                f"more than the {self.codeword_len}-chip codeword holds"
            )

    @property
    def block_count(self) -> int:
        return self.m * self.n_bits // NIBBLE

    @property
    def coded_bits(self) -> int:
        return self.m * self.n_bits * self.f

    @property
    def chip_len(self) -> int:
        return self.codeword_len // self.coded_bits

    @cached_property
    def spreading_codes(self) -> np.ndarray:
        """One balanced chip sequence per bit slot, shape (slots, G)."""
        g = self.chip_len
        if g == 1:
            return np.zeros((self.coded_bits, 1), dtype=np.uint8)
        base = np.zeros(g, dtype=np.uint8)
        base[: g // 2] = 1
        rng = np.random.Generator(np.random.PCG64(self.spreading_seed))
        return rng.permuted(np.tile(base, (self.coded_bits, 1)), axis=1)


def processing_gain(params: CdmaParams) -> int:
    return params.chip_len


def cdma_encode(messages: Sequence[int], params: CdmaParams) -> Codeword:
    if len(messages) != params.m:
        raise ValueError(f"expected {params.m} messages, got {len(messages)}")
    n = params.n_bits
    msgs = np.array([int(x) for x in messages], dtype=np.int64)
    if np.any((msgs < 0) | (msgs >= 1 << n)):
        raise ValueError(f"messages must fit in {n} bits")
    nibbles = (msgs[:, None] >> (NIBBLE * np.arange(n // NIBBLE))[None, :]) & 0xF
    blocks = _ENC[nibbles.ravel()]
    stream = interleave(blocks.ravel(), params.block_count)
    chips = stream[:, None] ^ params.spreading_codes
    bits = np.zeros(params.codeword_len, dtype=bool)
    bits[: chips.size] = chips.ravel().astype(bool)
    return Codeword(bits)


def despread(codeword: Codeword, params: CdmaParams) -> np.ndarray:
    """Majority vote per slot after removing the spreading code; ties give 0."""
    if len(codeword) != params.codeword_len:
        raise ValueError(f"codeword has {len(codeword)} bits, expected {params.codeword_len}")
    g = params.chip_len
    used = codeword.bits[: params.coded_bits * g].reshape(params.coded_bits, g)
    ones = (used.astype(np.uint8) ^ params.spreading_codes).sum(axis=1)
    return (2 * ones > g).astype(np.uint8)


def cdma_decode(codeword: Codeword, params: CdmaParams) -> list[int]:
    """Always returns exactly ``m`` messages, right or wrong."""
    stream = despread(codeword, params)
    blocks = deinterleave(stream, params.block_count).reshape(-1, BLOCK)
    nibbles = _DEC[blocks.astype(np.int64) @ _WEIGHTS]
    per_msg = nibbles.reshape(params.m, params.n_bits // NIBBLE)
    values = (per_msg << (NIBBLE * np.arange(per_msg.shape[1]))[None, :]).sum(axis=1)
    return [int(v) for v in values]
