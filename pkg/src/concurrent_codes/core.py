"""Code parameters, message prefixes and the pluggable prefix hash.

Messages are plain non-negative integers with bit 0 the least significant bit.
A prefix of length ``j`` is the low ``j`` bits of a message, so two messages
that agree on their lowest ``j`` bits share their first ``j`` prefixes and
therefore their first ``j`` marks.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import NamedTuple, Protocol, Sequence, runtime_checkable

import numpy as np

CLOSED = "closed"
OPEN = "open"

# Above this width prefix values no longer fit in int64 and the decoder falls
# back to object arrays of Python ints.
MAX_INT64_BITS = 62


class DomainError(ValueError):
    """The prefix domain does not fit in the codeword."""


def parse_bits(text: str) -> int:
    """Parse an MSB-first '0'/'1' string into an integer."""
    text = text.strip()
    if not text or any(ch not in "01" for ch in text):
        raise ValueError(f"not a bit string: {text!r}")
    return int(text, 2)


def format_bits(value: int, length: int) -> str:
    """Render the low ``length`` bits of ``value`` MSB-first."""
    if length <= 0:
        return ""
    return format(value & ((1 << length) - 1), f"0{length}b")


@dataclass(frozen=True)
class CodeParams:
    """Shape of a concurrent code.

    ``checksum_value`` holds the k fixed checksum bits as an integer; bit ``i``
    of it becomes message bit ``n_data + i``. It defaults to all ones.
    """

    n_data: int
    n_checksum: int = 0
    codeword_len: int | None = None
    checksum_value: int | None = None
    mode: str = CLOSED

    def __post_init__(self) -> None:
        if self.n_data < 1:
            raise ValueError("n_data must be >= 1")
        if self.n_checksum < 0:
            raise ValueError("n_checksum must be >= 0")
        if self.mode not in (CLOSED, OPEN):
            raise ValueError(f"unknown mode {self.mode!r}")
        closed_len = 1 << (self.n_data + self.n_checksum + 1)
        if self.codeword_len is None:
            if self.mode == OPEN:
                raise ValueError("open codes need an explicit codeword_len")
            object.__setattr__(self, "codeword_len", closed_len)
        if self.mode == CLOSED and self.codeword_len != closed_len:
            raise ValueError(
                f"closed code with N={self.n_data}, k={self.n_checksum} needs "
                f"codeword_len={closed_len}, got {self.codeword_len}"
            )
        if self.codeword_len < 2:
            raise ValueError("codeword_len must be >= 2")
        if self.checksum_value is None:
            object.__setattr__(self, "checksum_value", (1 << self.n_checksum) - 1)
        if not 0 <= self.checksum_value < (1 << self.n_checksum) or (
            self.n_checksum == 0 and self.checksum_value != 0
        ):
            raise ValueError("checksum_value must fit in n_checksum bits")

    @classmethod
    def closed(cls, n_data: int, n_checksum: int = 0, checksum_value: int | None = None) -> "CodeParams":
        return cls(n_data, n_checksum, None, checksum_value, CLOSED)

    @property
    def total_bits(self) -> int:
        return self.n_data + self.n_checksum

    @property
    def prefix_domain_size(self) -> int:
        """Number of distinct prefixes of length 1..N+k, i.e. 2^(N+k+1) - 2."""
        return (1 << (self.total_bits + 1)) - 2

    @property
    def hash_calls_per_message(self) -> int:
        """Hashes made when encoding one message: N, plus one for the checksum."""
        return self.n_data + (1 if self.n_checksum else 0)

    def check_message(self, message: int) -> int:
        message = int(message)
        if not 0 <= message < (1 << self.n_data):
            raise ValueError(f"message {message} does not fit in {self.n_data} bits")
        return message

    def with_checksum(self, message: int) -> int:
        """Full (N+k)-bit string: the message with the checksum bits above it."""
        return message | (self.checksum_value << self.n_data)


class Prefix(NamedTuple):
    """The low ``length`` bits of a message, stored as an integer."""

    length: int
    value: int

    def __str__(self) -> str:
        return format_bits(self.value, self.length)

    @classmethod
    def from_string(cls, text: str) -> "Prefix":
        return cls(len(text.strip()), parse_bits(text))

    @property
    def canonical_index(self) -> int:
        """Position in length-major, then numeric, enumeration of all prefixes."""
        return (1 << self.length) - 2 + self.value


def message_prefixes(message: int, params: CodeParams) -> list[Prefix]:
    """Prefixes hashed when encoding ``message``.

    Lengths 1..N, then, when k > 0, a single (N+k)-bit entry carrying the
    checksum bits.

    >>> [str(p) for p in message_prefixes(0b1001, CodeParams.closed(4))]
    ['1', '01', '001', '1001']
    """
    message = params.check_message(message)
    out = [Prefix(j, message & ((1 << j) - 1)) for j in range(1, params.n_data + 1)]
    if params.n_checksum:
        out.append(Prefix(params.total_bits, params.with_checksum(message)))
    return out


@runtime_checkable
class HashFunction(Protocol):
    """Deterministic map from prefixes to codeword addresses in [0, L)."""

    codeword_len: int

    def address(self, prefix: Prefix) -> int: ...

    def addresses(self, length: int, values: np.ndarray) -> np.ndarray:
        """Addresses for many prefixes that share one length."""
        ...


@dataclass(frozen=True, eq=False)
class TableHash:
    """Collision-free hash: a lookup table indexed by canonical prefix index."""

    params: CodeParams
    seed: int
    table: np.ndarray = field(repr=False)

    @property
    def codeword_len(self) -> int:
        return self.params.codeword_len

    def address(self, prefix: Prefix) -> int:
        if not 1 <= prefix.length <= self.params.total_bits:
            raise ValueError(f"prefix length {prefix.length} outside 1..{self.params.total_bits}")
        return int(self.table[prefix.canonical_index])

    def addresses(self, length: int, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.int64)
        return self.table[(1 << length) - 2 + values]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TableHash):
            return NotImplemented
        return (
            self.params == other.params
            and self.seed == other.seed
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.params, self.seed))

    def to_bytes(self) -> bytes:
        """Binary dump: header (N, k, L as uint32, seed as uint64), then one
        uint32 address per prefix in canonical order, all little-endian."""
        p = self.params
        header = struct.pack("<IIIQ", p.n_data, p.n_checksum, p.codeword_len, self.seed)
        return header + self.table.astype("<u4").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, checksum_value: int | None = None) -> "TableHash":
        n, k, length, seed = struct.unpack_from("<IIIQ", data)
        params = CodeParams(n, k, length, checksum_value)
        table = np.frombuffer(data, dtype="<u4", offset=struct.calcsize("<IIIQ"))
        if table.size != params.prefix_domain_size:
            raise ValueError(
                f"table holds {table.size} addresses, expected {params.prefix_domain_size}"
            )
        table = table.astype(np.int64)
        table.setflags(write=False)
        return cls(params, seed, table)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def build_table_hash(params: CodeParams, seed: int) -> TableHash:
    """Seeded collision-free table for a closed code.

    Addresses ``0..L-1`` are shuffled with a PCG64 generator and the first
    ``2^(N+k+1) - 2`` are handed out to prefixes in canonical order.
    """
    seed = _check_seed(seed)
    if params.mode != CLOSED:
        raise ValueError("table hashes are only built for closed codes")
    domain = params.prefix_domain_size
    if domain > params.codeword_len:
        raise DomainError(f"{domain} prefixes do not fit in {params.codeword_len} addresses")
    rng = np.random.Generator(np.random.PCG64(seed))
    table = rng.permutation(params.codeword_len)[:domain].astype(np.int64)
    table.setflags(write=False)
    return TableHash(params, seed, table)


@dataclass(frozen=True)
class ModularHash:
    """Keyed BLAKE2b of (length, value) reduced mod L; collisions allowed.

    Meant for open codes, whose prefix domain is far larger than the codeword.
    """

    codeword_len: int
    seed: int = 0

    def _digest(self, length: int, value: int) -> int:
        nbytes = max(1, (length + 7) // 8)
        h = hashlib.blake2b(
            length.to_bytes(4, "little") + int(value).to_bytes(nbytes, "little"),
            digest_size=8,
            key=_check_seed(self.seed).to_bytes(8, "little"),
        )
        return int.from_bytes(h.digest(), "little") % self.codeword_len

    def address(self, prefix: Prefix) -> int:
        return self._digest(prefix.length, prefix.value)

    def addresses(self, length: int, values: np.ndarray) -> np.ndarray:
        return np.fromiter(
            (self._digest(length, int(v)) for v in values), dtype=np.int64, count=len(values)
        )


def prefix_addresses(messages: Sequence[int], hash_fn: HashFunction, params: CodeParams) -> np.ndarray:
    """All mark addresses produced by ``messages`` (with repeats)."""
    msgs = [params.check_message(m) for m in messages]
    if not msgs:
        return np.zeros(0, dtype=np.int64)
    dtype = np.int64 if params.total_bits <= MAX_INT64_BITS else object
    values = np.array(msgs, dtype=dtype)
    parts = []
    for j in range(1, params.n_data + 1):
        parts.append(hash_fn.addresses(j, values & ((1 << j) - 1)))
    if params.n_checksum:
        parts.append(hash_fn.addresses(params.total_bits, values | (params.checksum_value << params.n_data)))
    return np.concatenate(parts).astype(np.int64)
