"""Concurrent codes: hash-prefix superimposed encoding with inherent
synchronisation, a seeded channel simulator and a CDMA baseline."""
from .core import (
    CLOSED,
    OPEN,
    CodeParams,
    DomainError,
    HashFunction,
    ModularHash,
    Prefix,
    TableHash,
    build_table_hash,
    format_bits,
    message_prefixes,
    parse_bits,
)
from .codec import (
    Codeword,
    DecodeOptions,
    DecodeResult,
    GapRegion,
    decode,
    detect_gaps,
    encode,
    find_gaps,
    gap_threshold,
)
from .channel import ChannelSpec, add_flip_noise, add_noise, burst_erase, burst_region
from .sync import (
    PrincipleMarkPattern,
    SyncCandidate,
    acceptable_noise,
    correlate,
    expected_principle_marks,
    false_correlation_rate,
    principle_mark_distribution,
    principle_marks,
    synchronize,
)

__all__ = [
    "acceptable_noise",
    "add_flip_noise",
    "add_noise",
    "build_table_hash",
    "burst_erase",
    "burst_region",
    "ChannelSpec",
    "CLOSED",
    "CodeParams",
    "Codeword",
    "correlate",
    "decode",
    "DecodeOptions",
    "DecodeResult",
    "detect_gaps",
    "DomainError",
    "encode",
    "expected_principle_marks",
    "false_correlation_rate",
    "find_gaps",
    "format_bits",
    "gap_threshold",
    "GapRegion",
    "HashFunction",
    "message_prefixes",
    "ModularHash",
    "OPEN",
    "parse_bits",
    "Prefix",
    "principle_mark_distribution",
    "principle_marks",
    "PrincipleMarkPattern",
    "SyncCandidate",
    "synchronize",
    "TableHash",
]

__version__ = "0.1.0"
