"""Closed-form models for mark counts, decoding load, S:N and processing gain."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection

from .core import CodeParams


@dataclass(frozen=True)
class MetricRecord:
    """One measured or modelled value from an experiment."""

    experiment: str
    metric: str
    value: float
    m: int | None = None
    mu: float | None = None
    gap_fraction: float | None = None
    n: int | None = None
    k: int | None = None
    L: int | None = None
    seed: int | None = None
    repeat: int | str = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"{self.metric} is not finite: {self.value}")


def expected_marks(m: float, n_eff: int) -> float:
    """Marks produced by ``m`` random distinct messages.

    ``n_eff`` is the number of hashes per message: N without checksum bits,
    N + 1 with them.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return n_eff * m - m * math.log2(m) + 1.5 * m


def expected_hash_calls(m: float, mu: float, n_eff: int) -> float:
    """First-order decoding load: 2 Z(m) + mu Z(m)."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    z = expected_marks(m, n_eff)
    return 2.0 * z + mu * z


def signal_to_noise(m: float, mu: float, params: CodeParams, n_eff: int | None = None) -> float:
    """Z(m) over the noise that lands outside the signal marks.

    Returns ``math.inf`` for a noiseless channel.
    """
    if n_eff is None:
        n_eff = params.hash_calls_per_message
    z = expected_marks(m, n_eff)
    if z >= params.codeword_len:
        raise ValueError("signal marks fill the codeword")
    if not 0.0 <= mu <= 0.5:
        raise ValueError("mu must lie in [0, 0.5]")
    if mu == 0.0:
        return math.inf
    return z / (mu * (params.codeword_len - z))


def noise_to_signal(m: float, mu: float, params: CodeParams, n_eff: int | None = None) -> float:
    s = signal_to_noise(m, mu, params, n_eff)
    return 0.0 if math.isinf(s) else 1.0 / s


def processing_gain_cdma(m: float, n: int, k: int, f: float) -> float:
    if m < 1:
        raise ValueError("m must be >= 1")
    return 2.0 ** (n + k + 1) / (m * n * f)


def processing_gain_cc(n: int, k: int) -> float:
    """Codeword size over message size; independent of the message count."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 ** (n + k + 1) / (n + k)


def decoded_error_fraction(
    truth: Collection[int], decoded: Collection[int], positional: bool = False
) -> float:
    """Fraction of decoded messages that are wrong.

    Set semantics (concurrent codes): decoded messages absent from ``truth``
    over all decoded. With ``positional`` (CDMA) the i-th decoded message is
    compared with the i-th true one. An empty decode of a non-empty truth
    counts as 1.0.
    """
    if positional:
        truth, decoded = list(truth), list(decoded)
        if len(truth) != len(decoded):
            raise ValueError("positional comparison needs equal lengths")
        if not truth:
            return 0.0
        return sum(t != d for t, d in zip(truth, decoded)) / len(truth)
    decoded = set(decoded)
    if not decoded:
        return 1.0 if truth else 0.0
    truth = set(truth)
    return len(decoded - truth) / len(decoded)


def open_vs_closed_hash_calls(total_bits: int, n: int, k: int) -> tuple[float, float]:
    """Decoding hash calls for ``total_bits`` sent as one open-code message
    versus ``total_bits / n`` closed-code messages."""
    if total_bits % n:
        raise ValueError("total_bits must be a multiple of n")
    n_eff = n + (1 if k else 0)
    return 2.0 * total_bits, 2.0 * expected_marks(total_bits // n, n_eff)


def model_table(eq: int, **kw) -> float:
    """Evaluate one of the numbered closed forms by equation number."""
    if eq == 1:
        return expected_marks(kw["m"], kw["n_eff"])
    if eq == 2:
        return expected_hash_calls(kw["m"], kw["mu"], kw["n_eff"])
    if eq == 3:
        params = CodeParams.closed(kw["n"], kw["k"])
        return signal_to_noise(kw["m"], kw["mu"], params, kw.get("n_eff"))
    if eq in (7, 8):
        from .sync import acceptable_noise, false_correlation_rate

        length = 2 ** kw["log2L"]
        if eq == 7:
            return false_correlation_rate(kw["q"], kw["mu"], length)
        return acceptable_noise(kw["q"], kw["f"], length)
    if eq == 9:
        return processing_gain_cdma(kw["m"], kw["n"], kw["k"], kw.get("fec", 2))
    if eq == 10:
        return processing_gain_cc(kw["n"], kw["k"])
    raise ValueError(f"no model for equation {eq}")
