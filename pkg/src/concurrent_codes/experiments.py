"""Seeded parameter sweeps that regenerate each figure's data as CSV rows.

Repeat ``i`` of every sweep point uses ``seed_i = master_seed + i``. Each
random ingredient of a trial (hash table, messages, noise, burst position,
spreading codes) draws from its own stream ``default_rng([seed_i, STREAM])``
so changing one ingredient never shifts another.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from . import analysis
from .analysis import MetricRecord
from .cdma import CdmaParams, cdma_decode, cdma_encode
from .channel import add_flip_noise, add_noise, burst_erase
from .codec import DecodeOptions, DecodeResult, decode, encode
from .core import CodeParams, build_table_hash
from .sync import (
    chance_candidates,
    correlation_scores,
    expected_principle_marks,
    false_correlation_rate,
    principle_marks,
)

# stream ids for default_rng([seed, stream])
MESSAGES, NOISE, BURST, SPREAD = 1, 2, 3, 4

CSV_FIELDS = ("experiment", "m", "mu", "gap_fraction", "n", "k", "L", "seed", "repeat", "metric", "value")


class ConfigError(ValueError):
    pass


def rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def random_messages(seed: int, m: int, n_bits: int) -> list[int]:
    """``m`` distinct uniformly drawn ``n_bits``-bit messages."""
    if m > 1 << n_bits:
        raise ValueError(f"cannot draw {m} distinct {n_bits}-bit messages")
    return [int(x) for x in rng_for(seed, MESSAGES).choice(1 << n_bits, size=m, replace=False)]


@dataclass(frozen=True)
class CcTrial:
    truth: list[int]
    genuine_marks: int
    result: DecodeResult

    @property
    def hallucinations(self) -> int:
        return len(self.result.hallucinations(self.truth))

    @property
    def all_recovered(self) -> bool:
        return set(self.truth) <= set(self.result.messages)

    @property
    def missing_fraction(self) -> float:
        """Share of the true messages absent from the decode."""
        return len(set(self.truth) - set(self.result.messages)) / len(self.truth)

    @property
    def error_fraction(self) -> float:
        return analysis.decoded_error_fraction(self.truth, self.result.messages)


def cc_trial(
    m: int,
    seed: int,
    n: int = 8,
    k: int = 2,
    mu: float = 0.0,
    gap_fraction: float = 0.0,
    bridge_gaps: bool = False,
) -> CcTrial:
    """Encode ``m`` random messages, corrupt (noise, then burst), decode."""
    params = CodeParams.closed(n, k)
    h = build_table_hash(params, seed)
    truth = random_messages(seed, m, n)
    clean = encode(truth, h, params)
    received = add_noise(clean, mu, rng_for(seed, NOISE))
    if gap_fraction:
        received = burst_erase(received, gap_fraction, seed=rng_for(seed, BURST))
    result = decode(received, h, params, DecodeOptions(bridge_gaps=bridge_gaps))
    return CcTrial(truth, clean.mark_count, result)


def cdma_trial(
    m: int,
    seed: int,
    mu: float = 0.0,
    gap_fraction: float = 0.0,
    burst_start: int | None = None,
    flip_noise: bool = True,
    codeword_len: int = 2048,
) -> tuple[list[int], list[int]]:
    """Messages need not be distinct for CDMA but are drawn the same way."""
    params = CdmaParams(m, codeword_len=codeword_len, spreading_seed=int(rng_for(seed, SPREAD).integers(1 << 63)))
    truth = random_messages(seed, m, params.n_bits)
    cw = cdma_encode(truth, params)
    noisy = (add_flip_noise if flip_noise else add_noise)(cw, mu, rng_for(seed, NOISE))
    if gap_fraction:
        start = burst_start if burst_start is not None else "random"
        noisy = burst_erase(noisy, gap_fraction, start, seed=rng_for(seed, BURST))
    return truth, cdma_decode(noisy, params)


def true_offset_score(m: int, seed: int, n: int = 8, k: int = 2, mu: float = 0.0) -> int:
    """Principle-mark score of a codeword at its own start."""
    params = CodeParams.closed(n, k)
    h = build_table_hash(params, seed)
    cw = add_noise(encode(random_messages(seed, m, n), h, params), mu, rng_for(seed, NOISE))
    return int(correlation_scores(cw.bits, principle_marks(h), [0])[0])


def chance_correlations(seed: int, mu: float, q: int = 5, n: int = 8, k: int = 2) -> int:
    """Offsets among the first L of a pure-noise stream scoring at least q."""
    params = CodeParams.closed(n, k)
    length = params.codeword_len
    h = build_table_hash(params, seed)
    stream = np.zeros(2 * length, dtype=bool)
    rng = rng_for(seed, NOISE)
    stream[rng.choice(stream.size, size=int(np.floor(mu * stream.size + 0.5)), replace=False)] = True
    scores = correlation_scores(stream, principle_marks(h), np.arange(length))
    return int(np.count_nonzero(scores >= q))


# --------------------------------------------------------------------------
# sweep configuration


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


POW2 = (1, 2, 4, 8, 16, 32, 64, 128)

DEFAULTS: dict[str, dict] = {
    "fig2": dict(m_values=POW2, repeats=1),
    "fig3": dict(m_values=(1, 2, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100), mu_values=(0.0, 0.3), repeats=30),
    "fig4": dict(m_values=(1, 2, 5, 10, 20, 50, 100, 128), mu_values=(0.1, 0.2, 0.3, 0.4, 0.5), repeats=1),
    "fig5": dict(m_values=(10,), mu_values=_grid(0.0, 0.5, 0.05), k_values=(0, 2), repeats=30),
    "fig7": dict(m_values=tuple(range(1, 21)), repeats=30),
    "fig8": dict(mu_values=_grid(0.05, 0.5, 0.05), repeats=100, q=5),
    "fig9": dict(m_values=(10,), mu_values=_grid(0.0, 0.5, 0.05), repeats=50),
    "fig10": dict(m_values=(10,), gap_values=_grid(0.0, 0.5, 0.02), repeats=50),
    "fig11": dict(m_values=POW2, repeats=30),
    "fig12": dict(m_values=(1, 2, 5, 10, 20, 50, 100, 128), mu_values=(0.0, 0.1, 0.2, 0.3), repeats=30),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    repeats: int | None = None
    seed: int = 0
    m_values: tuple[int, ...] | None = None
    mu_values: tuple[float, ...] | None = None
    gap_values: tuple[float, ...] | None = None
    k_values: tuple[int, ...] | None = None
    n: int = 8
    k: int = 2
    q: int | None = None
    out: str | None = None

    def resolved(self) -> "ExperimentConfig":
        """Fill unset sweeps from the figure defaults and validate."""
        if self.experiment not in DEFAULTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {sorted(DEFAULTS)}")
        merged = {key: value for key, value in DEFAULTS[self.experiment].items() if getattr(self, key) is None}
        cfg = replace(self, **merged)
        if cfg.repeats is None or cfg.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        for name in ("m_values", "mu_values", "gap_values", "k_values"):
            values = getattr(cfg, name)
            if values is not None and len(values) == 0:
                raise ConfigError(f"{name} must not be empty")
        if cfg.m_values and min(cfg.m_values) < 1:
            raise ConfigError("message counts must be >= 1")
        if cfg.mu_values and not all(0.0 <= v <= 1.0 for v in cfg.mu_values):
            raise ConfigError("noise fractions must lie in [0, 1]")
        if cfg.gap_values and not all(0.0 <= v <= 1.0 for v in cfg.gap_values):
            raise ConfigError("gap fractions must lie in [0, 1]")
        if cfg.m_values and max(cfg.m_values) > 1 << cfg.n:
            raise ConfigError(f"cannot draw more than {1 << cfg.n} distinct messages")
        return cfg


class _Rows:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.rows: list[MetricRecord] = []

    def add(self, metric: str, value: float, repeat, seed=None, **params) -> None:
        params.setdefault("n", self.cfg.n)
        params.setdefault("k", self.cfg.k)
        params.setdefault("L", 1 << (params["n"] + params["k"] + 1))
        self.rows.append(MetricRecord(self.cfg.experiment, metric, float(value), seed=seed, repeat=repeat, **params))

    def repeated(self, metric: str, fn: Callable[[int], float], **params) -> None:
        """One row per repeat plus the mean row."""
        values = []
        for i in range(self.cfg.repeats):
            seed_i = self.cfg.seed + i
            v = float(fn(seed_i))
            values.append(v)
            self.add(metric, v, i, seed_i, **params)
        self.add(metric, float(np.mean(values)), "mean", self.cfg.seed, **params)

    def model(self, metric: str, value: float, **params) -> None:
        self.add(metric, value, "model", None, **params)


def _fig2(cfg, rows):
    for m in cfg.m_values:
        bits = m * cfg.n
        open_calls, closed_calls = analysis.open_vs_closed_hash_calls(bits, cfg.n, cfg.k)
        rows.model("open_hash_calls", open_calls, m=m)
        rows.model("closed_hash_calls", closed_calls, m=m)


def _fig3(cfg, rows):
    n_eff = cfg.n + (1 if cfg.k else 0)
    for mu in cfg.mu_values:
        for m in cfg.m_values:
            rows.repeated("hash_calls", lambda s: cc_trial(m, s, cfg.n, cfg.k, mu).result.hash_calls, m=m, mu=mu)
            rows.model("hash_calls", analysis.expected_hash_calls(m, mu, n_eff), m=m, mu=mu)


def _fig4(cfg, rows):
    params = CodeParams.closed(cfg.n, cfg.k)
    for mu in cfg.mu_values:
        for m in cfg.m_values:
            rows.model("noise_to_signal", analysis.noise_to_signal(m, mu, params), m=m, mu=mu)


def _fig5(cfg, rows):
    for k in cfg.k_values:
        for m in cfg.m_values:
            for mu in cfg.mu_values:
                rows.repeated(
                    "hallucinations", lambda s: cc_trial(m, s, cfg.n, k, mu).hallucinations, m=m, mu=mu, k=k
                )


def _fig7(cfg, rows):
    for m in cfg.m_values:
        rows.repeated("correlation", lambda s: true_offset_score(m, s, cfg.n, cfg.k), m=m)
        rows.model("correlation", expected_principle_marks(m), m=m)


def _fig8(cfg, rows):
    q = cfg.q or 5
    length = 1 << (cfg.n + cfg.k + 1)
    for mu in cfg.mu_values:
        rows.repeated(f"correlations_ge_{q}", lambda s: chance_correlations(s, mu, q, cfg.n, cfg.k), mu=mu)
        rows.model(f"correlations_ge_{q}", false_correlation_rate(q, mu, length), mu=mu)
        rows.model(f"correlations_ge_{q}_binomial", chance_candidates(q, mu, length), mu=mu)


def _fig9(cfg, rows):
    for m in cfg.m_values:
        for mu in cfg.mu_values:
            rows.repeated("cc_error", lambda s: cc_trial(m, s, cfg.n, cfg.k, mu).error_fraction, m=m, mu=mu)
            rows.repeated(
                "cdma_error",
                lambda s: analysis.decoded_error_fraction(*cdma_trial(m, s, mu), positional=True),
                m=m,
                mu=mu,
            )


def _fig10(cfg, rows):
    for m in cfg.m_values:
        for gf in cfg.gap_values:
            rows.repeated(
                "cc_error",
                lambda s: cc_trial(m, s, cfg.n, cfg.k, 0.0, gf, bridge_gaps=True).error_fraction,
                m=m,
                gap_fraction=gf,
            )
            rows.repeated(
                "cc_missing",
                lambda s: cc_trial(m, s, cfg.n, cfg.k, 0.0, gf, bridge_gaps=True).missing_fraction,
                m=m,
                gap_fraction=gf,
            )
            rows.repeated(
                "cdma_error",
                lambda s: analysis.decoded_error_fraction(*cdma_trial(m, s, 0.0, gf), positional=True),
                m=m,
                gap_fraction=gf,
            )


def _fig11(cfg, rows):
    n_eff = cfg.n + (1 if cfg.k else 0)
    for m in cfg.m_values:
        rows.repeated("cc_marks", lambda s: cc_trial(m, s, cfg.n, cfg.k).genuine_marks, m=m)
        rows.model("cc_marks", analysis.expected_marks(m, n_eff), m=m)

        def cdma_marks(s, m=m):
            params = CdmaParams(m, spreading_seed=int(rng_for(s, SPREAD).integers(1 << 63)))
            return cdma_encode(random_messages(s, m, 8), params).mark_count

        rows.repeated("cdma_marks", cdma_marks, m=m)


def _fig12(cfg, rows):
    per_msg = cfg.n + (1 if cfg.k else 0)
    for m in cfg.m_values:
        rows.model("encode_hash_calls", m * per_msg, m=m)
        for mu in cfg.mu_values:
            rows.repeated(
                "decode_hash_calls", lambda s: cc_trial(m, s, cfg.n, cfg.k, mu).result.hash_calls, m=m, mu=mu
            )


RUNNERS = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10": _fig10,
    "fig11": _fig11,
    "fig12": _fig12,
}


def collect(config: ExperimentConfig) -> list[MetricRecord]:
    cfg = config.resolved()
    rows = _Rows(cfg)
    RUNNERS[cfg.experiment](cfg, rows)
    return sorted(rows.rows, key=_sort_key)


def _sort_key(r: MetricRecord):
    def opt(x):
        return (x is None, x if x is not None else 0)

    rep = r.repeat if isinstance(r.repeat, int) else {"mean": 10**9, "model": 10**9 + 1}[r.repeat]
    return (r.metric, opt(r.k), opt(r.m), opt(r.mu), opt(r.gap_fraction), rep)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(round(value, 12))
    return str(value)


def to_csv(records: Iterable[MetricRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def run_experiment(config: ExperimentConfig) -> str:
    """Run a sweep; write the CSV to ``config.out`` if set and return it."""
    text = to_csv(collect(config))
    if config.out:
        with open(config.out, "w", newline="") as fh:
            fh.write(text)
    return text
