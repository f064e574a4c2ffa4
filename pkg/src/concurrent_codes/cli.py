"""Command line entry point: ``concurrent-codes <command> [flags]``.

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path


from . import analysis
from .cdma import CdmaParams, cdma_decode, cdma_encode
from .channel import ChannelSpec
from .codec import Codeword, DecodeOptions, decode, encode
from .core import CodeParams, build_table_hash, format_bits, parse_bits
from .experiments import DEFAULTS, ConfigError, ExperimentConfig, run_experiment
from .sync import synchronize


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _read_messages(args) -> list[int]:
    lines: list[str] = []
    if args.messages:
        lines += [t for t in args.messages.replace(",", " ").split()]
    if args.messages_file:
        lines += [ln for ln in Path(args.messages_file).read_text().split() if ln.strip()]
    if not lines:
        raise UsageError("give --messages or --messages-file")
    try:
        return [parse_bits(t) for t in lines]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params(args) -> CodeParams:
    try:
        if args.codeword_bits is not None and args.codeword_bits != 1 << (args.n + args.k + 1):
            raise UsageError(f"closed code needs --codeword-bits {1 << (args.n + args.k + 1)}")
        return CodeParams.closed(args.n, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _read_codeword(path: str, fmt: str) -> Codeword:
    p = Path(path)
    return Codeword.from_bytes(p.read_bytes()) if fmt == "binary" else Codeword.from_text(p.read_text())


def _write_codeword(cw: Codeword, path: str | None, fmt: str) -> None:
    if fmt == "binary":
        if not path:
            raise UsageError("binary output needs --out")
        Path(path).write_bytes(cw.to_bytes())
    elif path:
        Path(path).write_text(cw.to_text())
    else:
        sys.stdout.write(cw.to_text())


def cmd_encode(args) -> None:
    params = _params(args)
    msgs = _read_messages(args)
    for m in msgs:
        if m >= 1 << params.n_data:
            raise UsageError(f"message {format_bits(m, m.bit_length())} longer than --n {params.n_data}")
    cw = encode(msgs, build_table_hash(params, args.seed), params)
    _write_codeword(cw, args.out, args.format)
    print(f"marks: {cw.mark_count}", file=sys.stdout if args.out else sys.stderr)


def cmd_decode(args) -> None:
    params = _params(args)
    cw = _read_codeword(args.input, args.format)
    result = decode(cw, build_table_hash(params, args.seed), params, DecodeOptions(bridge_gaps=args.bridge_gaps))
    for m in result.messages:
        print(format_bits(m, params.n_data))
    print(f"hash_calls: {result.hash_calls}")
    if result.gaps_used:
        print("gaps: " + " ".join(f"{g.start}+{g.length}" for g in result.gaps_used))


def cmd_corrupt(args) -> None:
    cw = _read_codeword(args.input, args.format)
    start = "random" if args.gap_start is None else args.gap_start
    try:
        out, region = ChannelSpec(args.noise, args.gap_fraction, start, args.seed).apply(cw, flip=args.flip)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_codeword(out, args.out, args.format)
    if args.gap_fraction:
        print(f"burst: {region.start}+{region.length}", file=sys.stderr)


def cmd_sync(args) -> None:
    params = _params(args)
    stream = _read_codeword(args.input, args.format)
    cands = synchronize(
        stream.bits, build_table_hash(params, args.seed), params, args.q_threshold, gap_aware=args.bridge_gaps
    )
    for c in cands[: args.limit]:
        print(f"{c.offset}\t{c.score}")
    if not cands:
        print("no candidates", file=sys.stderr)


def _cdma_params(args, m: int) -> CdmaParams:
    try:
        return CdmaParams(m, codeword_len=args.codeword_bits or 2048, spreading_seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_cdma_encode(args) -> None:
    msgs = _read_messages(args)
    params = _cdma_params(args, len(msgs))
    cw = cdma_encode(msgs, params)
    _write_codeword(cw, args.out, args.format)
    print(f"marks: {cw.mark_count}", file=sys.stdout if args.out else sys.stderr)


def cmd_cdma_decode(args) -> None:
    if not args.m:
        raise UsageError("cdma-decode needs --m")
    params = _cdma_params(args, args.m)
    for m in cdma_decode(_read_codeword(args.input, args.format), params):
        print(format_bits(m, params.n_bits))


def cmd_model(args) -> None:
    kw = dict(
        m=args.m, mu=args.mu, q=args.q, f=args.f, log2L=args.log2L, n=args.n, k=args.k,
        n_eff=args.n_eff if args.n_eff is not None else args.n + (1 if args.k else 0),
        fec=args.fec,
    )
    try:
        value = analysis.model_table(args.eq, **kw)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"missing parameter for equation {args.eq}: {exc}") from exc
    print(f"{value:.{args.digits}f}")


def cmd_experiment(args) -> None:
    cfg = ExperimentConfig(
        experiment=args.experiment,
        repeats=args.repeats,
        seed=args.seed,
        m_values=_ints(args.m_values) if args.m_values else None,
        mu_values=_floats(args.mu_values) if args.mu_values else None,
        gap_values=_floats(args.gap_values) if args.gap_values else None,
        k_values=_ints(args.k_values) if args.k_values else None,
        n=args.n,
        k=args.k,
        out=args.out,
    )
    try:
        text = run_experiment(cfg)
    except ConfigError as exc:
        raise UsageError(f"invalid config: {exc}") from exc
    if not args.out:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="concurrent-codes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def code_flags(p, n=8, k=2):
        p.add_argument("--n", type=int, default=n, help="data bits per message")
        p.add_argument("--k", type=int, default=k, help="checksum bits")
        p.add_argument("--codeword-bits", type=int, default=None, help="codeword length L")
        p.add_argument("--seed", type=int, default=0, help="hash table / spreading seed")
        p.add_argument("--format", choices=("text01", "binary"), default="text01")

    def message_flags(p):
        p.add_argument("--messages", help="comma or space separated MSB-first bit strings")
        p.add_argument("--messages-file", help="one MSB-first bit string per line")

    p = sub.add_parser("encode", help="encode messages into a codeword")
    code_flags(p)
    message_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a codeword")
    code_flags(p)
    p.add_argument("input")
    p.add_argument("--bridge-gaps", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("corrupt", help="add noise marks and/or a burst erasure")
    p.add_argument("input")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--gap-fraction", type=float, default=0.0)
    p.add_argument("--gap-start", type=int, default=None)
    p.add_argument("--flip", action="store_true", help="invert bits instead of adding marks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text01", "binary"), default="text01")
    p.add_argument("--out")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("sync", help="find candidate codeword starts in a stream")
    code_flags(p)
    p.add_argument("input")
    p.add_argument("--q-threshold", type=int, default=5)
    p.add_argument("--bridge-gaps", action="store_true", help="lower the threshold for taps inside gaps")
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("cdma-encode", help="Hamming + interleave + spread")
    code_flags(p)
    message_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cdma_encode)

    p = sub.add_parser("cdma-decode", help="despread + deinterleave + Hamming decode")
    code_flags(p)
    p.add_argument("input")
    p.add_argument("--m", type=int, required=True, help="number of messages")
    p.set_defaults(func=cmd_cdma_decode)

    p = sub.add_parser("model", help="evaluate a closed-form model")
    p.add_argument("--eq", type=int, required=True, choices=(1, 2, 3, 7, 8, 9, 10))
    p.add_argument("--m", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--q", type=int)
    p.add_argument("--f", type=float, help="target chance correlations (eq 8)")
    p.add_argument("--fec", type=float, default=2, help="FEC expansion factor (eq 9)")
    p.add_argument("--log2L", type=int, default=11)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n-eff", type=int, default=None, help="hashes per message (default N, +1 with checksum)")
    p.add_argument("--digits", type=int, default=3)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("experiment", help="run a figure sweep and write CSV")
    p.add_argument("--experiment", required=True, choices=sorted(DEFAULTS))
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="master seed; repeat i uses seed+i")
    p.add_argument("--m-values")
    p.add_argument("--mu-values")
    p.add_argument("--gap-values")
    p.add_argument("--k-values")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
