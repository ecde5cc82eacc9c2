"""Command-line frontend: compress/decompress token files, run experiments.

Exit codes: 0 success, 1 data or runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile

from . import __version__
from .codec import CensorRule, DecodeError, codelength_report, decode, encode
from .envelope import parse_envelope
from .lab import (
    DISTINCT_COLUMNS,
    REDUNDANCY_COLUMNS,
    THRESHOLD_COLUMNS,
    ExperimentConfig,
    distinct_symbol_stats,
    emit_csv,
    redundancy_curve,
    threshold_stats,
)

_TOKEN = re.compile(r"\S+")


class DataError(Exception):
    """Input problems that exit with status 1."""


def _read_tokens(path: str) -> list[int]:
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.readlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    symbols = []
    for lineno, line in enumerate(lines, start=1):
        for match in _TOKEN.finditer(line):
            token = match.group()
            try:
                value = int(token)
            except ValueError:
                value = None
            if value is None or value < 1:
                raise DataError(
                    f"{path}:{lineno}:{match.start() + 1}: "
                    f"expected a positive integer token, got {token!r}"
                )
            symbols.append(value)
    return symbols


def _read_byte_symbols(path: str) -> list[int]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return [b + 1 for b in data]


def _write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".etac-tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def _cmd_compress(args) -> int:
    symbols = _read_byte_symbols(args.input) if args.bytes else _read_tokens(args.input)
    rule = CensorRule(args.rule)
    container = encode(symbols, rule)
    _write_atomic(args.output, container)
    rep = codelength_report(symbols, rule)
    print(
        f"symbols={len(symbols)} total_bits={rep.total_bits} "
        f"mixture_bits={rep.mixture_bits} elias_bits={rep.elias_bits} "
        f"n_censored={rep.n_censored} threshold_m={rep.threshold_m}",
        file=sys.stderr,
    )
    return 0


def _cmd_decompress(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            container = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {args.input}: {exc}") from exc
    try:
        symbols = decode(container)
    except DecodeError as exc:
        raise DataError(f"{args.input}: {exc}") from exc
    if args.bytes:
        bad = next((s for s in symbols if s > 256), None)
        if bad is not None:
            raise DataError(f"symbol {bad} does not fit byte mode")
        payload = bytes(s - 1 for s in symbols)
    else:
        payload = (" ".join(str(s) for s in symbols) + "\n").encode("ascii")
    _write_atomic(args.output, payload)
    return 0


def _cmd_inspect(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            container = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {args.input}: {exc}") from exc
    try:
        symbols = decode(container)
    except DecodeError as exc:
        raise DataError(f"{args.input}: {exc}") from exc
    rule = CensorRule.VALUE if container[4] & 1 else CensorRule.RANK
    rep = codelength_report(symbols, rule)
    print(f"magic=ETC1 rule={rule.value} payload_bytes={len(container) - 5}")
    print(
        f"symbols={len(symbols)} distinct={rep.distinct} "
        f"threshold_m={rep.threshold_m} n_censored={rep.n_censored}"
    )
    print(
        f"total_bits={rep.total_bits} mixture_bits={rep.mixture_bits} "
        f"elias_bits={rep.elias_bits} ideal_mixture_bits={rep.ideal_mixture_bits:.3f}"
    )
    return 0


def _parse_grid(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo, hi = int(lo_s), int(hi_s)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad grid {text!r}")
        grid = []
        n = lo
        while n <= hi:
            grid.append(n)
            n *= 2
        return tuple(grid)
    return tuple(int(part) for part in text.split(","))


def _cmd_bench(args, kind: str) -> int:
    cfg = ExperimentConfig(
        envelope=args.envelope,
        source=args.source,
        n_grid=args.n,
        trials=args.trials,
        seed=args.seed,
        rule=CensorRule(args.rule),
    )
    if kind == "redundancy":
        rows, checks = redundancy_curve(cfg)
        columns = REDUNDANCY_COLUMNS
    elif kind == "threshold":
        rows, checks = threshold_stats(cfg)
        columns = THRESHOLD_COLUMNS
    else:
        rows, checks = distinct_symbol_stats(cfg)
        columns = DISTINCT_COLUMNS
    if args.out:
        emit_csv(rows, columns, args.out)
    for check in checks:
        print(check.line())
    return 0 if all(c.passed for c in checks) else 1


def _envelope_arg(text: str):
    try:
        return parse_envelope(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _grid_arg(text: str):
    try:
        return _parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _trials_arg(text: str):
    value = int(text)
    if value < 30:
        raise argparse.ArgumentTypeError("bound checks need at least 30 trials")
    return value


def _add_bench_flags(sub, default_n, default_trials):
    sub.add_argument("--envelope", type=_envelope_arg, default=parse_envelope("power:alpha=2"),
                     help="envelope spec, e.g. power:alpha=2 or geometric:q=0.8")
    sub.add_argument("--source", choices=["envelope", "bayes"], default="envelope")
    sub.add_argument("--n", type=_grid_arg, default=default_n,
                     help="grid: doubling range like 1024..65536 or a comma list")
    sub.add_argument("--trials", type=_trials_arg, default=default_trials)
    sub.add_argument("--seed", type=int, default=2023)
    sub.add_argument("--rule", choices=["rank", "value"], default="rank")
    sub.add_argument("--out", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etac",
        description="Auto-censoring compressor for positive-integer sequences",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("compress", help="compress a whitespace-separated token file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--rule", choices=["rank", "value"], default="rank")
    p.add_argument("--bytes", action="store_true", help="treat input as raw bytes (b -> b+1)")
    p.set_defaults(fn=_cmd_compress)

    p = sub.add_parser("decompress", help="decompress a container to token text")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--bytes", action="store_true", help="write raw bytes (b+1 -> b)")
    p.set_defaults(fn=_cmd_decompress)

    p = sub.add_parser("inspect", help="describe a container and its streams")
    p.add_argument("input")
    p.set_defaults(fn=_cmd_inspect)

    p = sub.add_parser("bench-redundancy", help="redundancy curve against bound shapes")
    _add_bench_flags(p, (1024, 2048, 4096, 8192, 16384, 32768, 65536), 100)
    p.set_defaults(fn=lambda a: _cmd_bench(a, "redundancy"))

    p = sub.add_parser("bench-threshold", help="threshold concentration statistics")
    _add_bench_flags(p, (16384,), 500)
    p.set_defaults(fn=lambda a: _cmd_bench(a, "threshold"))

    p = sub.add_parser("bench-distinct", help="distinct-symbol statistics")
    _add_bench_flags(p, (1024, 2048, 4096, 8192, 16384, 32768, 65536), 200)
    p.set_defaults(fn=lambda a: _cmd_bench(a, "distinct"))

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DataError as exc:
        print(f"etac: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"etac: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
