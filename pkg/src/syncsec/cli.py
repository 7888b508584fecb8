"""Command-line front end.

Machine-readable CSV goes to stdout or --out; diagnostics go to stderr.
Output files carry '#' metadata lines with the resolved configuration so
every result is reproducible from its own header. All commands are
deterministic given --seed, for any SYNCSEC_THREADS setting.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds as bounds_mod
from . import selftest as selftest_mod
from .channel import ChannelParams, transmit
from .condent import EXACT_TRELLIS_MAX_N, genie_block_cond_entropy_lb, mc_cond_entropy_rate
from .hmm import (
    build_deletion_hmm,
    build_erasure_hmm,
    build_insertion_hmm,
    mc_entropy_rate,
)
from .sources import MarkovSource
from .util import seq_to_text, thread_count


def _add_source_flags(p: argparse.ArgumentParser):
    p.add_argument("--p01", type=float, help="first-order flip probability P(1|0)")
    p.add_argument("--p10", type=float, help="first-order flip probability P(0|1)")
    p.add_argument("--matrix", help="CSV file with a 2^M x 2^M transition matrix")


def _resolve_source(args) -> MarkovSource:
    if args.matrix is not None:
        if args.p01 is not None or args.p10 is not None:
            raise ValueError("give either --matrix or --p01/--p10, not both")
        rows = []
        with open(args.matrix, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                rows.append([float(tok) for tok in line.split(",")])
        return MarkovSource(np.array(rows, dtype=float))
    if args.p01 is None or args.p10 is None:
        raise ValueError("source required: --p01 and --p10, or --matrix FILE")
    return MarkovSource.first_order(args.p01, args.p10)


def _source_desc(args) -> str:
    if args.matrix is not None:
        return f"matrix={args.matrix}"
    return f"p01={args.p01:g} p10={args.p10:g}"


def _parse_param_list(text: str):
    """Parse 'a:b:step' (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(t) for t in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        count = int(round((stop - start) / step))
        values = [round(start + j * step, 12) for j in range(count + 1)]
        return [v for v in values if v <= stop + 1e-12]
    return [float(t) for t in text.split(",") if t.strip()]


def _emit(text: str, out_path, config_line: str):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"# {config_line}\n")
            fh.write(text)


def _cmd_transmit(args) -> int:
    source = _resolve_source(args)
    params = ChannelParams(insertion_prob=args.i, deletion_prob=args.d)
    rng = np.random.default_rng(args.seed)
    x = source.sample(args.n, rng)
    record = transmit(x, params, rng)
    lines = [seq_to_text(record.x), seq_to_text(record.y), seq_to_text(record.z)]
    if args.segments:
        lines.append("|".join(seq_to_text(s) for s in record.segments))
    cfg = (
        f"syncsec transmit n={args.n} i={args.i:g} d={args.d:g} seed={args.seed} "
        f"{_source_desc(args)} segments={args.segments} threads={thread_count()}"
    )
    _emit("\n".join(lines) + "\n", args.out, cfg)
    return 0


def _cmd_entropy(args) -> int:
    source = _resolve_source(args)
    if args.process == "x":
        if args.i or args.d:
            raise ValueError("--process x takes no channel parameters")
        model = build_insertion_hmm(source, 0.0)
    elif args.process == "y":
        if args.i:
            raise ValueError("--process y uses --d only")
        model = build_erasure_hmm(source, args.d)
    elif args.process == "z-ins":
        if args.d:
            raise ValueError("z-ins requires d = 0 (pure insertion)")
        model = build_insertion_hmm(source, args.i)
    else:  # z-del
        if args.i:
            raise ValueError("z-del requires i = 0 (pure deletion)")
        model = build_deletion_hmm(source, args.d)
    rep = mc_entropy_rate(model, args.k, args.runs, args.seed)
    text = "mean,stderr,runs,k\n" + f"{rep.mean:.12g},{rep.stderr:.12g},{rep.runs},{rep.length}\n"
    cfg = (
        f"syncsec entropy process={args.process} i={args.i:g} d={args.d:g} k={args.k} "
        f"runs={args.runs} seed={args.seed} {_source_desc(args)} threads={thread_count()}"
    )
    _emit(text, args.out, cfg)
    return 0


def _cmd_condent(args) -> int:
    source = _resolve_source(args)
    if args.channel == "ins":
        if args.d:
            raise ValueError("insertion conditional entropy requires d = 0")
        if args.genie_T is not None:
            raise ValueError("the genie bound applies to the deletion channel only")
        if args.n > EXACT_TRELLIS_MAX_N:
            raise ValueError(
                f"exact insertion trellis is capped at n = {EXACT_TRELLIS_MAX_N}; reduce --n"
            )
        rep = mc_cond_entropy_rate(source, i=args.i, n=args.n, runs=args.runs, seed=args.seed)
        method = "exact-mc"
    else:
        if args.i:
            raise ValueError("deletion conditional entropy requires i = 0")
        if args.genie_T is not None:
            rep = genie_block_cond_entropy_lb(
                source, args.d, args.n, args.genie_T, runs=args.runs, seed=args.seed
            )
            method = f"genie-T{args.genie_T}"
        else:
            if args.n > EXACT_TRELLIS_MAX_N:
                raise ValueError(
                    f"exact deletion trellis is capped at n = {EXACT_TRELLIS_MAX_N}; "
                    f"pass --genie-T for longer runs"
                )
            rep = mc_cond_entropy_rate(source, d=args.d, n=args.n, runs=args.runs, seed=args.seed)
            method = "exact-mc"
    text = (
        "mean,stderr,runs,n,method\n"
        + f"{rep.mean:.12g},{rep.stderr:.12g},{rep.runs},{rep.length},{method}\n"
    )
    cfg = (
        f"syncsec condent channel={args.channel} i={args.i:g} d={args.d:g} n={args.n} "
        f"runs={args.runs} seed={args.seed} genie_T={args.genie_T} "
        f"{_source_desc(args)} threads={thread_count()}"
    )
    _emit(text, args.out, cfg)
    return 0


def _check_budget(args):
    if args.paper_scale:
        args.n = 100_000
        args.k = 100_000
        args.runs = 100
    if args.channel == "ins" and args.n > EXACT_TRELLIS_MAX_N:
        raise ValueError(
            f"exact insertion trellis is capped at n = {EXACT_TRELLIS_MAX_N}; reduce --n"
        )
    if args.channel == "del" and args.n > EXACT_TRELLIS_MAX_N and args.genie_T is None:
        raise ValueError(
            f"deletion runs beyond n = {EXACT_TRELLIS_MAX_N} need --genie-T (lower bound)"
        )


def _cmd_bound(args) -> int:
    _check_budget(args)
    source = _resolve_source(args)
    report = bounds_mod.evaluate_bound(
        args.channel, args.param, source, args.n, args.k, args.runs, args.seed, args.genie_T
    )
    text = bounds_mod.CSV_HEADER + "\n" + bounds_mod.report_to_csv_row(report) + "\n"
    cfg = (
        f"syncsec bound channel={args.channel} param={args.param:g} n={args.n} k={args.k} "
        f"runs={args.runs} seed={args.seed} genie_T={args.genie_T} "
        f"{_source_desc(args)} threads={thread_count()}"
    )
    _emit(text, args.out, cfg)
    return 0


def _cmd_sweep(args) -> int:
    _check_budget(args)
    values = _parse_param_list(args.params)
    grid = _parse_param_list(args.grid)
    cfg = (
        f"syncsec sweep channel={args.channel} params={args.params} grid={args.grid} "
        f"n={args.n} k={args.k} runs={args.runs} seed={args.seed} genie_T={args.genie_T} "
        f"threads={thread_count()}"
    )
    _, text = bounds_mod.sweep(
        args.channel,
        values,
        grid=grid,
        n=args.n,
        k=args.k,
        runs=args.runs,
        seed=args.seed,
        genie_T=args.genie_T,
        metadata=cfg,
    )
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    return 0


def _cmd_selftest(args) -> int:
    return selftest_mod.run(sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="syncsec",
        description="Synchronization-error secrecy: simulate the transceiver and bound secrecy rates.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", help="run the transmitter once and print x, y, z")
    p.add_argument("--n", type=int, required=True, help="number of input bits")
    p.add_argument("--i", type=float, default=0.0, help="insertion probability")
    p.add_argument("--d", type=float, default=0.0, help="deletion probability")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--segments", action="store_true", help="also print |-separated segments")
    p.add_argument("--out", help="write to file (with config header) instead of stdout")
    _add_source_flags(p)
    p.set_defaults(fn=_cmd_transmit)

    p = sub.add_parser("entropy", help="Monte-Carlo entropy rate of X, Y, or Z processes")
    p.add_argument("--process", choices=["x", "y", "z-ins", "z-del"], required=True)
    p.add_argument("--i", type=float, default=0.0)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--k", type=int, default=10_000, help="trellis length per run")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    _add_source_flags(p)
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("condent", help="conditional entropy rate of the output given the input")
    p.add_argument("--channel", choices=["ins", "del"], required=True)
    p.add_argument("--i", type=float, default=0.0)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--genie-T", type=int, dest="genie_T", help="deletion-only block lower bound")
    p.add_argument("--out")
    _add_source_flags(p)
    p.set_defaults(fn=_cmd_condent)

    p = sub.add_parser("bound", help="secrecy bound for one source and channel parameter")
    p.add_argument("channel", choices=["ins", "del"])
    p.add_argument("--param", type=float, required=True, help="i (ins) or d (del)")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--k", type=int, default=10_000)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--genie-T", type=int, dest="genie_T")
    p.add_argument("--paper-scale", action="store_true", help="n=k=1e5, 100 runs")
    p.add_argument("--out")
    _add_source_flags(p)
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("sweep", help="optimized bound across channel parameters (CSV)")
    p.add_argument("channel", choices=["ins", "del"])
    p.add_argument("--params", required=True, help="values: start:stop:step or comma list")
    p.add_argument("--grid", default="0.05:0.95:0.05", help="source grid for p01 and p10")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--k", type=int, default=10_000)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--genie-T", type=int, dest="genie_T")
    p.add_argument("--paper-scale", action="store_true", help="n=k=1e5, 100 runs")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.set_defaults(fn=_cmd_selftest)

    return ap


def parse_and_dispatch(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))
