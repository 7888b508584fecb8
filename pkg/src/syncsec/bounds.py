"""Secrecy-capacity lower bounds, source optimization, and sweeps.

Insertion channel:  bound = H(X) - scaled H(Z) + H(Z|X)   (per input bit)
Deletion channel:   bound = H(Y) - h(d) - scaled H(Z) + H(Z|X)

Components come from independent Monte-Carlo run sets, so the combined
standard error is the root sum of squares. Negative values are legitimate
noise around small true bounds and are reported as-is.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import effective_rate
from .condent import EXACT_TRELLIS_MAX_N, genie_block_cond_entropy_lb, mc_cond_entropy_rate
from .hmm import (
    build_deletion_hmm,
    build_erasure_hmm,
    build_insertion_hmm,
    mc_entropy_rate,
    scale_factor,
)
from .sources import MarkovSource, binary_entropy
from .util import EstimateReport, derive_seeds

CSV_HEADER = "channel,param,p01,p10,hx,hy,hz_scaled,hzx,hd_penalty,bound,stderr,re,runs,n,k,seed,method"

DEFAULT_GRID = tuple(round(0.05 * j, 2) for j in range(1, 20))  # 0.05 .. 0.95


@dataclass(frozen=True)
class SecrecyBoundReport:
    """All rate components of one bound evaluation, in bits per input bit."""

    channel: str  # "ins" | "del"
    param: float  # i or d
    p01: float | None
    p10: float | None
    hx: float
    hy: float | None
    hz_scaled: float
    hzx: float
    hd_penalty: float | None
    bound: float
    stderr: float
    effective_rate: float
    runs: int
    n: int
    k: int
    seed: int
    method: str
    components: dict = field(default_factory=dict, repr=False, compare=False)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def report_to_csv_row(r: SecrecyBoundReport) -> str:
    return ",".join(
        _fmt(v)
        for v in (
            r.channel, r.param, r.p01, r.p10, r.hx, r.hy, r.hz_scaled, r.hzx,
            r.hd_penalty, r.bound, r.stderr, r.effective_rate, r.runs, r.n,
            r.k, r.seed, r.method,
        )
    )


def _source_params(source: MarkovSource):
    if source.order != 1:
        return None, None
    P = source.transitions
    return float(P[0, 1]), float(P[1, 0])


def secrecy_bound_insertion(
    source: MarkovSource,
    i: float,
    n: int = 10_000,
    k: int = 10_000,
    runs: int = 20,
    seed: int = 0,
    precision: str = "single",
) -> SecrecyBoundReport:
    """Estimate the insertion-channel secrecy bound for one source."""
    if not 0.0 <= i < 1.0:
        raise ValueError(f"insertion probability must lie in [0,1), got {i}")
    hx = source.entropy_rate()
    hz_seed, hzx_seed = (int(s) for s in derive_seeds(seed, 2, "bound-ins"))
    hz_raw = mc_entropy_rate(build_insertion_hmm(source, i), k, runs, hz_seed)
    factor = scale_factor(i, 0.0)
    hzx = mc_cond_entropy_rate(source, i=i, n=n, runs=runs, seed=hzx_seed, precision=precision)
    bound = hx - factor * hz_raw.mean + hzx.mean
    stderr = math.hypot(factor * hz_raw.stderr, hzx.stderr)
    p01, p10 = _source_params(source)
    return SecrecyBoundReport(
        channel="ins", param=i, p01=p01, p10=p10, hx=hx, hy=None,
        hz_scaled=factor * hz_raw.mean, hzx=hzx.mean, hd_penalty=None,
        bound=bound, stderr=stderr, effective_rate=effective_rate(i, 0.0),
        runs=runs, n=n, k=k, seed=seed, method="exact-mc",
        components={"hz_raw": hz_raw, "hzx": hzx},
    )


def secrecy_bound_deletion(
    source: MarkovSource,
    d: float,
    n: int = 10_000,
    k: int = 10_000,
    runs: int = 20,
    seed: int = 0,
    genie_T: int | None = None,
    precision: str = "single",
) -> SecrecyBoundReport:
    """Estimate the deletion-channel secrecy bound for one source.

    With genie_T set, the conditional term is the genie block lower bound
    and the report is tagged conservative.
    """
    if not 0.0 <= d < 1.0:
        raise ValueError(f"deletion probability must lie in [0,1), got {d}")
    hy_seed, hz_seed, hzx_seed = (int(s) for s in derive_seeds(seed, 3, "bound-del"))
    hy = mc_entropy_rate(build_erasure_hmm(source, d), n, runs, hy_seed)
    hz_raw = mc_entropy_rate(build_deletion_hmm(source, d), k, runs, hz_seed)
    factor = scale_factor(0.0, d)
    if genie_T is None:
        hzx = mc_cond_entropy_rate(source, d=d, n=n, runs=runs, seed=hzx_seed, precision=precision)
        method = "exact-mc"
    else:
        hzx = genie_block_cond_entropy_lb(
            source, d, n, genie_T, runs=runs, seed=hzx_seed, precision=precision
        )
        method = f"genie-T{genie_T}"
    hd = binary_entropy(d)
    hx = source.entropy_rate()
    bound = hy.mean - hd - factor * hz_raw.mean + hzx.mean
    stderr = math.sqrt(hy.stderr**2 + (factor * hz_raw.stderr) ** 2 + hzx.stderr**2)
    p01, p10 = _source_params(source)
    return SecrecyBoundReport(
        channel="del", param=d, p01=p01, p10=p10, hx=hx, hy=hy.mean,
        hz_scaled=factor * hz_raw.mean, hzx=hzx.mean, hd_penalty=hd,
        bound=bound, stderr=stderr, effective_rate=effective_rate(0.0, d),
        runs=runs, n=n, k=k, seed=seed, method=method,
        components={"hy": hy, "hz_raw": hz_raw, "hzx": hzx},
    )


def evaluate_bound(
    channel: str,
    param: float,
    source: MarkovSource,
    n: int,
    k: int,
    runs: int,
    seed: int,
    genie_T: int | None = None,
    precision: str = "single",
) -> SecrecyBoundReport:
    if channel == "ins":
        return secrecy_bound_insertion(source, param, n, k, runs, seed, precision)
    if channel == "del":
        return secrecy_bound_deletion(source, param, n, k, runs, seed, genie_T, precision)
    raise ValueError(f"channel must be 'ins' or 'del', got {channel!r}")


def grid_search_fom(
    channel: str,
    param: float,
    grid=DEFAULT_GRID,
    n: int = 10_000,
    k: int = 10_000,
    runs: int = 20,
    seed: int = 0,
    genie_T: int | None = None,
    precision: str = "single",
):
    """Maximize the bound over first-order sources on a (p01, p10) grid.

    Returns (best_report, all_reports); all_reports is in lexicographic
    (p01, p10) order and ties keep the lexicographically smallest point.
    Every grid point gets the same Monte-Carlo budget with its own seed
    stream derived from (seed, point index).
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(not 0.0 < g < 1.0 for g in grid):
        raise ValueError("grid values must lie strictly inside (0,1)")
    points = [(p01, p10) for p01 in grid for p10 in grid]
    point_seeds = derive_seeds(seed, len(points), "grid")
    reports = []
    for (p01, p10), pseed in zip(points, point_seeds):
        source = MarkovSource.first_order(p01, p10)
        reports.append(
            evaluate_bound(channel, param, source, n, k, runs, int(pseed), genie_T, precision)
        )
    best = reports[0]
    for r in reports[1:]:
        if r.bound > best.bound:
            best = r
    return best, reports


def sweep(
    channel: str,
    params,
    grid=DEFAULT_GRID,
    n: int = 10_000,
    k: int = 10_000,
    runs: int = 20,
    seed: int = 0,
    genie_T: int | None = None,
    precision: str = "single",
    out=None,
    metadata: str | None = None,
):
    """Optimized bound at every channel parameter; returns (reports, csv_text).

    One CSV row per parameter in input order, each row the argmax over the
    source grid. `out` may be a path or a text stream; `metadata` is
    echoed as '#' comment lines above the header.
    """
    params = [float(p) for p in params]
    if not params:
        raise ValueError("parameter list must be nonempty")
    buf = io.StringIO()
    if metadata:
        for line in metadata.splitlines():
            buf.write(f"# {line}\n")
    buf.write(CSV_HEADER + "\n")
    reports = []
    value_seeds = derive_seeds(seed, len(params), "sweep")
    for param, vseed in zip(params, value_seeds):
        best, _ = grid_search_fom(
            channel, param, grid, n, k, runs, int(vseed), genie_T, precision
        )
        reports.append(best)
        buf.write(report_to_csv_row(best) + "\n")
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)
    return reports, text
