"""Shared plumbing: sequence handling, seeding, reports, parallel map."""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._ftz import enable_ftz

#: Integer code for the erasure symbol in {0,1,e} sequences.
ERASURE = 2

THREADS_ENV = "SYNCSEC_THREADS"


def as_bits(seq) -> np.ndarray:
    """Validate and return a {0,1} sequence as a uint8 array."""
    arr = np.asarray(seq)
    if arr.dtype == np.uint8:
        out = arr
    else:
        out = arr.astype(np.uint8, casting="unsafe")
        if not np.array_equal(out, arr):
            raise ValueError("bit sequence must contain integers only")
    if out.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if out.size and out.max() > 1:
        raise ValueError("bit sequence alphabet is {0,1}")
    return out


def as_erasure_seq(seq) -> np.ndarray:
    """Validate and return a {0,1,ERASURE} sequence as a uint8 array."""
    arr = np.asarray(seq).astype(np.uint8)
    if arr.ndim != 1:
        raise ValueError("sequence must be one-dimensional")
    if arr.size and arr.max() > ERASURE:
        raise ValueError("alphabet is {0,1,e}")
    return arr


_SYMBOLS = np.array(["0", "1", "e"])


def seq_to_text(seq) -> str:
    """Render a bit or erasure sequence as one ASCII line ('e' = erasure)."""
    arr = as_erasure_seq(seq)
    return "".join(_SYMBOLS[arr])


def text_to_seq(line: str) -> np.ndarray:
    stripped = line.strip()
    out = np.empty(len(stripped), dtype=np.uint8)
    for k, ch in enumerate(stripped):
        if ch == "0":
            out[k] = 0
        elif ch == "1":
            out[k] = 1
        elif ch == "e":
            out[k] = ERASURE
        else:
            raise ValueError(f"invalid symbol {ch!r} in sequence text")
    return out


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

def derive_seeds(master_seed: int, count: int, *tags) -> np.ndarray:
    """Derive `count` independent 64-bit seeds from a master seed.

    Tags (strings or ints) namespace the stream so that different
    estimators within one invocation never share randomness. The mapping
    is deterministic across platforms and thread counts.
    """
    key = tuple(
        zlib.crc32(t.encode()) if isinstance(t, str) else int(t) for t in tags
    )
    ss = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return ss.generate_state(count, np.uint64)


# ---------------------------------------------------------------------------
# Monte-Carlo reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    """Monte-Carlo estimate with its sampling uncertainty.

    stderr is the sample standard deviation of per-run values divided by
    sqrt(runs); per-run seeds are recorded for reproducibility.
    """

    mean: float
    stderr: float
    runs: int
    length: int
    seeds: tuple = field(repr=False, default=())

    @staticmethod
    def from_values(values, length: int, seeds) -> "EstimateReport":
        values = np.asarray(values, dtype=float)
        runs = values.size
        if runs < 2:
            raise ValueError("need at least 2 runs for a standard error")
        mean = float(values.mean())
        stderr = float(values.std(ddof=1) / np.sqrt(runs))
        return EstimateReport(mean, stderr, runs, int(length), tuple(int(s) for s in seeds))


def thread_count() -> int:
    """Worker-thread count from the environment; defaults to 1."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn, items):
    """Map fn over items, in parallel when SYNCSEC_THREADS > 1.

    Work units must be independent (the estimators seed each run
    separately), so the result is identical for any thread count.
    """
    items = list(items)
    workers = min(thread_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(it) for it in items]

    def unit(it):
        enable_ftz()  # per-thread flag; idempotent
        return fn(it)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(unit, items))


enable_ftz()
