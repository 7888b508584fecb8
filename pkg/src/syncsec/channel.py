"""The synchronization-error transmitter and its equivalent channels.

Per input bit the transmitter draws a geometric number N_k of trailing
uniform insertion bits (P(N=m) = (1-i) i^m) and an independent deletion
flag D_k ~ Bernoulli(d); the emitted segment is the (possibly deleted)
input bit followed by the insertions. The intended receiver knows the
shared randomness, strips insertions and marks deletions as erasures.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import IntegrityError
from .util import ERASURE, as_bits


@dataclass(frozen=True)
class ChannelParams:
    """Insertion probability i in [0,1) and deletion probability d in [0,1]."""

    insertion_prob: float = 0.0
    deletion_prob: float = 0.0

    def __post_init__(self):
        i, d = self.insertion_prob, self.deletion_prob
        if not 0.0 <= i < 1.0:
            raise ValueError(f"insertion probability must lie in [0,1), got {i}")
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"deletion probability must lie in [0,1], got {d}")


@dataclass(frozen=True, eq=False)
class TransmissionRecord:
    """One transmitter run: inputs, per-symbol draws, and outputs.

    segment k is x_k followed by N_k insertion bits when D_k is false,
    and the insertion bits alone when the symbol was deleted.
    """

    x: np.ndarray
    insert_counts: np.ndarray
    delete_flags: np.ndarray
    insert_bits: np.ndarray
    z: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.x.size

    @cached_property
    def segment_lengths(self) -> np.ndarray:
        return self.insert_counts + (~self.delete_flags).astype(np.int64)

    @property
    def segments(self) -> list[np.ndarray]:
        bounds = np.cumsum(self.segment_lengths)[:-1]
        return np.split(self.z, bounds)


def assemble_record(x, insert_counts, delete_flags, insert_bits) -> TransmissionRecord:
    """Build the record implied by explicit randomness draws.

    This is the deterministic core of the transmitter; `transmit` feeds it
    freshly sampled draws, tests feed it forced ones.
    """
    x = as_bits(x)
    N = np.asarray(insert_counts, dtype=np.int64)
    D = np.asarray(delete_flags, dtype=bool)
    bits = as_bits(insert_bits)
    if N.shape != x.shape or D.shape != x.shape:
        raise IntegrityError("insert_counts and delete_flags must match x in length")
    if np.any(N < 0):
        raise IntegrityError("insertion counts must be nonnegative")
    if bits.size != int(N.sum()):
        raise IntegrityError(f"expected {int(N.sum())} insertion bits, got {bits.size}")
    lengths = N + (~D).astype(np.int64)
    total = int(lengths.sum())
    z = np.empty(total, dtype=np.uint8)
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1])).astype(np.int64)
    keep = ~D
    z[starts[keep]] = x[keep]
    mask = np.ones(total, dtype=bool)
    mask[starts[keep]] = False
    z[mask] = bits
    y = np.where(D, np.uint8(ERASURE), x).astype(np.uint8)
    return TransmissionRecord(x=x, insert_counts=N, delete_flags=D, insert_bits=bits, z=z, y=y)


def transmit(x, params: ChannelParams, rng) -> TransmissionRecord:
    """Run the transmitter over x with fresh draws from rng (seed or Generator)."""
    x = as_bits(x)
    i, d = params.insertion_prob, params.deletion_prob
    rng = np.random.default_rng(rng)
    n = x.size
    # geometric failures-before-success with success probability 1-i
    N = rng.geometric(1.0 - i, size=n).astype(np.int64) - 1
    bits = rng.integers(0, 2, size=int(N.sum()), dtype=np.int64).astype(np.uint8)
    D = rng.random(n) < d
    return assemble_record(x, N, D, bits)


def resynchronize(record: TransmissionRecord) -> np.ndarray:
    """Receiver-side output: erasures at deletions, x elsewhere.

    Reconstructed from the segments and the shared draws (N, D) only; the
    transmitted x is not consulted.
    """
    N = record.insert_counts
    D = record.delete_flags
    lengths = N + (~D).astype(np.int64)
    if int(lengths.sum()) != record.z.size:
        raise IntegrityError("segment lengths inconsistent with flat output")
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1])).astype(np.int64)
    y = np.full(record.n, np.uint8(ERASURE))
    keep = ~D
    y[keep] = record.z[starts[keep]]
    return y


def apply_erasure_channel(x, d: float, rng) -> np.ndarray:
    """Memoryless erasure channel: the intended receiver's equivalent view."""
    x = as_bits(x)
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"erasure probability must lie in [0,1], got {d}")
    rng = np.random.default_rng(rng)
    return np.where(rng.random(x.size) < d, np.uint8(ERASURE), x).astype(np.uint8)


def epsilon_delete(y) -> np.ndarray:
    """Drop all erasure symbols; erasure followed by this equals deletion."""
    y = np.asarray(y, dtype=np.uint8)
    return y[y != ERASURE]


def expected_length(i: float, d: float, n: int) -> float:
    """Expected flat output length n(1-(1-i)d)/(1-i)."""
    if not 0.0 <= i < 1.0:
        raise ValueError(f"insertion probability must lie in [0,1), got {i}")
    return n * (1.0 - (1.0 - i) * d) / (1.0 - i)


def effective_rate(i: float, d: float) -> float:
    """Input symbols per transmitted symbol, (1-i)/(1-(1-i)d); 0 at i=1."""
    if i == 1.0:
        return 0.0
    denom = 1.0 - (1.0 - i) * d
    if denom == 0.0:
        raise ValueError("effective rate undefined: expected output length is 0")
    return (1.0 - i) / denom
